#include "gsopt/scalable.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>

namespace gsopt {

std::vector<std::pair<double, double>> make_windows(double t_sim_start, double t_sim_end,
                                                    double dt_s, double overlap_s) {
    if (!(dt_s > overlap_s) || overlap_s < 0.0)
        throw InputError("make_windows: require dt > overlap >= 0");
    if (t_sim_end - t_sim_start < dt_s)
        throw InputError("make_windows: horizon shorter than the window length");
    const double stride = dt_s - overlap_s;
    std::vector<std::pair<double, double>> windows;
    for (double start = t_sim_start; start + dt_s < t_sim_end; start += stride)
        windows.emplace_back(start, start + dt_s);
    windows.emplace_back(t_sim_end - dt_s, t_sim_end); // last window ends at the horizon
    return windows;
}

std::vector<SubproblemSpec> make_subproblems(const ScenarioConfig& scenario,
                                             const std::vector<Satellite>& satellites,
                                             const StationCatalog& catalog) {
    const auto windows = make_windows(scenario.t_sim_start, scenario.t_sim_end,
                                      scenario.window_length_s, scenario.window_overlap_s);
    std::vector<std::string> all_sats;
    for (const auto& s : satellites) all_sats.push_back(s.id);
    std::sort(all_sats.begin(), all_sats.end());

    std::vector<std::string> pool_ids;
    for (const auto& s : catalog.stations_of(scenario.candidate_pool)) pool_ids.push_back(s.id);

    std::vector<SubproblemSpec> specs;
    for (size_t w = 0; w < windows.size(); ++w) {
        if (scenario.decomposition_mode == DecompositionMode::TemporalOnly) {
            SubproblemSpec spec;
            spec.window_index = static_cast<int>(w);
            spec.t_start = windows[w].first;
            spec.t_end = windows[w].second;
            spec.satellite_ids = all_sats;
            spec.pool = pool_ids;
            specs.push_back(std::move(spec));
        } else {
            for (const auto& sat : all_sats) {
                SubproblemSpec spec;
                spec.window_index = static_cast<int>(w);
                spec.t_start = windows[w].first;
                spec.t_end = windows[w].second;
                spec.satellite_ids = {sat};
                spec.pool = pool_ids;
                specs.push_back(std::move(spec));
            }
        }
    }
    return specs;
}

namespace {

// Restrict contacts to a spec: its satellites, its station pool, its window.
std::vector<ContactWindow> spec_contacts(const SubproblemSpec& spec,
                                         const std::vector<ContactWindow>& contacts,
                                         const ScenarioConfig& scenario) {
    std::set<std::string> pool_ids(spec.pool.begin(), spec.pool.end());
    std::set<std::string> sat_ids(spec.satellite_ids.begin(), spec.satellite_ids.end());

    std::vector<ContactWindow> picked;
    for (const auto& c : contacts)
        if (sat_ids.count(c.satellite_id) && pool_ids.count(c.station_id)) picked.push_back(c);
    auto clipped = clip_contacts(picked, spec.t_start, spec.t_end);
    return filter_contacts(clipped, scenario.t_min_s);
}

ScenarioConfig scenario_for_window(const ScenarioConfig& scenario, double t_start, double t_end) {
    ScenarioConfig window_scenario = scenario;
    window_scenario.t_sim_start = t_start;
    window_scenario.t_sim_end = t_end;
    return window_scenario;
}

} // namespace

std::vector<SubproblemResult> solve_subproblems_full(const std::vector<SubproblemSpec>& specs,
                                                     const std::vector<ContactWindow>& contacts,
                                                     const ScenarioConfig& scenario,
                                                     const StationCatalog& catalog, int workers) {
    std::vector<SubproblemResult> results(specs.size());
    std::vector<std::string> errors(specs.size());
    std::atomic<size_t> cursor{0};

    auto worker = [&]() {
        while (true) {
            const size_t i = cursor.fetch_add(1);
            if (i >= specs.size()) break;
            const SubproblemSpec& spec = specs[i];
            results[i].spec = &spec;
            try {
                const auto local = spec_contacts(spec, contacts, scenario);
                const auto window_scenario =
                    scenario_for_window(scenario, spec.t_start, spec.t_end);
                std::vector<GroundStation> pool;
                for (const auto& sid : spec.pool) {
                    const GroundStation* st = catalog.find_station(sid);
                    if (!st) throw InputError("subproblem pool references unknown station '" +
                                              sid + "'");
                    pool.push_back(*st);
                }
                results[i].solution = solve_exact(window_scenario, pool, local, catalog);
            } catch (const InfeasibleError& e) {
                // A window may simply not see some satellite from L^D; the
                // aggregation tolerates missing specs.
                std::cerr << "[gsopt] subproblem window " << spec.window_index
                          << " skipped (infeasible): " << e.what() << '\n';
            } catch (const std::exception& e) {
                errors[i] = "subproblem window " + std::to_string(spec.window_index) + ": " +
                            e.what();
            }
        }
    };

    const int thread_count = std::max(1, workers);
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (const auto& err : errors)
        if (!err.empty()) throw InputError(err);
    return results;
}

std::vector<SelectionPoint> selection_points(const std::vector<SubproblemResult>& results,
                                             const StationCatalog& catalog) {
    // Canonical order: spec order, then station id (solutions are id-sorted).
    std::vector<SelectionPoint> points;
    for (const auto& res : results) {
        if (!res.solution) continue;
        for (const auto& sid : res.solution->station_ids) {
            const GroundStation* st = catalog.find_station(sid);
            SelectionPoint p;
            p.latitude_deg = st->latitude_deg;
            p.longitude_deg = st->longitude_deg;
            p.window_index = res.spec->window_index;
            p.satellite_ids = res.spec->satellite_ids;
            p.station_id = sid;
            points.push_back(std::move(p));
        }
    }
    return points;
}

std::vector<SelectionPoint> solve_subproblems(const std::vector<SubproblemSpec>& specs,
                                              const std::vector<ContactWindow>& contacts,
                                              const ScenarioConfig& scenario,
                                              const StationCatalog& catalog, int workers) {
    return selection_points(solve_subproblems_full(specs, contacts, scenario, catalog, workers),
                            catalog);
}

double central_angle_deg(double lat1, double lon1, double lat2, double lon2) {
    const double p1 = lat1 * kDegToRad;
    const double p2 = lat2 * kDegToRad;
    const double dp = (lat2 - lat1) * kDegToRad;
    const double dl = (lon2 - lon1) * kDegToRad;
    const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                     std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * std::asin(std::min(1.0, std::sqrt(h))) * kRadToDeg;
}

double geodesic_distance(double lat1, double lon1, double lat2, double lon2) {
    return kEarthMeanRadiusKm * central_angle_deg(lat1, lon1, lat2, lon2) * kDegToRad;
}

ClusterSet dbscan(const std::vector<SelectionPoint>& points, double epsilon_deg, int min_points) {
    if (!(epsilon_deg > 0.0)) throw InputError("dbscan: epsilon must be positive");
    if (min_points < 1) throw InputError("dbscan: min_points must be >= 1");

    const int n = static_cast<int>(points.size());
    auto neighbors_of = [&](int p) {
        std::vector<int> out;
        for (int q = 0; q < n; ++q) {
            if (central_angle_deg(points[p].latitude_deg, points[p].longitude_deg,
                                  points[q].latitude_deg, points[q].longitude_deg) <= epsilon_deg)
                out.push_back(q); // includes p itself
        }
        return out;
    };

    constexpr int kUnvisited = -2, kNoise = -1;
    std::vector<int> labels(n, kUnvisited);
    int cluster_id = -1;
    for (int p = 0; p < n; ++p) {
        if (labels[p] != kUnvisited) continue;
        auto seeds = neighbors_of(p);
        if (static_cast<int>(seeds.size()) < min_points) {
            labels[p] = kNoise;
            continue;
        }
        ++cluster_id;
        labels[p] = cluster_id;
        std::deque<int> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const int q = queue.front();
            queue.pop_front();
            if (labels[q] == kNoise) labels[q] = cluster_id; // border point claimed
            if (labels[q] != kUnvisited) continue;
            labels[q] = cluster_id;
            const auto q_neighbors = neighbors_of(q);
            if (static_cast<int>(q_neighbors.size()) >= min_points)
                queue.insert(queue.end(), q_neighbors.begin(), q_neighbors.end());
        }
    }

    ClusterSet out;
    out.labels = labels;
    out.epsilon_deg = epsilon_deg;
    out.min_points = min_points;
    out.clusters.resize(static_cast<size_t>(cluster_id + 1));
    for (int p = 0; p < n; ++p) {
        if (labels[p] == kNoise) {
            out.noise_indices.push_back(p);
        } else {
            out.clusters[static_cast<size_t>(labels[p])].member_indices.push_back(p);
        }
    }
    for (auto& cluster : out.clusters) {
        cluster.size = static_cast<int>(cluster.member_indices.size());
        const auto centroid = cluster_centroid(points, cluster.member_indices);
        cluster.centroid_lat_deg = centroid.first;
        cluster.centroid_lon_deg = centroid.second;
    }
    return out;
}

std::pair<double, double> cluster_centroid(const std::vector<SelectionPoint>& points,
                                           const std::vector<int>& member_indices) {
    if (member_indices.empty()) throw InputError("cluster_centroid: no members");
    Vec3 sum{0.0, 0.0, 0.0};
    for (int idx : member_indices) {
        const double lat = points[static_cast<size_t>(idx)].latitude_deg * kDegToRad;
        const double lon = points[static_cast<size_t>(idx)].longitude_deg * kDegToRad;
        sum = sum + Vec3{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                         std::sin(lat)};
    }
    const double norm = sum.norm();
    if (norm < 1e-12) {
        const auto& first = points[static_cast<size_t>(member_indices[0])];
        std::cerr << "[gsopt] degenerate centroid (antipodal members); using first member\n";
        return {first.latitude_deg, first.longitude_deg};
    }
    const double lat = std::asin(sum.z / norm) * kRadToDeg;
    const double lon = std::atan2(sum.y, sum.x) * kRadToDeg;
    return {lat, lon};
}

namespace {

struct DistinctPoints {
    std::vector<std::pair<double, double>> coords; // first-occurrence order
    std::vector<int> first_index;                  // into the original points
    std::vector<std::vector<int>> occurrences;     // original indices per coord
};

DistinctPoints distinct_coords(const std::vector<SelectionPoint>& points) {
    DistinctPoints d;
    std::map<std::pair<double, double>, int> seen;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const std::pair<double, double> key{points[static_cast<size_t>(i)].latitude_deg,
                                            points[static_cast<size_t>(i)].longitude_deg};
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(key, static_cast<int>(d.coords.size()));
            d.coords.push_back(key);
            d.first_index.push_back(i);
            d.occurrences.push_back({i});
        } else {
            d.occurrences[static_cast<size_t>(it->second)].push_back(i);
        }
    }
    return d;
}

} // namespace

std::vector<int> kmedoids(const std::vector<SelectionPoint>& points, int k, std::uint64_t seed) {
    const auto distinct = distinct_coords(points);
    const int m = static_cast<int>(distinct.coords.size());
    if (k < 1 || k > m)
        throw InputError("kmedoids: k must lie in [1, distinct point count = " +
                         std::to_string(m) + "]");

    // Pairwise distances between distinct coordinates, weighted by multiplicity.
    std::vector<double> weight(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        weight[static_cast<size_t>(i)] =
            static_cast<double>(distinct.occurrences[static_cast<size_t>(i)].size());
    std::vector<std::vector<double>> dist(static_cast<size_t>(m),
                                          std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double d = geodesic_distance(distinct.coords[static_cast<size_t>(i)].first,
                                               distinct.coords[static_cast<size_t>(i)].second,
                                               distinct.coords[static_cast<size_t>(j)].first,
                                               distinct.coords[static_cast<size_t>(j)].second);
            dist[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
            dist[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
        }

    auto total_cost = [&](const std::vector<int>& medoids) {
        double cost = 0.0;
        for (int i = 0; i < m; ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int mi : medoids)
                nearest = std::min(nearest, dist[static_cast<size_t>(i)][static_cast<size_t>(mi)]);
            cost += weight[static_cast<size_t>(i)] * nearest;
        }
        return cost;
    };

    // Seeded random initialization over the distinct coordinates.
    std::mt19937_64 rng(seed);
    std::vector<int> candidates(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) candidates[static_cast<size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const size_t j = static_cast<size_t>(i) +
                         static_cast<size_t>(rng() % static_cast<std::uint64_t>(m - i));
        std::swap(candidates[static_cast<size_t>(i)], candidates[j]);
    }
    std::vector<int> medoids(candidates.begin(), candidates.begin() + k);
    std::vector<char> is_medoid(static_cast<size_t>(m), 0);
    for (int mi : medoids) is_medoid[static_cast<size_t>(mi)] = 1;

    // Best-improvement swap loop (PAM).
    double current = total_cost(medoids);
    while (true) {
        double best_cost = current;
        int best_slot = -1, best_candidate = -1;
        for (int slot = 0; slot < k; ++slot) {
            const int original = medoids[static_cast<size_t>(slot)];
            for (int cand = 0; cand < m; ++cand) {
                if (is_medoid[static_cast<size_t>(cand)]) continue;
                medoids[static_cast<size_t>(slot)] = cand;
                const double cost = total_cost(medoids);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_slot = slot;
                    best_candidate = cand;
                }
            }
            medoids[static_cast<size_t>(slot)] = original;
        }
        if (best_slot < 0) break;
        is_medoid[static_cast<size_t>(medoids[static_cast<size_t>(best_slot)])] = 0;
        medoids[static_cast<size_t>(best_slot)] = best_candidate;
        is_medoid[static_cast<size_t>(best_candidate)] = 1;
        current = best_cost;
    }

    std::vector<int> out;
    for (int mi : medoids) out.push_back(distinct.first_index[static_cast<size_t>(mi)]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> lap_solve(const std::vector<std::vector<double>>& cost, double* total_cost) {
    const int rows = static_cast<int>(cost.size());
    if (rows == 0) {
        if (total_cost) *total_cost = 0.0;
        return {};
    }
    const int cols = static_cast<int>(cost[0].size());
    if (rows > cols) throw InputError("lap_solve: more rows than columns");
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != cols) throw InputError("lap_solve: ragged cost matrix");

    // Shortest augmenting path with potentials (1-based helpers).
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(rows) + 1, 0.0);
    std::vector<double> v(static_cast<size_t>(cols) + 1, 0.0);
    std::vector<int> match(static_cast<size_t>(cols) + 1, 0); // column -> row
    std::vector<int> way(static_cast<size_t>(cols) + 1, 0);

    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(cols) + 1, kInf);
        std::vector<char> used(static_cast<size_t>(cols) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = match[static_cast<size_t>(j0)];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= cols; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                                   u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<size_t>(rows), -1);
    for (int j = 1; j <= cols; ++j)
        if (match[static_cast<size_t>(j)] != 0)
            row_to_col[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)] = j - 1;
    double total = 0.0;
    for (int i = 0; i < rows; ++i)
        total += cost[static_cast<size_t>(i)][static_cast<size_t>(row_to_col[static_cast<size_t>(i)])];
    if (total_cost) *total_cost = total;
    return row_to_col;
}

Assignment hungarian_match(const std::vector<std::pair<double, double>>& centroids,
                           const std::vector<GroundStation>& candidate_sites) {
    if (centroids.size() > candidate_sites.size())
        throw InputError("hungarian_match: more centroids than candidate sites");
    std::vector<std::vector<double>> cost(centroids.size(),
                                          std::vector<double>(candidate_sites.size(), 0.0));
    for (size_t i = 0; i < centroids.size(); ++i)
        for (size_t j = 0; j < candidate_sites.size(); ++j)
            cost[i][j] = geodesic_distance(centroids[i].first, centroids[i].second,
                                           candidate_sites[j].latitude_deg,
                                           candidate_sites[j].longitude_deg);
    Assignment out;
    const auto row_to_col = lap_solve(cost, &out.total_cost_km);
    for (size_t i = 0; i < row_to_col.size(); ++i)
        out.pairs.emplace_back(static_cast<int>(i),
                               candidate_sites[static_cast<size_t>(row_to_col[i])].id);
    return out;
}

std::vector<GroundStation> matching_pool(const ScenarioConfig& scenario,
                                         const StationCatalog& catalog) {
    if (!scenario.full_pool.empty()) return catalog.stations_of(scenario.full_pool);
    return catalog.stations_of(scenario.candidate_pool);
}

namespace {

// Ranked top-n centroids: clusters ordered by member count, ties by cluster id.
std::vector<std::pair<double, double>> top_centroids(const ClusterSet& set, int n,
                                                     std::vector<int>* members = nullptr) {
    std::vector<int> order(set.clusters.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ca = set.clusters[static_cast<size_t>(a)];
        const auto& cb = set.clusters[static_cast<size_t>(b)];
        if (ca.size != cb.size) return ca.size > cb.size;
        return a < b;
    });
    std::vector<std::pair<double, double>> centroids;
    for (int i = 0; i < n; ++i) {
        const auto& c = set.clusters[static_cast<size_t>(order[static_cast<size_t>(i)])];
        centroids.emplace_back(c.centroid_lat_deg, c.centroid_lon_deg);
        if (members) members->push_back(c.size);
    }
    return centroids;
}

} // namespace

SelectionSolution evaluate_centroids_as_stations(
    const std::vector<std::pair<double, double>>& centers, const ScenarioConfig& scenario,
    const StationCatalog& catalog, const std::vector<EphemerisGrid>& grids) {
    if (grids.empty())
        throw InputError("dbscan-only evaluation needs satellite ephemerides to compute "
                         "contacts for virtual stations");
    const auto pool = matching_pool(scenario, catalog);
    double rate = 0.0;
    for (const auto& s : pool) rate = std::max(rate, s.datarate_gbps);

    std::vector<GroundStation> virtual_stations;
    for (size_t i = 0; i < centers.size(); ++i) {
        GroundStation g;
        char id[32];
        std::snprintf(id, sizeof(id), "virtual-%02zu", i);
        g.id = id;
        g.provider_id = "virtual";
        g.name = g.id;
        g.latitude_deg = centers[i].first;
        g.longitude_deg = centers[i].second;
        g.altitude_m = 0.0;
        g.datarate_gbps = rate;
        virtual_stations.push_back(std::move(g));
    }
    auto contacts = compute_contacts(grids, virtual_stations, scenario.elevation_mask_deg);
    contacts = filter_contacts(contacts, scenario.t_min_s);

    std::vector<std::string> ids;
    for (const auto& g : virtual_stations) ids.push_back(g.id);
    SelectionSolution sol = evaluate_station_set(ids, contacts, scenario, catalog);
    sol.provider_ids = {"virtual"};
    sol.method_label = MethodLabel::DbscanOnly;
    return sol;
}

FinalSelection select_final_stations(const std::vector<SelectionPoint>& points,
                                     const ScenarioConfig& scenario, const StationCatalog& catalog,
                                     const std::vector<ContactWindow>& contacts,
                                     const std::vector<Satellite>& satellites, MethodLabel method,
                                     std::uint64_t seed,
                                     const std::vector<double>& epsilon_grid_deg) {
    const int n = scenario.n_stations;
    if (points.empty())
        throw InfeasibleError("select_final_stations: no subproblem selections to cluster");

    FinalSelection result;
    const auto pool = matching_pool(scenario, catalog);

    auto evaluate_matched = [&](const std::vector<std::pair<double, double>>& centers) {
        const Assignment assignment = hungarian_match(centers, pool);
        std::vector<std::string> ids;
        for (const auto& [idx, sid] : assignment.pairs) ids.push_back(sid);
        std::sort(ids.begin(), ids.end());
        SelectionSolution sol = evaluate_station_set(ids, contacts, scenario, catalog);
        return sol;
    };

    auto coordinate_multiplicity = [&](const std::pair<double, double>& c) {
        int count = 0;
        for (const auto& p : points)
            if (p.latitude_deg == c.first && p.longitude_deg == c.second) ++count;
        return count;
    };

    if (method == MethodLabel::KMedoids) {
        const auto medoid_indices = kmedoids(points, n, seed);
        std::vector<std::pair<double, double>> centers;
        for (int idx : medoid_indices)
            centers.emplace_back(points[static_cast<size_t>(idx)].latitude_deg,
                                 points[static_cast<size_t>(idx)].longitude_deg);
        result.centroids = centers;
        for (const auto& c : centers) result.centroid_members.push_back(coordinate_multiplicity(c));
        result.solution = evaluate_matched(centers);
        result.solution.method_label = MethodLabel::KMedoids;
        return result;
    }

    if (method != MethodLabel::DbscanOnly && method != MethodLabel::DbscanHungarian)
        throw InputError("select_final_stations: method must be a clustering method");

    // Ascending epsilon sweep: first grid value that yields >= n clusters.
    std::optional<ClusterSet> chosen;
    for (double eps : epsilon_grid_deg) {
        ClusterSet set = dbscan(points, eps, 2);
        if (static_cast<int>(set.clusters.size()) >= n) {
            chosen = std::move(set);
            break;
        }
    }

    if (!chosen) {
        std::cerr << "[gsopt] dbscan produced fewer than " << n
                  << " clusters at every epsilon; falling back to k-medoids\n";
        if (method == MethodLabel::DbscanOnly)
            throw InfeasibleError("dbscan-only: fewer than n clusters at every epsilon");
        const auto medoid_indices = kmedoids(points, n, seed);
        std::vector<std::pair<double, double>> centers;
        for (int idx : medoid_indices)
            centers.emplace_back(points[static_cast<size_t>(idx)].latitude_deg,
                                 points[static_cast<size_t>(idx)].longitude_deg);
        result.centroids = centers;
        for (const auto& c : centers) result.centroid_members.push_back(coordinate_multiplicity(c));
        result.kmedoids_fallback = true;
        result.solution = evaluate_matched(centers);
        result.solution.method_label = MethodLabel::DbscanHungarian;
        return result;
    }

    result.epsilon_used = chosen->epsilon_deg;
    const auto centers = top_centroids(*chosen, n, &result.centroid_members);
    result.centroids = centers;
    result.clusters = std::move(chosen);

    if (method == MethodLabel::DbscanOnly) {
        if (satellites.empty())
            throw InputError("dbscan-only evaluation needs satellite elements");
        const auto grids = build_ephemeris_grids(satellites, scenario.t_sim_start,
                                                 scenario.t_sim_end, 10.0);
        result.solution = evaluate_centroids_as_stations(centers, scenario, catalog, grids);
        return result;
    }
    result.solution = evaluate_matched(centers);
    result.solution.method_label = MethodLabel::DbscanHungarian;
    return result;
}

nlohmann::ordered_json clusters_to_json(const ClusterSet& clusters,
                                        const std::vector<SelectionPoint>& points) {
    nlohmann::ordered_json doc;
    doc["epsilon_deg"] = clusters.epsilon_deg;
    doc["min_points"] = clusters.min_points;
    doc["points"] = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        nlohmann::ordered_json entry;
        entry["lat"] = p.latitude_deg;
        entry["lon"] = p.longitude_deg;
        entry["window"] = p.window_index;
        entry["satellites"] = p.satellite_ids;
        entry["station"] = p.station_id;
        doc["points"].push_back(entry);
    }
    doc["labels"] = clusters.labels;
    doc["centroids"] = nlohmann::ordered_json::array();
    for (const auto& c : clusters.clusters) {
        nlohmann::ordered_json entry;
        entry["lat"] = c.centroid_lat_deg;
        entry["lon"] = c.centroid_lon_deg;
        entry["members"] = c.size;
        doc["centroids"].push_back(entry);
    }
    doc["noise_count"] = clusters.noise_indices.size();
    return doc;
}

} // namespace gsopt
