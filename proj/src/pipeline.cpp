#include "gsopt/pipeline.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>

namespace gsopt {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Decomposition: return "decomposition";
        case Stage::Clustering: return "clustering";
        case Stage::FinalMatch: return "final_match";
    }
    return "?";
}

double report_value(const SelectionSolution& sol) {
    if (sol.objective_kind == Objective::MaxData) return sol.objective_value;
    return sol.objective_value / kSecondsPerHour;
}

namespace {

StageReport make_stage(Stage stage, const std::vector<double>& values) {
    StageReport report;
    report.stage = stage;
    report.count = static_cast<int>(values.size());
    if (values.empty()) return report;
    report.min = values[0];
    report.max = values[0];
    double sum = 0.0;
    for (double v : values) {
        report.min = std::min(report.min, v);
        report.max = std::max(report.max, v);
        sum += v;
    }
    report.mean = sum / static_cast<double>(values.size());
    return report;
}

// For min-max-gap, a satellite invisible to the whole candidate pool makes the
// instance infeasible; the solver alone cannot see satellites with no contacts.
void check_gap_coverage(const ScenarioConfig& scenario, const StationCatalog& catalog,
                        const std::vector<Satellite>& satellites,
                        const std::vector<ContactWindow>& contacts) {
    if (scenario.objective != Objective::MinMaxGap || satellites.empty()) return;
    std::set<std::string> pool_ids;
    for (const auto& s : catalog.stations_of(scenario.candidate_pool)) pool_ids.insert(s.id);
    std::set<std::string> covered;
    for (const auto& c : contacts)
        if (pool_ids.count(c.station_id)) covered.insert(c.satellite_id);
    for (const auto& sat : satellites)
        if (!covered.count(sat.id))
            throw InfeasibleError("satellite '" + sat.id +
                                  "' has no candidate-pool contact in the horizon");
}

// Normalized per-window decomposition values in report units. MaxData window
// value sums the (already mission-scaled) per-satellite subproblem values;
// MinMaxGap takes the worst satellite in the window, unscaled.
std::map<int, double> window_values(const std::vector<SubproblemResult>& results,
                                    Objective objective) {
    std::map<int, double> values;
    for (const auto& res : results) {
        if (!res.solution) continue;
        const int w = res.spec->window_index;
        const double v = objective == Objective::MaxData
                             ? res.solution->objective_value
                             : res.solution->objective_value / kSecondsPerHour;
        auto [it, inserted] = values.emplace(w, v);
        if (!inserted) {
            if (objective == Objective::MaxData)
                it->second += v;
            else
                it->second = std::max(it->second, v);
        }
    }
    return values;
}

// Representative solution for the decomposed-IP label: the best window's
// aggregate value attached to that window's best subproblem selection. The
// value approximates the full problem (the label is not directly comparable).
SelectionSolution decomposed_solution(const std::vector<SubproblemResult>& results,
                                      const std::map<int, double>& per_window,
                                      Objective objective) {
    if (per_window.empty())
        throw InfeasibleError("ip-decomposed: every subproblem was infeasible");
    int best_window = per_window.begin()->first;
    double best_value = per_window.begin()->second;
    for (const auto& [w, v] : per_window) {
        const bool better = objective == Objective::MaxData ? v > best_value : v < best_value;
        if (better) {
            best_window = w;
            best_value = v;
        }
    }

    const SubproblemResult* representative = nullptr;
    for (const auto& res : results) {
        if (!res.solution || res.spec->window_index != best_window) continue;
        if (!representative) {
            representative = &res;
            continue;
        }
        // MaxData: the spec contributing the most data. MinMaxGap: the
        // bottleneck satellite (the one attaining the window's max gap).
        if (res.solution->objective_value > representative->solution->objective_value)
            representative = &res;
    }

    SelectionSolution sol = *representative->solution;
    sol.method_label = MethodLabel::IpDecomposed;
    sol.objective_value = objective == Objective::MaxData ? best_value
                                                          : best_value * kSecondsPerHour;
    return sol;
}

} // namespace

RunResult run_scenario(const ScenarioConfig& scenario, const StationCatalog& catalog,
                       const std::vector<Satellite>& satellites,
                       const std::vector<ContactWindow>& contacts, MethodLabel method,
                       std::uint64_t seed, int workers) {
    validate_scenario_against_catalog(scenario, catalog);
    check_gap_coverage(scenario, catalog, satellites, contacts);

    RunResult result;

    if (method == MethodLabel::IpOptimal) {
        const auto pool = catalog.stations_of(scenario.candidate_pool);
        result.solution = solve_exact(scenario, pool, contacts, catalog);
        const double v = report_value(result.solution);
        result.stages.push_back(make_stage(Stage::FinalMatch, {v}));
        return result;
    }

    const auto specs = make_subproblems(scenario, satellites, catalog);
    const auto sub_results = solve_subproblems_full(specs, contacts, scenario, catalog, workers);
    result.points = selection_points(sub_results, catalog);

    const auto per_window = window_values(sub_results, scenario.objective);
    {
        std::vector<double> values;
        for (const auto& [w, v] : per_window) values.push_back(v);
        result.stages.push_back(make_stage(Stage::Decomposition, values));
    }

    if (method == MethodLabel::IpDecomposed) {
        result.solution = decomposed_solution(sub_results, per_window, scenario.objective);
        return result;
    }

    if (result.points.empty())
        throw InfeasibleError("pipeline: no subproblem produced a selection to cluster");

    const int n = scenario.n_stations;
    const auto& grid = default_epsilon_grid_deg();

    // Clustering-stage ranges: raw centroids evaluated as virtual stations,
    // one value per epsilon that yields enough clusters.
    if ((method == MethodLabel::DbscanHungarian || method == MethodLabel::DbscanOnly) &&
        !satellites.empty()) {
        const auto eph = build_ephemeris_grids(satellites, scenario.t_sim_start,
                                               scenario.t_sim_end, 10.0);
        std::vector<double> cluster_values;
        for (double eps : grid) {
            const ClusterSet set = dbscan(result.points, eps, 2);
            if (static_cast<int>(set.clusters.size()) < n) continue;
            std::vector<int> order(set.clusters.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (set.clusters[a].size != set.clusters[b].size)
                    return set.clusters[a].size > set.clusters[b].size;
                return a < b;
            });
            std::vector<std::pair<double, double>> centers;
            for (int i = 0; i < n; ++i)
                centers.emplace_back(set.clusters[order[i]].centroid_lat_deg,
                                     set.clusters[order[i]].centroid_lon_deg);
            try {
                cluster_values.push_back(
                    report_value(evaluate_centroids_as_stations(centers, scenario, catalog, eph)));
            } catch (const InfeasibleError&) {
                // Centers that cannot cover every satellite contribute no value.
            }
        }
        result.stages.push_back(make_stage(Stage::Clustering, cluster_values));
    }

    const auto final = select_final_stations(result.points, scenario, catalog, contacts,
                                             satellites, method, seed, grid);
    result.solution = final.solution;
    result.clusters = final.clusters;
    result.epsilon_used = final.epsilon_used;

    if (method == MethodLabel::DbscanHungarian) {
        // Final-match ranges across the epsilon grid.
        const auto pool = matching_pool(scenario, catalog);
        std::vector<double> match_values;
        for (double eps : grid) {
            const ClusterSet set = dbscan(result.points, eps, 2);
            if (static_cast<int>(set.clusters.size()) < n) continue;
            std::vector<int> order(set.clusters.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (set.clusters[a].size != set.clusters[b].size)
                    return set.clusters[a].size > set.clusters[b].size;
                return a < b;
            });
            std::vector<std::pair<double, double>> centers;
            for (int i = 0; i < n; ++i)
                centers.emplace_back(set.clusters[order[i]].centroid_lat_deg,
                                     set.clusters[order[i]].centroid_lon_deg);
            try {
                const Assignment assignment = hungarian_match(centers, pool);
                std::vector<std::string> ids;
                for (const auto& [idx, sid] : assignment.pairs) ids.push_back(sid);
                std::sort(ids.begin(), ids.end());
                match_values.push_back(
                    report_value(evaluate_station_set(ids, contacts, scenario, catalog)));
            } catch (const InfeasibleError&) {
            }
        }
        if (final.kmedoids_fallback) match_values.push_back(report_value(final.solution));
        result.stages.push_back(make_stage(Stage::FinalMatch, match_values));
    } else if (method == MethodLabel::KMedoids) {
        result.stages.push_back(make_stage(Stage::FinalMatch, {report_value(final.solution)}));
    }

    return result;
}

SweepResult sweep_walker(const ScenarioConfig& scenario_template, const StationCatalog& catalog,
                         const SweepOptions& options) {
    validate_scenario(scenario_template);
    if (options.max_planes < 1 || options.max_stations < 1)
        throw InputError("sweep: grid bounds must be >= 1");
    if (options.methods.empty()) throw InputError("sweep: no methods given");

    // Contacts are computed once per constellation size over every station the
    // run may evaluate (candidate pool plus expansion pool).
    std::vector<GroundStation> all_stations = catalog.stations_of(scenario_template.candidate_pool);
    {
        const auto expansion = matching_pool(scenario_template, catalog);
        std::set<std::string> seen;
        for (const auto& s : all_stations) seen.insert(s.id);
        for (const auto& s : expansion)
            if (seen.insert(s.id).second) all_stations.push_back(s);
        std::sort(all_stations.begin(), all_stations.end(),
                  [](const GroundStation& a, const GroundStation& b) { return a.id < b.id; });
    }

    const int sizes = options.max_planes;
    std::vector<std::vector<Satellite>> sats_by_size(static_cast<size_t>(sizes) + 1);
    std::vector<std::vector<ContactWindow>> contacts_by_size(static_cast<size_t>(sizes) + 1);
    {
        std::atomic<int> cursor{1};
        auto build = [&]() {
            while (true) {
                const int size = cursor.fetch_add(1);
                if (size > sizes) break;
                auto sats = generate_walker_star(options.altitude_km, options.eccentricity,
                                                 options.inclination_deg, size, 1,
                                                 options.datarate_gbps,
                                                 scenario_template.t_sim_start);
                auto contacts = compute_contacts(sats, all_stations, scenario_template.t_sim_start,
                                                 scenario_template.t_sim_end,
                                                 scenario_template.elevation_mask_deg);
                contacts = filter_contacts(contacts, scenario_template.t_min_s);
                sats_by_size[static_cast<size_t>(size)] = std::move(sats);
                contacts_by_size[static_cast<size_t>(size)] = std::move(contacts);
            }
        };
        const int threads_wanted = std::min(std::max(1, options.workers), sizes);
        if (threads_wanted == 1) {
            build();
        } else {
            std::vector<std::thread> threads;
            for (int t = 0; t < threads_wanted; ++t) threads.emplace_back(build);
            for (auto& t : threads) t.join();
        }
    }

    struct CellTask {
        int sats;
        int n;
        size_t method_index;
    };
    std::vector<CellTask> tasks;
    for (int size = 1; size <= sizes; ++size)
        for (int n = 1; n <= options.max_stations; ++n)
            for (size_t mi = 0; mi < options.methods.size(); ++mi)
                tasks.push_back({size, n, mi});

    SweepResult result;
    result.cells.resize(tasks.size());
    result.cell_solutions.resize(tasks.size());

    std::atomic<size_t> cursor{0};
    auto run_cell = [&]() {
        while (true) {
            const size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) break;
            const CellTask& task = tasks[i];
            const MethodLabel method = options.methods[task.method_index];
            ComparisonCell& cell = result.cells[i];
            cell.num_satellites = task.sats;
            cell.n_stations = task.n;
            cell.method = method;

            ScenarioConfig scenario = scenario_template;
            scenario.n_stations = task.n;
            const std::uint64_t cell_seed =
                options.seed ^ (static_cast<std::uint64_t>(task.sats) * 1000003ull +
                                static_cast<std::uint64_t>(task.n) * 1009ull +
                                static_cast<std::uint64_t>(task.method_index) * 31ull);
            try {
                const auto run = run_scenario(scenario, catalog,
                                              sats_by_size[static_cast<size_t>(task.sats)],
                                              contacts_by_size[static_cast<size_t>(task.sats)],
                                              method, cell_seed, 1);
                cell.value = report_value(run.solution);
                result.cell_solutions[i] = run.solution;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    const int thread_count = std::max(1, options.workers);
    if (thread_count == 1) {
        run_cell();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < thread_count; ++t) threads.emplace_back(run_cell);
        for (auto& t : threads) t.join();
    }

    // Deviations against the IpOptimal cell of the same (sats, n).
    std::map<std::pair<int, int>, double> optimal;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const ComparisonCell& cell = result.cells[i];
        if (cell.method == MethodLabel::IpOptimal && cell.value)
            optimal[{cell.num_satellites, cell.n_stations}] = *cell.value;
    }
    const bool max_data = scenario_template.objective == Objective::MaxData;
    for (auto& cell : result.cells) {
        if (!cell.value) {
            result.failures.push_back("sats=" + std::to_string(cell.num_satellites) +
                                      " n=" + std::to_string(cell.n_stations) + " method=" +
                                      to_string(cell.method) + ": " + cell.error);
            continue;
        }
        auto it = optimal.find({cell.num_satellites, cell.n_stations});
        if (it != optimal.end())
            cell.deviation = max_data ? it->second - *cell.value : *cell.value - it->second;
    }

    for (size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].sats == sizes && tasks[i].n == options.max_stations &&
            result.cell_solutions[i])
            result.largest_cell_solutions[to_string(options.methods[tasks[i].method_index])] =
                *result.cell_solutions[i];
    }
    return result;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

} // namespace

void write_solution_json(const std::string& path, const SelectionSolution& solution,
                         const StationCatalog& catalog) {
    write_file(path, solution_to_json(solution, catalog).dump(2) + "\n");
}

void write_stages_json(const std::string& path, const std::vector<StageReport>& stages) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
        nlohmann::ordered_json entry;
        entry["stage"] = to_string(s.stage);
        entry["min"] = s.min;
        entry["mean"] = s.mean;
        entry["max"] = s.max;
        entry["count"] = s.count;
        doc.push_back(entry);
    }
    write_file(path, doc.dump(2) + "\n");
}

void write_heatmap_csv(const std::string& path, const std::vector<ComparisonCell>& cells) {
    std::string csv = "sats,n,method,value,deviation\n";
    for (const auto& cell : cells) {
        if (!cell.value) continue; // failures are recorded in the sweep JSON
        csv += std::to_string(cell.num_satellites) + "," + std::to_string(cell.n_stations) + "," +
               to_string(cell.method) + "," + format_value(*cell.value) + ",";
        if (cell.deviation) csv += format_value(*cell.deviation);
        csv += "\n";
    }
    write_file(path, csv);
}

void write_sweep_json(const std::string& path, const SweepResult& result) {
    nlohmann::ordered_json doc;
    doc["cells"] = nlohmann::ordered_json::array();
    for (const auto& cell : result.cells) {
        nlohmann::ordered_json entry;
        entry["sats"] = cell.num_satellites;
        entry["n"] = cell.n_stations;
        entry["method"] = to_string(cell.method);
        entry["value"] = cell.value ? nlohmann::ordered_json(*cell.value)
                                    : nlohmann::ordered_json(nullptr);
        entry["deviation"] = cell.deviation ? nlohmann::ordered_json(*cell.deviation)
                                            : nlohmann::ordered_json(nullptr);
        if (!cell.error.empty()) entry["error"] = cell.error;
        doc["cells"].push_back(entry);
    }
    doc["failures"] = result.failures;
    write_file(path, doc.dump(2) + "\n");
}

void write_clusters_json(const std::string& path, const ClusterSet& clusters,
                         const std::vector<SelectionPoint>& points) {
    write_file(path, clusters_to_json(clusters, points).dump(2) + "\n");
}

void write_geojson(const std::string& path,
                   const std::map<std::string, SelectionSolution>& solutions_by_method,
                   const StationCatalog& catalog,
                   const std::vector<std::pair<double, double>>& centroids,
                   const std::vector<int>& centroid_members,
                   const std::string& centroid_method) {
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = nlohmann::ordered_json::array();
    for (const auto& [method, solution] : solutions_by_method) {
        int rank = 0;
        for (const auto& sid : solution.station_ids) {
            const GroundStation* st = catalog.find_station(sid);
            if (!st) continue; // virtual stations carry no catalog coordinates
            nlohmann::ordered_json feature;
            feature["type"] = "Feature";
            feature["geometry"]["type"] = "Point";
            feature["geometry"]["coordinates"] = {st->longitude_deg, st->latitude_deg};
            feature["properties"]["method"] = method;
            feature["properties"]["kind"] = "station";
            feature["properties"]["rank"] = rank++;
            feature["properties"]["id"] = st->id;
            feature["properties"]["provider"] = st->provider_id;
            doc["features"].push_back(feature);
        }
    }
    for (size_t i = 0; i < centroids.size(); ++i) {
        nlohmann::ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"]["type"] = "Point";
        feature["geometry"]["coordinates"] = {centroids[i].second, centroids[i].first};
        feature["properties"]["method"] = centroid_method;
        feature["properties"]["kind"] = "centroid";
        feature["properties"]["rank"] = static_cast<int>(i);
        if (i < centroid_members.size()) feature["properties"]["members"] = centroid_members[i];
        doc["features"].push_back(feature);
    }
    write_file(path, doc.dump(2) + "\n");
}

} // namespace gsopt
