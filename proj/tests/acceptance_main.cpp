// Acceptance suite: one pass/fail line per criterion, exit code = failures.
//
// Every tolerance is pinned here; the brute-force oracles live in oracles.hpp
// and never call into the solver paths they check.

#include "gsopt/pipeline.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace gsopt;
namespace fs = std::filesystem;

namespace {

int g_audits_run = 0;
int g_audit_violations = 0;

void audit(const SelectionSolution& sol, const std::vector<ContactWindow>& contacts,
           const ScenarioConfig& sc, const StationCatalog& catalog) {
    ++g_audits_run;
    const auto issues = audit_solution(sol, contacts, sc, catalog);
    if (!issues.empty()) {
        ++g_audit_violations;
        for (const auto& issue : issues) std::cerr << "      audit: " << issue << "\n";
    }
}

StationCatalog fixture_catalog() {
    return load_station_catalog(std::string(GSOPT_DATA_DIR) + "/stations.csv");
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

StationCatalog synthetic_catalog(int count) {
    StationCatalog catalog;
    std::map<std::string, std::vector<std::string>> members;
    for (int i = 0; i < count; ++i) {
        GroundStation s;
        char id[16];
        std::snprintf(id, sizeof(id), "st-%02d", i);
        s.id = id;
        s.name = id;
        s.provider_id = (i % 2 == 0) ? "prov-a" : "prov-b";
        s.latitude_deg = -75.0 + 13.0 * i;
        s.longitude_deg = -170.0 + 31.0 * i;
        s.datarate_gbps = 1.5;
        members[s.provider_id].push_back(s.id);
        catalog.stations.push_back(std::move(s));
    }
    for (auto& [pid, ids] : members) {
        Provider p;
        p.id = pid;
        p.name = pid;
        std::sort(ids.begin(), ids.end());
        p.station_ids = ids;
        catalog.providers.push_back(std::move(p));
    }
    return catalog;
}

// ---------------------------------------------------------------- criteria --

// 1. Geodesic reproduction of the paper's two checkable distances within 1%.
bool criterion_geodesic(std::string& detail) {
    const double tolhuin = geodesic_distance(-54.51, -67.12, -52.94, -70.87);
    const double bangalore = geodesic_distance(12.9, 77.37, -20.5, 57.45);
    const double err1 = std::fabs(tolhuin - 302.9) / 302.9;
    const double err2 = std::fabs(bangalore - 4289.9) / 4289.9;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Tolhuin-Punta Arenas %.1f km (err %.2f%%), Bangalore-Mauritius %.1f km (err %.2f%%)",
                  tolhuin, err1 * 100.0, bangalore, err2 * 100.0);
    detail = buf;
    return err1 < 0.01 && err2 < 0.01;
}

// 2. solve_exact == from-scratch brute force on >= 200 randomized instances.
bool criterion_exact_ground_truth(std::string& detail) {
    oracles::InstanceRng rng(0xC0FFEE);
    int checked = 0;
    int infeasible_agreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int pool_size = rng.uniform(4, 10);
        const int num_sats = rng.uniform(1, 4);
        const auto catalog = synthetic_catalog(pool_size);
        const Objective objective = trial % 2 == 0 ? Objective::MaxData : Objective::MinMaxGap;
        const int n = rng.uniform(1, 4);

        std::vector<std::string> pool_ids;
        for (const auto& s : catalog.stations) pool_ids.push_back(s.id);

        std::vector<ContactWindow> contacts;
        for (int s = 0; s < num_sats; ++s) {
            char sat_id[16];
            std::snprintf(sat_id, sizeof(sat_id), "sat-%02d", s);
            auto sat_contacts = oracles::random_contacts(rng, sat_id, pool_ids,
                                                         rng.uniform(1, 15), 86400);
            contacts.insert(contacts.end(), sat_contacts.begin(), sat_contacts.end());
        }
        canonicalize_contacts(contacts);

        ScenarioConfig sc;
        sc.t_sim_start = 0.0;
        sc.t_sim_end = 86400.0;
        sc.t_opt_start = 0.0;
        sc.t_opt_end = 7.0 * 86400.0;
        sc.window_length_s = 43200.0;
        sc.window_overlap_s = 21600.0;
        sc.t_min_s = 0.0;
        sc.n_stations = n;
        sc.objective = objective;
        sc.candidate_pool = {"prov-a", "prov-b"};

        const auto oracle =
            oracles::oracle_solve_exact(pool_ids, n, contacts, objective, 0.0, 86400.0);
        if (!oracle.feasible) {
            try {
                solve_exact(sc, catalog.stations, contacts, catalog);
                detail = "solver returned a solution where the oracle finds none";
                return false;
            } catch (const InfeasibleError&) {
                ++infeasible_agreements;
                ++checked;
                continue;
            }
        }
        const auto sol = solve_exact(sc, catalog.stations, contacts, catalog);
        const double expected =
            objective == Objective::MaxData
                ? oracle.value * (sc.t_opt_duration() / sc.t_sim_duration()) / 8.0e6
                : oracle.value;
        if (sol.station_ids != oracle.stations || sol.objective_value != expected) {
            detail = "mismatch on trial " + std::to_string(trial);
            return false;
        }
        audit(sol, contacts, sc, catalog);
        ++checked;
    }
    detail = std::to_string(checked) + " instances, value and argmax exact (" +
             std::to_string(infeasible_agreements) + " infeasible agreed)";
    return checked >= 200;
}

// 3. Scheduling oracles == exhaustive enumeration on >= 1000 instances.
bool criterion_schedulers(std::string& detail) {
    oracles::InstanceRng rng(0xBEEF);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int count = rng.uniform(1, 15);
        const auto contacts =
            oracles::random_contacts(rng, "sat-a", {"s1", "s2", "s3"}, count, 86400);

        const auto data_oracle = oracles::oracle_max_data(contacts);
        const auto data_sched = max_data_schedule(contacts, 0.0, 86400.0);
        if (data_sched.data_volume_gb != data_oracle.value_gb ||
            data_sched.chain != data_oracle.chain) {
            detail = "max_data mismatch on trial " + std::to_string(trial);
            return false;
        }

        const auto gap_oracle = oracles::oracle_min_max_gap(contacts, 0.0, 86400.0);
        const auto gap_sched = min_max_gap_schedule(contacts, 0.0, 86400.0);
        if (!gap_oracle || *gap_sched.max_gap_s != *gap_oracle) {
            detail = "min_max_gap mismatch on trial " + std::to_string(trial);
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " instances, both objectives exact";
    return checked >= 1000;
}

struct SweepBundle {
    SweepResult result;
    ScenarioConfig scenario;
    SweepOptions options;
};

SweepBundle run_walker_sweep(Objective objective, int workers, std::uint64_t seed) {
    const auto catalog = fixture_catalog();
    const std::string name =
        objective == Objective::MaxData ? "/scenario_maxdata.json" : "/scenario_minmaxgap.json";
    SweepBundle bundle;
    bundle.scenario = load_scenario(std::string(GSOPT_DATA_DIR) + name);
    bundle.options.max_planes = 6;
    bundle.options.max_stations = 6;
    bundle.options.methods = {MethodLabel::IpOptimal, MethodLabel::DbscanHungarian};
    bundle.options.seed = seed;
    bundle.options.workers = workers;
    bundle.result = sweep_walker(bundle.scenario, catalog, bundle.options);
    return bundle;
}

// Audits every solved sweep cell against the contacts it was scored on.
void audit_sweep(const SweepBundle& bundle) {
    const auto catalog = fixture_catalog();
    std::map<int, std::vector<ContactWindow>> contacts_by_size;
    for (size_t i = 0; i < bundle.result.cells.size(); ++i) {
        const auto& cell = bundle.result.cells[i];
        if (!bundle.result.cell_solutions[i]) continue;
        auto it = contacts_by_size.find(cell.num_satellites);
        if (it == contacts_by_size.end()) {
            const auto sats =
                generate_walker_star(bundle.options.altitude_km, bundle.options.eccentricity,
                                     bundle.options.inclination_deg, cell.num_satellites, 1,
                                     bundle.options.datarate_gbps, bundle.scenario.t_sim_start);
            auto contacts = compute_contacts(sats, catalog.stations, bundle.scenario.t_sim_start,
                                             bundle.scenario.t_sim_end,
                                             bundle.scenario.elevation_mask_deg);
            it = contacts_by_size
                     .emplace(cell.num_satellites,
                              filter_contacts(contacts, bundle.scenario.t_min_s))
                     .first;
        }
        ScenarioConfig sc = bundle.scenario;
        sc.n_stations = cell.n_stations;
        audit(*bundle.result.cell_solutions[i], it->second, sc, catalog);
    }
}

// 4. Paper-analogue quality gate on the 6x6 Walker sweep.
bool criterion_quality_gate(SweepBundle& maxdata_out, std::string& detail) {
    maxdata_out = run_walker_sweep(Objective::MaxData, 8, 42);
    audit_sweep(maxdata_out);

    std::map<std::pair<int, int>, double> optimal;
    for (const auto& cell : maxdata_out.result.cells)
        if (cell.method == MethodLabel::IpOptimal && cell.value)
            optimal[{cell.num_satellites, cell.n_stations}] = *cell.value;
    if (optimal.size() != 36) {
        detail = "expected 36 optimal MaxData cells, got " + std::to_string(optimal.size());
        return false;
    }
    double worst_ratio = 1.0;
    int cells_checked = 0;
    for (const auto& cell : maxdata_out.result.cells) {
        if (cell.method != MethodLabel::DbscanHungarian) continue;
        if (!cell.value) {
            detail = "MaxData pipeline cell failed: " + cell.error;
            return false;
        }
        const double opt = optimal.at({cell.num_satellites, cell.n_stations});
        const double ratio = opt > 0.0 ? *cell.value / opt : 1.0;
        worst_ratio = std::min(worst_ratio, ratio);
        ++cells_checked;
    }
    if (cells_checked != 36 || worst_ratio < 0.95) {
        char buf[120];
        std::snprintf(buf, sizeof(buf), "MaxData worst ratio %.4f over %d cells (need >= 0.95)",
                      worst_ratio, cells_checked);
        detail = buf;
        return false;
    }

    auto gap = run_walker_sweep(Objective::MinMaxGap, 8, 42);
    audit_sweep(gap);
    std::map<std::pair<int, int>, double> gap_optimal;
    for (const auto& cell : gap.result.cells)
        if (cell.method == MethodLabel::IpOptimal && cell.value)
            gap_optimal[{cell.num_satellites, cell.n_stations}] = *cell.value;
    int feasible = 0, within = 0;
    double worst_excess_h = 0.0;
    for (const auto& cell : gap.result.cells) {
        if (cell.method != MethodLabel::DbscanHungarian) continue;
        const auto it = gap_optimal.find({cell.num_satellites, cell.n_stations});
        if (it == gap_optimal.end()) continue; // infeasible for the ground truth too
        ++feasible;
        if (!cell.value) continue; // pipeline failure on a feasible cell: not within
        const double excess = *cell.value - it->second;
        if (*cell.value <= 1.05 * it->second || excess <= 0.1)
            ++within;
        else
            worst_excess_h = std::max(worst_excess_h, excess);
    }
    const double fraction = feasible > 0 ? static_cast<double>(within) / feasible : 0.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "MaxData worst ratio %.4f (36 cells); MinMaxGap %d/%d within 5%% or 0.1 h "
                  "(%.0f%%, worst excess %.3f h)",
                  worst_ratio, within, feasible, fraction * 100.0, worst_excess_h);
    detail = buf;
    return fraction >= 0.90 && feasible > 0;
}

// 5. LAP solver == permutation brute force up to 8x10.
bool criterion_hungarian(std::string& detail) {
    std::mt19937_64 rng(0xA55);
    std::uniform_real_distribution<double> value(0.0, 400.0);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int rows = 1 + static_cast<int>(rng() % 8);
        const int cols = rows + static_cast<int>(rng() % (11 - rows));
        std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
        for (auto& row : cost)
            for (auto& v : row) v = 0.25 * std::floor(value(rng));
        double total = 0.0;
        lap_solve(cost, &total);
        const double expected = oracles::oracle_lap_min_cost(cost);
        if (std::fabs(total - expected) > 1e-9) {
            detail = "LAP mismatch on trial " + std::to_string(trial);
            return false;
        }
        ++checked;
    }
    // a few full-size 8x10 instances on top
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> cost(8, std::vector<double>(10));
        for (auto& row : cost)
            for (auto& v : row) v = 0.25 * std::floor(value(rng));
        double total = 0.0;
        lap_solve(cost, &total);
        if (std::fabs(total - oracles::oracle_lap_min_cost(cost)) > 1e-9) {
            detail = "LAP mismatch on an 8x10 instance";
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " matrices up to 8x10, minimum cost exact";
    return checked >= 500;
}

// 6. DBSCAN == density-reachability closure, and input-order invariant.
bool criterion_dbscan(std::string& detail) {
    std::mt19937_64 rng(0xD85CA);
    std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-180.0, 179.0);
    int partitions_checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int count = 5 + static_cast<int>(rng() % 36);
        std::vector<SelectionPoint> points;
        for (int i = 0; i < count; ++i) {
            SelectionPoint p;
            p.latitude_deg = lat(rng);
            p.longitude_deg = lon(rng);
            points.push_back(p);
        }
        const double eps = 5.0 * (1 + static_cast<int>(rng() % 8));

        const auto set = dbscan(points, eps, 2);
        const auto oracle = oracles::oracle_dbscan_closure(points, eps, 2);
        std::set<std::set<int>> impl_clusters;
        for (const auto& c : set.clusters)
            impl_clusters.insert(std::set<int>(c.member_indices.begin(), c.member_indices.end()));
        std::set<std::set<int>> oracle_clusters(oracle.clusters.begin(), oracle.clusters.end());
        if (impl_clusters != oracle_clusters ||
            std::set<int>(set.noise_indices.begin(), set.noise_indices.end()) != oracle.noise) {
            detail = "partition mismatch on trial " + std::to_string(trial);
            return false;
        }

        // order invariance: reversed input gives the same partition
        std::vector<SelectionPoint> reversed(points.rbegin(), points.rend());
        const auto rev = dbscan(reversed, eps, 2);
        std::set<std::set<int>> rev_clusters;
        const int last = count - 1;
        for (const auto& c : rev.clusters) {
            std::set<int> mapped;
            for (int i : c.member_indices) mapped.insert(last - i);
            rev_clusters.insert(mapped);
        }
        if (rev_clusters != impl_clusters) {
            detail = "order dependence on trial " + std::to_string(trial);
            return false;
        }
        ++partitions_checked;
    }
    detail = std::to_string(partitions_checked) + " point sets, closure-exact and order-invariant";
    return partitions_checked >= 500;
}

// 7. k-medoids: no improving single swap exists (exhaustive audit).
bool criterion_kmedoids(std::string& detail) {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-180.0, 179.0);
    int audited = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int count = 5 + static_cast<int>(rng() % 16);
        std::vector<SelectionPoint> points;
        for (int i = 0; i < count; ++i) {
            SelectionPoint p;
            p.latitude_deg = lat(rng);
            p.longitude_deg = lon(rng);
            points.push_back(p);
        }
        const int k = 1 + static_cast<int>(rng() % 4);
        const auto medoids = kmedoids(points, k, rng());

        auto cost_of = [&](const std::vector<int>& meds) {
            double total = 0.0;
            for (const auto& p : points) {
                double nearest = std::numeric_limits<double>::infinity();
                for (int m : meds)
                    nearest = std::min(
                        nearest, geodesic_distance(p.latitude_deg, p.longitude_deg,
                                                   points[static_cast<size_t>(m)].latitude_deg,
                                                   points[static_cast<size_t>(m)].longitude_deg));
                total += nearest;
            }
            return total;
        };
        const double base = cost_of(medoids);
        for (size_t slot = 0; slot < medoids.size(); ++slot) {
            for (int cand = 0; cand < count; ++cand) {
                if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
                auto swapped = medoids;
                swapped[slot] = cand;
                if (cost_of(swapped) < base) {
                    detail = "improving swap exists on trial " + std::to_string(trial);
                    return false;
                }
            }
        }
        ++audited;
    }
    detail = std::to_string(audited) + " configurations, all swap-local-optimal";
    return audited >= 200;
}

// 8. Window formula: 7 d / 1 d / 12 h -> exactly 13 windows.
bool criterion_windows(std::string& detail) {
    const double day = 86400.0;
    const auto windows = make_windows(0.0, 7.0 * day, day, 0.5 * day);
    if (windows.size() != 13) {
        detail = "got " + std::to_string(windows.size()) + " windows";
        return false;
    }
    for (size_t k = 0; k < windows.size(); ++k) {
        if (windows[k].first != k * 0.5 * day || windows[k].second != windows[k].first + day) {
            detail = "window " + std::to_string(k) + " misplaced";
            return false;
        }
    }
    if (windows.back().second != 7.0 * day) {
        detail = "last window does not end at t_sim_end";
        return false;
    }
    detail = "W = 2*T_sim/dt - 1 = 13 windows at 12 h stride, last ends at t_sim_end";
    return true;
}

// 9. Sweep determinism: same seed, workers 1 vs 8, byte-identical outputs.
bool criterion_determinism(const SweepBundle& eight_workers, std::string& detail) {
    const auto catalog = fixture_catalog();
    const fs::path dir_a = "/tmp/gsopt_acceptance_w8";
    const fs::path dir_b = "/tmp/gsopt_acceptance_w1";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);

    write_heatmap_csv((dir_a / "heatmap.csv").string(), eight_workers.result.cells);
    write_sweep_json((dir_a / "sweep.json").string(), eight_workers.result);
    write_geojson((dir_a / "stations.geojson").string(),
                  eight_workers.result.largest_cell_solutions, catalog);

    const auto rerun = run_walker_sweep(Objective::MaxData, 1, 42);
    write_heatmap_csv((dir_b / "heatmap.csv").string(), rerun.result.cells);
    write_sweep_json((dir_b / "sweep.json").string(), rerun.result);
    write_geojson((dir_b / "stations.geojson").string(), rerun.result.largest_cell_solutions,
                  catalog);

    for (const char* name : {"heatmap.csv", "sweep.json", "stations.geojson"}) {
        if (slurp(dir_a / name) != slurp(dir_b / name)) {
            detail = std::string(name) + " differs between workers=8 and workers=1";
            return false;
        }
    }
    detail = "heatmap.csv, sweep.json, stations.geojson byte-identical (workers 8 vs 1)";
    return true;
}

// 10. Aggregated structural audit over every solution the suite produced.
bool criterion_audit(std::string& detail) {
    detail = std::to_string(g_audits_run) + " solutions audited, " +
             std::to_string(g_audit_violations) + " violations";
    return g_audits_run > 0 && g_audit_violations == 0;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> run;
    };

    SweepBundle maxdata_sweep; // shared between criteria 4 and 9

    const std::vector<Criterion> criteria = {
        {"geodesic reproduction of the paper's station distances", criterion_geodesic},
        {"exact solver matches brute force (value and argmax)", criterion_exact_ground_truth},
        {"scheduling oracles match exhaustive enumeration", criterion_schedulers},
        {"Walker sweep quality gate vs ground truth",
         [&](std::string& d) { return criterion_quality_gate(maxdata_sweep, d); }},
        {"Hungarian assignment equals permutation brute force", criterion_hungarian},
        {"DBSCAN equals the reachability closure, order-invariant", criterion_dbscan},
        {"k-medoids results admit no improving swap", criterion_kmedoids},
        {"overlapping-window formula (13 windows over 7 days)", criterion_windows},
        {"sweep outputs byte-identical across worker counts",
         [&](std::string& d) { return criterion_determinism(maxdata_sweep, d); }},
        {"structural invariants hold on every emitted solution", criterion_audit},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%2zu/10] %s  %-55s (%s) [%.1f s]\n", i + 1, ok ? "PASS" : "FAIL",
                    criteria[i].name, detail.c_str(), elapsed);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("all 10 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
