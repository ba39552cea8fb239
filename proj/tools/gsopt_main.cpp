// gsopt — ground-station site selection for LEO constellations.
//
// Subcommands mirror the experiment workflow: generate a Walker-Star
// constellation, compute contact windows, solve a scenario with one of the
// five methods, sweep the (constellation size x station count) grid, evaluate
// a fixed station set, and re-emit reports from a saved solution.

#include "gsopt/pipeline.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace gsopt;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string stations_path;
    std::string satellites_path;
    std::string contacts_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool need_scenario = true) {
    if (need_scenario)
        cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--stations", args.stations_path, "Station catalog CSV")->required();
    cmd->add_option("--satellites", args.satellites_path, "Satellites CSV");
    cmd->add_option("--contacts", args.contacts_path, "Precomputed contacts CSV (skips propagation)");
    cmd->add_option("--seed", args.seed, "RNG seed for clustering initialization");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--workers", args.workers, "Worker threads")->check(CLI::PositiveNumber);
}

struct LoadedInputs {
    StationCatalog catalog;
    ScenarioConfig scenario;
    std::vector<Satellite> satellites;
    std::vector<ContactWindow> contacts; // t_min-filtered
};

LoadedInputs load_inputs(const CommonArgs& args) {
    LoadedInputs in;
    in.catalog = load_station_catalog(args.stations_path);
    in.scenario = load_scenario(args.scenario_path);
    validate_scenario_against_catalog(in.scenario, in.catalog);
    if (args.satellites_path.empty())
        throw InputError("--satellites is required (contact rates derive from satellite rates)");
    in.satellites = load_satellites(args.satellites_path);

    if (!args.contacts_path.empty()) {
        auto imported = load_contact_windows(args.contacts_path, in.catalog, in.satellites);
        imported = clip_contacts(imported, in.scenario.t_sim_start, in.scenario.t_sim_end);
        canonicalize_contacts(imported);
        in.contacts = filter_contacts(imported, in.scenario.t_min_s);
    } else {
        // Compute over every station the run may evaluate.
        auto stations = in.catalog.stations_of(in.scenario.candidate_pool);
        const auto expansion = matching_pool(in.scenario, in.catalog);
        std::set<std::string> seen;
        for (const auto& s : stations) seen.insert(s.id);
        for (const auto& s : expansion)
            if (seen.insert(s.id).second) stations.push_back(s);
        auto computed =
            compute_contacts(in.satellites, stations, in.scenario.t_sim_start,
                             in.scenario.t_sim_end, in.scenario.elevation_mask_deg);
        in.contacts = filter_contacts(computed, in.scenario.t_min_s);
    }
    return in;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
}

int run_solve(const CommonArgs& args, const std::string& method_name) {
    const MethodLabel method = method_from_string(method_name);
    const auto in = load_inputs(args);
    ensure_out_dir(args.out_dir);

    const RunResult run = run_scenario(in.scenario, in.catalog, in.satellites, in.contacts,
                                       method, args.seed, args.workers);
    const fs::path out(args.out_dir);
    write_solution_json((out / "solution.json").string(), run.solution, in.catalog);
    write_stages_json((out / "stages.json").string(), run.stages);
    if (run.clusters)
        write_clusters_json((out / "clusters.json").string(), *run.clusters, run.points);

    std::map<std::string, SelectionSolution> by_method{{to_string(method), run.solution}};
    std::vector<std::pair<double, double>> centroids;
    std::vector<int> members;
    if (run.clusters) {
        for (const auto& c : run.clusters->clusters) {
            centroids.emplace_back(c.centroid_lat_deg, c.centroid_lon_deg);
            members.push_back(c.size);
        }
    }
    write_geojson((out / "stations.geojson").string(), by_method, in.catalog, centroids, members,
                  to_string(method));

    std::cout << to_string(method) << " " << to_string(run.solution.objective_kind) << " = "
              << report_value(run.solution)
              << (run.solution.objective_kind == Objective::MaxData ? " PB" : " h") << "\n";
    for (const auto& sid : run.solution.station_ids) std::cout << "  " << sid << "\n";
    return 0;
}

int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceededError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground-station site selection for LEO constellations"};
    app.require_subcommand(1);

    // generate-walker
    auto* gen = app.add_subcommand("generate-walker", "Generate a Walker-Star constellation");
    double altitude = 781.0, ecc = 0.001, inc = 86.4, datarate = 1.2;
    int planes = 6, per_plane = 1;
    std::string epoch = "2025-08-22T00:00:00Z";
    std::string gen_out = ".";
    gen->add_option("--altitude", altitude, "Altitude [km]");
    gen->add_option("--eccentricity", ecc, "Eccentricity");
    gen->add_option("--inclination", inc, "Inclination [deg]");
    gen->add_option("--planes", planes, "Number of planes")->check(CLI::PositiveNumber);
    gen->add_option("--sats-per-plane", per_plane, "Satellites per plane")
        ->check(CLI::PositiveNumber);
    gen->add_option("--datarate", datarate, "Satellite downlink rate [Gbps]");
    gen->add_option("--epoch", epoch, "Epoch (ISO-8601 UTC)");
    gen->add_option("--out", gen_out, "Output directory");

    // compute-contacts
    auto* cc = app.add_subcommand("compute-contacts", "Compute contact windows over the horizon");
    CommonArgs cc_args;
    add_common(cc, cc_args);

    // solve
    auto* solve = app.add_subcommand("solve", "Select n stations with one method");
    CommonArgs solve_args;
    std::string method_name = "ip-optimal";
    solve->add_option("--method", method_name,
                      "ip-optimal|ip-decomposed|dbscan|dbscan-hungarian|kmedoids");
    add_common(solve, solve_args);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Walker-Star grid sweep with method comparison");
    CommonArgs sweep_args;
    int sweep_planes = 6, sweep_n = 6;
    std::string methods_csv = "ip-optimal,dbscan-hungarian";
    double sw_altitude = 781.0, sw_ecc = 0.001, sw_inc = 86.4, sw_rate = 1.2;
    sweep->add_option("--planes", sweep_planes, "Max constellation size")->check(CLI::PositiveNumber);
    sweep->add_option("--max-n", sweep_n, "Max stations selected")->check(CLI::PositiveNumber);
    sweep->add_option("--methods", methods_csv, "Comma-separated method list");
    sweep->add_option("--altitude", sw_altitude, "Walker altitude [km]");
    sweep->add_option("--eccentricity", sw_ecc, "Walker eccentricity");
    sweep->add_option("--inclination", sw_inc, "Walker inclination [deg]");
    sweep->add_option("--datarate", sw_rate, "Satellite downlink rate [Gbps]");
    add_common(sweep, sweep_args);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Evaluate a fixed station set");
    CommonArgs eval_args;
    std::string select_csv;
    eval->add_option("--select", select_csv, "Comma-separated station ids")->required();
    add_common(eval, eval_args);

    // report
    auto* report = app.add_subcommand("report", "Re-emit GeoJSON from a saved solution");
    std::string report_solution, report_stations, report_out = ".";
    report->add_option("--solution", report_solution, "solution.json path")->required();
    report->add_option("--stations", report_stations, "Station catalog CSV")->required();
    report->add_option("--out", report_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        return dispatch([&]() {
            const auto sats = generate_walker_star(altitude, ecc, inc, planes, per_plane,
                                                   datarate, parse_utc(epoch));
            ensure_out_dir(gen_out);
            const auto path = (fs::path(gen_out) / "satellites.csv").string();
            save_satellites(sats, path);
            std::cout << "wrote " << sats.size() << " satellites to " << path << "\n";
            return 0;
        });
    }

    if (cc->parsed()) {
        return dispatch([&]() {
            const auto catalog = load_station_catalog(cc_args.stations_path);
            const auto scenario = load_scenario(cc_args.scenario_path);
            validate_scenario_against_catalog(scenario, catalog);
            if (cc_args.satellites_path.empty()) throw InputError("--satellites is required");
            const auto satellites = load_satellites(cc_args.satellites_path);
            const auto contacts =
                compute_contacts(satellites, catalog.stations, scenario.t_sim_start,
                                 scenario.t_sim_end, scenario.elevation_mask_deg);
            ensure_out_dir(cc_args.out_dir);
            const auto path = (fs::path(cc_args.out_dir) / "contacts.csv").string();
            save_contact_windows(contacts, path);
            std::cout << "wrote " << contacts.size() << " contact windows to " << path << "\n";
            return 0;
        });
    }

    if (solve->parsed()) return dispatch([&]() { return run_solve(solve_args, method_name); });

    if (sweep->parsed()) {
        return dispatch([&]() {
            const auto catalog = load_station_catalog(sweep_args.stations_path);
            const auto scenario = load_scenario(sweep_args.scenario_path);
            SweepOptions options;
            options.max_planes = sweep_planes;
            options.max_stations = sweep_n;
            options.seed = sweep_args.seed;
            options.workers = sweep_args.workers;
            options.altitude_km = sw_altitude;
            options.eccentricity = sw_ecc;
            options.inclination_deg = sw_inc;
            options.datarate_gbps = sw_rate;
            options.methods.clear();
            std::string token;
            std::stringstream ss(methods_csv);
            while (std::getline(ss, token, ','))
                if (!token.empty()) options.methods.push_back(method_from_string(token));

            const SweepResult result = sweep_walker(scenario, catalog, options);
            ensure_out_dir(sweep_args.out_dir);
            const fs::path out(sweep_args.out_dir);
            write_heatmap_csv((out / "heatmap.csv").string(), result.cells);
            write_sweep_json((out / "sweep.json").string(), result);
            write_geojson((out / "stations.geojson").string(), result.largest_cell_solutions,
                          catalog);
            const size_t ok =
                result.cells.size() - result.failures.size();
            std::cout << "sweep: " << ok << "/" << result.cells.size() << " cells solved; reports in "
                      << sweep_args.out_dir << "\n";
            return 0;
        });
    }

    if (eval->parsed()) {
        return dispatch([&]() {
            const auto in = load_inputs(eval_args);
            std::vector<std::string> ids;
            std::string token;
            std::stringstream ss(select_csv);
            while (std::getline(ss, token, ','))
                if (!token.empty()) ids.push_back(token);
            for (const auto& id : ids)
                if (!in.catalog.find_station(id)) throw InputError("unknown station '" + id + "'");
            auto solution = evaluate_station_set(ids, in.contacts, in.scenario, in.catalog);
            ensure_out_dir(eval_args.out_dir);
            write_solution_json((fs::path(eval_args.out_dir) / "solution.json").string(), solution,
                                in.catalog);
            std::cout << to_string(solution.objective_kind) << " = " << report_value(solution)
                      << (solution.objective_kind == Objective::MaxData ? " PB" : " h") << "\n";
            return 0;
        });
    }

    if (report->parsed()) {
        return dispatch([&]() {
            const auto catalog = load_station_catalog(report_stations);
            std::ifstream in(report_solution);
            if (!in) throw InputError("cannot open " + report_solution);
            nlohmann::json doc;
            try {
                in >> doc;
            } catch (const nlohmann::json::exception& e) {
                throw InputError("solution parse error: " + std::string(e.what()));
            }
            SelectionSolution solution;
            solution.method_label = method_from_string(doc.at("method").get<std::string>());
            solution.objective_kind = objective_from_string(doc.at("objective").get<std::string>());
            for (const auto& st : doc.at("stations"))
                solution.station_ids.push_back(st.at("id").get<std::string>());
            std::sort(solution.station_ids.begin(), solution.station_ids.end());
            ensure_out_dir(report_out);
            std::map<std::string, SelectionSolution> by_method{
                {to_string(solution.method_label), solution}};
            write_geojson((fs::path(report_out) / "stations.geojson").string(), by_method, catalog);
            std::cout << "wrote " << (fs::path(report_out) / "stations.geojson").string() << "\n";
            return 0;
        });
    }

    return 0;
}
