#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsopt/pipeline.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gsopt;
namespace fs = std::filesystem;

namespace {

StationCatalog fixture_catalog() {
    return load_station_catalog(std::string(GSOPT_DATA_DIR) + "/stations.csv");
}

ScenarioConfig day_scenario(Objective objective, int n) {
    ScenarioConfig sc;
    sc.t_sim_start = parse_utc("2025-08-22T00:00:00Z");
    sc.t_sim_end = sc.t_sim_start + 86400.0;
    sc.t_opt_start = sc.t_sim_start;
    sc.t_opt_end = sc.t_sim_start + 365.0 * 86400.0;
    sc.window_length_s = 43200.0;
    sc.window_overlap_s = 21600.0;
    sc.t_min_s = 180.0;
    sc.elevation_mask_deg = 10.0;
    sc.n_stations = n;
    sc.objective = objective;
    sc.decomposition_mode = DecompositionMode::TemporalAndSatellite;
    sc.candidate_pool = {"meridian", "polaris"};
    sc.full_pool = {"meridian", "polaris"};
    return sc;
}

struct Fixture {
    StationCatalog catalog = fixture_catalog();
    std::vector<Satellite> satellites;
    std::vector<ContactWindow> contacts;

    explicit Fixture(const ScenarioConfig& sc, int planes) {
        satellites = generate_walker_star(781.0, 0.001, 86.4, planes, 1, 1.2, sc.t_sim_start);
        auto computed = compute_contacts(satellites, catalog.stations, sc.t_sim_start,
                                         sc.t_sim_end, sc.elevation_mask_deg);
        contacts = filter_contacts(computed, sc.t_min_s);
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("run_scenario: ip-optimal gives one degenerate stage report") {
    const auto sc = day_scenario(Objective::MaxData, 2);
    Fixture fx(sc, 1);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::IpOptimal, 0);
    REQUIRE(run.stages.size() == 1);
    CHECK(run.stages[0].stage == Stage::FinalMatch);
    CHECK(run.stages[0].min == run.stages[0].max);
    CHECK(run.stages[0].min == run.stages[0].mean);
    CHECK(run.stages[0].min == doctest::Approx(report_value(run.solution)));
    CHECK(run.solution.station_ids.size() == 2);
    CHECK(audit_solution(run.solution, fx.contacts, sc, fx.catalog).empty());
}

TEST_CASE("run_scenario: stage ordering Decomposition -> Clustering -> FinalMatch") {
    const auto sc = day_scenario(Objective::MaxData, 2);
    Fixture fx(sc, 2);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::DbscanHungarian, 0);
    REQUIRE(run.stages.size() == 3);
    CHECK(run.stages[0].stage == Stage::Decomposition);
    CHECK(run.stages[1].stage == Stage::Clustering);
    CHECK(run.stages[2].stage == Stage::FinalMatch);
    CHECK(run.stages[0].min <= run.stages[0].mean);
    CHECK(run.stages[0].mean <= run.stages[0].max);
    CHECK(!run.points.empty());
    CHECK(run.solution.method_label == MethodLabel::DbscanHungarian);
}

TEST_CASE("run_scenario: decomposed label reports ranges only") {
    const auto sc = day_scenario(Objective::MaxData, 2);
    Fixture fx(sc, 2);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::IpDecomposed, 0);
    REQUIRE(run.stages.size() == 1);
    CHECK(run.stages[0].stage == Stage::Decomposition);
    CHECK(run.solution.method_label == MethodLabel::IpDecomposed);
    CHECK(run.solution.station_ids.size() == 2);
}

TEST_CASE("run_scenario: feasible methods never beat the ground truth on MaxData") {
    const auto sc = day_scenario(Objective::MaxData, 2);
    Fixture fx(sc, 2);
    const auto optimal = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                      MethodLabel::IpOptimal, 0);
    for (auto method : {MethodLabel::DbscanHungarian, MethodLabel::KMedoids}) {
        const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts, method, 0);
        CHECK(report_value(run.solution) <= report_value(optimal.solution) + 1e-12);
        CHECK(audit_solution(run.solution, fx.contacts, sc, fx.catalog).empty());
    }
}

TEST_CASE("run_scenario: dbscan-only evaluates virtual stations") {
    const auto sc = day_scenario(Objective::MaxData, 2);
    Fixture fx(sc, 2);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::DbscanOnly, 0);
    REQUIRE(run.stages.size() == 2);
    CHECK(run.stages[0].stage == Stage::Decomposition);
    CHECK(run.stages[1].stage == Stage::Clustering);
    CHECK(run.solution.method_label == MethodLabel::DbscanOnly);
    CHECK(run.solution.station_ids.size() == 2);
    CHECK(run.solution.provider_ids == std::vector<std::string>{"virtual"});
    for (const auto& sid : run.solution.station_ids)
        CHECK(sid.rfind("virtual-", 0) == 0);
}

TEST_CASE("run_scenario: decomposed min-max-gap uses the best window, unscaled") {
    auto sc = day_scenario(Objective::MinMaxGap, 2);
    sc.decomposition_mode = DecompositionMode::TemporalOnly;
    Fixture fx(sc, 2);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::IpDecomposed, 0);
    REQUIRE(run.stages.size() == 1);
    CHECK(run.stages[0].stage == Stage::Decomposition);
    // the reported value is the best (minimum) window value
    CHECK(report_value(run.solution) == doctest::Approx(run.stages[0].min));
    CHECK(run.solution.station_ids.size() == 2);
}

TEST_CASE("sweep: P = N = 1 yields one cell per method") {
    auto sc = day_scenario(Objective::MaxData, 1);
    SweepOptions options;
    options.max_planes = 1;
    options.max_stations = 1;
    options.methods = {MethodLabel::IpOptimal, MethodLabel::DbscanHungarian,
                       MethodLabel::KMedoids};
    const auto result = sweep_walker(sc, fixture_catalog(), options);
    CHECK(result.cells.size() == 3);
    for (const auto& cell : result.cells) {
        REQUIRE(cell.value.has_value());
        REQUIRE(cell.deviation.has_value());
        if (cell.method == MethodLabel::IpOptimal) CHECK(*cell.deviation == 0.0);
        if (cell.method == MethodLabel::DbscanHungarian || cell.method == MethodLabel::KMedoids)
            CHECK(*cell.deviation >= -1e-12);
    }
}

TEST_CASE("sweep: deviations are signed so positive means suboptimal") {
    auto sc = day_scenario(Objective::MaxData, 1);
    SweepOptions options;
    options.max_planes = 2;
    options.max_stations = 2;
    options.methods = {MethodLabel::IpOptimal, MethodLabel::DbscanHungarian};
    const auto result = sweep_walker(sc, fixture_catalog(), options);
    CHECK(result.cells.size() == 8);
    std::map<std::pair<int, int>, double> optimal;
    for (const auto& cell : result.cells)
        if (cell.method == MethodLabel::IpOptimal) optimal[{cell.num_satellites, cell.n_stations}] = *cell.value;
    for (const auto& cell : result.cells) {
        if (cell.method != MethodLabel::DbscanHungarian || !cell.value) continue;
        const double expect = optimal.at({cell.num_satellites, cell.n_stations}) - *cell.value;
        CHECK(*cell.deviation == doctest::Approx(expect));
        CHECK(*cell.deviation >= -1e-12); // cannot beat ground truth
    }
}

TEST_CASE("sweep outputs are byte-identical across reruns and worker counts") {
    auto sc = day_scenario(Objective::MaxData, 1);
    SweepOptions options;
    options.max_planes = 2;
    options.max_stations = 2;
    options.methods = {MethodLabel::IpOptimal, MethodLabel::DbscanHungarian};
    options.seed = 17;

    const auto catalog = fixture_catalog();
    const fs::path dir_a = "/tmp/gsopt_sweep_a";
    const fs::path dir_b = "/tmp/gsopt_sweep_b";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);

    options.workers = 1;
    const auto run_a = sweep_walker(sc, catalog, options);
    write_heatmap_csv((dir_a / "heatmap.csv").string(), run_a.cells);
    write_sweep_json((dir_a / "sweep.json").string(), run_a);
    write_geojson((dir_a / "stations.geojson").string(), run_a.largest_cell_solutions, catalog);

    options.workers = 8;
    const auto run_b = sweep_walker(sc, catalog, options);
    write_heatmap_csv((dir_b / "heatmap.csv").string(), run_b.cells);
    write_sweep_json((dir_b / "sweep.json").string(), run_b);
    write_geojson((dir_b / "stations.geojson").string(), run_b.largest_cell_solutions, catalog);

    for (const char* name : {"heatmap.csv", "sweep.json", "stations.geojson"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
}

TEST_CASE("heatmap rows = cells minus failures") {
    auto sc = day_scenario(Objective::MinMaxGap, 1);
    sc.decomposition_mode = DecompositionMode::TemporalOnly;
    SweepOptions options;
    options.max_planes = 1;
    options.max_stations = 2;
    options.methods = {MethodLabel::IpOptimal, MethodLabel::DbscanHungarian};
    const auto result = sweep_walker(sc, fixture_catalog(), options);
    const fs::path path = "/tmp/gsopt_heatmap_count.csv";
    write_heatmap_csv(path.string(), result.cells);
    std::ifstream in(path);
    std::string line;
    int rows = -1; // skip header
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(result.cells.size() - result.failures.size()));
}

TEST_CASE("solution JSON reports hours for min-max-gap") {
    const auto sc = day_scenario(Objective::MinMaxGap, 3);
    Fixture fx(sc, 1);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::IpOptimal, 0);
    const auto doc = solution_to_json(run.solution, fx.catalog);
    CHECK(doc.at("units") == "hours");
    CHECK(doc.at("value").get<double>() ==
          doctest::Approx(run.solution.objective_value / 3600.0));
    CHECK(run.solution.objective_value > 0.0);
}

TEST_CASE("clusters/GeoJSON writers produce valid, stable documents") {
    const auto sc = day_scenario(Objective::MaxData, 2);
    Fixture fx(sc, 2);
    const auto run = run_scenario(sc, fx.catalog, fx.satellites, fx.contacts,
                                  MethodLabel::DbscanHungarian, 0);
    REQUIRE(run.clusters.has_value());

    const fs::path dir = "/tmp/gsopt_writers";
    fs::create_directories(dir);
    write_clusters_json((dir / "clusters.json").string(), *run.clusters, run.points);
    std::map<std::string, SelectionSolution> by_method{{"dbscan-hungarian", run.solution}};
    std::vector<int> members;
    std::vector<std::pair<double, double>> centroids;
    for (const auto& c : run.clusters->clusters) {
        centroids.emplace_back(c.centroid_lat_deg, c.centroid_lon_deg);
        members.push_back(c.size);
    }
    write_geojson((dir / "stations.geojson").string(), by_method, fx.catalog, centroids, members,
                  "dbscan-hungarian");

    std::ifstream cj(dir / "clusters.json");
    nlohmann::json clusters_doc;
    cj >> clusters_doc;
    CHECK(clusters_doc.at("points").size() == run.points.size());
    CHECK(clusters_doc.at("labels").size() == run.points.size());

    std::ifstream gj(dir / "stations.geojson");
    nlohmann::json geo_doc;
    gj >> geo_doc;
    CHECK(geo_doc.at("type") == "FeatureCollection");
    CHECK(geo_doc.at("features").size() ==
          run.solution.station_ids.size() + run.clusters->clusters.size());

    // rewriting produces identical bytes
    const std::string before = slurp(dir / "stations.geojson");
    write_geojson((dir / "stations.geojson").string(), by_method, fx.catalog, centroids, members,
                  "dbscan-hungarian");
    CHECK(slurp(dir / "stations.geojson") == before);
}
