#ifndef GSOPT_PIPELINE_HPP
#define GSOPT_PIPELINE_HPP

#include "gsopt/scalable.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsopt {

enum class Stage { Decomposition, Clustering, FinalMatch };
const char* to_string(Stage s);

// Objective range across one pipeline stage, in report units (PB or hours).
struct StageReport {
    Stage stage = Stage::Decomposition;
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
    int count = 0;
};

// One sweep entry. `deviation` is signed so positive always means suboptimal:
// optimal - value for MaxData, value - optimal for MinMaxGap.
struct ComparisonCell {
    int num_satellites = 0;
    int n_stations = 0;
    MethodLabel method = MethodLabel::IpOptimal;
    std::optional<double> value;     // report units
    std::optional<double> deviation; // defined only when the IpOptimal cell exists
    std::string error;               // non-empty when the cell failed
};

struct RunResult {
    SelectionSolution solution;
    std::vector<StageReport> stages; // always Decomposition -> Clustering -> FinalMatch order
    std::vector<SelectionPoint> points;
    std::optional<ClusterSet> clusters;
    std::optional<double> epsilon_used;
};

// Executes one scenario end to end for the given method:
// contacts -> (exact | decompose / solve / cluster / match) -> evaluate.
RunResult run_scenario(const ScenarioConfig& scenario, const StationCatalog& catalog,
                       const std::vector<Satellite>& satellites,
                       const std::vector<ContactWindow>& contacts, MethodLabel method,
                       std::uint64_t seed, int workers = 1);

// Objective value in report units (PB, or hours for MinMaxGap).
double report_value(const SelectionSolution& solution);

struct SweepOptions {
    int max_planes = 6;   // constellation sizes 1..max_planes (1 sat per plane)
    int max_stations = 6; // n = 1..max_stations
    std::vector<MethodLabel> methods = {MethodLabel::IpOptimal, MethodLabel::DbscanHungarian};
    std::uint64_t seed = 0;
    int workers = 1;
    // Walker-Star geometry.
    double altitude_km = 781.0;
    double eccentricity = 0.001;
    double inclination_deg = 86.4;
    double datarate_gbps = 1.2;
};

struct SweepResult {
    std::vector<ComparisonCell> cells; // ordered by (sats, n, method order)
    std::vector<std::string> failures;
    // Full solutions aligned with `cells` (empty optional where a cell failed),
    // so downstream audits can re-verify every selection.
    std::vector<std::optional<SelectionSolution>> cell_solutions;
    // Solutions of the largest cell (max sats, max n) per method, for GeoJSON.
    std::map<std::string, SelectionSolution> largest_cell_solutions;
};

// The paper's experiment grid: Walker-Star sizes x station counts x methods.
SweepResult sweep_walker(const ScenarioConfig& scenario_template, const StationCatalog& catalog,
                         const SweepOptions& options);

// Byte-stable report writers.
void write_solution_json(const std::string& path, const SelectionSolution& solution,
                         const StationCatalog& catalog);
void write_stages_json(const std::string& path, const std::vector<StageReport>& stages);
void write_heatmap_csv(const std::string& path, const std::vector<ComparisonCell>& cells);
void write_sweep_json(const std::string& path, const SweepResult& result);
void write_clusters_json(const std::string& path, const ClusterSet& clusters,
                         const std::vector<SelectionPoint>& points);
// Selected sites (and cluster centroids when present) as point features.
void write_geojson(const std::string& path,
                   const std::map<std::string, SelectionSolution>& solutions_by_method,
                   const StationCatalog& catalog,
                   const std::vector<std::pair<double, double>>& centroids = {},
                   const std::vector<int>& centroid_members = {},
                   const std::string& centroid_method = "");

} // namespace gsopt

#endif // GSOPT_PIPELINE_HPP
