#ifndef GSOPT_SCALABLE_HPP
#define GSOPT_SCALABLE_HPP

#include "gsopt/exact.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gsopt {

// One decomposed unit: a time window plus the satellites solved inside it.
struct SubproblemSpec {
    int window_index = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<std::string> satellite_ids; // singleton in per-satellite mode
    std::vector<std::string> pool;          // candidate station ids (L^D)
};

// A station selected by one subproblem; multiplicity across subproblems is the
// signal the clustering stage aggregates.
struct SelectionPoint {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    int window_index = 0;
    std::vector<std::string> satellite_ids;
    std::string station_id;
};

struct Cluster {
    std::vector<int> member_indices; // into the point list, ascending
    double centroid_lat_deg = 0.0;
    double centroid_lon_deg = 0.0;
    int size = 0;
};

struct ClusterSet {
    std::vector<Cluster> clusters;
    std::vector<int> noise_indices;
    std::vector<int> labels; // per point: cluster index or -1 for noise
    double epsilon_deg = 0.0;
    int min_points = 0;
};

// Injective centroid-to-site matching with its total geodesic cost.
struct Assignment {
    std::vector<std::pair<int, std::string>> pairs; // (centroid index, station id)
    double total_cost_km = 0.0;
};

// Overlapping windows: stride = dt - overlap, each of length dt, the last
// window clamped to end exactly at t_sim_end. For 7 d / 1 d / 12 h this yields
// W = 2*T_sim/dt - 1 = 13 windows.
std::vector<std::pair<double, double>> make_windows(double t_sim_start, double t_sim_end,
                                                    double dt_s, double overlap_s);

std::vector<SubproblemSpec> make_subproblems(const ScenarioConfig& scenario,
                                             const std::vector<Satellite>& satellites,
                                             const StationCatalog& catalog);

// A solved spec; `solution` is empty when the spec was skipped as infeasible
// (min-max-gap window that cannot reach some satellite).
struct SubproblemResult {
    const SubproblemSpec* spec = nullptr;
    std::optional<SelectionSolution> solution;
};

// Runs the exact solver on every spec (contacts clipped to the window and
// re-filtered by t_min, satellites and pool restricted). Min-max-gap specs
// with an unreachable satellite are skipped with a diagnostic. Results are
// ordered by spec regardless of worker count.
std::vector<SubproblemResult> solve_subproblems_full(const std::vector<SubproblemSpec>& specs,
                                                     const std::vector<ContactWindow>& contacts,
                                                     const ScenarioConfig& scenario,
                                                     const StationCatalog& catalog,
                                                     int workers = 1);

// The flattened selection dataset: one point per selected station per spec.
std::vector<SelectionPoint> selection_points(const std::vector<SubproblemResult>& results,
                                             const StationCatalog& catalog);

std::vector<SelectionPoint> solve_subproblems(const std::vector<SubproblemSpec>& specs,
                                              const std::vector<ContactWindow>& contacts,
                                              const ScenarioConfig& scenario,
                                              const StationCatalog& catalog, int workers = 1);

// Great-circle central angle in degrees; the DBSCAN epsilon metric.
double central_angle_deg(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);
// Haversine distance on the mean-radius sphere (R = 6371.0088 km).
double geodesic_distance(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

constexpr double kEarthMeanRadiusKm = 6371.0088;

// Density clustering per the classic formulation; a point is core when at
// least `min_points` points (itself included) lie within epsilon.
ClusterSet dbscan(const std::vector<SelectionPoint>& points, double epsilon_deg, int min_points);

// Spherical mean of the member coordinates (unit-vector average). Degenerate
// zero-norm means fall back to the first member.
std::pair<double, double> cluster_centroid(const std::vector<SelectionPoint>& points,
                                           const std::vector<int>& member_indices);

// PAM-style k-medoids over the distinct coordinates (duplicates weight the
// cost): seeded random init, then best-improvement swaps until none improves.
// Returns indices into `points` of the k medoids.
std::vector<int> kmedoids(const std::vector<SelectionPoint>& points, int k, std::uint64_t seed);

// Exact rectangular linear assignment (rows <= cols), minimum total cost.
// Returns the column chosen for each row.
std::vector<int> lap_solve(const std::vector<std::vector<double>>& cost, double* total_cost);

// Cost matrix = pairwise geodesic distance; optimal injective assignment.
Assignment hungarian_match(const std::vector<std::pair<double, double>>& centroids,
                           const std::vector<GroundStation>& candidate_sites);

inline const std::vector<double>& default_epsilon_grid_deg() {
    static const std::vector<double> grid = {5, 10, 15, 20, 25, 30, 35, 40};
    return grid;
}

struct FinalSelection {
    SelectionSolution solution;
    std::optional<ClusterSet> clusters;     // DBSCAN diagnostics when it ran
    std::optional<double> epsilon_used;
    bool kmedoids_fallback = false;         // DBSCAN never reached n clusters
    std::vector<std::pair<double, double>> centroids; // matched (or virtual) centers
    std::vector<int> centroid_members;      // points backing each centroid
};

// Final stage: clusters the subproblem selections and maps them to catalog
// sites (DbscanHungarian / KMedoids) or evaluates the raw centroids as virtual
// stations (DbscanOnly; needs `satellites` to compute their contacts).
FinalSelection select_final_stations(const std::vector<SelectionPoint>& points,
                                     const ScenarioConfig& scenario,
                                     const StationCatalog& catalog,
                                     const std::vector<ContactWindow>& contacts,
                                     const std::vector<Satellite>& satellites,
                                     MethodLabel method, std::uint64_t seed,
                                     const std::vector<double>& epsilon_grid_deg =
                                         default_epsilon_grid_deg());

// Evaluates cluster centers as stand-in stations (DbscanOnly diagnostics):
// pseudo-stations are placed at the centers, their contacts computed from the
// shared ephemeris grids, and the scenario objective scored on them.
SelectionSolution evaluate_centroids_as_stations(
    const std::vector<std::pair<double, double>>& centers, const ScenarioConfig& scenario,
    const StationCatalog& catalog, const std::vector<EphemerisGrid>& grids);

// The pool the matching stage draws from: the full_pool providers when the
// scenario lists any, otherwise the candidate pool.
std::vector<GroundStation> matching_pool(const ScenarioConfig& scenario,
                                         const StationCatalog& catalog);

nlohmann::ordered_json clusters_to_json(const ClusterSet& clusters,
                                        const std::vector<SelectionPoint>& points);

} // namespace gsopt

#endif // GSOPT_SCALABLE_HPP
