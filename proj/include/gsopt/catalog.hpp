#ifndef GSOPT_CATALOG_HPP
#define GSOPT_CATALOG_HPP

#include <string>
#include <vector>

namespace gsopt {

// A GSaaS provider and the stations it operates. Providers are derived from
// the station catalog; every station belongs to exactly one provider.
struct Provider {
    std::string id;
    std::string name;
    std::vector<std::string> station_ids; // sorted, non-empty
};

struct GroundStation {
    std::string id;
    std::string provider_id;
    std::string name;
    double latitude_deg = 0.0;  // |lat| <= 90
    double longitude_deg = 0.0; // [-180, 180)
    double altitude_m = 0.0;
    double datarate_gbps = 0.0; // L_dr
};

struct StationCatalog {
    std::vector<Provider> providers;    // sorted by id
    std::vector<GroundStation> stations; // sorted by id

    const GroundStation* find_station(const std::string& id) const;
    const Provider* find_provider(const std::string& id) const;
    // All stations of the given providers, sorted by station id.
    std::vector<GroundStation> stations_of(const std::vector<std::string>& provider_ids) const;
};

enum class Objective { MaxData, MinMaxGap };
enum class DecompositionMode { TemporalOnly, TemporalAndSatellite };

const char* to_string(Objective o);
const char* to_string(DecompositionMode m);
Objective objective_from_string(const std::string& s);
DecompositionMode decomposition_mode_from_string(const std::string& s);

// Mirrors the simulation design parameters. Times are UTC seconds.
struct ScenarioConfig {
    double t_sim_start = 0.0;
    double t_sim_end = 0.0;
    double t_opt_start = 0.0;
    double t_opt_end = 0.0;
    double window_length_s = 86400.0;   // dt
    double window_overlap_s = 43200.0;  // overlap between consecutive windows
    double t_min_s = 180.0;             // minimum contact duration
    double elevation_mask_deg = 10.0;
    int n_stations = 1;                 // M_min = M_max = n
    Objective objective = Objective::MaxData;
    DecompositionMode decomposition_mode = DecompositionMode::TemporalAndSatellite;
    std::vector<std::string> candidate_pool; // provider ids (design subset)
    std::vector<std::string> full_pool;      // provider ids (expansion); empty = no expansion

    double t_sim_duration() const { return t_sim_end - t_sim_start; }
    double t_opt_duration() const { return t_opt_end - t_opt_start; }
};

// Structural validation independent of any catalog. Throws InputError.
void validate_scenario(const ScenarioConfig& scenario);
// Pool-dependent validation: providers resolve, 1 <= n <= |candidate stations|.
void validate_scenario_against_catalog(const ScenarioConfig& scenario,
                                       const StationCatalog& catalog);

// stations.csv: header `provider,station,lat_deg,lon_deg,alt_m,datarate_gbps`.
StationCatalog load_station_catalog(const std::string& path);
void save_station_catalog(const StationCatalog& catalog, const std::string& path);

// Scenario file: a JSON object holding exactly the design-parameter keys.
// Unknown keys are a hard error.
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& scenario, const std::string& path);

} // namespace gsopt

#endif // GSOPT_CATALOG_HPP
