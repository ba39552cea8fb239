#ifndef GSOPT_CONTACTS_HPP
#define GSOPT_CONTACTS_HPP

#include "gsopt/astro.hpp"
#include "gsopt/catalog.hpp"

#include <string>
#include <vector>

namespace gsopt {

// One satellite-to-station access interval over the simulation horizon.
struct ContactWindow {
    std::string id;
    std::string satellite_id;
    std::string station_id;
    double t_start = 0.0;      // C^start, UTC seconds
    double t_end = 0.0;        // C^end
    double duration = 0.0;     // C_duration = t_end - t_start
    double datarate_gbps = 0.0; // C_dr = min(L_dr, S_dr)

    double data_volume_gb() const { return datarate_gbps * duration; }
};

// Eq. 1: contact rate is the lesser of the two link endpoints.
double contact_datarate(double station_rate_gbps, double sat_rate_gbps);

// Cached Earth-fixed positions of one satellite on a regular time grid.
// Lets many stations (and repeated epsilon sweeps) reuse one propagation pass.
struct EphemerisGrid {
    Satellite satellite;
    double t_start = 0.0;
    double step_s = 0.0;
    std::vector<Vec3> positions_km; // sample k at t_start + k*step, last sample at horizon end
    std::vector<double> times_s;
};

std::vector<EphemerisGrid> build_ephemeris_grids(const std::vector<Satellite>& satellites,
                                                 double t_start, double t_end, double step_s);

// Maximal intervals with elevation >= mask for every satellite-station pair.
// Coarse sampling at `coarse_step_s` with bisection refinement of each edge to
// 0.1 s; windows clipped to the horizon; output sorted by (satellite_id,
// t_start, station_id) with deterministic per-pair ids.
std::vector<ContactWindow> compute_contacts(const std::vector<Satellite>& satellites,
                                            const std::vector<GroundStation>& stations,
                                            double t_start, double t_end, double mask_deg,
                                            double coarse_step_s = 10.0);

std::vector<ContactWindow> compute_contacts(const std::vector<EphemerisGrid>& grids,
                                            const std::vector<GroundStation>& stations,
                                            double mask_deg);

// Eq. 7: drops windows shorter than t_min; order preserved.
std::vector<ContactWindow> filter_contacts(const std::vector<ContactWindow>& contacts,
                                           double t_min_s);

// Intersects every window with [t_start, t_end]; windows that vanish are dropped.
std::vector<ContactWindow> clip_contacts(const std::vector<ContactWindow>& contacts,
                                         double t_start, double t_end);

// Canonical ordering and id assignment: sort by (satellite_id, t_start,
// station_id), ids "<sat>:<station>:<k>" numbered per pair.
void canonicalize_contacts(std::vector<ContactWindow>& contacts);

// contacts.csv: header `satellite,station,start_utc,end_utc` (ISO-8601).
// The loader validates ids against the catalog and satellite list and derives
// each window's datarate from them.
std::vector<ContactWindow> load_contact_windows(const std::string& path,
                                                const StationCatalog& catalog,
                                                const std::vector<Satellite>& satellites);
void save_contact_windows(const std::vector<ContactWindow>& contacts, const std::string& path);

} // namespace gsopt

#endif // GSOPT_CONTACTS_HPP
