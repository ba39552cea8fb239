#ifndef GSOPT_ASTRO_HPP
#define GSOPT_ASTRO_HPP

#include "gsopt/catalog.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace gsopt {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Physical constants (km, s).
constexpr double kMuEarth = 398600.4418;       // km^3/s^2
constexpr double kEarthEqRadiusKm = 6378.137;  // WGS-84 equatorial radius
constexpr double kEarthFlattening = 1.0 / 298.257223563;
constexpr double kJ2 = 1.08262668e-3;
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

struct KeplerianElements {
    double semi_major_axis_km = 0.0;
    double eccentricity = 0.0;
    double inclination_rad = 0.0;
    double raan_rad = 0.0;
    double arg_perigee_rad = 0.0;
    double mean_anomaly_rad = 0.0; // at epoch
    double epoch_s = 0.0;          // UTC seconds
};

struct Satellite {
    std::string id;
    KeplerianElements elements;
    double datarate_gbps = 0.0; // S_dr
};

struct EciState {
    Vec3 position_km;
    Vec3 velocity_km_s;
    double t = 0.0;
};

struct EcefState {
    Vec3 position_km;
    double t = 0.0;
};

// Secular drift rates induced by Earth oblateness.
struct J2Rates {
    double raan_rad_s = 0.0;
    double arg_perigee_rad_s = 0.0;
    double mean_anomaly_rad_s = 0.0;
};

// Throws InputError if the elements violate their invariants
// (a above Earth radius, 0 <= e < 1, angles finite).
void validate_elements(const KeplerianElements& elements);

double orbital_period_s(double semi_major_axis_km);

// Greenwich Mean Sidereal Time (IAU-82 polynomial, UT1 ~ UTC), radians in [0, 2pi).
double gmst_rad(double t_seconds);

J2Rates j2_rates(const KeplerianElements& elements);

// Solves M = E - e sin E by Newton iteration; throws PropagationError when the
// iteration cap is hit (degenerate eccentricity input).
double solve_kepler(double mean_anomaly_rad, double eccentricity);

EciState propagate_eci(const KeplerianElements& elements, double t, bool with_j2 = true);
EcefState propagate(const KeplerianElements& elements, double t, bool with_j2 = true);

// Station geodetic coordinates to the Earth-fixed frame (WGS-84 ellipsoid).
Vec3 geodetic_to_ecef(double lat_deg, double lon_deg, double alt_m);
// Local geodetic up direction (unit vector).
Vec3 geodetic_up(double lat_deg, double lon_deg);

// Topocentric elevation of a satellite above the station's horizon, radians.
double elevation_angle(const EcefState& sat, const GroundStation& station);
double elevation_angle(const Vec3& sat_ecef_km, double lat_deg, double lon_deg, double alt_m);

// Walker-Star constellation: planes spread over 180 deg of RAAN, anomalies
// evenly spaced in-plane, cross-plane phasing of 360/(planes*sats_per_plane).
std::vector<Satellite> generate_walker_star(double altitude_km, double eccentricity,
                                            double inclination_deg, int num_planes,
                                            int sats_per_plane, double datarate_gbps,
                                            double epoch_s);

// satellites.csv: header
// `id,sma_km,ecc,inc_deg,raan_deg,argp_deg,mean_anom_deg,epoch_utc,datarate_gbps`.
std::vector<Satellite> load_satellites(const std::string& path);
void save_satellites(const std::vector<Satellite>& satellites, const std::string& path);

const Satellite* find_satellite(const std::vector<Satellite>& satellites, const std::string& id);

} // namespace gsopt

#endif // GSOPT_ASTRO_HPP
