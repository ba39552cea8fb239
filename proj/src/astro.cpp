#include "gsopt/astro.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace gsopt {

namespace {

double wrap_two_pi(double angle) {
    angle = std::fmod(angle, 2.0 * kPi);
    if (angle < 0.0) angle += 2.0 * kPi;
    return angle;
}

} // namespace

void validate_elements(const KeplerianElements& el) {
    if (!(el.semi_major_axis_km > kEarthEqRadiusKm))
        throw InputError("semi-major axis must exceed Earth's equatorial radius");
    if (!(el.eccentricity >= 0.0 && el.eccentricity < 1.0))
        throw InputError("eccentricity must lie in [0, 1)");
    if (!std::isfinite(el.inclination_rad) || !std::isfinite(el.raan_rad) ||
        !std::isfinite(el.arg_perigee_rad) || !std::isfinite(el.mean_anomaly_rad))
        throw InputError("orbital angles must be finite");
}

double orbital_period_s(double a_km) {
    return 2.0 * kPi * std::sqrt(a_km * a_km * a_km / kMuEarth);
}

double gmst_rad(double t_seconds) {
    const double jd = julian_date(t_seconds);
    const double tut1 = (jd - 2451545.0) / 36525.0;
    double temp = -6.2e-6 * tut1 * tut1 * tut1 + 0.093104 * tut1 * tut1 +
                  (876600.0 * 3600.0 + 8640184.812866) * tut1 + 67310.54841; // seconds
    // 240 s of time = 1 deg of rotation.
    temp = std::fmod(temp * kDegToRad / 240.0, 2.0 * kPi);
    if (temp < 0.0) temp += 2.0 * kPi;
    return temp;
}

J2Rates j2_rates(const KeplerianElements& el) {
    const double a = el.semi_major_axis_km;
    const double e = el.eccentricity;
    const double n = std::sqrt(kMuEarth / (a * a * a));
    const double p = a * (1.0 - e * e);
    const double factor = 1.5 * kJ2 * n * (kEarthEqRadiusKm / p) * (kEarthEqRadiusKm / p);
    const double cos_i = std::cos(el.inclination_rad);
    J2Rates rates;
    rates.raan_rad_s = -factor * cos_i;
    rates.arg_perigee_rad_s = 0.5 * factor * (5.0 * cos_i * cos_i - 1.0);
    rates.mean_anomaly_rad_s = 0.5 * factor * std::sqrt(1.0 - e * e) * (3.0 * cos_i * cos_i - 1.0);
    return rates;
}

double solve_kepler(double mean_anomaly, double e) {
    const double M = wrap_two_pi(mean_anomaly);
    double E = e < 0.8 ? M : kPi;
    constexpr int kMaxIterations = 50;
    for (int i = 0; i < kMaxIterations; ++i) {
        const double f = E - e * std::sin(E) - M;
        const double fp = 1.0 - e * std::cos(E);
        const double step = f / fp;
        E -= step;
        if (std::fabs(step) < 1e-13) return E;
    }
    throw PropagationError("Kepler equation failed to converge (e = " + std::to_string(e) + ")");
}

EciState propagate_eci(const KeplerianElements& el, double t, bool with_j2) {
    validate_elements(el);
    const double dt = t - el.epoch_s;
    const double a = el.semi_major_axis_km;
    const double e = el.eccentricity;
    const double n = std::sqrt(kMuEarth / (a * a * a));

    double raan = el.raan_rad;
    double argp = el.arg_perigee_rad;
    double M = el.mean_anomaly_rad + n * dt;
    if (with_j2) {
        const J2Rates rates = j2_rates(el);
        raan += rates.raan_rad_s * dt;
        argp += rates.arg_perigee_rad_s * dt;
        M += rates.mean_anomaly_rad_s * dt;
    }
    raan = wrap_two_pi(raan);
    argp = wrap_two_pi(argp);

    const double E = solve_kepler(M, e);
    const double cosE = std::cos(E);
    const double sinE = std::sin(E);
    const double r = a * (1.0 - e * cosE);
    const double sqrt_one_minus_e2 = std::sqrt(1.0 - e * e);

    // Perifocal position/velocity.
    const double xp = a * (cosE - e);
    const double yp = a * sqrt_one_minus_e2 * sinE;
    const double rdot_scale = std::sqrt(kMuEarth * a) / r;
    const double vxp = -rdot_scale * sinE;
    const double vyp = rdot_scale * sqrt_one_minus_e2 * cosE;

    const double cO = std::cos(raan), sO = std::sin(raan);
    const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
    const double cw = std::cos(argp), sw = std::sin(argp);

    // Rotation perifocal -> ECI: R3(-raan) R1(-i) R3(-argp).
    const double r11 = cO * cw - sO * sw * ci;
    const double r12 = -cO * sw - sO * cw * ci;
    const double r21 = sO * cw + cO * sw * ci;
    const double r22 = -sO * sw + cO * cw * ci;
    const double r31 = sw * si;
    const double r32 = cw * si;

    EciState state;
    state.position_km = {r11 * xp + r12 * yp, r21 * xp + r22 * yp, r31 * xp + r32 * yp};
    state.velocity_km_s = {r11 * vxp + r12 * vyp, r21 * vxp + r22 * vyp, r31 * vxp + r32 * vyp};
    state.t = t;
    return state;
}

EcefState propagate(const KeplerianElements& el, double t, bool with_j2) {
    const EciState eci = propagate_eci(el, t, with_j2);
    const double theta = gmst_rad(t);
    const double c = std::cos(theta), s = std::sin(theta);
    EcefState out;
    out.position_km = {c * eci.position_km.x + s * eci.position_km.y,
                       -s * eci.position_km.x + c * eci.position_km.y,
                       eci.position_km.z};
    out.t = t;
    return out;
}

Vec3 geodetic_to_ecef(double lat_deg, double lon_deg, double alt_m) {
    const double lat = lat_deg * kDegToRad;
    const double lon = lon_deg * kDegToRad;
    const double e2 = kEarthFlattening * (2.0 - kEarthFlattening);
    const double sin_lat = std::sin(lat);
    const double N = kEarthEqRadiusKm / std::sqrt(1.0 - e2 * sin_lat * sin_lat);
    const double h_km = alt_m / 1000.0;
    return {(N + h_km) * std::cos(lat) * std::cos(lon),
            (N + h_km) * std::cos(lat) * std::sin(lon),
            (N * (1.0 - e2) + h_km) * sin_lat};
}

Vec3 geodetic_up(double lat_deg, double lon_deg) {
    const double lat = lat_deg * kDegToRad;
    const double lon = lon_deg * kDegToRad;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double elevation_angle(const Vec3& sat_ecef_km, double lat_deg, double lon_deg, double alt_m) {
    if (lat_deg < -90.0 || lat_deg > 90.0)
        throw InputError("station latitude out of range");
    const Vec3 site = geodetic_to_ecef(lat_deg, lon_deg, alt_m);
    const Vec3 up = geodetic_up(lat_deg, lon_deg);
    const Vec3 los = sat_ecef_km - site;
    if (los.norm() == 0.0) return kPi / 2.0; // satellite at the site
    // atan2 of the vertical and horizontal line-of-sight components keeps full
    // precision at the zenith, where asin(~1) does not.
    const double vertical = dot(los, up);
    const Vec3 horizontal = los - up * vertical;
    return std::atan2(vertical, horizontal.norm());
}

double elevation_angle(const EcefState& sat, const GroundStation& station) {
    return elevation_angle(sat.position_km, station.latitude_deg, station.longitude_deg,
                           station.altitude_m);
}

std::vector<Satellite> generate_walker_star(double altitude_km, double eccentricity,
                                            double inclination_deg, int num_planes,
                                            int sats_per_plane, double datarate_gbps,
                                            double epoch_s) {
    if (altitude_km <= 0.0) throw InputError("walker: altitude must be positive");
    if (num_planes < 1 || sats_per_plane < 1)
        throw InputError("walker: num_planes and sats_per_plane must be >= 1");
    if (datarate_gbps < 0.0) throw InputError("walker: datarate must be >= 0");

    const int total = num_planes * sats_per_plane;
    const double raan_step = kPi / num_planes;            // 180 deg star spread
    const double anomaly_step = 2.0 * kPi / sats_per_plane;
    const double phasing = 2.0 * kPi / static_cast<double>(total);

    std::vector<Satellite> sats;
    sats.reserve(static_cast<size_t>(total));
    for (int plane = 0; plane < num_planes; ++plane) {
        for (int slot = 0; slot < sats_per_plane; ++slot) {
            Satellite s;
            char id[32];
            std::snprintf(id, sizeof(id), "sat-%02d-%02d", plane, slot);
            s.id = id;
            s.elements.semi_major_axis_km = kEarthEqRadiusKm + altitude_km;
            s.elements.eccentricity = eccentricity;
            s.elements.inclination_rad = inclination_deg * kDegToRad;
            s.elements.raan_rad = wrap_two_pi(plane * raan_step);
            s.elements.arg_perigee_rad = 0.0;
            s.elements.mean_anomaly_rad = wrap_two_pi(slot * anomaly_step + plane * phasing);
            s.elements.epoch_s = epoch_s;
            s.datarate_gbps = datarate_gbps;
            validate_elements(s.elements);
            sats.push_back(std::move(s));
        }
    }
    return sats;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double to_double(const std::string& s, const std::string& what, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw InputError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    return v;
}

} // namespace

std::vector<Satellite> load_satellites(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open satellites file: " + path);
    std::vector<Satellite> sats;
    std::set<std::string> ids;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto f = split_line(line);
        if (f.size() != 9)
            throw InputError("line " + std::to_string(line_no) + ": expected 9 fields");
        Satellite s;
        s.id = f[0];
        s.elements.semi_major_axis_km = to_double(f[1], "sma_km", line_no);
        s.elements.eccentricity = to_double(f[2], "ecc", line_no);
        s.elements.inclination_rad = to_double(f[3], "inc_deg", line_no) * kDegToRad;
        s.elements.raan_rad = to_double(f[4], "raan_deg", line_no) * kDegToRad;
        s.elements.arg_perigee_rad = to_double(f[5], "argp_deg", line_no) * kDegToRad;
        s.elements.mean_anomaly_rad = to_double(f[6], "mean_anom_deg", line_no) * kDegToRad;
        s.elements.epoch_s = parse_utc(f[7]);
        s.datarate_gbps = to_double(f[8], "datarate_gbps", line_no);
        if (s.id.empty())
            throw InputError("line " + std::to_string(line_no) + ": empty satellite id");
        if (!ids.insert(s.id).second)
            throw InputError("line " + std::to_string(line_no) + ": duplicate satellite id '" + s.id + "'");
        validate_elements(s.elements);
        sats.push_back(std::move(s));
    }
    std::sort(sats.begin(), sats.end(),
              [](const Satellite& a, const Satellite& b) { return a.id < b.id; });
    return sats;
}

void save_satellites(const std::vector<Satellite>& satellites, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write satellites file: " + path);
    out << "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,mean_anom_deg,epoch_utc,datarate_gbps\n";
    out.precision(12);
    for (const auto& s : satellites) {
        out << s.id << ',' << s.elements.semi_major_axis_km << ',' << s.elements.eccentricity << ','
            << s.elements.inclination_rad * kRadToDeg << ',' << s.elements.raan_rad * kRadToDeg << ','
            << s.elements.arg_perigee_rad * kRadToDeg << ','
            << s.elements.mean_anomaly_rad * kRadToDeg << ',' << format_utc(s.elements.epoch_s)
            << ',' << s.datarate_gbps << '\n';
    }
}

const Satellite* find_satellite(const std::vector<Satellite>& satellites, const std::string& id) {
    auto it = std::lower_bound(satellites.begin(), satellites.end(), id,
                               [](const Satellite& s, const std::string& key) { return s.id < key; });
    if (it != satellites.end() && it->id == id) return &*it;
    return nullptr;
}

} // namespace gsopt
