#include "gsopt/contacts.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace gsopt {

double contact_datarate(double station_rate_gbps, double sat_rate_gbps) {
    if (station_rate_gbps < 0.0 || sat_rate_gbps < 0.0)
        throw InputError("datarates must be >= 0");
    return std::min(station_rate_gbps, sat_rate_gbps);
}

std::vector<EphemerisGrid> build_ephemeris_grids(const std::vector<Satellite>& satellites,
                                                 double t_start, double t_end, double step_s) {
    if (!(t_end > t_start)) throw InputError("contacts: horizon end must be after start");
    if (!(step_s > 0.0)) throw InputError("contacts: step must be positive");
    std::vector<EphemerisGrid> grids;
    grids.reserve(satellites.size());
    for (const auto& sat : satellites) {
        EphemerisGrid g;
        g.satellite = sat;
        g.t_start = t_start;
        g.step_s = step_s;
        try {
            for (double t = t_start; t < t_end; t += step_s) {
                g.times_s.push_back(t);
                g.positions_km.push_back(propagate(sat.elements, t).position_km);
            }
            g.times_s.push_back(t_end);
            g.positions_km.push_back(propagate(sat.elements, t_end).position_km);
        } catch (const PropagationError& e) {
            throw PropagationError("satellite '" + sat.id + "': " + e.what());
        }
        grids.push_back(std::move(g));
    }
    return grids;
}

namespace {

// Locates the elevation-mask crossing within (t_lo, t_hi), where the sample at
// `above_hi ? t_hi : t_lo` is the side already above the mask. Returns the
// refined boundary on the above-mask side, within 0.1 s.
double refine_crossing(const Satellite& sat, const GroundStation& station, double mask_rad,
                       double t_lo, double t_hi, bool rising) {
    constexpr double kTol = 0.1;
    while (t_hi - t_lo > kTol) {
        const double mid = 0.5 * (t_lo + t_hi);
        const double el = elevation_angle(propagate(sat.elements, mid), station);
        const bool above = el >= mask_rad;
        if (above == rising) {
            // For a rising edge, an above-mask midpoint bounds the crossing below.
            t_hi = mid;
        } else {
            t_lo = mid;
        }
    }
    return rising ? t_hi : t_lo;
}

} // namespace

std::vector<ContactWindow> compute_contacts(const std::vector<EphemerisGrid>& grids,
                                            const std::vector<GroundStation>& stations,
                                            double mask_deg) {
    if (mask_deg < -90.0 || mask_deg >= 90.0)
        throw InputError("contacts: elevation mask must lie in [-90, 90)");
    const double mask_rad = mask_deg * kDegToRad;

    std::vector<ContactWindow> all;
    for (const auto& grid : grids) {
        for (const auto& station : stations) {
            const size_t n = grid.times_s.size();
            if (n == 0) continue;
            const double horizon_start = grid.times_s.front();
            const double horizon_end = grid.times_s.back();

            std::vector<char> above(n);
            for (size_t k = 0; k < n; ++k) {
                above[k] = elevation_angle(grid.positions_km[k], station.latitude_deg,
                                           station.longitude_deg, station.altitude_m) >= mask_rad;
            }

            double open_start = 0.0;
            bool open = false;
            auto close_window = [&](double t_end) {
                if (t_end > open_start) {
                    ContactWindow w;
                    w.satellite_id = grid.satellite.id;
                    w.station_id = station.id;
                    w.t_start = open_start;
                    w.t_end = t_end;
                    w.duration = w.t_end - w.t_start;
                    w.datarate_gbps =
                        contact_datarate(station.datarate_gbps, grid.satellite.datarate_gbps);
                    all.push_back(std::move(w));
                }
                open = false;
            };

            if (above[0]) {
                open = true;
                open_start = horizon_start; // clipped to the horizon
            }
            for (size_t k = 1; k < n; ++k) {
                if (!open && above[k]) {
                    open = true;
                    open_start = refine_crossing(grid.satellite, station, mask_rad,
                                                 grid.times_s[k - 1], grid.times_s[k], true);
                } else if (open && !above[k]) {
                    close_window(refine_crossing(grid.satellite, station, mask_rad,
                                                 grid.times_s[k - 1], grid.times_s[k], false));
                }
            }
            if (open) close_window(horizon_end);
        }
    }
    canonicalize_contacts(all);
    return all;
}

std::vector<ContactWindow> compute_contacts(const std::vector<Satellite>& satellites,
                                            const std::vector<GroundStation>& stations,
                                            double t_start, double t_end, double mask_deg,
                                            double coarse_step_s) {
    const auto grids = build_ephemeris_grids(satellites, t_start, t_end, coarse_step_s);
    return compute_contacts(grids, stations, mask_deg);
}

std::vector<ContactWindow> filter_contacts(const std::vector<ContactWindow>& contacts,
                                           double t_min_s) {
    if (t_min_s < 0.0) throw InputError("t_min must be >= 0");
    std::vector<ContactWindow> out;
    out.reserve(contacts.size());
    for (const auto& c : contacts)
        if (c.duration >= t_min_s) out.push_back(c);
    return out;
}

std::vector<ContactWindow> clip_contacts(const std::vector<ContactWindow>& contacts,
                                         double t_start, double t_end) {
    std::vector<ContactWindow> out;
    for (const auto& c : contacts) {
        const double s = std::max(c.t_start, t_start);
        const double e = std::min(c.t_end, t_end);
        if (e > s) {
            ContactWindow w = c;
            w.t_start = s;
            w.t_end = e;
            w.duration = e - s;
            out.push_back(std::move(w));
        }
    }
    return out;
}

void canonicalize_contacts(std::vector<ContactWindow>& contacts) {
    std::sort(contacts.begin(), contacts.end(), [](const ContactWindow& a, const ContactWindow& b) {
        if (a.satellite_id != b.satellite_id) return a.satellite_id < b.satellite_id;
        if (a.t_start != b.t_start) return a.t_start < b.t_start;
        return a.station_id < b.station_id;
    });
    std::map<std::pair<std::string, std::string>, int> counters;
    for (auto& c : contacts) {
        const int k = counters[{c.satellite_id, c.station_id}]++;
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%03d", k);
        c.id = c.satellite_id + ":" + c.station_id + ":" + suffix;
    }
}

std::vector<ContactWindow> load_contact_windows(const std::string& path,
                                                const StationCatalog& catalog,
                                                const std::vector<Satellite>& satellites) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open contacts file: " + path);
    std::vector<ContactWindow> contacts;
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
        std::vector<std::string> f;
        {
            std::string cur;
            for (char c : line) {
                if (c == ',') {
                    f.push_back(cur);
                    cur.clear();
                } else if (c != '\r') {
                    cur += c;
                }
            }
            f.push_back(cur);
        }
        if (f.size() != 4)
            throw InputError("line " + std::to_string(line_no) + ": expected 4 fields");
        const Satellite* sat = find_satellite(satellites, f[0]);
        if (!sat)
            throw InputError("line " + std::to_string(line_no) + ": unknown satellite '" + f[0] + "'");
        const GroundStation* station = catalog.find_station(f[1]);
        if (!station)
            throw InputError("line " + std::to_string(line_no) + ": unknown station '" + f[1] + "'");
        ContactWindow w;
        w.satellite_id = f[0];
        w.station_id = f[1];
        w.t_start = parse_utc(f[2]);
        w.t_end = parse_utc(f[3]);
        if (!(w.t_end > w.t_start))
            throw InputError("line " + std::to_string(line_no) + ": contact end must be after start");
        w.duration = w.t_end - w.t_start;
        w.datarate_gbps = contact_datarate(station->datarate_gbps, sat->datarate_gbps);
        contacts.push_back(std::move(w));
    }
    canonicalize_contacts(contacts);
    return contacts;
}

void save_contact_windows(const std::vector<ContactWindow>& contacts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write contacts file: " + path);
    out << "satellite,station,start_utc,end_utc\n";
    for (const auto& c : contacts) {
        out << c.satellite_id << ',' << c.station_id << ',' << format_utc(c.t_start) << ','
            << format_utc(c.t_end) << '\n';
    }
}

} // namespace gsopt
