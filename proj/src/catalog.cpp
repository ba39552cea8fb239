#include "gsopt/catalog.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gsopt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

double parse_double_field(const std::string& s, const std::string& what, int line_no) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw InputError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    return value;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

const GroundStation* StationCatalog::find_station(const std::string& id) const {
    auto it = std::lower_bound(stations.begin(), stations.end(), id,
                               [](const GroundStation& s, const std::string& key) { return s.id < key; });
    if (it != stations.end() && it->id == id) return &*it;
    return nullptr;
}

const Provider* StationCatalog::find_provider(const std::string& id) const {
    auto it = std::lower_bound(providers.begin(), providers.end(), id,
                               [](const Provider& p, const std::string& key) { return p.id < key; });
    if (it != providers.end() && it->id == id) return &*it;
    return nullptr;
}

std::vector<GroundStation> StationCatalog::stations_of(const std::vector<std::string>& provider_ids) const {
    std::set<std::string> wanted(provider_ids.begin(), provider_ids.end());
    std::vector<GroundStation> out;
    for (const auto& s : stations)
        if (wanted.count(s.provider_id)) out.push_back(s);
    return out; // stations already sorted by id
}

const char* to_string(Objective o) {
    return o == Objective::MaxData ? "max_data" : "min_max_gap";
}

const char* to_string(DecompositionMode m) {
    return m == DecompositionMode::TemporalOnly ? "temporal_only" : "temporal_and_satellite";
}

Objective objective_from_string(const std::string& s) {
    if (s == "max_data") return Objective::MaxData;
    if (s == "min_max_gap") return Objective::MinMaxGap;
    throw InputError("unknown objective '" + s + "' (expected max_data or min_max_gap)");
}

DecompositionMode decomposition_mode_from_string(const std::string& s) {
    if (s == "temporal_only") return DecompositionMode::TemporalOnly;
    if (s == "temporal_and_satellite") return DecompositionMode::TemporalAndSatellite;
    throw InputError("unknown decomposition_mode '" + s + "'");
}

void validate_scenario(const ScenarioConfig& sc) {
    if (!(sc.t_sim_end > sc.t_sim_start))
        throw InputError("scenario: t_sim_end must be after t_sim_start");
    if (!(sc.t_opt_end > sc.t_opt_start))
        throw InputError("scenario: t_opt_end must be after t_opt_start");
    if (!(sc.window_length_s > sc.window_overlap_s) || sc.window_overlap_s < 0.0)
        throw InputError("scenario: require window_length_s > window_overlap_s >= 0");
    if (sc.t_min_s < 0.0)
        throw InputError("scenario: t_min_s must be >= 0");
    if (sc.elevation_mask_deg < -90.0 || sc.elevation_mask_deg >= 90.0)
        throw InputError("scenario: elevation_mask_deg must lie in [-90, 90)");
    if (sc.n_stations < 1)
        throw InputError("scenario: n_stations must be >= 1");
    if (sc.candidate_pool.empty())
        throw InputError("scenario: candidate_pool must name at least one provider");
}

void validate_scenario_against_catalog(const ScenarioConfig& sc, const StationCatalog& catalog) {
    validate_scenario(sc);
    for (const auto& pid : sc.candidate_pool)
        if (!catalog.find_provider(pid))
            throw InputError("scenario: candidate_pool references unknown provider '" + pid + "'");
    for (const auto& pid : sc.full_pool)
        if (!catalog.find_provider(pid))
            throw InputError("scenario: full_pool references unknown provider '" + pid + "'");
    const auto pool = catalog.stations_of(sc.candidate_pool);
    if (static_cast<size_t>(sc.n_stations) > pool.size())
        throw InputError("scenario: n_stations (" + std::to_string(sc.n_stations) +
                         ") exceeds candidate pool size (" + std::to_string(pool.size()) + ")");
}

StationCatalog load_station_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open station catalog: " + path);

    StationCatalog catalog;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::set<std::string> ids;
    std::map<std::string, std::vector<std::string>> provider_members;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        if (!header_seen) {
            header_seen = true;
            const auto header = split_csv_line(line);
            const std::vector<std::string> expected = {"provider", "station", "lat_deg",
                                                       "lon_deg", "alt_m", "datarate_gbps"};
            if (header != std::vector<std::string>(expected))
                throw InputError("line 1: unexpected stations.csv header");
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 6)
            throw InputError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                             std::to_string(fields.size()));
        GroundStation st;
        st.provider_id = fields[0];
        st.id = fields[1];
        st.name = fields[1];
        st.latitude_deg = parse_double_field(fields[2], "lat_deg", line_no);
        st.longitude_deg = parse_double_field(fields[3], "lon_deg", line_no);
        st.altitude_m = parse_double_field(fields[4], "alt_m", line_no);
        st.datarate_gbps = parse_double_field(fields[5], "datarate_gbps", line_no);
        if (st.provider_id.empty() || st.id.empty())
            throw InputError("line " + std::to_string(line_no) + ": empty provider or station id");
        if (st.latitude_deg < -90.0 || st.latitude_deg > 90.0)
            throw InputError("line " + std::to_string(line_no) + ": latitude out of range");
        if (st.longitude_deg < -180.0 || st.longitude_deg >= 180.0)
            throw InputError("line " + std::to_string(line_no) + ": longitude out of [-180, 180)");
        if (st.datarate_gbps < 0.0)
            throw InputError("line " + std::to_string(line_no) + ": datarate must be >= 0");
        if (!ids.insert(st.id).second)
            throw InputError("line " + std::to_string(line_no) + ": duplicate station id '" + st.id + "'");
        provider_members[st.provider_id].push_back(st.id);
        catalog.stations.push_back(std::move(st));
    }

    std::sort(catalog.stations.begin(), catalog.stations.end(),
              [](const GroundStation& a, const GroundStation& b) { return a.id < b.id; });
    for (auto& [pid, members] : provider_members) {
        Provider p;
        p.id = pid;
        p.name = pid;
        std::sort(members.begin(), members.end());
        p.station_ids = members;
        catalog.providers.push_back(std::move(p));
    }
    return catalog;
}

void save_station_catalog(const StationCatalog& catalog, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write station catalog: " + path);
    out << "provider,station,lat_deg,lon_deg,alt_m,datarate_gbps\n";
    for (const auto& s : catalog.stations) {
        out << s.provider_id << ',' << s.id << ',' << format_double(s.latitude_deg) << ','
            << format_double(s.longitude_deg) << ',' << format_double(s.altitude_m) << ','
            << format_double(s.datarate_gbps) << '\n';
    }
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("scenario parse error in " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw InputError("scenario file must hold a JSON object");

    const std::set<std::string> known = {
        "t_sim_start", "t_sim_end", "t_opt_start", "t_opt_end",
        "window_length_s", "window_overlap_s", "t_min_s", "elevation_mask_deg",
        "n_stations", "objective", "decomposition_mode", "candidate_pool", "full_pool"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key()))
            throw InputError("scenario: unknown key '" + it.key() + "'");
    for (const auto& key : known)
        if (key != "full_pool" && !doc.contains(key))
            throw InputError("scenario: missing key '" + key + "'");

    ScenarioConfig sc;
    try {
        sc.t_sim_start = parse_utc(doc.at("t_sim_start").get<std::string>());
        sc.t_sim_end = parse_utc(doc.at("t_sim_end").get<std::string>());
        sc.t_opt_start = parse_utc(doc.at("t_opt_start").get<std::string>());
        sc.t_opt_end = parse_utc(doc.at("t_opt_end").get<std::string>());
        sc.window_length_s = doc.at("window_length_s").get<double>();
        sc.window_overlap_s = doc.at("window_overlap_s").get<double>();
        sc.t_min_s = doc.at("t_min_s").get<double>();
        sc.elevation_mask_deg = doc.at("elevation_mask_deg").get<double>();
        sc.n_stations = doc.at("n_stations").get<int>();
        sc.objective = objective_from_string(doc.at("objective").get<std::string>());
        sc.decomposition_mode =
            decomposition_mode_from_string(doc.at("decomposition_mode").get<std::string>());
        sc.candidate_pool = doc.at("candidate_pool").get<std::vector<std::string>>();
        if (doc.contains("full_pool"))
            sc.full_pool = doc.at("full_pool").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError("scenario: bad value type: " + std::string(e.what()));
    }
    validate_scenario(sc);
    return sc;
}

void save_scenario(const ScenarioConfig& sc, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["t_sim_start"] = format_utc(sc.t_sim_start);
    doc["t_sim_end"] = format_utc(sc.t_sim_end);
    doc["t_opt_start"] = format_utc(sc.t_opt_start);
    doc["t_opt_end"] = format_utc(sc.t_opt_end);
    doc["window_length_s"] = sc.window_length_s;
    doc["window_overlap_s"] = sc.window_overlap_s;
    doc["t_min_s"] = sc.t_min_s;
    doc["elevation_mask_deg"] = sc.elevation_mask_deg;
    doc["n_stations"] = sc.n_stations;
    doc["objective"] = to_string(sc.objective);
    doc["decomposition_mode"] = to_string(sc.decomposition_mode);
    doc["candidate_pool"] = sc.candidate_pool;
    doc["full_pool"] = sc.full_pool;
    std::ofstream out(path);
    if (!out) throw InputError("cannot write scenario file: " + path);
    out << doc.dump(2) << '\n';
}

} // namespace gsopt
