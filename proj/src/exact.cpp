#include "gsopt/exact.hpp"
#include "gsopt/errors.hpp"
#include "gsopt/time_utils.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gsopt {

const char* to_string(MethodLabel m) {
    switch (m) {
        case MethodLabel::IpOptimal: return "ip-optimal";
        case MethodLabel::IpDecomposed: return "ip-decomposed";
        case MethodLabel::DbscanOnly: return "dbscan";
        case MethodLabel::DbscanHungarian: return "dbscan-hungarian";
        case MethodLabel::KMedoids: return "kmedoids";
    }
    return "?";
}

MethodLabel method_from_string(const std::string& s) {
    if (s == "ip-optimal") return MethodLabel::IpOptimal;
    if (s == "ip-decomposed") return MethodLabel::IpDecomposed;
    if (s == "dbscan") return MethodLabel::DbscanOnly;
    if (s == "dbscan-hungarian") return MethodLabel::DbscanHungarian;
    if (s == "kmedoids") return MethodLabel::KMedoids;
    throw InputError("unknown method '" + s + "'");
}

namespace {

// Contacts grouped by satellite, restricted to a station set.
std::map<std::string, std::vector<ContactWindow>> group_by_satellite(
    const std::vector<ContactWindow>& contacts, const std::set<std::string>& stations) {
    std::map<std::string, std::vector<ContactWindow>> by_sat;
    for (const auto& c : contacts) {
        by_sat[c.satellite_id]; // register every satellite in the universe
        if (stations.count(c.station_id)) by_sat[c.satellite_id].push_back(c);
    }
    return by_sat;
}

std::vector<std::string> providers_of(const std::vector<std::string>& station_ids,
                                      const StationCatalog& catalog) {
    std::set<std::string> providers;
    for (const auto& id : station_ids) {
        const GroundStation* s = catalog.find_station(id);
        if (s) providers.insert(s->provider_id);
    }
    return {providers.begin(), providers.end()};
}

} // namespace

SelectionSolution evaluate_station_set(const std::vector<std::string>& station_ids,
                                       const std::vector<ContactWindow>& contacts,
                                       const ScenarioConfig& scenario,
                                       const StationCatalog& catalog) {
    std::set<std::string> chosen(station_ids.begin(), station_ids.end());
    SelectionSolution sol;
    sol.station_ids.assign(chosen.begin(), chosen.end());
    sol.provider_ids = providers_of(sol.station_ids, catalog);
    sol.objective_kind = scenario.objective;

    const auto by_sat = group_by_satellite(contacts, chosen);
    const double ws = scenario.t_sim_start;
    const double we = scenario.t_sim_end;

    if (scenario.objective == Objective::MaxData) {
        double total_gb = 0.0;
        for (const auto& [sat_id, sat_contacts] : by_sat) {
            SatelliteSchedule sched = max_data_schedule(sat_contacts, ws, we);
            sched.satellite_id = sat_id;
            total_gb += sched.data_volume_gb;
            sol.per_satellite.push_back(std::move(sched));
        }
        sol.objective_value =
            scale_to_mission(total_gb, scenario.t_sim_duration(), scenario.t_opt_duration());
    } else {
        double worst_gap = 0.0;
        for (const auto& [sat_id, sat_contacts] : by_sat) {
            if (sat_contacts.empty())
                throw InfeasibleError("satellite '" + sat_id +
                                      "' has no contact with the selected stations");
            SatelliteSchedule sched = min_max_gap_schedule(sat_contacts, ws, we);
            worst_gap = std::max(worst_gap, *sched.max_gap_s);
            sol.per_satellite.push_back(std::move(sched));
        }
        sol.objective_value = worst_gap;
    }
    return sol;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step.
        if (result > cap) return cap + 1;
        result = result * (n - k + i) / i;
    }
    return std::min<std::uint64_t>(result, cap + 1);
}

namespace {

struct EnumerationState {
    const ScenarioConfig* scenario = nullptr;
    const StationCatalog* catalog = nullptr;
    std::vector<const GroundStation*> pool; // sorted by id
    // Per pool station: contacts grouped by satellite (restricted upfront).
    std::vector<std::map<std::string, std::vector<ContactWindow>>> station_contacts;
    std::vector<double> station_total_gb; // unrestricted per-station data
    std::vector<std::string> satellite_ids;
    bool prune = false;

    bool found = false;
    double best_value_gb = 0.0;   // MaxData incumbent, gigabits
    double best_gap_s = 0.0;      // MinMaxGap incumbent, seconds
    std::vector<size_t> best_subset;
};

// Merges the chosen stations' contacts per satellite, time-sorted.
std::map<std::string, std::vector<ContactWindow>> merge_chosen(const EnumerationState& st,
                                                               const std::vector<size_t>& chosen) {
    std::map<std::string, std::vector<ContactWindow>> merged;
    for (const auto& sat : st.satellite_ids) merged[sat];
    for (size_t idx : chosen) {
        for (const auto& [sat, list] : st.station_contacts[idx]) {
            auto& dst = merged[sat];
            dst.insert(dst.end(), list.begin(), list.end());
        }
    }
    for (auto& [sat, list] : merged) {
        std::sort(list.begin(), list.end(), [](const ContactWindow& a, const ContactWindow& b) {
            if (a.t_start != b.t_start) return a.t_start < b.t_start;
            return a.id < b.id;
        });
    }
    return merged;
}

double partial_data_gb(const EnumerationState& st, const std::vector<size_t>& chosen) {
    double total = 0.0;
    for (const auto& [sat, list] : merge_chosen(st, chosen)) {
        total += max_data_schedule(list, st.scenario->t_sim_start, st.scenario->t_sim_end)
                     .data_volume_gb;
    }
    return total;
}

void enumerate_max_data(EnumerationState& st, std::vector<size_t>& chosen, size_t next,
                        size_t want) {
    if (chosen.size() == want) {
        const double value = partial_data_gb(st, chosen);
        if (!st.found || value > st.best_value_gb) {
            st.found = true;
            st.best_value_gb = value;
            st.best_subset = chosen;
        }
        return;
    }
    if (st.pool.size() - next < want - chosen.size()) return;
    if (st.prune && st.found) {
        // Optimistic bound: the data already schedulable on the partial set
        // plus every remaining station's unrestricted contact volume.
        double bound = partial_data_gb(st, chosen);
        for (size_t i = next; i < st.pool.size(); ++i) bound += st.station_total_gb[i];
        if (bound < st.best_value_gb) return;
    }
    for (size_t i = next; i < st.pool.size(); ++i) {
        chosen.push_back(i);
        enumerate_max_data(st, chosen, i + 1, want);
        chosen.pop_back();
    }
}

void enumerate_min_max_gap(EnumerationState& st, std::vector<size_t>& chosen, size_t next,
                           size_t want) {
    if (chosen.size() == want) {
        double worst = 0.0;
        for (const auto& [sat, list] : merge_chosen(st, chosen)) {
            if (list.empty()) return; // subset infeasible for this satellite
            const auto sched =
                min_max_gap_schedule(list, st.scenario->t_sim_start, st.scenario->t_sim_end);
            worst = std::max(worst, *sched.max_gap_s);
        }
        if (!st.found || worst < st.best_gap_s) {
            st.found = true;
            st.best_gap_s = worst;
            st.best_subset = chosen;
        }
        return;
    }
    if (st.pool.size() - next < want - chosen.size()) return;
    for (size_t i = next; i < st.pool.size(); ++i) {
        chosen.push_back(i);
        enumerate_min_max_gap(st, chosen, i + 1, want);
        chosen.pop_back();
    }
}

} // namespace

SelectionSolution solve_exact(const ScenarioConfig& scenario,
                              const std::vector<GroundStation>& pool,
                              const std::vector<ContactWindow>& contacts,
                              const StationCatalog& catalog, const ExactOptions& options) {
    const size_t n = static_cast<size_t>(scenario.n_stations);
    if (n < 1 || n > pool.size())
        throw InputError("solve_exact: n_stations must lie in [1, |pool|]");

    const std::uint64_t subsets = binomial_capped(pool.size(), n, options.subset_budget);
    if (subsets > options.subset_budget)
        throw BudgetExceededError("solve_exact: C(" + std::to_string(pool.size()) + ", " +
                                  std::to_string(n) + ") exceeds the subset budget of " +
                                  std::to_string(options.subset_budget) +
                                  "; use the scalable pipeline");

    EnumerationState st;
    st.scenario = &scenario;
    st.catalog = &catalog;
    st.prune = options.prune;

    std::vector<const GroundStation*> sorted_pool;
    for (const auto& s : pool) sorted_pool.push_back(&s);
    std::sort(sorted_pool.begin(), sorted_pool.end(),
              [](const GroundStation* a, const GroundStation* b) { return a->id < b->id; });
    st.pool = sorted_pool;

    // Restrict to pool stations so the satellite universe seen by the
    // enumeration and by the final evaluation is the same.
    std::set<std::string> pool_ids;
    for (const auto* s : st.pool) pool_ids.insert(s->id);
    std::vector<ContactWindow> pool_contacts;
    std::set<std::string> sats;
    for (const auto& c : contacts) {
        if (!pool_ids.count(c.station_id)) continue;
        pool_contacts.push_back(c);
        sats.insert(c.satellite_id);
    }
    st.satellite_ids.assign(sats.begin(), sats.end());

    st.station_contacts.resize(st.pool.size());
    st.station_total_gb.assign(st.pool.size(), 0.0);
    for (size_t i = 0; i < st.pool.size(); ++i) {
        for (const auto& c : pool_contacts) {
            if (c.station_id != st.pool[i]->id) continue;
            st.station_contacts[i][c.satellite_id].push_back(c);
            st.station_total_gb[i] += c.data_volume_gb();
        }
    }

    std::vector<size_t> chosen;
    if (scenario.objective == Objective::MaxData)
        enumerate_max_data(st, chosen, 0, n);
    else
        enumerate_min_max_gap(st, chosen, 0, n);

    if (!st.found)
        throw InfeasibleError("solve_exact: every station subset leaves some satellite without "
                              "a contact (min-max-gap objective)");

    std::vector<std::string> station_ids;
    for (size_t idx : st.best_subset) station_ids.push_back(st.pool[idx]->id);
    SelectionSolution sol = evaluate_station_set(station_ids, pool_contacts, scenario, catalog);
    sol.method_label = MethodLabel::IpOptimal;
    return sol;
}

std::vector<std::string> audit_solution(const SelectionSolution& sol,
                                        const std::vector<ContactWindow>& contacts,
                                        const ScenarioConfig& scenario,
                                        const StationCatalog& catalog) {
    std::vector<std::string> issues;
    auto flag = [&](const std::string& msg) { issues.push_back(msg); };
    const bool virtual_stations = sol.method_label == MethodLabel::DbscanOnly;

    if (sol.station_ids.size() != static_cast<size_t>(scenario.n_stations))
        flag("station count " + std::to_string(sol.station_ids.size()) + " != n = " +
             std::to_string(scenario.n_stations));
    if (!std::is_sorted(sol.station_ids.begin(), sol.station_ids.end()))
        flag("station ids not sorted");
    if (std::adjacent_find(sol.station_ids.begin(), sol.station_ids.end()) != sol.station_ids.end())
        flag("duplicate station id in selection");

    std::set<std::string> chosen(sol.station_ids.begin(), sol.station_ids.end());
    if (!virtual_stations) {
        for (const auto& id : sol.station_ids)
            if (!catalog.find_station(id)) flag("selected station '" + id + "' not in catalog");
        const auto expected_providers = providers_of(sol.station_ids, catalog);
        if (expected_providers != sol.provider_ids) flag("provider linking inconsistent");
    }

    std::map<std::string, const ContactWindow*> by_id;
    for (const auto& c : contacts) by_id[c.id] = &c;

    double total_gb = 0.0;
    double worst_gap = 0.0;
    for (const auto& sched : sol.per_satellite) {
        const ContactWindow* prev = nullptr;
        double volume = 0.0;
        std::vector<ContactWindow> chain;
        bool resolvable = true;
        for (const auto& cid : sched.chain) {
            auto it = by_id.find(cid);
            if (it == by_id.end()) {
                if (!virtual_stations) flag("chain references unknown contact '" + cid + "'");
                resolvable = false;
                break;
            }
            const ContactWindow* c = it->second;
            chain.push_back(*c);
            if (c->satellite_id != sched.satellite_id)
                flag("chain contact '" + cid + "' belongs to another satellite");
            if (!chosen.count(c->station_id))
                flag("chain contact '" + cid + "' uses unselected station");
            if (c->duration < scenario.t_min_s)
                flag("chain contact '" + cid + "' shorter than t_min");
            if (prev && !(c->t_start > prev->t_end))
                flag("chain contacts '" + prev->id + "' and '" + cid + "' overlap or touch");
            prev = c;
            volume += c->data_volume_gb();
        }
        if (!resolvable) continue;
        if (std::fabs(volume - sched.data_volume_gb) > 1e-6)
            flag("satellite '" + sched.satellite_id + "' data volume mismatch");
        const auto gap = chain_max_gap(chain, scenario.t_sim_start, scenario.t_sim_end);
        if (gap.has_value() != sched.max_gap_s.has_value() ||
            (gap && std::fabs(*gap - *sched.max_gap_s) > 1e-6))
            flag("satellite '" + sched.satellite_id + "' max gap mismatch");
        if (scenario.objective == Objective::MinMaxGap && sched.chain.empty())
            flag("satellite '" + sched.satellite_id + "' has an empty chain under min-max-gap");
        total_gb += sched.data_volume_gb;
        if (sched.max_gap_s) worst_gap = std::max(worst_gap, *sched.max_gap_s);
    }

    // Objective recomputation only where the value is defined as the direct
    // aggregate of the chains (decomposed/diagnostic labels are approximate).
    if (sol.method_label != MethodLabel::IpDecomposed) {
        if (sol.objective_kind == Objective::MaxData) {
            const double expect =
                scale_to_mission(total_gb, scenario.t_sim_duration(), scenario.t_opt_duration());
            if (std::fabs(expect - sol.objective_value) > 1e-9 * std::max(1.0, std::fabs(expect)))
                flag("objective value does not match the sum of the chains");
        } else if (!sol.per_satellite.empty()) {
            if (std::fabs(worst_gap - sol.objective_value) > 1e-6)
                flag("objective value does not match the worst satellite gap");
        }
    }
    return issues;
}

nlohmann::ordered_json solution_to_json(const SelectionSolution& sol,
                                        const StationCatalog& catalog) {
    nlohmann::ordered_json doc;
    doc["method"] = to_string(sol.method_label);
    doc["objective"] = to_string(sol.objective_kind);
    if (sol.objective_kind == Objective::MaxData) {
        doc["value"] = sol.objective_value;
        doc["units"] = "PB";
    } else {
        doc["value"] = sol.objective_value / kSecondsPerHour;
        doc["units"] = "hours";
    }
    doc["stations"] = nlohmann::ordered_json::array();
    for (const auto& id : sol.station_ids) {
        nlohmann::ordered_json entry;
        entry["id"] = id;
        if (const GroundStation* s = catalog.find_station(id)) {
            entry["provider"] = s->provider_id;
            entry["lat"] = s->latitude_deg;
            entry["lon"] = s->longitude_deg;
        } else {
            entry["provider"] = "virtual";
        }
        doc["stations"].push_back(entry);
    }
    doc["per_satellite"] = nlohmann::ordered_json::array();
    for (const auto& sched : sol.per_satellite) {
        nlohmann::ordered_json entry;
        entry["sat"] = sched.satellite_id;
        entry["chain"] = sched.chain;
        if (sched.max_gap_s)
            entry["max_gap_s"] = *sched.max_gap_s;
        else
            entry["max_gap_s"] = nullptr;
        entry["data_gb"] = sched.data_volume_gb;
        doc["per_satellite"].push_back(entry);
    }
    return doc;
}

} // namespace gsopt
