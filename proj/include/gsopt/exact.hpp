#ifndef GSOPT_EXACT_HPP
#define GSOPT_EXACT_HPP

#include "gsopt/catalog.hpp"
#include "gsopt/contacts.hpp"
#include "gsopt/schedule.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace gsopt {

enum class MethodLabel { IpOptimal, IpDecomposed, DbscanOnly, DbscanHungarian, KMedoids };

const char* to_string(MethodLabel m);
MethodLabel method_from_string(const std::string& s);

struct SelectionSolution {
    std::vector<std::string> station_ids;  // sorted, |set| = n
    std::vector<std::string> provider_ids; // providers of the selected stations
    std::vector<SatelliteSchedule> per_satellite; // sorted by satellite id
    Objective objective_kind = Objective::MaxData;
    // MaxData: petabytes over T_opt. MinMaxGap: seconds (full precision kept
    // internally; reports convert to hours).
    double objective_value = 0.0;
    MethodLabel method_label = MethodLabel::IpOptimal;
};

struct ExactOptions {
    std::uint64_t subset_budget = 5'000'000; // hard cap on C(|pool|, n)
    bool prune = true;                       // MaxData optimistic-bound pruning
};

// Evaluates a fixed station set: restricts the contacts to the set and runs
// the per-satellite oracle for the scenario objective. The satellite universe
// is the set of satellite ids present in `contacts`. Throws InfeasibleError
// for MinMaxGap when any satellite loses all its contacts.
SelectionSolution evaluate_station_set(const std::vector<std::string>& station_ids,
                                       const std::vector<ContactWindow>& contacts,
                                       const ScenarioConfig& scenario,
                                       const StationCatalog& catalog);

// Ground truth: enumerates every n-subset of the pool in lexicographic
// station-id order and returns the optimum (ties to the lexicographically
// smallest set). Equivalent to the full IP because, for a fixed station set,
// the contact problem separates per satellite into the `schedule` oracles.
SelectionSolution solve_exact(const ScenarioConfig& scenario,
                              const std::vector<GroundStation>& pool,
                              const std::vector<ContactWindow>& contacts,
                              const StationCatalog& catalog,
                              const ExactOptions& options = {});

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap);

// Structural audit used by the test suites: station count, chain ordering and
// exclusivity, min-duration, provider linking, objective recomputation.
// Returns human-readable violations; empty means the solution is sound.
std::vector<std::string> audit_solution(const SelectionSolution& solution,
                                        const std::vector<ContactWindow>& contacts,
                                        const ScenarioConfig& scenario,
                                        const StationCatalog& catalog);

// Solution report:
// {method, objective, value, units, stations:[...], per_satellite:[...]}.
nlohmann::ordered_json solution_to_json(const SelectionSolution& solution,
                                        const StationCatalog& catalog);

} // namespace gsopt

#endif // GSOPT_EXACT_HPP
