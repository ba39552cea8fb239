#ifndef GSOPT_SCHEDULE_HPP
#define GSOPT_SCHEDULE_HPP

#include "gsopt/contacts.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gsopt {

// One satellite's scheduled contact chain. The time-ordered chain encodes the
// successor structure directly: pairwise non-overlapping, strictly increasing.
struct SatelliteSchedule {
    std::string satellite_id;
    std::vector<std::string> chain; // contact ids in time order
    double data_volume_gb = 0.0;
    // max over (first start - window start), consecutive (start_j - end_i),
    // (window end - last end). Empty chain -> nullopt (no gap is defined).
    std::optional<double> max_gap_s;
};

// Maximum-data chain: maximizes sum of datarate*duration over pairwise
// non-overlapping contacts (weighted interval scheduling). Ties broken toward
// the lexicographically smallest contact-id chain. Window bounds are only used
// to report the chain's max gap.
SatelliteSchedule max_data_schedule(const std::vector<ContactWindow>& contacts,
                                    double window_start, double window_end);

// Decision oracle: a chain whose boundary and inter-contact gaps are all <= G,
// or nullopt. Greedy from the window start, always taking the admissible
// contact with the latest end (ties by smaller id).
std::optional<std::vector<ContactWindow>> feasible_with_gap(
    const std::vector<ContactWindow>& contacts, double gap_s, double window_start,
    double window_end);

// Minimum-max-gap chain via binary search over the finite candidate gap set
// (boundary offsets and pairwise start-end differences); the optimum is always
// a member of that set. Throws InfeasibleError when no contact exists.
SatelliteSchedule min_max_gap_schedule(const std::vector<ContactWindow>& contacts,
                                       double window_start, double window_end);

// Scales a surrogate-horizon data volume to the mission horizon and converts
// gigabits to petabytes (1 PB = 1e15 bytes = 8e6 gigabits).
double scale_to_mission(double data_volume_gb, double t_sim_s, double t_opt_s);

// Max gap of a time-ordered chain against the window, nullopt for empty chains.
std::optional<double> chain_max_gap(const std::vector<ContactWindow>& chain,
                                    double window_start, double window_end);

} // namespace gsopt

#endif // GSOPT_SCHEDULE_HPP
