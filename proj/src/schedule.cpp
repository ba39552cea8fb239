#include "gsopt/schedule.hpp"
#include "gsopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsopt {

namespace {

void require_single_satellite(const std::vector<ContactWindow>& contacts) {
    for (size_t i = 1; i < contacts.size(); ++i)
        if (contacts[i].satellite_id != contacts[0].satellite_id)
            throw InputError("schedule: contacts mix satellites '" + contacts[0].satellite_id +
                             "' and '" + contacts[i].satellite_id + "'");
}

std::vector<size_t> indices_by_start(const std::vector<ContactWindow>& contacts) {
    std::vector<size_t> order(contacts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (contacts[a].t_start != contacts[b].t_start) return contacts[a].t_start < contacts[b].t_start;
        if (contacts[a].t_end != contacts[b].t_end) return contacts[a].t_end < contacts[b].t_end;
        return contacts[a].id < contacts[b].id;
    });
    return order;
}

} // namespace

std::optional<double> chain_max_gap(const std::vector<ContactWindow>& chain, double window_start,
                                    double window_end) {
    if (chain.empty()) return std::nullopt;
    double gap = chain.front().t_start - window_start;
    for (size_t i = 1; i < chain.size(); ++i)
        gap = std::max(gap, chain[i].t_start - chain[i - 1].t_end);
    gap = std::max(gap, window_end - chain.back().t_end);
    return gap;
}

SatelliteSchedule max_data_schedule(const std::vector<ContactWindow>& contacts,
                                    double window_start, double window_end) {
    require_single_satellite(contacts);

    SatelliteSchedule schedule;
    if (!contacts.empty()) schedule.satellite_id = contacts[0].satellite_id;
    if (contacts.empty()) return schedule;

    const auto order = indices_by_start(contacts);
    const size_t n = order.size();
    std::vector<double> starts(n);
    for (size_t k = 0; k < n; ++k) starts[k] = contacts[order[k]].t_start;

    // best[k] = value of the best chain that starts with the k-th
    // (start-sorted) contact; suffix[k] = max best[k..n).
    std::vector<double> best(n, 0.0), suffix(n + 1, 0.0);
    auto first_after = [&](double t) {
        return static_cast<size_t>(std::upper_bound(starts.begin(), starts.end(), t) -
                                   starts.begin());
    };
    for (size_t k = n; k-- > 0;) {
        const ContactWindow& c = contacts[order[k]];
        best[k] = c.data_volume_gb() + suffix[first_after(c.t_end)];
        suffix[k] = std::max(best[k], suffix[k + 1]);
    }

    // Reconstruct the optimal chain, at every step taking the smallest-id
    // contact that still attains the remaining optimum. Stops as soon as the
    // remaining optimum is zero, so the chain is lexicographically minimal.
    std::vector<ContactWindow> chain;
    double frontier = -std::numeric_limits<double>::infinity();
    size_t from = 0;
    while (true) {
        from = first_after(frontier);
        if (from >= n) break;
        const double target = suffix[from];
        if (target <= 0.0) break;
        size_t pick = n;
        for (size_t k = from; k < n; ++k) {
            if (best[k] == target &&
                (pick == n || contacts[order[k]].id < contacts[order[pick]].id))
                pick = k;
        }
        const ContactWindow& c = contacts[order[pick]];
        chain.push_back(c);
        schedule.chain.push_back(c.id);
        schedule.data_volume_gb += c.data_volume_gb();
        frontier = c.t_end;
    }
    schedule.max_gap_s = chain_max_gap(chain, window_start, window_end);
    return schedule;
}

std::optional<std::vector<ContactWindow>> feasible_with_gap(
    const std::vector<ContactWindow>& contacts, double gap_s, double window_start,
    double window_end) {
    if (gap_s < 0.0) throw InputError("feasible_with_gap: gap must be >= 0");
    require_single_satellite(contacts);
    if (contacts.empty()) return std::nullopt;

    // Chains are paths in the DAG with an edge c -> d when d can follow c
    // within the gap bound: d.start in (c.end, c.end + G]. A simple latest-end
    // greedy is not exact here: taking a longer contact can disqualify every
    // successor that starts before it ends. can_finish[k] marks contacts from
    // which the window end is reachable.
    const auto order = indices_by_start(contacts);
    const size_t n = order.size();
    std::vector<double> starts(n), ends(n);
    for (size_t k = 0; k < n; ++k) {
        starts[k] = contacts[order[k]].t_start;
        ends[k] = contacts[order[k]].t_end;
    }
    auto range_for = [&](double lo_exclusive, double hi_inclusive) {
        const size_t from = static_cast<size_t>(
            std::upper_bound(starts.begin(), starts.end(), lo_exclusive) - starts.begin());
        const size_t to = static_cast<size_t>(
            std::upper_bound(starts.begin(), starts.end(), hi_inclusive) - starts.begin());
        return std::pair<size_t, size_t>(from, to);
    };

    std::vector<char> can_finish(n, 0);
    for (size_t k = n; k-- > 0;) {
        if (window_end - ends[k] <= gap_s) {
            can_finish[k] = 1;
            continue;
        }
        const auto [from, to] = range_for(ends[k], ends[k] + gap_s);
        for (size_t j = from; j < to; ++j) {
            if (can_finish[j]) {
                can_finish[k] = 1;
                break;
            }
        }
    }

    // Deterministic witness chain: smallest-id admissible contact each step.
    std::vector<ContactWindow> chain;
    double prev_end = window_start;
    bool have_prev = false;
    while (!(have_prev && window_end - prev_end <= gap_s)) {
        size_t pick = n;
        size_t from = 0, to = 0;
        if (!have_prev) {
            to = static_cast<size_t>(
                std::upper_bound(starts.begin(), starts.end(), window_start + gap_s) -
                starts.begin());
        } else {
            std::tie(from, to) = range_for(prev_end, prev_end + gap_s);
        }
        for (size_t j = from; j < to; ++j) {
            if (!can_finish[j]) continue;
            if (pick == n || contacts[order[j]].id < contacts[order[pick]].id) pick = j;
        }
        if (pick == n) return std::nullopt;
        chain.push_back(contacts[order[pick]]);
        prev_end = ends[pick];
        have_prev = true;
    }
    return chain;
}

SatelliteSchedule min_max_gap_schedule(const std::vector<ContactWindow>& contacts,
                                       double window_start, double window_end) {
    require_single_satellite(contacts);
    if (contacts.empty())
        throw InfeasibleError("min_max_gap: satellite has no contact in the window");

    // The optimal G is always one of these differences.
    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (const auto& ci : contacts) {
        if (ci.t_start - window_start >= 0.0) candidates.push_back(ci.t_start - window_start);
        if (window_end - ci.t_end >= 0.0) candidates.push_back(window_end - ci.t_end);
        for (const auto& cj : contacts) {
            const double gap = cj.t_start - ci.t_end;
            if (gap > 0.0) candidates.push_back(gap);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    size_t lo = 0, hi = candidates.size() - 1;
    if (!feasible_with_gap(contacts, candidates[hi], window_start, window_end))
        throw InfeasibleError("min_max_gap: no feasible chain (contacts outside window?)");
    while (lo < hi) {
        const size_t mid = lo + (hi - lo) / 2;
        if (feasible_with_gap(contacts, candidates[mid], window_start, window_end))
            hi = mid;
        else
            lo = mid + 1;
    }

    const auto chain = *feasible_with_gap(contacts, candidates[lo], window_start, window_end);
    SatelliteSchedule schedule;
    schedule.satellite_id = contacts[0].satellite_id;
    for (const auto& c : chain) {
        schedule.chain.push_back(c.id);
        schedule.data_volume_gb += c.data_volume_gb();
    }
    schedule.max_gap_s = chain_max_gap(chain, window_start, window_end);
    return schedule;
}

double scale_to_mission(double data_volume_gb, double t_sim_s, double t_opt_s) {
    if (!(t_sim_s > 0.0)) throw InputError("scale_to_mission: T_sim must be positive");
    return data_volume_gb * (t_opt_s / t_sim_s) / 8.0e6;
}

} // namespace gsopt
