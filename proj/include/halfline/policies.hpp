#pragma once

#include <string>
#include <vector>

#include "halfline/common.hpp"

namespace halfline {

inline constexpr int kUnmatched = -1;

// Users and capacitated servers at fixed positions on the half-line.
// Immutable once built; policies never modify their input, so different
// policies may run concurrently on the same instance.
struct SpatialInstance {
    std::vector<double> users;    // nondecreasing positions >= 0
    std::vector<double> servers;  // nondecreasing positions >= 0
    std::vector<int> capacities;  // one entry per server, all >= 1

    void validate() const;  // throws domain_error on any violated invariant
    long long total_capacity() const;
};

struct Assignment {
    std::vector<int> match;         // per user: server index, or kUnmatched
    std::vector<double> distances;  // |r_i - s_{match[i]}|; 0 when unmatched
    double totalCost = 0.0;         // sum of matched distances
    std::string policyName;

    int matchedCount() const;
};

struct BusyCycle {
    double begin = 0.0;  // a user position
    double end = 0.0;    // a server position
};

// Piecewise-constant coverage count N_x = #{matched i : r_i <= x < s_match(i)}.
// values[t] is N_x on [breakpoints[t], breakpoints[t+1]); the last value is 0
// (N_x vanishes right of the final breakpoint).
struct LoadProfile {
    std::vector<double> breakpoints;
    std::vector<int> values;
    std::vector<BusyCycle> busyCycles;

    double integral() const;  // equals the assignment's total cost
};

// Sequential scan: each user takes the leftmost server at position >= its own
// with remaining capacity.  Users that run out of rightward capacity stay
// unmatched (always a suffix of the user list).
Assignment mtr(const SpatialInstance& inst);

// Simultaneous rightward rays at unit speed: (user, server) crossing events
// processed in increasing distance s_j - r_i, claiming greedily.  Ties break
// toward (lower user index, lower server index).
Assignment ugs(const SpatialInstance& inst);

// Repeatedly match mutually nearest (user, server-slot) pairs, bidirectional
// distance, capacities expanded into unit slots.  Equivalent to processing
// candidate pairs globally in increasing (distance, user index, server index)
// order, matching whenever both sides are still free.
Assignment gale_shapley(const SpatialInstance& inst);

// Minimum-total-distance assignment of every user, capacities expanded into
// co-located unit slots.  Banded dynamic program over (user i, offset k):
// O(|R| (|S_slots| - |R| + 1)) time.  Output is monotone: matched slot indices
// strictly increase with user index.  Throws when users exceed total capacity.
Assignment optimal_dp(const SpatialInstance& inst);

// Exhaustive minimum over order-preserving slot subsets; oracle for
// optimal_dp.  Rejects |R| > 8 or more than ~10^7 subsets.
Assignment brute_force_optimal(const SpatialInstance& inst);

// Coverage profile of a unidirectional assignment (every matched server at or
// right of its user; otherwise throws).  Busy cycles are the maximal intervals
// with N_x > 0.
LoadProfile load_profile(const SpatialInstance& inst, const Assignment& a);

// Adversarial family with 2^{t-1} users: one server a unit step left of every
// user except the first, plus a distant escape server.  Nearest-pair greedy
// pays 2 - 2^{-(t-1)} times the optimal cost, strictly increasing in t.
SpatialInstance gs_adversarial_instance(int t);

// CSV import/export.  Instance files: header role,position,capacity with
// role in {user, server} (capacity ignored for users).  Assignment files:
// header user_index,user_pos,server_index,server_pos,distance with
// server_index -1 and empty trailing fields for unmatched users.
SpatialInstance load_instance_csv(const std::string& path);
void save_instance_csv(const std::string& path, const SpatialInstance& inst);
void save_assignment_csv(const std::string& path, const SpatialInstance& inst,
                         const Assignment& a);

}  // namespace halfline
