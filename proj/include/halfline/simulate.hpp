#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "halfline/common.hpp"
#include "halfline/distributions.hpp"
#include "halfline/policies.hpp"
#include "halfline/rng.hpp"

namespace halfline {

inline constexpr std::uint64_t kDefaultSeed = 1729;

// Server capacity: a fixed value, or an i.i.d. draw from a pmf over {1..c}.
struct CapacitySpec {
    int fixed = 1;
    std::vector<double> pmf;  // pmf[i] = P(capacity = i+1); empty -> fixed

    void validate() const;
    double mean() const;
    int max_capacity() const;
    std::string describe() const;  // "2" or "pmf:0.25,0.25,0.25,0.25"
};

struct SimConfig {
    std::size_t nUsers = 100000;
    DistanceDistribution interUser = DistanceDistribution::exponential(0.5);
    DistanceDistribution interServer = DistanceDistribution::exponential(1.0);
    CapacitySpec capacity;
    int trials = 50;
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::string> policies = {"mtr", "ugs"};
    int jobs = 1;

    double lambda() const { return 1.0 / interUser.mean(); }
    double mu() const { return 1.0 / interServer.mean(); }
    void validate() const;  // parameter sanity plus stability of (lambda, mu, mean capacity)
};

// One generated instance: user positions are cumulative renewal sums; servers
// are generated until the sequential rightward policy matches every user or
// the server count reaches nUsers, whichever comes first.
struct GeneratedInstance {
    SpatialInstance instance;       // all users, generated servers
    Assignment mtr;                 // sequential rightward assignment
    std::size_t mtrMatchedCount = 0;  // matched users form a prefix
};

GeneratedInstance generate_instance(const SimConfig& cfg, std::uint32_t trialIdx);

struct PolicyTrialStats {
    std::string policy;
    double meanDistance = 0.0;   // over users inside completed busy cycles
    double variance = 0.0;       // sample variance of those distances
    double totalDistance = 0.0;
    std::size_t usersCounted = 0;
};

struct TrialOutput {
    std::vector<PolicyTrialStats> policies;
    double matchedFraction = 0.0;  // matched users / nUsers
    bool lowMatchWarning = false;  // matched fraction < 0.5
    std::size_t usersFiltered = 0;
    std::size_t serverCount = 0;
};

// Runs the full protocol for one trial: renewal draws keyed by
// (seed, trialIdx, role), rightward matching first, then the remaining
// requested policies on the matched prefix against the full server set.
// Statistics cover only users in completed busy cycles (the final cycle is
// dropped to avoid right-boundary bias).
TrialOutput run_trial(const SimConfig& cfg, std::uint32_t trialIdx);

struct PolicySummary {
    std::string policy;
    double meanDistance = 0.0;  // mean of per-trial means
    double stderrMean = 0.0;    // sample std of per-trial means / sqrt(trials)
    double variance = 0.0;      // mean of per-trial within-trial variances
};

struct SimResult {
    std::vector<PolicySummary> policies;
    std::vector<TrialOutput> trials;  // ordered by trial index
    double matchedFraction = 0.0;     // mean over trials
    bool lowMatchWarning = false;
};

// Runs cfg.trials independent trials (at most cfg.jobs concurrently) and
// folds them in trial order, so results are identical at any parallelism.
SimResult run_simulation(const SimConfig& cfg);

// Checks breakpoint-for-breakpoint equality of the rightward policies' load
// profiles over the matched prefixes of freshly generated instances (users
// past the right edge of the finite server pool are a truncation artifact).
// The first mismatch, if any, is serialized in instance CSV form.
struct Theorem1Report {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::string offendingInstanceCsv;

    bool passed() const { return failures == 0; }
};

Theorem1Report verify_theorem1(const SimConfig& cfg, std::size_t instances);

// Per-trial within-trial distance variances of the two rightward policies,
// and how often the sequential one is no more spread out.
struct VarianceReport {
    std::size_t trials = 0;
    std::size_t mtrNoWorse = 0;
    double fraction = 0.0;
    double meanVarianceMtr = 0.0;
    double meanVarianceUgs = 0.0;
};

VarianceReport variance_comparison(const SimConfig& cfg);

// One sweep point: an axis value, a full config, and optional closed-form
// expectations keyed by policy name.
struct SweepPoint {
    double axisValue = 0.0;
    SimConfig config;
    std::vector<std::pair<std::string, double>> analytic;
};

struct SweepRow {
    double axisValue = 0.0;
    std::string policy;
    double meanDistance = 0.0;
    double stderrMean = 0.0;
    double variance = 0.0;
    double matchedFraction = 0.0;
    bool hasAnalytic = false;
    double analyticValue = 0.0;
    double ratio = 0.0;  // analyticValue / meanDistance
    bool failed = false;
    std::string error;
};

// Builds sweep points from a template by varying one parameter:
//   "lambda"     exponential user rate
//   "load"       exponential user rate = value * mu * mean capacity
//   "capacity"   fixed capacity (integer values)
//   "cv2_user"   user gaps H2 with this squared cv (mean preserved)
//   "cv2_server" server gaps H2 with this squared cv (mean preserved)
// Each point carries the matching closed-form value for the rightward
// policies when one of the solved models applies.
std::vector<SweepPoint> sweep_points(const SimConfig& tmpl, const std::string& axis,
                                     const std::vector<double>& values);

// Simulates every point; a point that throws is recorded as a failed row and
// the sweep continues.
std::vector<SweepRow> run_sweep(const std::vector<SweepPoint>& points);

// CSV with "# key=value" provenance comments, then
// axis_value,policy,mean_distance,stderr,variance,matched_fraction,analytic_value,ratio
// rows in %.12g.  Identical (points, provenance) give byte-identical files.
std::string sweep_csv(const std::vector<SweepRow>& rows,
                      const std::vector<std::pair<std::string, std::string>>& provenance);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& provenance);

// Closed-form expected distance for the rightward policies under cfg, when a
// solved model matches the configuration shape (pair.second false otherwise).
std::pair<double, bool> unidirectional_analytic_value(const SimConfig& cfg);

}  // namespace halfline
