// Acceptance checks for the toolkit: closed forms against independent
// anchors, policy equivalences, and Monte Carlo cross-validation.  Each
// criterion prints exactly one PASS/FAIL line; the exit status is the number
// of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "halfline/analytic.hpp"
#include "halfline/common.hpp"
#include "halfline/distributions.hpp"
#include "halfline/numerics.hpp"
#include "halfline/policies.hpp"
#include "halfline/simulate.hpp"

using namespace halfline;

namespace {

int gFailures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++gFailures;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimConfig base_config(std::size_t n, int trials) {
    SimConfig cfg;
    cfg.nUsers = n;
    cfg.trials = trials;
    cfg.interUser = DistanceDistribution::exponential(0.5);
    cfg.interServer = DistanceDistribution::exponential(1.0);
    cfg.capacity = CapacitySpec{1, {}};
    cfg.policies = {"mtr"};
    return cfg;
}

// --------------------------------------------------------------------------

// 1. Sequential rightward simulation reproduces 1/(mu - lambda) quickly.
void criterion1() {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        SimConfig cfg = base_config(1000000, 5);
        const SimResult res = run_simulation(cfg);
        const double elapsed = seconds_since(t0);
        const double mean = res.policies[0].meanDistance;
        const bool ok = std::abs(mean - 2.0) < 0.02 && elapsed < 10.0;
        report(1, "1e6-user rightward run lands within 1% of 2.0 in under 10 s", ok,
               "mean=" + num(mean) + " elapsed=" + num(elapsed) + "s");
    } catch (const std::exception& e) {
        report(1, "1e6-user rightward run", false, e.what());
    }
}

// 2. Capacity-2 closed form and simulation agree.
void criterion2() {
    try {
        const BulkMM1Solved s = bulk_mm1_solve({0.5, 1.0, 2});
        SimConfig cfg = base_config(200000, 10);
        cfg.capacity = CapacitySpec{2, {}};
        const SimResult res = run_simulation(cfg);
        const double sim = res.policies[0].meanDistance;
        const bool okAnalytic = std::abs(s.expectedDistance - 1.154701) < 1e-6;
        const bool okSim = std::abs(sim - s.expectedDistance) / s.expectedDistance < 0.02;
        report(2, "capacity-2 value 1.154701 confirmed by simulation",
               okAnalytic && okSim,
               "analytic=" + num(s.expectedDistance) + " sim=" + num(sim));
    } catch (const std::exception& e) {
        report(2, "capacity-2 value", false, e.what());
    }
}

// 3. The four solvers coincide on their common exponential core.
void criterion3() {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (const double lambda : {0.3, 0.5, 0.8}) {
            for (const int c : {1, 2, 4}) {
                const double bulk = bulk_mm1_solve({lambda, 1.0, c}).expectedDistance;
                const double grps =
                    grps_solve({DistanceDistribution::exponential(lambda), 1.0, c})
                        .expectedDistance;
                const double prgs =
                    prgs_solve({lambda, DistanceDistribution::exponential(1.0), c})
                        .expectedDistance;
                std::vector<double> pmf(static_cast<std::size_t>(c), 0.0);
                pmf.back() = 1.0;
                const double het =
                    hetcap_solve({lambda, DistanceDistribution::exponential(1.0), pmf})
                        .expectedDistance;
                for (const double v : {grps, prgs, het}) {
                    worst = std::max(worst, std::abs(v - bulk));
                }
            }
        }
        const double elapsed = seconds_since(t0);
        const bool ok = worst < 1e-8 && elapsed < 1.0;
        report(3, "solver lattice agrees on the exponential core", ok,
               "max_abs_dev=" + num(worst) + " elapsed=" + num(elapsed) + "s");
    } catch (const std::exception& e) {
        report(3, "solver lattice", false, e.what());
    }
}

// 4. Capacity-1 boundary weight equals the renewal-reward empty fraction.
void criterion4() {
    try {
        struct Case {
            double lambda;
            DistanceDistribution dist;
        };
        const std::vector<Case> cases = {
            {0.5, DistanceDistribution::deterministic(1.0)},
            {0.3, DistanceDistribution::deterministic(2.0)},
            {0.6, DistanceDistribution::uniform(2.0)},
            {0.25, DistanceDistribution::uniform(3.0)},
            {0.4, h2_from_cv(4.0, 1.0)},
            {0.2, h2_from_cv(2.0, 2.0)},
            {0.3, DistanceDistribution::exponential(1.0)},
            {0.8, DistanceDistribution::exponential(1.0)},
        };
        double worst = 0.0;
        for (const Case& cs : cases) {
            const PrgsSolved s = prgs_solve({cs.lambda, cs.dist, 1});
            const double rho = cs.lambda * cs.dist.mean();
            const double rhoZ = cs.lambda * exceptional(cs.dist, cs.lambda).mean;
            const double predicted = (1.0 - rho) / (1.0 - rho + rhoZ);
            worst = std::max(worst, std::abs(s.a[0] / s.model.lambda - predicted));
        }
        const double expDist =
            prgs_solve({0.5, DistanceDistribution::exponential(1.0), 1}).expectedDistance;
        const double expDev = std::abs(expDist - 2.0);
        const bool ok = worst < 1e-10 && expDev < 1e-10;
        report(4, "capacity-1 empty weight matches renewal-reward form", ok,
               "max_dev=" + num(worst) + " exp_dev=" + num(expDev));
    } catch (const std::exception& e) {
        report(4, "capacity-1 empty weight", false, e.what());
    }
}

// 5. The two rightward policies give identical load profiles.
void criterion5() {
    try {
        std::size_t failures = 0;
        std::size_t instances = 0;
        for (const CapacitySpec& spec :
             {CapacitySpec{1, {}}, CapacitySpec{3, {}},
              CapacitySpec{1, {0.25, 0.25, 0.25, 0.25}}}) {
            SimConfig cfg = base_config(300, 1);
            cfg.capacity = spec;
            const Theorem1Report rep = verify_theorem1(cfg, 1000);
            failures += rep.failures;
            instances += rep.instances;
        }
        report(5, "rightward equivalence on 3000 generated instances", failures == 0,
               "instances=" + std::to_string(instances) +
                   " mismatches=" + std::to_string(failures));
    } catch (const std::exception& e) {
        report(5, "rightward equivalence", false, e.what());
    }
}

// 6. The exact assignment matches brute force and scales.
void criterion6() {
    try {
        std::mt19937_64 rng(123);
        std::uniform_real_distribution<double> pos(0.0, 10.0);
        std::uniform_int_distribution<int> capDraw(1, 3);
        std::size_t mismatches = 0;
        for (int k = 0; k < 500; ++k) {
            std::uniform_int_distribution<std::size_t> nDraw(1, 6);
            const std::size_t n = nDraw(rng);
            std::uniform_int_distribution<std::size_t> mDraw(n, 9);
            const std::size_t m = mDraw(rng);
            SpatialInstance inst;
            for (std::size_t i = 0; i < n; ++i) inst.users.push_back(pos(rng));
            for (std::size_t j = 0; j < m; ++j) {
                inst.servers.push_back(pos(rng));
                inst.capacities.push_back(capDraw(rng));
            }
            std::sort(inst.users.begin(), inst.users.end());
            std::sort(inst.servers.begin(), inst.servers.end());
            const double dp = optimal_dp(inst).totalCost;
            const double bf = brute_force_optimal(inst).totalCost;
            if (std::abs(dp - bf) > 1e-9) ++mismatches;
        }

        SpatialInstance big;
        std::uniform_real_distribution<double> bigPos(0.0, 11000.0);
        for (int i = 0; i < 10000; ++i) big.users.push_back(bigPos(rng));
        for (int j = 0; j < 11000; ++j) {
            big.servers.push_back(bigPos(rng));
            big.capacities.push_back(1);
        }
        std::sort(big.users.begin(), big.users.end());
        std::sort(big.servers.begin(), big.servers.end());
        const auto t0 = std::chrono::steady_clock::now();
        const Assignment a = optimal_dp(big);
        const double elapsed = seconds_since(t0);
        const bool okBig = a.matchedCount() == 10000 && elapsed < 1.0;
        report(6, "exact assignment equals brute force and solves 1e4 users fast",
               mismatches == 0 && okBig,
               "mismatches=" + std::to_string(mismatches) + "/500 big_elapsed=" +
                   num(elapsed) + "s");
    } catch (const std::exception& e) {
        report(6, "exact assignment checks", false, e.what());
    }
}

// 7. The lazy-policy distance density integrates to one, has the right mean,
//    and matches a large simulated sample.
void criterion7() {
    try {
        const double lambda = 0.5, mu = 1.0;
        auto f = [&](double x) { return ugs_distance_density(lambda, mu, x); };
        double total = 0.0, mean = 0.0;
        const std::vector<double> cuts = {0.0, 1.0, 10.0, 50.0, 400.0};
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            total += adaptive_simpson(f, cuts[i], cuts[i + 1], 1e-10);
            mean += adaptive_simpson([&](double x) { return x * f(x); }, cuts[i],
                                     cuts[i + 1], 1e-10);
        }
        const bool okDensity = std::abs(total - 1.0) < 1e-6 && std::abs(mean - 2.0) < 1e-5;

        // One long run; statistics on users inside completed busy cycles.
        SimConfig cfg = base_config(2200000, 1);
        const GeneratedInstance g = generate_instance(cfg, 0);
        SpatialInstance inst;
        inst.users.assign(g.instance.users.begin(),
                          g.instance.users.begin() +
                              static_cast<std::ptrdiff_t>(g.mtrMatchedCount));
        inst.servers = g.instance.servers;
        inst.capacities = g.instance.capacities;
        const Assignment u = ugs(inst);
        std::vector<std::size_t> starts;
        double maxEnd = -1.0;
        for (std::size_t i = 0; i < inst.users.size(); ++i) {
            if (inst.users[i] > maxEnd) starts.push_back(i);
            maxEnd = std::max(maxEnd,
                              inst.servers[static_cast<std::size_t>(g.mtr.match[i])]);
        }
        const std::size_t filtered = starts.size() >= 2 ? starts.back() : 0;
        std::vector<double> sample(u.distances.begin(),
                                   u.distances.begin() +
                                       static_cast<std::ptrdiff_t>(filtered));
        std::sort(sample.begin(), sample.end());

        // Cumulative Simpson grid for the analytic CDF.
        const double xmax = 120.0;
        const int steps = 48000;
        const double h = xmax / steps;
        std::vector<double> cdf(static_cast<std::size_t>(steps) + 1, 0.0);
        for (int i = 0; i < steps; ++i) {
            const double x = i * h;
            cdf[static_cast<std::size_t>(i) + 1] =
                cdf[static_cast<std::size_t>(i)] +
                h / 6.0 * (f(x) + 4.0 * f(x + 0.5 * h) + f(x + h));
        }
        auto F = [&](double x) {
            if (x >= xmax) return cdf.back();
            const double t = x / h;
            const auto i = static_cast<std::size_t>(t);
            const double frac = t - static_cast<double>(i);
            return cdf[i] + frac * (cdf[i + 1] - cdf[i]);
        };
        double ks = 0.0;
        const double n = static_cast<double>(sample.size());
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double Fx = F(sample[i]);
            ks = std::max(ks, std::abs(Fx - static_cast<double>(i) / n));
            ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - Fx));
        }
        const bool okKs = sample.size() >= 1000000 && ks < 0.01;
        report(7, "lazy-policy distance law: normalization, mean, and KS fit",
               okDensity && okKs,
               "integral=" + num(total) + " mean=" + num(mean) + " ks=" + num(ks) +
                   " n=" + std::to_string(sample.size()));
    } catch (const std::exception& e) {
        report(7, "lazy-policy distance law", false, e.what());
    }
}

// 8. Capacity 64 sits within 1% of the uncapacitated limits on both sides.
void criterion8() {
    try {
        double worst = 0.0;
        // Renewal users, Poisson servers: limit 1/mu.
        for (const DistanceDistribution& d :
             {DistanceDistribution::exponential(0.5), DistanceDistribution::deterministic(2.0),
              DistanceDistribution::uniform(4.0), h2_from_cv(4.0, 2.0)}) {
            const double v = grps_solve({d, 1.0, 64}).expectedDistance;
            const double lim = uncapacitated_expected_distance(QueueSide::GRPS, d, 1.0);
            worst = std::max(worst, std::abs(v - lim) / lim);
        }
        // Poisson users, renewal servers: limit E[X^2] / (2 E[X]).
        for (const DistanceDistribution& d :
             {DistanceDistribution::exponential(1.0), DistanceDistribution::deterministic(1.0),
              DistanceDistribution::uniform(2.0), h2_from_cv(4.0, 1.0)}) {
            const double v = prgs_solve({0.5, d, 64}).expectedDistance;
            const double lim = uncapacitated_expected_distance(QueueSide::PRGS, d, 0.0);
            worst = std::max(worst, std::abs(v - lim) / lim);
        }
        report(8, "capacity 64 within 1% of the uncapacitated limits", worst < 0.01,
               "max_rel_dev=" + num(worst));
    } catch (const std::exception& e) {
        report(8, "uncapacitated limits", false, e.what());
    }
}

// 9. The heavy-traffic estimate closes in on simulation as rho -> 1.
void criterion9() {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::string detail;
        for (const DistanceDistribution& d :
             {DistanceDistribution::deterministic(1.0), DistanceDistribution::uniform(2.0)}) {
            double ratios[2] = {0.0, 0.0};
            const double rhos[2] = {0.5, 0.98};
            for (int i = 0; i < 2; ++i) {
                SimConfig cfg = base_config(100000, 50);
                cfg.interUser = DistanceDistribution::exponential(rhos[i]);
                cfg.interServer = d;
                const SimResult res = run_simulation(cfg);
                const double est =
                    heavy_traffic_estimate(cfg.interUser, cfg.interServer);
                ratios[i] = est / res.policies[0].meanDistance;
            }
            ok = ok && std::abs(ratios[1] - 1.0) < 0.10 &&
                 std::abs(ratios[1] - 1.0) < std::abs(ratios[0] - 1.0);
            if (!detail.empty()) detail += " ";
            detail += d.describe() + ": r(0.5)=" + num(ratios[0]) +
                      " r(0.98)=" + num(ratios[1]);
        }
        const double elapsed = seconds_since(t0);
        ok = ok && elapsed < 120.0;
        report(9, "heavy-traffic estimate tightens toward rho = 1", ok,
               detail + " elapsed=" + num(elapsed) + "s");
    } catch (const std::exception& e) {
        report(9, "heavy-traffic estimate", false, e.what());
    }
}

// 10. Qualitative trends: variability ordering, side asymmetry, capacity
//     monotonicity, and the policy hierarchy.
void criterion10() {
    try {
        bool okVariability = true;
        for (const double load : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
            const double lambda = 2.0 * load;
            const double det =
                prgs_solve({lambda, DistanceDistribution::deterministic(1.0), 2})
                    .expectedDistance;
            const double exp = bulk_mm1_solve({lambda, 1.0, 2}).expectedDistance;
            const double h2 =
                prgs_solve({lambda, h2_from_cv(4.0, 1.0), 2}).expectedDistance;
            okVariability = okVariability && det < exp && exp < h2;
        }

        bool okSides = true;
        for (const double cv2 : {2.0, 4.0, 8.0}) {
            const double mh2 =
                prgs_solve({1.0, h2_from_cv(cv2, 1.0), 2}).expectedDistance;
            const double h2m =
                grps_solve({h2_from_cv(cv2, 1.0), 1.0, 2}).expectedDistance;
            okSides = okSides && mh2 >= h2m - 1e-12;
        }

        bool okCapacity = true;
        for (const DistanceDistribution& d :
             {DistanceDistribution::exponential(1.0), DistanceDistribution::deterministic(1.0),
              DistanceDistribution::uniform(2.0), h2_from_cv(4.0, 1.0)}) {
            double prev = 0.0;
            for (int c = 1; c <= 16; ++c) {
                const double v = prgs_solve({0.8, d, c}).expectedDistance;
                if (c > 1) okCapacity = okCapacity && v <= prev + 1e-9;
                prev = v;
            }
        }

        bool okHierarchy = true;
        std::string worstGap;
        for (const double rho :
             {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
            SimConfig cfg = base_config(5000, 10);
            cfg.interUser = DistanceDistribution::exponential(rho);
            cfg.policies = {"mtr", "gs", "optimal"};
            const SimResult res = run_simulation(cfg);
            const double mtrMean = res.policies[0].meanDistance;
            const double gsMean = res.policies[1].meanDistance;
            const double optMean = res.policies[2].meanDistance;
            okHierarchy =
                okHierarchy && optMean <= gsMean + 1e-9 && gsMean <= mtrMean + 1e-9;
        }
        const bool ok = okVariability && okSides && okCapacity && okHierarchy;
        report(10, "trend checks: variability, sides, capacity, policy hierarchy", ok,
               std::string("variability=") + (okVariability ? "ok" : "BAD") +
                   " sides=" + (okSides ? "ok" : "BAD") + " capacity=" +
                   (okCapacity ? "ok" : "BAD") + " hierarchy=" +
                   (okHierarchy ? "ok" : "BAD"));
    } catch (const std::exception& e) {
        report(10, "trend checks", false, e.what());
    }
}

// 11. Random capacities: closed form within two standard errors of simulation.
void criterion11() {
    try {
        bool ok = true;
        std::string detail;
        for (const DistanceDistribution& d :
             {DistanceDistribution::deterministic(1.0), h2_from_cv(4.0, 1.0)}) {
            const std::vector<double> pmf = {0.25, 0.25, 0.25, 0.25};
            const double analytic = hetcap_solve({2.0, d, pmf}).expectedDistance;
            SimConfig cfg = base_config(400000, 12);
            cfg.interUser = DistanceDistribution::exponential(2.0);
            cfg.interServer = d;
            cfg.capacity = CapacitySpec{1, pmf};
            const SimResult res = run_simulation(cfg);
            const double sim = res.policies[0].meanDistance;
            const double se = res.policies[0].stderrMean;
            ok = ok && std::abs(sim - analytic) < 2.0 * se;
            if (!detail.empty()) detail += " ";
            detail += d.describe() + ": analytic=" + num(analytic) + " sim=" + num(sim) +
                      " se=" + num(se);
        }
        report(11, "random-capacity closed form within 2 se of simulation", ok, detail);
    } catch (const std::exception& e) {
        report(11, "random-capacity closed form", false, e.what());
    }
}

// 12. The sequential policy's distances are less spread out than the lazy ones.
void criterion12() {
    try {
        SimConfig cfg = base_config(20000, 100);
        cfg.interUser = DistanceDistribution::exponential(0.8);
        const VarianceReport rep = variance_comparison(cfg);
        report(12, "sequential variance no worse in at least 95% of 100 trials",
               rep.fraction >= 0.95,
               "fraction=" + num(rep.fraction) + " var_seq=" + num(rep.meanVarianceMtr) +
                   " var_lazy=" + num(rep.meanVarianceUgs));
    } catch (const std::exception& e) {
        report(12, "variance comparison", false, e.what());
    }
}

// 13. The adversarial family pushes the bidirectional greedy toward 2x.
void criterion13() {
    try {
        double prev = 0.0;
        bool ok = true;
        std::string detail;
        for (int t = 3; t <= 7; ++t) {
            const SpatialInstance inst = gs_adversarial_instance(t);
            const double gs = gale_shapley(inst).totalCost;
            const double opt = optimal_dp(inst).totalCost;
            const double ratio = gs / opt;
            const double predicted = 2.0 - std::pow(2.0, -(t - 1));
            ok = ok && ratio > prev && std::abs(ratio - predicted) < 1e-9;
            prev = ratio;
            if (!detail.empty()) detail += " ";
            detail += "t" + std::to_string(t) + "=" + num(ratio);
        }
        report(13, "greedy/optimal ratio strictly increasing toward 2", ok, detail);
    } catch (const std::exception& e) {
        report(13, "greedy/optimal ratio", false, e.what());
    }
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    criterion13();
    std::printf("acceptance: %d/13 passed in %.1f s\n", 13 - gFailures,
                seconds_since(t0));
    return gFailures;
}
