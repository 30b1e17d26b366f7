#include "halfline/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "halfline/analytic.hpp"

namespace halfline {

namespace {

constexpr double kStabilityMargin = 1e-9;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Assignment run_bidirectional(const std::string& name, const SpatialInstance& sub) {
    if (name == "ugs") return ugs(sub);
    if (name == "gs") return gale_shapley(sub);
    if (name == "optimal") return optimal_dp(sub);
    throw domain_error("unknown policy: " + name);
}

PolicyTrialStats stats_over(const std::string& name, const std::vector<double>& d,
                            std::size_t count) {
    PolicyTrialStats s;
    s.policy = name;
    s.usersCounted = count;
    if (count == 0) return s;
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += d[i];
    s.totalDistance = total;
    s.meanDistance = total / static_cast<double>(count);
    if (count >= 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double dev = d[i] - s.meanDistance;
            ss += dev * dev;
        }
        s.variance = ss / static_cast<double>(count - 1);
    }
    return s;
}

int draw_capacity(const CapacitySpec& spec, PhiloxStream& rng) {
    if (spec.pmf.empty()) return spec.fixed;
    const double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.pmf.size(); ++i) {
        acc += spec.pmf[i];
        if (u < acc) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(spec.pmf.size());
}

std::string instance_csv_string(const SpatialInstance& inst) {
    std::ostringstream out;
    out << "role,position,capacity\n";
    char buf[40];
    for (double r : inst.users) {
        std::snprintf(buf, sizeof(buf), "%.17g", r);
        out << "user," << buf << ",\n";
    }
    for (std::size_t j = 0; j < inst.servers.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", inst.servers[j]);
        out << "server," << buf << "," << inst.capacities[j] << "\n";
    }
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void CapacitySpec::validate() const {
    if (pmf.empty()) {
        if (fixed < 1) throw domain_error("fixed capacity must be at least 1");
        return;
    }
    double total = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw domain_error("capacity pmf entries must be nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw domain_error("capacity pmf must sum to 1");
    if (!(pmf.back() > 0.0)) throw domain_error("top capacity must have positive mass");
}

double CapacitySpec::mean() const {
    if (pmf.empty()) return fixed;
    double m = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) m += (static_cast<double>(i) + 1.0) * pmf[i];
    return m;
}

int CapacitySpec::max_capacity() const {
    return pmf.empty() ? fixed : static_cast<int>(pmf.size());
}

std::string CapacitySpec::describe() const {
    if (pmf.empty()) return std::to_string(fixed);
    std::string out = "pmf:";
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (i) out += ',';
        out += fmt12(pmf[i]);
    }
    return out;
}

void SimConfig::validate() const {
    if (nUsers < 1) throw domain_error("nUsers must be at least 1");
    if (trials < 1) throw domain_error("trials must be at least 1");
    if (jobs < 1) throw domain_error("jobs must be at least 1");
    interUser.validate();
    interServer.validate();
    capacity.validate();
    if (policies.empty()) throw domain_error("at least one policy must be requested");
    for (const std::string& p : policies) {
        if (p != "mtr" && p != "ugs" && p != "gs" && p != "optimal") {
            throw domain_error("unknown policy: " + p);
        }
    }
    const double rho = lambda() * interServer.mean();
    if (!(rho < capacity.mean() - kStabilityMargin)) {
        throw domain_error("unstable configuration: rho must stay below the mean capacity");
    }
}

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

GeneratedInstance generate_instance(const SimConfig& cfg, std::uint32_t trialIdx) {
    GeneratedInstance g;
    PhiloxStream userRng(cfg.seed, trialIdx, 0);
    PhiloxStream serverRng(cfg.seed, trialIdx, 1);
    PhiloxStream capRng(cfg.seed, trialIdx, 2);

    g.instance.users.resize(cfg.nUsers);
    double pos = 0.0;
    for (std::size_t i = 0; i < cfg.nUsers; ++i) {
        pos += sample(cfg.interUser, userRng);
        g.instance.users[i] = pos;
    }

    // Servers extend rightward until every user is matched or the count cap
    // is reached.  The sequential policy never revises earlier matches when a
    // farther server appears, so the minimal prefix is read off one full run.
    g.instance.servers.resize(cfg.nUsers);
    g.instance.capacities.resize(cfg.nUsers);
    pos = 0.0;
    for (std::size_t j = 0; j < cfg.nUsers; ++j) {
        pos += sample(cfg.interServer, serverRng);
        g.instance.servers[j] = pos;
        g.instance.capacities[j] = draw_capacity(cfg.capacity, capRng);
    }

    Assignment full = mtr(g.instance);
    if (full.matchedCount() == static_cast<int>(cfg.nUsers)) {
        int maxIdx = 0;
        for (int m : full.match) maxIdx = std::max(maxIdx, m);
        g.instance.servers.resize(static_cast<std::size_t>(maxIdx) + 1);
        g.instance.capacities.resize(static_cast<std::size_t>(maxIdx) + 1);
    }
    g.mtr = mtr(g.instance);
    g.mtrMatchedCount = static_cast<std::size_t>(g.mtr.matchedCount());
    return g;
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

TrialOutput run_trial(const SimConfig& cfg, std::uint32_t trialIdx) {
    const GeneratedInstance g = generate_instance(cfg, trialIdx);
    const std::size_t K = g.mtrMatchedCount;

    TrialOutput out;
    out.serverCount = g.instance.servers.size();
    out.matchedFraction = static_cast<double>(K) / static_cast<double>(cfg.nUsers);
    out.lowMatchWarning = out.matchedFraction < 0.5;

    // Busy-cycle boundaries over the matched prefix: a new cycle opens when a
    // user lands beyond every matched server seen so far.  The final cycle is
    // dropped as possibly incomplete.
    std::vector<std::size_t> cycleStart;
    double maxEnd = -1.0;
    for (std::size_t i = 0; i < K; ++i) {
        if (g.instance.users[i] > maxEnd) cycleStart.push_back(i);
        maxEnd = std::max(maxEnd, g.instance.servers[static_cast<std::size_t>(g.mtr.match[i])]);
    }
    const std::size_t filtered = cycleStart.size() >= 2 ? cycleStart.back() : 0;
    out.usersFiltered = filtered;

    SpatialInstance sub;
    bool haveSub = false;
    for (const std::string& name : cfg.policies) {
        if (name == "mtr") {
            out.policies.push_back(stats_over(name, g.mtr.distances, filtered));
            continue;
        }
        if (!haveSub) {
            sub.users.assign(g.instance.users.begin(),
                             g.instance.users.begin() + static_cast<std::ptrdiff_t>(K));
            sub.servers = g.instance.servers;
            sub.capacities = g.instance.capacities;
            haveSub = true;
        }
        const Assignment a = run_bidirectional(name, sub);
        out.policies.push_back(stats_over(name, a.distances, filtered));
    }
    return out;
}

SimResult run_simulation(const SimConfig& cfg) {
    cfg.validate();
    const std::size_t T = static_cast<std::size_t>(cfg.trials);
    std::vector<TrialOutput> trials(T);

    const int jobs = std::min<int>(cfg.jobs, cfg.trials);
    if (jobs <= 1) {
        for (std::size_t t = 0; t < T; ++t) {
            trials[t] = run_trial(cfg, static_cast<std::uint32_t>(t));
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex errLock;
        std::exception_ptr firstError;
        auto worker = [&]() {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= T) return;
                try {
                    trials[t] = run_trial(cfg, static_cast<std::uint32_t>(t));
                } catch (...) {
                    std::lock_guard<std::mutex> hold(errLock);
                    if (!firstError) firstError = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        if (firstError) std::rethrow_exception(firstError);
    }

    SimResult res;
    res.trials = std::move(trials);
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        PolicySummary sum;
        sum.policy = cfg.policies[p];
        std::vector<double> means(T);
        double meanAcc = 0.0, varAcc = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            means[t] = res.trials[t].policies[p].meanDistance;
            meanAcc += means[t];
            varAcc += res.trials[t].policies[p].variance;
        }
        sum.meanDistance = meanAcc / static_cast<double>(T);
        sum.variance = varAcc / static_cast<double>(T);
        if (T >= 2) {
            double ss = 0.0;
            for (double m : means) ss += (m - sum.meanDistance) * (m - sum.meanDistance);
            sum.stderrMean = std::sqrt(ss / static_cast<double>(T - 1)) /
                             std::sqrt(static_cast<double>(T));
        }
        res.policies.push_back(std::move(sum));
    }
    double fracAcc = 0.0;
    for (const TrialOutput& t : res.trials) fracAcc += t.matchedFraction;
    res.matchedFraction = fracAcc / static_cast<double>(T);
    res.lowMatchWarning = res.matchedFraction < 0.5;
    return res;
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

Theorem1Report verify_theorem1(const SimConfig& cfg, std::size_t instances) {
    cfg.validate();
    Theorem1Report rep;
    rep.instances = instances;
    for (std::size_t i = 0; i < instances; ++i) {
        const GeneratedInstance g = generate_instance(cfg, static_cast<std::uint32_t>(i));
        // The equivalence concerns requests that find a server.  Users beyond
        // the right edge of the finite server pool are a truncation artifact
        // (the policies may saturate different suffixes there), so the check
        // runs on the matched prefix, where both must assign everyone.
        SpatialInstance inst;
        inst.users.assign(g.instance.users.begin(),
                          g.instance.users.begin() +
                              static_cast<std::ptrdiff_t>(g.mtrMatchedCount));
        inst.servers = g.instance.servers;
        inst.capacities = g.instance.capacities;
        const Assignment m = mtr(inst);
        const Assignment u = ugs(inst);
        const LoadProfile pm = load_profile(inst, m);
        const LoadProfile pu = load_profile(inst, u);
        const bool equal = u.matchedCount() == static_cast<int>(g.mtrMatchedCount) &&
                           m.matchedCount() == static_cast<int>(g.mtrMatchedCount) &&
                           pm.breakpoints == pu.breakpoints && pm.values == pu.values;
        if (!equal) {
            ++rep.failures;
            if (rep.offendingInstanceCsv.empty()) {
                rep.offendingInstanceCsv = instance_csv_string(inst);
            }
        }
    }
    return rep;
}

VarianceReport variance_comparison(const SimConfig& cfg) {
    SimConfig local = cfg;
    local.policies = {"mtr", "ugs"};
    local.validate();
    VarianceReport rep;
    rep.trials = static_cast<std::size_t>(local.trials);
    for (int t = 0; t < local.trials; ++t) {
        const TrialOutput out = run_trial(local, static_cast<std::uint32_t>(t));
        const double vm = out.policies[0].variance;
        const double vu = out.policies[1].variance;
        rep.meanVarianceMtr += vm;
        rep.meanVarianceUgs += vu;
        if (vm <= vu + 1e-12) ++rep.mtrNoWorse;
    }
    rep.meanVarianceMtr /= static_cast<double>(rep.trials);
    rep.meanVarianceUgs /= static_cast<double>(rep.trials);
    rep.fraction = static_cast<double>(rep.mtrNoWorse) / static_cast<double>(rep.trials);
    return rep;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::pair<double, bool> unidirectional_analytic_value(const SimConfig& cfg) {
    const bool userExp = cfg.interUser.kind == DistKind::Exponential;
    const bool serverExp = cfg.interServer.kind == DistKind::Exponential;
    try {
        if (!cfg.capacity.pmf.empty()) {
            if (userExp) {
                return {hetcap_expected_distance(
                            {cfg.lambda(), cfg.interServer, cfg.capacity.pmf}),
                        true};
            }
            return {0.0, false};
        }
        const int c = cfg.capacity.fixed;
        if (userExp && serverExp) {
            return {bulk_mm1_expected_distance({cfg.lambda(), cfg.mu(), c}), true};
        }
        if (userExp) {
            return {prgs_expected_distance({cfg.lambda(), cfg.interServer, c}), true};
        }
        if (serverExp) {
            return {grps_expected_distance({cfg.interUser, cfg.mu(), c}), true};
        }
    } catch (const domain_error&) {
        return {0.0, false};
    }
    return {0.0, false};
}

std::vector<SweepPoint> sweep_points(const SimConfig& tmpl, const std::string& axis,
                                     const std::vector<double>& values) {
    std::vector<SweepPoint> points;
    points.reserve(values.size());
    for (double v : values) {
        SweepPoint pt;
        pt.axisValue = v;
        pt.config = tmpl;
        if (axis == "lambda") {
            pt.config.interUser = DistanceDistribution::exponential(v);
        } else if (axis == "load") {
            const double lam = v * tmpl.mu() * tmpl.capacity.mean();
            pt.config.interUser = DistanceDistribution::exponential(lam);
        } else if (axis == "capacity") {
            const int c = static_cast<int>(std::lround(v));
            if (c < 1 || std::abs(v - c) > 1e-9) {
                throw domain_error("capacity axis values must be positive integers");
            }
            pt.config.capacity = CapacitySpec{c, {}};
        } else if (axis == "cv2_user") {
            pt.config.interUser = h2_from_cv(v, tmpl.interUser.mean());
        } else if (axis == "cv2_server") {
            pt.config.interServer = h2_from_cv(v, tmpl.interServer.mean());
        } else {
            throw domain_error("unknown sweep axis: " + axis);
        }
        const auto [value, ok] = unidirectional_analytic_value(pt.config);
        if (ok) {
            for (const std::string& p : pt.config.policies) {
                if (p == "mtr" || p == "ugs") pt.analytic.emplace_back(p, value);
            }
        }
        points.push_back(std::move(pt));
    }
    return points;
}

std::vector<SweepRow> run_sweep(const std::vector<SweepPoint>& points) {
    std::vector<SweepRow> rows;
    for (const SweepPoint& pt : points) {
        try {
            const SimResult res = run_simulation(pt.config);
            for (const PolicySummary& sum : res.policies) {
                SweepRow row;
                row.axisValue = pt.axisValue;
                row.policy = sum.policy;
                row.meanDistance = sum.meanDistance;
                row.stderrMean = sum.stderrMean;
                row.variance = sum.variance;
                row.matchedFraction = res.matchedFraction;
                for (const auto& [name, value] : pt.analytic) {
                    if (name == sum.policy) {
                        row.hasAnalytic = true;
                        row.analyticValue = value;
                        if (sum.meanDistance > 0.0) row.ratio = value / sum.meanDistance;
                    }
                }
                rows.push_back(std::move(row));
            }
        } catch (const std::exception& e) {
            SweepRow row;
            row.axisValue = pt.axisValue;
            row.policy = "-";
            row.failed = true;
            row.error = e.what();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows,
                      const std::vector<std::pair<std::string, std::string>>& provenance) {
    std::ostringstream out;
    for (const auto& [key, value] : provenance) out << "# " << key << "=" << value << "\n";
    out << "axis_value,policy,mean_distance,stderr,variance,matched_fraction,"
           "analytic_value,ratio\n";
    for (const SweepRow& r : rows) {
        if (r.failed) {
            out << "# failed axis_value=" << fmt12(r.axisValue) << ": " << r.error << "\n";
            continue;
        }
        out << fmt12(r.axisValue) << ',' << r.policy << ',' << fmt12(r.meanDistance)
            << ',' << fmt12(r.stderrMean) << ',' << fmt12(r.variance) << ','
            << fmt12(r.matchedFraction) << ',';
        if (r.hasAnalytic) {
            out << fmt12(r.analyticValue) << ',' << fmt12(r.ratio);
        } else {
            out << ',';
        }
        out << "\n";
    }
    return out.str();
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& provenance) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << sweep_csv(rows, provenance);
    if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace halfline
