#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "halfline/analytic.hpp"
#include "halfline/common.hpp"
#include "halfline/distributions.hpp"
#include "halfline/policies.hpp"
#include "halfline/simulate.hpp"

namespace {

using namespace halfline;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& tok : split_list(s)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw domain_error("not a number in list: '" + tok + "'");
        }
    }
    return out;
}

void print_value_and_json(double value, const nlohmann::json& j) {
    std::printf("%.12g\n", value);
    std::cout << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// simulate / compare
// ---------------------------------------------------------------------------

struct SimArgs {
    std::size_t n = 100000;
    int trials = 50;
    std::uint64_t seed = kDefaultSeed;
    std::string user = "exp:0.5";
    std::string server = "exp:1";
    int c = 1;
    std::string pmf;
    std::string policies = "mtr,ugs";
    int jobs = 1;
    std::string out;
    std::string config;
};

struct SimOptionHandles {
    CLI::Option* n = nullptr;
    CLI::Option* trials = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* user = nullptr;
    CLI::Option* server = nullptr;
    CLI::Option* c = nullptr;
    CLI::Option* pmf = nullptr;
    CLI::Option* policies = nullptr;
    CLI::Option* jobs = nullptr;
    CLI::Option* out = nullptr;
};

SimOptionHandles add_sim_options(CLI::App* cmd, SimArgs& a) {
    SimOptionHandles h;
    h.n = cmd->add_option("--n", a.n, "number of users per trial");
    h.trials = cmd->add_option("--trials", a.trials, "independent trials");
    h.seed = cmd->add_option("--seed", a.seed, "PRNG seed (default 1729)");
    h.user = cmd->add_option("--user", a.user, "user gap law (exp:R|det:D|unif:B|h2:CV2[:MEAN])");
    h.server = cmd->add_option("--server", a.server, "server gap law");
    h.c = cmd->add_option("--c", a.c, "fixed server capacity");
    h.pmf = cmd->add_option("--cap-pmf", a.pmf, "capacity pmf over {1..k}, e.g. 0.5,0.5");
    h.policies = cmd->add_option("--policies", a.policies, "comma list of mtr,ugs,gs,optimal");
    h.jobs = cmd->add_option("--jobs", a.jobs, "max concurrent trials");
    h.out = cmd->add_option("--out", a.out, "write a sweep-format CSV here");
    cmd->add_option("--config", a.config, "JSON file with the same keys; flags win");
    return h;
}

std::string dist_describe_from_json(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return dist_from_json(v).describe();
}

void apply_config_file(SimArgs& a, const SimOptionHandles& h) {
    if (a.config.empty()) return;
    std::ifstream file(a.config);
    if (!file) throw std::runtime_error("cannot read config file: " + a.config);
    nlohmann::json j;
    file >> j;
    auto unset = [](const CLI::Option* opt) { return opt->count() == 0; };
    if (j.contains("n") && unset(h.n)) a.n = j["n"].get<std::size_t>();
    if (j.contains("trials") && unset(h.trials)) a.trials = j["trials"].get<int>();
    if (j.contains("seed") && unset(h.seed)) a.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("user") && unset(h.user)) a.user = dist_describe_from_json(j["user"]);
    if (j.contains("server") && unset(h.server)) a.server = dist_describe_from_json(j["server"]);
    if (j.contains("c") && unset(h.c)) a.c = j["c"].get<int>();
    if (j.contains("pmf") && unset(h.pmf)) {
        std::string s;
        for (const auto& v : j["pmf"]) {
            if (!s.empty()) s += ',';
            s += fmt12(v.get<double>());
        }
        a.pmf = s;
    }
    if (j.contains("policies") && unset(h.policies)) {
        if (j["policies"].is_string()) {
            a.policies = j["policies"].get<std::string>();
        } else {
            std::string s;
            for (const auto& v : j["policies"]) {
                if (!s.empty()) s += ',';
                s += v.get<std::string>();
            }
            a.policies = s;
        }
    }
    if (j.contains("jobs") && unset(h.jobs)) a.jobs = j["jobs"].get<int>();
    if (j.contains("out") && unset(h.out)) a.out = j["out"].get<std::string>();
}

SimConfig build_config(const SimArgs& a) {
    SimConfig cfg;
    cfg.nUsers = a.n;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.interUser = parse_dist(a.user);
    cfg.interServer = parse_dist(a.server);
    if (a.pmf.empty()) {
        cfg.capacity = CapacitySpec{a.c, {}};
    } else {
        cfg.capacity = CapacitySpec{1, parse_double_list(a.pmf)};
    }
    cfg.policies = split_list(a.policies);
    cfg.jobs = a.jobs;
    cfg.validate();
    return cfg;
}

std::vector<std::pair<std::string, std::string>> sim_provenance(const SimConfig& cfg) {
    return {{"seed", std::to_string(cfg.seed)},
            {"users", std::to_string(cfg.nUsers)},
            {"trials", std::to_string(cfg.trials)},
            {"user", cfg.interUser.describe()},
            {"server", cfg.interServer.describe()},
            {"capacity", cfg.capacity.describe()}};
}

void cmd_simulate(const SimArgs& a) {
    const SimConfig cfg = build_config(a);
    std::printf("# seed=%llu\n", static_cast<unsigned long long>(cfg.seed));
    std::printf("# users=%zu trials=%d user=%s server=%s capacity=%s\n", cfg.nUsers,
                cfg.trials, cfg.interUser.describe().c_str(),
                cfg.interServer.describe().c_str(), cfg.capacity.describe().c_str());
    const SimResult res = run_simulation(cfg);
    for (const PolicySummary& p : res.policies) {
        std::printf("policy=%s mean=%s stderr=%s variance=%s matched_fraction=%s\n",
                    p.policy.c_str(), fmt12(p.meanDistance).c_str(),
                    fmt12(p.stderrMean).c_str(), fmt12(p.variance).c_str(),
                    fmt12(res.matchedFraction).c_str());
    }
    if (res.lowMatchWarning) {
        std::printf("# warning: matched fraction %s is below 0.5\n",
                    fmt12(res.matchedFraction).c_str());
    }
    if (!a.out.empty()) {
        SweepPoint pt;
        pt.axisValue = cfg.lambda() * cfg.interServer.mean();  // offered load rho
        pt.config = cfg;
        const auto [value, ok] = unidirectional_analytic_value(cfg);
        if (ok) {
            for (const std::string& p : cfg.policies) {
                if (p == "mtr" || p == "ugs") pt.analytic.emplace_back(p, value);
            }
        }
        write_sweep_csv(a.out, run_sweep({pt}), sim_provenance(cfg));
        std::printf("wrote %s\n", a.out.c_str());
    }
}

void cmd_compare(const SimArgs& a) {
    const SimConfig cfg = build_config(a);
    std::printf("# seed=%llu\n", static_cast<unsigned long long>(cfg.seed));
    const auto [analyticValue, ok] = unidirectional_analytic_value(cfg);
    if (!ok) {
        throw domain_error(
            "no closed-form model matches this configuration (need an exponential side)");
    }
    const SimResult res = run_simulation(cfg);
    for (const PolicySummary& p : res.policies) {
        std::string line = "policy=" + p.policy + " sim=" + fmt12(p.meanDistance) +
                           " stderr=" + fmt12(p.stderrMean);
        if (p.policy == "mtr" || p.policy == "ugs") {
            line += " analytic=" + fmt12(analyticValue);
            if (p.meanDistance > 0.0) line += " ratio=" + fmt12(analyticValue / p.meanDistance);
            if (p.stderrMean > 0.0) {
                line += " z=" + fmt12((p.meanDistance - analyticValue) / p.stderrMean);
            }
        }
        std::printf("%s\n", line.c_str());
    }
    if (!a.out.empty()) {
        SweepPoint pt;
        pt.axisValue = cfg.lambda() * cfg.interServer.mean();
        pt.config = cfg;
        for (const std::string& p : cfg.policies) {
            if (p == "mtr" || p == "ugs") pt.analytic.emplace_back(p, analyticValue);
        }
        write_sweep_csv(a.out, run_sweep({pt}), sim_provenance(cfg));
        std::printf("wrote %s\n", a.out.c_str());
    }
}

// ---------------------------------------------------------------------------
// figure presets
// ---------------------------------------------------------------------------

struct FigureArgs {
    int id = 0;
    double scale = 1.0;
    int trials = 0;  // 0: use the preset default
    std::string outDir = ".";
    std::uint64_t seed = kDefaultSeed;
    int jobs = 1;
    std::string part = "both";
};

SimConfig figure_base(const FigureArgs& fa, std::size_t nUsers, int presetTrials) {
    SimConfig cfg;
    cfg.nUsers = std::max<std::size_t>(100, static_cast<std::size_t>(
                                                std::llround(nUsers * fa.scale)));
    cfg.trials = fa.trials > 0 ? fa.trials : presetTrials;
    cfg.seed = fa.seed;
    cfg.jobs = fa.jobs;
    return cfg;
}

void write_figure_csv(const FigureArgs& fa, const std::string& name,
                      const std::vector<SweepPoint>& points,
                      std::vector<std::pair<std::string, std::string>> provenance) {
    provenance.insert(provenance.begin(),
                      {{"figure", name}, {"seed", std::to_string(fa.seed)}});
    const std::filesystem::path path = std::filesystem::path(fa.outDir) / (name + ".csv");
    write_sweep_csv(path.string(), run_sweep(points), provenance);
    std::printf("wrote %s\n", path.string().c_str());
}

// Ratio of the closed-form heavy-traffic estimate to the simulated mean at
// c = 1, for deterministic and uniform server gaps.
void figure3(const FigureArgs& fa) {
    const std::vector<double> rhos = {0.5, 0.8, 0.9, 0.95, 0.98};
    const std::vector<std::pair<std::string, DistanceDistribution>> servers = {
        {"det", DistanceDistribution::deterministic(1.0)},
        {"unif", DistanceDistribution::uniform(2.0)}};
    for (const auto& [tag, dist] : servers) {
        SimConfig cfg = figure_base(fa, 100000, 50);
        cfg.interServer = dist;
        cfg.capacity = CapacitySpec{1, {}};
        cfg.policies = {"mtr"};
        std::vector<SweepPoint> points = sweep_points(cfg, "lambda", rhos);
        for (SweepPoint& pt : points) {
            const double est = heavy_traffic_estimate(pt.config.interUser, dist);
            pt.analytic = {{"mtr", est}};
        }
        write_figure_csv(fa, "fig3_" + tag, points,
                         {{"axis", "rho"},
                          {"server", dist.describe()},
                          {"analytic", "heavy-traffic estimate"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
    }
}

// Expected distance against load at c = 2 for three server gap laws.
void figure5(const FigureArgs& fa) {
    const std::vector<double> loads = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const std::vector<std::pair<std::string, DistanceDistribution>> servers = {
        {"exp", DistanceDistribution::exponential(1.0)},
        {"det", DistanceDistribution::deterministic(1.0)},
        {"h2", h2_from_cv(4.0, 1.0)}};
    for (const auto& [tag, dist] : servers) {
        SimConfig cfg = figure_base(fa, 100000, 10);
        cfg.interServer = dist;
        cfg.capacity = CapacitySpec{2, {}};
        cfg.policies = {"mtr"};
        write_figure_csv(fa, "fig5_" + tag, sweep_points(cfg, "load", loads),
                         {{"axis", "load"},
                          {"server", dist.describe()},
                          {"capacity", "2"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
    }
}

// Sensitivity to variability: H2 users vs H2 servers at lambda = mu = 1, c = 2.
void figure6(const FigureArgs& fa) {
    const std::vector<double> cv2 = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    {
        SimConfig cfg = figure_base(fa, 100000, 10);
        cfg.interUser = DistanceDistribution::exponential(1.0);
        cfg.interServer = DistanceDistribution::exponential(1.0);
        cfg.capacity = CapacitySpec{2, {}};
        cfg.policies = {"mtr"};
        write_figure_csv(fa, "fig6_users_h2", sweep_points(cfg, "cv2_user", cv2),
                         {{"axis", "cv2"},
                          {"side", "users"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
        write_figure_csv(fa, "fig6_servers_h2", sweep_points(cfg, "cv2_server", cv2),
                         {{"axis", "cv2"},
                          {"side", "servers"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
    }
}

// Expected distance against capacity at rho = 0.8 for four server gap laws.
void figure7(const FigureArgs& fa) {
    std::vector<double> caps;
    for (int c = 1; c <= 16; ++c) caps.push_back(c);
    const std::vector<std::pair<std::string, DistanceDistribution>> servers = {
        {"exp", DistanceDistribution::exponential(1.0)},
        {"det", DistanceDistribution::deterministic(1.0)},
        {"unif", DistanceDistribution::uniform(2.0)},
        {"h2", h2_from_cv(4.0, 1.0)}};
    for (const auto& [tag, dist] : servers) {
        SimConfig cfg = figure_base(fa, 100000, 10);
        cfg.interUser = DistanceDistribution::exponential(0.8);
        cfg.interServer = dist;
        cfg.policies = {"mtr"};
        write_figure_csv(fa, "fig7_" + tag, sweep_points(cfg, "capacity", caps),
                         {{"axis", "capacity"},
                          {"server", dist.describe()},
                          {"lambda", "0.8"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
    }
}

// Fixed capacity c against a uniform pmf on {1..2c} with matched mean load.
void figure8(const FigureArgs& fa) {
    const std::vector<std::pair<std::string, DistanceDistribution>> servers = {
        {"det", DistanceDistribution::deterministic(1.0)},
        {"h2", h2_from_cv(4.0, 1.0)}};
    for (const auto& [tag, dist] : servers) {
        for (const bool random : {false, true}) {
            std::vector<SweepPoint> points;
            for (int c = 1; c <= 4; ++c) {
                SweepPoint pt;
                pt.axisValue = c;
                SimConfig cfg = figure_base(fa, 100000, 10);
                cfg.interServer = dist;
                cfg.policies = {"mtr"};
                if (random) {
                    std::vector<double> pmf(static_cast<std::size_t>(2 * c),
                                            1.0 / (2.0 * c));
                    cfg.capacity = CapacitySpec{1, std::move(pmf)};
                } else {
                    cfg.capacity = CapacitySpec{c, {}};
                }
                cfg.interUser =
                    DistanceDistribution::exponential(0.8 * cfg.capacity.mean());
                pt.config = cfg;
                const auto [value, ok] = unidirectional_analytic_value(cfg);
                if (ok) pt.analytic = {{"mtr", value}};
                points.push_back(std::move(pt));
            }
            const std::string name =
                std::string("fig8_") + (random ? "rand_" : "fixed_") + tag;
            write_figure_csv(fa, name, points,
                             {{"axis", "capacity"},
                              {"server", dist.describe()},
                              {"capacity_model", random ? "uniform pmf on {1..2c}" : "fixed"},
                              {"load", "0.8 of mean capacity"}});
        }
    }
}

// Four-policy comparison: (a) against rho at c = 1, (b) against c at lambda = 0.4.
void figure9(const FigureArgs& fa) {
    if (fa.part == "a" || fa.part == "both") {
        SimConfig cfg = figure_base(fa, 10000, 50);
        cfg.interServer = DistanceDistribution::exponential(1.0);
        cfg.capacity = CapacitySpec{1, {}};
        cfg.policies = {"mtr", "ugs", "gs", "optimal"};
        const std::vector<double> rhos = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        write_figure_csv(fa, "fig9a", sweep_points(cfg, "lambda", rhos),
                         {{"axis", "rho"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
    }
    if (fa.part == "b" || fa.part == "both") {
        SimConfig cfg = figure_base(fa, 5000, 50);
        cfg.interUser = DistanceDistribution::exponential(0.4);
        cfg.interServer = DistanceDistribution::exponential(1.0);
        cfg.policies = {"mtr", "ugs", "gs", "optimal"};
        const std::vector<double> caps = {1, 2, 3, 4, 5, 6};
        write_figure_csv(fa, "fig9b", sweep_points(cfg, "capacity", caps),
                         {{"axis", "capacity"},
                          {"lambda", "0.4"},
                          {"users", std::to_string(cfg.nUsers)},
                          {"trials", std::to_string(cfg.trials)}});
    }
}

void cmd_figure(const FigureArgs& fa) {
    std::filesystem::create_directories(fa.outDir);
    std::printf("# seed=%llu\n", static_cast<unsigned long long>(fa.seed));
    switch (fa.id) {
        case 3: figure3(fa); break;
        case 5: figure5(fa); break;
        case 6: figure6(fa); break;
        case 7: figure7(fa); break;
        case 8: figure8(fa); break;
        case 9: figure9(fa); break;
        default: throw domain_error("unknown figure id");
    }
}

// ---------------------------------------------------------------------------
// match
// ---------------------------------------------------------------------------

void cmd_match(const std::string& inPath, const std::string& policy,
               const std::string& outPath) {
    const SpatialInstance inst = load_instance_csv(inPath);
    Assignment a;
    if (policy == "mtr") {
        a = mtr(inst);
    } else if (policy == "ugs") {
        a = ugs(inst);
    } else if (policy == "gs") {
        a = gale_shapley(inst);
    } else if (policy == "optimal") {
        a = optimal_dp(inst);
    } else if (policy == "brute_force") {
        a = brute_force_optimal(inst);
    } else {
        throw domain_error("unknown policy: " + policy);
    }
    if (outPath.empty()) {
        std::printf("user_index,user_pos,server_index,server_pos,distance\n");
        for (std::size_t i = 0; i < inst.users.size(); ++i) {
            if (a.match[i] == kUnmatched) {
                std::printf("%zu,%s,-1,,\n", i, fmt12(inst.users[i]).c_str());
            } else {
                const auto j = static_cast<std::size_t>(a.match[i]);
                std::printf("%zu,%s,%d,%s,%s\n", i, fmt12(inst.users[i]).c_str(),
                            a.match[i], fmt12(inst.servers[j]).c_str(),
                            fmt12(a.distances[i]).c_str());
            }
        }
    } else {
        save_assignment_csv(outPath, inst, a);
        std::printf("wrote %s\n", outPath.c_str());
    }
    const int matched = a.matchedCount();
    const double mean = matched > 0 ? a.totalCost / matched : 0.0;
    std::printf("policy=%s total_cost=%s matched=%d mean_distance=%s users=%zu servers=%zu\n",
                a.policyName.c_str(), fmt12(a.totalCost).c_str(), matched,
                fmt12(mean).c_str(), inst.users.size(), inst.servers.size());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"half-line user/server allocation: policies, closed forms, simulation"};
    app.require_subcommand(1);

    // ---- analytic ----
    CLI::App* analytic = app.add_subcommand("analytic", "closed-form expected distances");
    analytic->require_subcommand(1);

    double lambda = 0.5, mu = 1.0, rate = 1.0;
    int cap = 1;
    std::string userSpec = "exp:0.5", serverSpec = "exp:1", pmfSpec, side = "prgs";

    CLI::App* bulk = analytic->add_subcommand("bulk", "Poisson users and servers, capacity c");
    bulk->add_option("--lambda", lambda, "user rate")->required();
    bulk->add_option("--mu", mu, "server rate")->required();
    bulk->add_option("--c", cap, "capacity")->required();
    bulk->callback([&]() {
        const BulkMM1Solved s = bulk_mm1_solve({lambda, mu, cap});
        print_value_and_json(s.expectedDistance, to_json(s));
    });

    CLI::App* grps = analytic->add_subcommand("grps", "renewal users, Poisson servers");
    grps->add_option("--user", userSpec, "user gap law")->required();
    grps->add_option("--mu", mu, "server rate")->required();
    grps->add_option("--c", cap, "capacity")->required();
    grps->callback([&]() {
        const GrpsSolved s = grps_solve({parse_dist(userSpec), mu, cap});
        print_value_and_json(s.expectedDistance, to_json(s));
    });

    CLI::App* prgs = analytic->add_subcommand("prgs", "Poisson users, renewal servers");
    prgs->add_option("--lambda", lambda, "user rate")->required();
    prgs->add_option("--server", serverSpec, "server gap law")->required();
    prgs->add_option("--c", cap, "capacity")->required();
    prgs->callback([&]() {
        const PrgsSolved s = prgs_solve({lambda, parse_dist(serverSpec), cap});
        print_value_and_json(s.expectedDistance, to_json(s));
    });

    CLI::App* hetcap = analytic->add_subcommand("hetcap", "random capacities in {1..c}");
    hetcap->add_option("--lambda", lambda, "user rate")->required();
    hetcap->add_option("--server", serverSpec, "server gap law")->required();
    hetcap->add_option("--pmf", pmfSpec, "capacity pmf, e.g. 0.25,0.25,0.25,0.25")->required();
    hetcap->callback([&]() {
        const HetCapSolved s =
            hetcap_solve({lambda, parse_dist(serverSpec), parse_double_list(pmfSpec)});
        print_value_and_json(s.expectedDistance, to_json(s));
    });

    CLI::App* heavy = analytic->add_subcommand("heavy", "heavy-traffic estimate at c = 1");
    heavy->add_option("--user", userSpec, "user gap law")->required();
    heavy->add_option("--server", serverSpec, "server gap law")->required();
    heavy->callback([&]() {
        const DistanceDistribution u = parse_dist(userSpec);
        const DistanceDistribution s = parse_dist(serverSpec);
        const double v = heavy_traffic_estimate(u, s);
        print_value_and_json(v, {{"model", "heavy_traffic"},
                                 {"inter_user", dist_to_json(u)},
                                 {"inter_server", dist_to_json(s)},
                                 {"expected_distance", v}});
    });

    CLI::App* limit = analytic->add_subcommand("limit", "uncapacitated (c -> inf) limit");
    limit->add_option("--side", side, "grps or prgs")
        ->check(CLI::IsMember({"grps", "prgs"}));
    limit->add_option("--server", serverSpec, "server gap law (prgs side)");
    limit->add_option("--rate", rate, "server rate (grps side)");
    limit->callback([&]() {
        const QueueSide qs = side == "grps" ? QueueSide::GRPS : QueueSide::PRGS;
        const DistanceDistribution d = parse_dist(serverSpec);
        const double v = uncapacitated_expected_distance(qs, d, rate);
        print_value_and_json(v, {{"model", "uncapacitated_limit"},
                                 {"side", side},
                                 {"expected_distance", v}});
    });

    // ---- simulate / compare ----
    SimArgs simArgs;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo protocol");
    SimOptionHandles simOpts = add_sim_options(simulate, simArgs);
    simulate->callback([&]() {
        apply_config_file(simArgs, simOpts);
        cmd_simulate(simArgs);
    });

    SimArgs cmpArgs;
    CLI::App* compare = app.add_subcommand("compare", "simulation against the closed form");
    SimOptionHandles cmpOpts = add_sim_options(compare, cmpArgs);
    compare->callback([&]() {
        apply_config_file(cmpArgs, cmpOpts);
        cmd_compare(cmpArgs);
    });

    // ---- figure ----
    FigureArgs figArgs;
    CLI::App* figure = app.add_subcommand("figure", "CSV presets for the standard plots");
    figure->add_option("id", figArgs.id, "one of 3, 5, 6, 7, 8, 9")
        ->required()
        ->check(CLI::IsMember({3, 5, 6, 7, 8, 9}));
    figure->add_option("--scale", figArgs.scale, "shrink user counts by this factor");
    figure->add_option("--trials", figArgs.trials, "override the preset trial count");
    figure->add_option("--out-dir", figArgs.outDir, "output directory");
    figure->add_option("--seed", figArgs.seed, "PRNG seed (default 1729)");
    figure->add_option("--jobs", figArgs.jobs, "max concurrent trials");
    figure->add_option("--part", figArgs.part, "figure 9 part: a, b, or both")
        ->check(CLI::IsMember({"a", "b", "both"}));
    figure->callback([&]() { cmd_figure(figArgs); });

    // ---- match ----
    std::string matchIn, matchPolicy = "optimal", matchOut;
    CLI::App* match = app.add_subcommand("match", "run one policy on an instance CSV");
    match->add_option("--in", matchIn, "instance CSV (role,position,capacity)")->required();
    match->add_option("--policy", matchPolicy, "mtr|ugs|gs|optimal|brute_force");
    match->add_option("--out", matchOut, "write the assignment CSV here");
    match->callback([&]() { cmd_match(matchIn, matchPolicy, matchOut); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
