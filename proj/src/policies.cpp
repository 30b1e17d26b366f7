#include "halfline/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <tuple>

namespace halfline {

void SpatialInstance::validate() const {
    if (!std::is_sorted(users.begin(), users.end()))
        throw domain_error("instance: user positions must be nondecreasing");
    if (!std::is_sorted(servers.begin(), servers.end()))
        throw domain_error("instance: server positions must be nondecreasing");
    if (capacities.size() != servers.size())
        throw domain_error("instance: one capacity per server required");
    for (int c : capacities)
        if (c < 1) throw domain_error("instance: capacities must be >= 1");
    if ((!users.empty() && users.front() < 0.0) ||
        (!servers.empty() && servers.front() < 0.0))
        throw domain_error("instance: positions must be >= 0");
}

long long SpatialInstance::total_capacity() const {
    long long t = 0;
    for (int c : capacities) t += c;
    return t;
}

int Assignment::matchedCount() const {
    int n = 0;
    for (int m : match)
        if (m != kUnmatched) ++n;
    return n;
}

double LoadProfile::integral() const {
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < breakpoints.size(); ++t)
        acc += values[t] * (breakpoints[t + 1] - breakpoints[t]);
    return acc;
}

namespace {

Assignment finalize(const SpatialInstance& inst, std::vector<int> match,
                    std::string name) {
    Assignment a;
    a.match = std::move(match);
    a.policyName = std::move(name);
    a.distances.assign(a.match.size(), 0.0);
    a.totalCost = 0.0;
    for (std::size_t i = 0; i < a.match.size(); ++i) {
        if (a.match[i] == kUnmatched) continue;
        a.distances[i] = std::abs(inst.users[i] - inst.servers[a.match[i]]);
        a.totalCost += a.distances[i];
    }
    return a;
}

// capacity c_j expanded into c_j co-located unit slots
struct Slots {
    std::vector<double> pos;
    std::vector<int> server;  // owning server index per slot
};

Slots expand_slots(const SpatialInstance& inst) {
    Slots s;
    for (std::size_t j = 0; j < inst.servers.size(); ++j)
        for (int k = 0; k < inst.capacities[j]; ++k) {
            s.pos.push_back(inst.servers[j]);
            s.server.push_back(static_cast<int>(j));
        }
    return s;
}

}  // namespace

Assignment mtr(const SpatialInstance& inst) {
    inst.validate();
    std::vector<int> rem = inst.capacities;
    std::vector<int> match(inst.users.size(), kUnmatched);
    std::size_t j = 0;
    const std::size_t m = inst.servers.size();
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        while (j < m && (rem[j] == 0 || inst.servers[j] < inst.users[i])) ++j;
        if (j == m) break;  // every later user is even further right
        match[i] = static_cast<int>(j);
        --rem[j];
    }
    return finalize(inst, std::move(match), "mtr");
}

Assignment ugs(const SpatialInstance& inst) {
    inst.validate();
    const auto& R = inst.users;
    const auto& S = inst.servers;
    const int m = static_cast<int>(S.size());
    std::vector<int> rem = inst.capacities;
    // jump[j]: smallest index >= j whose server still has capacity
    std::vector<int> jump(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) jump[static_cast<std::size_t>(j)] = j;
    auto find = [&jump](int j) {
        while (jump[static_cast<std::size_t>(j)] != j) {
            jump[static_cast<std::size_t>(j)] =
                jump[static_cast<std::size_t>(jump[static_cast<std::size_t>(j)])];
            j = jump[static_cast<std::size_t>(j)];
        }
        return j;
    };

    using Event = std::tuple<double, int, int>;  // (distance, user, server)
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap;
    for (std::size_t i = 0; i < R.size(); ++i) {
        const int j0 = static_cast<int>(
            std::lower_bound(S.begin(), S.end(), R[i]) - S.begin());
        const int j = find(j0);
        if (j < m) heap.emplace(S[j] - R[i], static_cast<int>(i), j);
    }

    std::vector<int> match(R.size(), kUnmatched);
    while (!heap.empty()) {
        const auto [d, i, j] = heap.top();
        heap.pop();
        (void)d;
        if (rem[j] > 0) {
            match[static_cast<std::size_t>(i)] = j;
            if (--rem[j] == 0) jump[static_cast<std::size_t>(j)] = j + 1;
        } else {
            const int j2 = find(j);  // ray continues to the next open server
            if (j2 < m) heap.emplace(S[j2] - R[static_cast<std::size_t>(i)], i, j2);
        }
    }
    return finalize(inst, std::move(match), "ugs");
}

Assignment gale_shapley(const SpatialInstance& inst) {
    inst.validate();
    const auto& R = inst.users;
    const Slots slots = expand_slots(inst);
    const int T = static_cast<int>(slots.pos.size());

    std::vector<char> used(static_cast<std::size_t>(T), 0);
    // free-slot skip lists in both directions
    std::vector<int> right(static_cast<std::size_t>(T) + 1);
    std::vector<int> left(static_cast<std::size_t>(T) + 1);  // shifted by +1
    for (int t = 0; t <= T; ++t) {
        right[static_cast<std::size_t>(t)] = t;
        left[static_cast<std::size_t>(t)] = t;
    }
    auto findR = [&right, T](int t) {
        if (t > T) return T;
        while (right[static_cast<std::size_t>(t)] != t) {
            right[static_cast<std::size_t>(t)] =
                right[static_cast<std::size_t>(right[static_cast<std::size_t>(t)])];
            t = right[static_cast<std::size_t>(t)];
        }
        return t;
    };
    auto findL = [&left](int t) {  // operates on shifted indices, 0 = none
        while (left[static_cast<std::size_t>(t)] != t) {
            left[static_cast<std::size_t>(t)] =
                left[static_cast<std::size_t>(left[static_cast<std::size_t>(t)])];
            t = left[static_cast<std::size_t>(t)];
        }
        return t;
    };

    // nearest free slot, bidirectional; ties toward the lower slot index
    auto best = [&](int i) -> std::pair<double, int> {
        const double r = R[static_cast<std::size_t>(i)];
        const int j0 = static_cast<int>(
            std::lower_bound(slots.pos.begin(), slots.pos.end(), r) -
            slots.pos.begin());
        const int tr = findR(j0);
        const int tl = findL(j0) - 1;  // shifted: free slot index <= j0 - 1
        if (tr >= T && tl < 0) return {0.0, -1};
        if (tr >= T) return {r - slots.pos[static_cast<std::size_t>(tl)], tl};
        if (tl < 0) return {slots.pos[static_cast<std::size_t>(tr)] - r, tr};
        const double dl = r - slots.pos[static_cast<std::size_t>(tl)];
        const double dr = slots.pos[static_cast<std::size_t>(tr)] - r;
        return dl <= dr ? std::make_pair(dl, tl) : std::make_pair(dr, tr);
    };

    using Event = std::tuple<double, int, int>;  // (distance, user, slot)
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap;
    for (std::size_t i = 0; i < R.size(); ++i) {
        const auto [d, t] = best(static_cast<int>(i));
        if (t >= 0) heap.emplace(d, static_cast<int>(i), t);
    }

    std::vector<int> match(R.size(), kUnmatched);
    while (!heap.empty()) {
        const auto [d, i, t] = heap.top();
        heap.pop();
        const auto [d2, t2] = best(i);
        if (t2 < 0) continue;  // no free slot remains anywhere
        if (t2 == t && d2 == d && !used[static_cast<std::size_t>(t)]) {
            match[static_cast<std::size_t>(i)] = slots.server[static_cast<std::size_t>(t)];
            used[static_cast<std::size_t>(t)] = 1;
            right[static_cast<std::size_t>(t)] = t + 1;
            left[static_cast<std::size_t>(t) + 1] = t;  // shifted
        } else {
            heap.emplace(d2, i, t2);  // candidate moved; re-queue and retry
        }
    }
    return finalize(inst, std::move(match), "gs");
}

Assignment optimal_dp(const SpatialInstance& inst) {
    inst.validate();
    const auto& R = inst.users;
    const Slots slots = expand_slots(inst);
    const std::size_t n = R.size();
    const std::size_t T = slots.pos.size();
    if (n > T) throw domain_error("optimal_dp: more users than total capacity");
    const std::size_t W = T - n + 1;  // offsets k = 0..T-n
    if (n > 0 && W > 1600000000 / n) {
        throw domain_error("optimal_dp: instance too large for the exact band");
    }

    // C[i][k]: cost of matching users 1..i within slots 1..i+k; user i either
    // takes slot i+k or that slot stays empty.
    std::vector<double> prev(W, 0.0), cur(W, 0.0);
    std::vector<std::uint64_t> takeBit(n * W / 64 + 1, 0);
    auto mark = [&](std::size_t i, std::size_t k) {
        const std::size_t b = (i - 1) * W + k;
        takeBit[b >> 6] |= 1ULL << (b & 63);
    };
    auto taken = [&](std::size_t i, std::size_t k) {
        const std::size_t b = (i - 1) * W + k;
        return (takeBit[b >> 6] >> (b & 63)) & 1ULL;
    };

    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t k = 0; k < W; ++k) {
            const double take =
                prev[k] + std::abs(R[i - 1] - slots.pos[i - 1 + k]);
            if (k == 0) {
                cur[0] = take;
                mark(i, 0);
            } else if (take < cur[k - 1]) {
                cur[k] = take;
                mark(i, k);
            } else {
                cur[k] = cur[k - 1];
            }
        }
        std::swap(prev, cur);
    }

    std::vector<int> match(n, kUnmatched);
    std::size_t i = n, k = W - 1;
    while (i >= 1) {
        if (taken(i, k)) {
            match[i - 1] = slots.server[i - 1 + k];
            --i;
        } else {
            --k;  // slot i+k stays empty
        }
    }
    return finalize(inst, std::move(match), "optimal");
}

Assignment brute_force_optimal(const SpatialInstance& inst) {
    inst.validate();
    const auto& R = inst.users;
    const Slots slots = expand_slots(inst);
    const std::size_t n = R.size();
    const std::size_t T = slots.pos.size();
    if (n > 8) throw domain_error("brute_force_optimal: more than 8 users");
    if (n > T) throw domain_error("brute_force_optimal: more users than total capacity");
    if (n == 0) return finalize(inst, {}, "brute_force");

    double nCombos = 1.0;  // C(T, n)
    for (std::size_t i = 0; i < n; ++i)
        nCombos *= static_cast<double>(T - i) / static_cast<double>(i + 1);
    if (nCombos > 1e7) throw domain_error("brute_force_optimal: instance too large");

    std::vector<std::size_t> idx(n), bestIdx;
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    double bestCost = 0.0;
    bool first = true;
    for (;;) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            cost += std::abs(R[i] - slots.pos[idx[i]]);
        if (first || cost < bestCost) {
            bestCost = cost;
            bestIdx = idx;
            first = false;
        }
        // next ascending combination
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == T - n + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }

    std::vector<int> match(n, kUnmatched);
    for (std::size_t i = 0; i < n; ++i) match[i] = slots.server[bestIdx[i]];
    return finalize(inst, std::move(match), "brute_force");
}

LoadProfile load_profile(const SpatialInstance& inst, const Assignment& a) {
    if (a.match.size() != inst.users.size())
        throw domain_error("load_profile: assignment does not fit the instance");
    std::vector<std::pair<double, int>> events;  // (+1 at r_i, -1 at s)
    for (std::size_t i = 0; i < a.match.size(); ++i) {
        if (a.match[i] == kUnmatched) continue;
        const double r = inst.users[i];
        const double s = inst.servers[static_cast<std::size_t>(a.match[i])];
        if (s < r)
            throw domain_error("load_profile: requires a unidirectional assignment");
        if (s == r) continue;  // zero-length interval carries no load
        events.emplace_back(r, +1);
        events.emplace_back(s, -1);
    }
    std::sort(events.begin(), events.end());

    LoadProfile p;
    int level = 0;
    double cycleStart = 0.0;
    std::size_t e = 0;
    while (e < events.size()) {
        const double x = events[e].first;
        int delta = 0;
        while (e < events.size() && events[e].first == x) {
            delta += events[e].second;
            ++e;
        }
        if (delta == 0) continue;  // no net change: not a breakpoint
        if (level == 0) cycleStart = x;
        level += delta;
        if (level == 0) p.busyCycles.push_back({cycleStart, x});
        p.breakpoints.push_back(x);
        p.values.push_back(level);
    }
    return p;
}

SpatialInstance gs_adversarial_instance(int t) {
    if (t < 2) throw domain_error("gs_adversarial_instance: t must be >= 2");
    const long long m = (1LL << (t - 1)) - 1;
    SpatialInstance inst;
    inst.users.push_back(0.0);
    for (long long i = 1; i <= m; ++i) {
        inst.users.push_back(3.0 * static_cast<double>(i));
        inst.servers.push_back(3.0 * static_cast<double>(i) - 1.0);
    }
    inst.servers.push_back(3.0 * static_cast<double>(m) + 2.0);
    inst.capacities.assign(inst.servers.size(), 1);
    inst.validate();
    return inst;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

SpatialInstance load_instance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
    SpatialInstance inst;
    std::vector<std::pair<double, int>> servers;  // (position, capacity)
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv_line(line);
        if (lineNo == 1 && !f.empty() && f[0] == "role") continue;  // header
        if (f.size() < 2)
            throw std::runtime_error("instance file: bad row at line " +
                                     std::to_string(lineNo));
        const double pos = std::stod(f[1]);
        if (f[0] == "user") {
            inst.users.push_back(pos);
        } else if (f[0] == "server") {
            const int cap = (f.size() > 2 && !f[2].empty()) ? std::stoi(f[2]) : 1;
            servers.emplace_back(pos, cap);
        } else {
            throw std::runtime_error("instance file: unknown role '" + f[0] +
                                     "' at line " + std::to_string(lineNo));
        }
    }
    std::sort(inst.users.begin(), inst.users.end());
    std::sort(servers.begin(), servers.end());
    for (const auto& [pos, cap] : servers) {
        inst.servers.push_back(pos);
        inst.capacities.push_back(cap);
    }
    inst.validate();
    return inst;
}

void save_instance_csv(const std::string& path, const SpatialInstance& inst) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
    out << "role,position,capacity\n";
    for (double r : inst.users) out << "user," << fmt(r) << ",0\n";
    for (std::size_t j = 0; j < inst.servers.size(); ++j)
        out << "server," << fmt(inst.servers[j]) << "," << inst.capacities[j] << "\n";
}

void save_assignment_csv(const std::string& path, const SpatialInstance& inst,
                         const Assignment& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write assignment file '" + path + "'");
    out << "user_index,user_pos,server_index,server_pos,distance\n";
    for (std::size_t i = 0; i < a.match.size(); ++i) {
        out << i << "," << fmt(inst.users[i]) << ",";
        if (a.match[i] == kUnmatched) {
            out << "-1,,\n";
        } else {
            out << a.match[i] << ","
                << fmt(inst.servers[static_cast<std::size_t>(a.match[i])]) << ","
                << fmt(a.distances[i]) << "\n";
        }
    }
}

}  // namespace halfline
