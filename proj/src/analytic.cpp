#include "halfline/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

namespace halfline {

namespace {

constexpr double kStabilityMargin = 1e-9;
constexpr double kPi = 3.141592653589793238462643383279502884;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw domain_error(std::string(what) + " must be positive and finite");
    }
}

void require_capacity(int c) {
    if (c < 1) throw domain_error("capacity must be at least 1");
}

std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<cplx> poly_add(std::vector<cplx> a, const std::vector<cplx>& b) {
    if (a.size() < b.size()) a.resize(b.size(), cplx(0.0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

// F_X*(lambda (1 - z)) as P(z)/Q(z) in ascending coefficients, available for
// the rational transform kinds.  Returns false for deterministic and uniform.
bool lst_theta_rational(const DistanceDistribution& d, double lambda,
                        std::vector<cplx>& P, std::vector<cplx>& Q) {
    switch (d.kind) {
        case DistKind::Exponential:
            P = {cplx(d.rate)};
            Q = {cplx(d.rate + lambda), cplx(-lambda)};
            return true;
        case DistKind::HyperExponential: {
            const std::size_t n = d.p.size();
            std::vector<std::vector<cplx>> lin(n);
            for (std::size_t j = 0; j < n; ++j) {
                lin[j] = {cplx(d.rates[j] + lambda), cplx(-lambda)};
            }
            Q = {cplx(1.0)};
            for (std::size_t j = 0; j < n; ++j) Q = poly_mul(Q, lin[j]);
            P = {cplx(0.0)};
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<cplx> term = {cplx(d.p[j] * d.rates[j])};
                for (std::size_t i = 0; i < n; ++i) {
                    if (i != j) term = poly_mul(term, lin[i]);
                }
                P = poly_add(std::move(P), term);
            }
            return true;
        }
        default:
            return false;
    }
}

// Roots of z^c = A(z) where A(z) = F_X*(lambda(1-z)) * extra(z), with extra a
// polynomial in ascending coefficients ({1} when absent).  Uses the companion
// matrix route when the transform is rational, the fixed-point/Newton route
// otherwise.
UnitDiskRoots transform_roots(const DistanceDistribution& dist, double lambda,
                              int c, const std::vector<cplx>& extra) {
    std::vector<cplx> P, Q;
    if (lst_theta_rational(dist, lambda, P, Q)) {
        if (extra.size() > 1 || extra[0] != cplx(1.0)) P = poly_mul(P, extra);
        return unit_disk_roots_rational(P, Q, c);
    }
    auto A = [&dist, lambda, &extra](cplx z) {
        cplx s = lambda * (cplx(1.0) - z);
        cplx val = lst(dist, s);
        cplx e(0.0);
        for (std::size_t j = extra.size(); j-- > 0;) e = e * z + extra[j];
        return val * e;
    };
    auto Ap = [&dist, lambda, &extra](cplx z) {
        cplx s = lambda * (cplx(1.0) - z);
        cplx val = lst(dist, s);
        cplx dval = -lambda * lst_deriv(dist, s);
        cplx e(0.0), de(0.0);
        for (std::size_t j = extra.size(); j-- > 0;) {
            de = de * z + e;
            e = e * z + extra[j];
        }
        return dval * e + val * de;
    };
    return unit_disk_roots(A, c, Ap);
}

double eq_mean_queue(int c, double lambda, double rho, double rhoZ, double smZ,
                     double smX, const std::vector<double>& a) {
    const double dc = c;
    double sum = 0.0;
    for (int k = 1; k <= c; ++k) {
        const double dk = k;
        double tk = lambda * lambda * smZ * dc * (dc - rho) +
                    lambda * lambda * smX * dc * (1.0 + rhoZ - dk) +
                    (dc * dk * (dc - dk) + dk * (dk - 1.0) * rho - dc * (dc - 1.0)) * rho +
                    2.0 * dc * dc * rhoZ - dc * (dc + 1.0) * rhoZ * rho;
        sum += a[k - 1] * tk;
    }
    return sum / (2.0 * lambda * (dc - rho) * (dc - rho));
}

// P(v users arrive during one server gap), v = 0..n-1, in closed form for all
// four gap laws (Poisson arrivals at rate lambda).
std::vector<double> arrivals_pmf(const DistanceDistribution& d, double lambda, int n) {
    std::vector<double> k(static_cast<std::size_t>(n), 0.0);
    switch (d.kind) {
        case DistKind::Exponential: {
            const double keep = d.rate / (lambda + d.rate);
            const double grow = lambda / (lambda + d.rate);
            double term = keep;
            for (int v = 0; v < n; ++v) {
                k[v] = term;
                term *= grow;
            }
            break;
        }
        case DistKind::Deterministic: {
            const double a = lambda * d.d0;
            double term = std::exp(-a);
            for (int v = 0; v < n; ++v) {
                k[v] = term;
                term *= a / (v + 1);
            }
            break;
        }
        case DistKind::Uniform: {
            const double a = lambda * d.b;
            double tail = -std::expm1(-a);  // P(N >= 1)
            double pmf = std::exp(-a);
            k[0] = tail / a;
            for (int v = 1; v < n; ++v) {
                pmf *= a / v;
                tail -= pmf;
                k[v] = std::max(0.0, tail) / a;
            }
            break;
        }
        case DistKind::HyperExponential: {
            for (std::size_t j = 0; j < d.p.size(); ++j) {
                const double keep = d.rates[j] / (lambda + d.rates[j]);
                const double grow = lambda / (lambda + d.rates[j]);
                double term = d.p[j] * keep;
                for (int v = 0; v < n; ++v) {
                    k[v] += term;
                    term *= grow;
                }
            }
            break;
        }
    }
    return k;
}

struct HetTables {
    std::vector<double> w;  // w[u], u = 1..c (index 0 unused)
    std::vector<double> e;  // e[j], j = 0..c-1
};

HetTables het_tables(const std::vector<double>& pmf, const std::vector<double>& k) {
    const int c = static_cast<int>(pmf.size());
    std::vector<double> tail(static_cast<std::size_t>(c) + 2, 0.0);  // tail[m] = P(cap >= m)
    for (int m = c; m >= 1; --m) tail[m] = tail[m + 1] + pmf[m - 1];
    HetTables t;
    t.w.assign(static_cast<std::size_t>(c) + 1, 0.0);
    for (int u = 1; u <= c; ++u) {
        for (int i = u; i <= c; ++i) t.w[u] += k[i - u] * pmf[i - 1];
    }
    t.e.assign(static_cast<std::size_t>(c), 0.0);
    for (int j = 0; j < c; ++j) {
        for (int i = j; i <= c - 1; ++i) t.e[j] += k[i - j] * tail[i + 1];
    }
    return t;
}

nlohmann::json roots_to_json(const std::vector<cplx>& roots) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& r : roots) arr.push_back({{"re", r.real()}, {"im", r.imag()}});
    return arr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fixed-capacity Poisson/Poisson model
// ---------------------------------------------------------------------------

BulkMM1Solved bulk_mm1_solve(const BulkMM1Model& m) {
    require_positive(m.lambda, "lambda");
    require_positive(m.mu, "mu");
    require_capacity(m.c);
    const double rho = m.lambda / m.mu;
    if (!(rho < m.c - kStabilityMargin)) {
        throw domain_error("unstable model: rho must stay below the capacity");
    }
    auto f = [&m](double r) {
        return m.mu * std::pow(r, m.c + 1) - (m.lambda + m.mu) * r + m.lambda;
    };
    auto df = [&m](double r) {
        return m.mu * (m.c + 1) * std::pow(r, m.c) - (m.lambda + m.mu);
    };
    BulkMM1Solved s;
    s.model = m;
    s.rho = rho;
    s.r0 = root_in_unit_interval(f, df);
    s.expectedDistance = s.r0 / (m.lambda * (1.0 - s.r0));
    return s;
}

double bulk_mm1_expected_distance(const BulkMM1Model& m) {
    return bulk_mm1_solve(m).expectedDistance;
}

double ugs_distance_density(double lambda, double mu, double x) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    if (!(lambda < mu)) {
        throw domain_error("density requires lambda < mu");
    }
    if (x < 0.0 || !std::isfinite(x)) {
        throw domain_error("density argument must be nonnegative and finite");
    }
    const double y = 2.0 * x * std::sqrt(lambda * mu);
    if (y < 1e-6) {
        // I1(y)/(y/2) = 1 + y^2/8 + O(y^4)
        return mu * std::exp(-(lambda + mu) * x) * (1.0 + y * y / 8.0);
    }
    const double scale = x * std::sqrt(lambda / mu);
    if (y <= 700.0) {
        return std::exp(-(lambda + mu) * x) * bessel_i1(y) / scale;
    }
    // Deep tail where I1 would overflow: I1(y) ~ e^y (1 - 3/(8y)) / sqrt(2 pi y)
    // and -(lambda+mu)x + y = -x (sqrt(mu) - sqrt(lambda))^2.
    const double exponent = -(lambda + mu) * x + y - 0.5 * std::log(2.0 * kPi * y) - std::log(scale);
    return std::exp(exponent) * (1.0 - 3.0 / (8.0 * y));
}

// ---------------------------------------------------------------------------
// Renewal users / Poisson servers
// ---------------------------------------------------------------------------

GrpsSolved grps_solve(const GrpsModel& m) {
    m.interUser.validate();
    require_positive(m.mu, "mu");
    require_capacity(m.c);
    GrpsSolved s;
    s.model = m;
    s.lambda = 1.0 / m.interUser.mean();
    s.rho = s.lambda / m.mu;
    if (!(s.rho < m.c - kStabilityMargin)) {
        throw domain_error("unstable model: rho must stay below the capacity");
    }
    auto g = [&m](double r) {
        return lst(m.interUser, m.mu * (1.0 - std::pow(r, m.c))) - r;
    };
    auto dg = [&m](double r) {
        const double sv = m.mu * (1.0 - std::pow(r, m.c));
        const double lp = lst_deriv(m.interUser, cplx(sv, 0.0)).real();
        return lp * (-m.mu * m.c * std::pow(r, m.c - 1)) - 1.0;
    };
    s.r0 = root_in_unit_interval(g, dg);
    const double rc = std::pow(s.r0, m.c);
    s.C = s.lambda * rc * (1.0 - s.r0);
    s.omega = 1.0 / lst(m.interUser, m.mu);
    s.meanQueue = s.rho * rc / (1.0 - rc);
    s.expectedDistance = s.meanQueue / s.lambda + 1.0 / m.mu;
    return s;
}

double grps_expected_distance(const GrpsModel& m) {
    return grps_solve(m).expectedDistance;
}

// ---------------------------------------------------------------------------
// Poisson users / renewal servers, fixed capacity
// ---------------------------------------------------------------------------

PrgsSolved prgs_solve(const PrgsModel& m) {
    m.interServer.validate();
    require_positive(m.lambda, "lambda");
    require_capacity(m.c);
    PrgsSolved s;
    s.model = m;
    s.rho = m.lambda * m.interServer.mean();
    if (!(s.rho < m.c - kStabilityMargin)) {
        throw domain_error("unstable model: rho must stay below the capacity");
    }
    s.firstService = exceptional(m.interServer, m.lambda);
    s.rhoZ = m.lambda * s.firstService.mean;

    UnitDiskRoots R = transform_roots(m.interServer, m.lambda, m.c, {cplx(1.0)});
    if (R.multiplicityFlag) {
        throw domain_error("root cluster detected: coefficient system would be singular");
    }
    s.roots = R.roots;

    const int c = m.c;
    std::vector<std::vector<cplx>> M(static_cast<std::size_t>(c),
                                     std::vector<cplx>(static_cast<std::size_t>(c)));
    std::vector<cplx> rhs(static_cast<std::size_t>(c), cplx(0.0));
    for (int i = 0; i < c - 1; ++i) {
        const cplx xi = s.roots[i];
        const cplx fz = s.firstService.lst(m.lambda * (cplx(1.0) - xi));
        for (int k = 1; k <= c; ++k) {
            M[i][k - 1] = xi * fz - std::pow(xi, k);
        }
    }
    for (int k = 1; k <= c; ++k) {
        M[c - 1][k - 1] = cplx(c * (1.0 + s.rhoZ) - s.rho * k);
    }
    rhs[c - 1] = cplx(m.lambda * (c - s.rho));
    LinearSolveResult sol = solve_small_linear(M, rhs);

    s.a.resize(static_cast<std::size_t>(c));
    double asum = 0.0;
    for (int k = 0; k < c; ++k) {
        if (std::abs(sol.x[k].imag()) > 1e-8) {
            throw domain_error("coefficient solve produced a non-real value");
        }
        s.a[k] = sol.x[k].real();
        asum += s.a[k];
    }
    s.p0 = asum / m.lambda;
    if (!(s.p0 > 0.0)) {
        throw domain_error("coefficient solve produced nonpositive empty-system mass");
    }
    s.meanQueue = eq_mean_queue(c, m.lambda, s.rho, s.rhoZ, s.firstService.secondMoment,
                                m.interServer.second_moment(), s.a);
    if (!(s.meanQueue >= 0.0) || !std::isfinite(s.meanQueue)) {
        throw domain_error("mean queue length came out negative or non-finite");
    }
    s.expectedDistance = s.meanQueue / m.lambda;
    return s;
}

double prgs_expected_distance(const PrgsModel& m) {
    return prgs_solve(m).expectedDistance;
}

cplx prgs_queue_pgf(const PrgsSolved& s, cplx z) {
    if (std::abs(z - cplx(1.0)) < 1e-9) return cplx(1.0);
    const int c = s.model.c;
    for (int i = 0; i < c - 1; ++i) {
        if (std::abs(z - s.roots[i]) < 1e-9) {
            throw domain_error("transform evaluated at a denominator root");
        }
    }
    const cplx theta = s.model.lambda * (cplx(1.0) - z);
    const cplx fx = lst(s.model.interServer, theta);
    const cplx fz = s.firstService.lst(theta);
    const cplx zc = std::pow(z, c);
    const cplx denom = theta * (zc - fx);
    if (std::abs(denom) < 1e-280) {
        throw domain_error("transform evaluated at a denominator root");
    }
    cplx num(0.0);
    for (int k = 1; k <= c; ++k) {
        const cplx zk = std::pow(z, k);
        num += s.a[k - 1] * (zc - zk + z * (cplx(1.0) - zc) * fz - (cplx(1.0) - zk) * fx);
    }
    return num / denom;
}

// ---------------------------------------------------------------------------
// Poisson users / renewal servers, random capacity
// ---------------------------------------------------------------------------

HetCapSolved hetcap_solve(const HetCapModel& m) {
    m.interServer.validate();
    require_positive(m.lambda, "lambda");
    if (m.pmf.empty()) throw domain_error("capacity pmf must be nonempty");
    double total = 0.0;
    for (double pv : m.pmf) {
        if (!(pv >= 0.0) || !std::isfinite(pv)) {
            throw domain_error("capacity pmf entries must be nonnegative");
        }
        total += pv;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw domain_error("capacity pmf must sum to 1");
    }
    if (!(m.pmf.back() > 0.0)) {
        throw domain_error("top capacity must have positive mass");
    }
    const int c = static_cast<int>(m.pmf.size());

    HetCapSolved s;
    s.model = m;
    s.cbar = 0.0;
    for (int i = 1; i <= c; ++i) s.cbar += i * m.pmf[i - 1];
    const double ax = m.interServer.mean();
    s.rho = m.lambda * ax;
    if (!(s.rho < s.cbar - kStabilityMargin)) {
        throw domain_error("unstable model: rho must stay below the mean capacity");
    }

    s.k = arrivals_pmf(m.interServer, m.lambda, c);
    const HetTables t = het_tables(m.pmf, s.k);

    // S(z) = sum_i pmf[i-1] z^{c-i}, ascending coefficients.
    std::vector<cplx> S(static_cast<std::size_t>(c), cplx(0.0));
    for (int i = 1; i <= c; ++i) S[c - i] = cplx(m.pmf[i - 1]);
    UnitDiskRoots R = transform_roots(m.interServer, m.lambda, c, S);
    if (R.multiplicityFlag) {
        throw domain_error("root cluster detected: boundary system would be singular");
    }
    s.roots = R.roots;

    std::vector<std::vector<cplx>> M(static_cast<std::size_t>(c),
                                     std::vector<cplx>(static_cast<std::size_t>(c)));
    std::vector<cplx> rhs(static_cast<std::size_t>(c), cplx(0.0));
    for (int i = 0; i < c - 1; ++i) {
        const cplx xi = s.roots[i];
        const cplx xc = std::pow(xi, c);
        for (int j = 0; j < c; ++j) {
            cplx acc = xc * t.e[j];
            for (int mm = 1; mm <= c - j; ++mm) {
                acc -= std::pow(xi, c - mm) * t.w[mm + j];
            }
            M[i][j] = acc;
        }
    }
    for (int j = 0; j < c; ++j) {
        double acc = c * t.e[j];
        for (int mm = 1; mm <= c - j; ++mm) acc -= (c - mm) * t.w[mm + j];
        M[c - 1][j] = cplx(acc);
    }
    rhs[c - 1] = cplx(s.cbar - s.rho);
    LinearSolveResult sol = solve_small_linear(M, rhs);

    s.pi.resize(static_cast<std::size_t>(c));
    for (int j = 0; j < c; ++j) {
        if (std::abs(sol.x[j].imag()) > 1e-8) {
            throw domain_error("boundary solve produced a non-real value");
        }
        s.pi[j] = sol.x[j].real();
        if (s.pi[j] < -1e-10 || s.pi[j] > 1.0 + 1e-10) {
            throw domain_error("boundary solve left the probability range");
        }
    }

    double epi = 0.0, a1 = 0.0, a2 = 0.0;
    for (int j = 0; j < c; ++j) {
        epi += s.pi[j] * t.e[j];
        double s1 = 0.0, s2 = 0.0;
        for (int mm = 1; mm <= c - j; ++mm) {
            s1 += (c - mm) * t.w[mm + j];
            s2 += (c - mm) * (c - mm - 1.0) * t.w[mm + j];
        }
        a1 += s.pi[j] * s1;
        a2 += s.pi[j] * s2;
    }
    const double A1 = c * epi - a1;
    const double A2 = c * (c - 1.0) * epi - a2;
    const double smX = m.interServer.second_moment();
    const double B1 = s.cbar - s.rho;
    double csum = 0.0;
    for (int i = 1; i <= c; ++i) csum += m.pmf[i - 1] * (c - i) * (c - i - 1.0);
    const double B2 = c * (c - 1.0) - m.lambda * m.lambda * smX -
                      2.0 * s.rho * (c - s.cbar) - csum;
    if (std::abs(A1 - B1) > 1e-6 * std::max(1.0, std::abs(B1))) {
        throw domain_error("boundary normalization failed to hold");
    }
    s.hbar = (A2 * B1 - A1 * B2) / (2.0 * B1 * B1);
    s.expectedDistance = (s.hbar * ax + 0.5 * m.lambda * smX) / s.rho;
    if (!(s.expectedDistance >= 0.0) || !std::isfinite(s.expectedDistance)) {
        throw domain_error("expected distance came out negative or non-finite");
    }
    return s;
}

double hetcap_expected_distance(const HetCapModel& m) {
    return hetcap_solve(m).expectedDistance;
}

cplx hetcap_queue_pgf(const HetCapSolved& s, cplx z) {
    if (std::abs(z - cplx(1.0)) < 1e-9) return cplx(1.0);
    const int c = static_cast<int>(s.model.pmf.size());
    for (int i = 0; i < c - 1; ++i) {
        if (std::abs(z - s.roots[i]) < 1e-9) {
            throw domain_error("transform evaluated at a denominator root");
        }
    }
    const HetTables t = het_tables(s.model.pmf, s.k);
    const cplx zc = std::pow(z, c);
    cplx A(0.0);
    double epi = 0.0;
    for (int j = 0; j < c; ++j) {
        epi += s.pi[j] * t.e[j];
        cplx acc(0.0);
        for (int mm = 1; mm <= c - j; ++mm) acc += std::pow(z, c - mm) * t.w[mm + j];
        A -= s.pi[j] * acc;
    }
    A += zc * epi;
    const cplx K = lst(s.model.interServer, s.model.lambda * (cplx(1.0) - z));
    cplx S(0.0);
    for (int i = 1; i <= c; ++i) S += s.model.pmf[i - 1] * std::pow(z, c - i);
    const cplx B = zc - K * S;
    if (std::abs(B) < 1e-280) {
        throw domain_error("transform evaluated at a denominator root");
    }
    return A / B;
}

// ---------------------------------------------------------------------------
// Limits and estimates
// ---------------------------------------------------------------------------

double heavy_traffic_estimate(const DistanceDistribution& interUser,
                              const DistanceDistribution& interServer) {
    interUser.validate();
    interServer.validate();
    const double ay = interUser.mean();
    const double ax = interServer.mean();
    const double rho = ax / ay;
    if (!(rho < 1.0 - kStabilityMargin)) {
        throw domain_error("unstable model: rho must stay below 1");
    }
    return ax + (interServer.variance() + interUser.variance()) / (2.0 * ay * (1.0 - rho));
}

double uncapacitated_expected_distance(QueueSide side,
                                       const DistanceDistribution& dist,
                                       double rate) {
    dist.validate();
    switch (side) {
        case QueueSide::GRPS:
            require_positive(rate, "rate");
            return 1.0 / rate;
        case QueueSide::PRGS:
            return dist.second_moment() / (2.0 * dist.mean());
    }
    throw domain_error("unknown queue side");
}

// ---------------------------------------------------------------------------
// JSON dumps
// ---------------------------------------------------------------------------

nlohmann::json to_json(const BulkMM1Solved& s) {
    return {{"model", "bulk_mm1"},
            {"lambda", s.model.lambda},
            {"mu", s.model.mu},
            {"c", s.model.c},
            {"rho", s.rho},
            {"r0", s.r0},
            {"expected_distance", s.expectedDistance}};
}

nlohmann::json to_json(const GrpsSolved& s) {
    return {{"model", "grps"},
            {"inter_user", dist_to_json(s.model.interUser)},
            {"mu", s.model.mu},
            {"c", s.model.c},
            {"lambda", s.lambda},
            {"rho", s.rho},
            {"r0", s.r0},
            {"normalization_constant", s.C},
            {"omega", s.omega},
            {"mean_queue", s.meanQueue},
            {"expected_distance", s.expectedDistance}};
}

nlohmann::json to_json(const PrgsSolved& s) {
    return {{"model", "prgs"},
            {"lambda", s.model.lambda},
            {"inter_server", dist_to_json(s.model.interServer)},
            {"c", s.model.c},
            {"rho", s.rho},
            {"rho_first", s.rhoZ},
            {"first_service",
             {{"mean", s.firstService.mean},
              {"second_moment", s.firstService.secondMoment},
              {"condition_prob", s.firstService.conditionProb}}},
            {"roots", roots_to_json(s.roots)},
            {"a", s.a},
            {"p0", s.p0},
            {"mean_queue", s.meanQueue},
            {"expected_distance", s.expectedDistance}};
}

nlohmann::json to_json(const HetCapSolved& s) {
    return {{"model", "hetcap"},
            {"lambda", s.model.lambda},
            {"inter_server", dist_to_json(s.model.interServer)},
            {"capacity_pmf", s.model.pmf},
            {"rho", s.rho},
            {"mean_capacity", s.cbar},
            {"arrival_counts", s.k},
            {"roots", roots_to_json(s.roots)},
            {"pi", s.pi},
            {"hbar", s.hbar},
            {"expected_distance", s.expectedDistance}};
}

}  // namespace halfline
