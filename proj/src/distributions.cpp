#include "halfline/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "halfline/numerics.hpp"

namespace halfline {

namespace {

constexpr double kPmfTol = 1e-12;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

DistanceDistribution DistanceDistribution::exponential(double rate) {
    DistanceDistribution d;
    d.kind = DistKind::Exponential;
    d.rate = rate;
    d.validate();
    return d;
}

DistanceDistribution DistanceDistribution::deterministic(double d0) {
    DistanceDistribution d;
    d.kind = DistKind::Deterministic;
    d.d0 = d0;
    d.validate();
    return d;
}

DistanceDistribution DistanceDistribution::uniform(double b) {
    DistanceDistribution d;
    d.kind = DistKind::Uniform;
    d.b = b;
    d.validate();
    return d;
}

DistanceDistribution DistanceDistribution::hyperexp(std::vector<double> p,
                                                    std::vector<double> rates) {
    DistanceDistribution d;
    d.kind = DistKind::HyperExponential;
    d.p = std::move(p);
    d.rates = std::move(rates);
    d.validate();
    return d;
}

void DistanceDistribution::validate() const {
    switch (kind) {
        case DistKind::Exponential:
            if (!(rate > 0.0)) throw domain_error("exponential rate must be > 0");
            return;
        case DistKind::Deterministic:
            if (!(d0 > 0.0)) throw domain_error("deterministic d0 must be > 0");
            return;
        case DistKind::Uniform:
            if (!(b > 0.0)) throw domain_error("uniform b must be > 0");
            return;
        case DistKind::HyperExponential: {
            if (p.empty() || p.size() != rates.size())
                throw domain_error("hyperexponential needs matching p/rates lists");
            double sum = 0.0;
            for (double pj : p) {
                if (pj < 0.0 || pj > 1.0)
                    throw domain_error("hyperexponential phase probability outside [0,1]");
                sum += pj;
            }
            if (std::abs(sum - 1.0) > kPmfTol)
                throw domain_error("hyperexponential phase probabilities must sum to 1");
            for (double rj : rates)
                if (!(rj > 0.0)) throw domain_error("hyperexponential rates must be > 0");
            return;
        }
    }
    throw domain_error("unknown distribution kind");
}

double DistanceDistribution::mean() const {
    switch (kind) {
        case DistKind::Exponential: return 1.0 / rate;
        case DistKind::Deterministic: return d0;
        case DistKind::Uniform: return b / 2.0;
        case DistKind::HyperExponential: {
            double m = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) m += p[j] / rates[j];
            return m;
        }
    }
    return 0.0;
}

double DistanceDistribution::second_moment() const {
    switch (kind) {
        case DistKind::Exponential: return 2.0 / (rate * rate);
        case DistKind::Deterministic: return d0 * d0;
        case DistKind::Uniform: return b * b / 3.0;
        case DistKind::HyperExponential: {
            double m = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j)
                m += 2.0 * p[j] / (rates[j] * rates[j]);
            return m;
        }
    }
    return 0.0;
}

double DistanceDistribution::variance() const {
    const double m = mean();
    return second_moment() - m * m;
}

double DistanceDistribution::cdf(double x) const {
    if (x < 0.0) return 0.0;
    switch (kind) {
        case DistKind::Exponential: return -std::expm1(-rate * x);
        case DistKind::Deterministic: return x >= d0 ? 1.0 : 0.0;
        case DistKind::Uniform: return std::min(x / b, 1.0);
        case DistKind::HyperExponential: {
            double f = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j)
                f += p[j] * -std::expm1(-rates[j] * x);
            return f;
        }
    }
    return 0.0;
}

std::string DistanceDistribution::describe() const {
    switch (kind) {
        case DistKind::Exponential: return "exp:" + fmt(rate);
        case DistKind::Deterministic: return "det:" + fmt(d0);
        case DistKind::Uniform: return "unif:" + fmt(b);
        case DistKind::HyperExponential: {
            std::ostringstream os;
            os << "hyperexp[";
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (j) os << ";";
                os << "p=" << fmt(p[j]) << ",mu=" << fmt(rates[j]);
            }
            os << "]";
            return os.str();
        }
    }
    return "?";
}

double sample(const DistanceDistribution& d, PhiloxStream& rng) {
    switch (d.kind) {
        case DistKind::Exponential:
            return -std::log1p(-rng.next_double()) / d.rate;
        case DistKind::Deterministic:
            return d.d0;
        case DistKind::Uniform:
            return rng.next_double() * d.b;
        case DistKind::HyperExponential: {
            const double u = rng.next_double();
            double acc = 0.0;
            std::size_t phase = d.p.size() - 1;
            for (std::size_t j = 0; j < d.p.size(); ++j) {
                acc += d.p[j];
                if (u < acc) {
                    phase = j;
                    break;
                }
            }
            return -std::log1p(-rng.next_double()) / d.rates[phase];
        }
    }
    return 0.0;
}

namespace {

cplx lst_impl(const DistanceDistribution& d, cplx s) {
    switch (d.kind) {
        case DistKind::Exponential:
            return cplx(d.rate) / (d.rate + s);
        case DistKind::Deterministic:
            return std::exp(-s * d.d0);
        case DistKind::Uniform:
            // (1 - e^{-sb})/(sb) = phi(-sb)
            return phi_ratio(-s * d.b);
        case DistKind::HyperExponential: {
            cplx acc{};
            for (std::size_t j = 0; j < d.p.size(); ++j)
                acc += d.p[j] * d.rates[j] / (d.rates[j] + s);
            return acc;
        }
    }
    return {};
}

}  // namespace

double lst(const DistanceDistribution& d, double s) {
    if (s == 0.0) return 1.0;
    return lst_impl(d, cplx(s)).real();
}

cplx lst(const DistanceDistribution& d, cplx s) {
    if (s == cplx(0.0)) return 1.0;
    return lst_impl(d, s);
}

cplx lst_deriv(const DistanceDistribution& d, cplx s) {
    switch (d.kind) {
        case DistKind::Exponential: {
            const cplx den = d.rate + s;
            return -d.rate / (den * den);
        }
        case DistKind::Deterministic:
            return -d.d0 * std::exp(-s * d.d0);
        case DistKind::Uniform:
            return -d.b * phi_ratio_prime(-s * d.b);
        case DistKind::HyperExponential: {
            cplx acc{};
            for (std::size_t j = 0; j < d.p.size(); ++j) {
                const cplx den = d.rates[j] + s;
                acc -= d.p[j] * d.rates[j] / (den * den);
            }
            return acc;
        }
    }
    return {};
}

ExceptionalDistribution exceptional(const DistanceDistribution& base, double lambda) {
    if (!(lambda > 0.0)) throw domain_error("exceptional: arrival rate must be > 0");
    base.validate();

    ExceptionalDistribution z;
    z.base = base;
    z.arrivalRate = lambda;
    z.conditionProb = 1.0 - lst(base, lambda);

    switch (base.kind) {
        case DistKind::Exponential: {
            // memorylessness: Z has the base law itself
            z.mean = 1.0 / base.rate;
            z.secondMoment = 2.0 / (base.rate * base.rate);
            break;
        }
        case DistKind::Deterministic: {
            const double cl = 1.0 / -std::expm1(-lambda * base.d0);
            z.mean = cl * base.d0 - 1.0 / lambda;
            z.secondMoment = cl * base.d0 * base.d0 - 2.0 * z.mean / lambda;
            break;
        }
        case DistKind::Uniform: {
            const double kl = 1.0 / (base.b * lambda + std::expm1(-lambda * base.b));
            z.mean = lambda * kl * base.b * base.b / 2.0 - 1.0 / lambda;
            z.secondMoment = lambda * kl * base.b * base.b * base.b / 3.0 -
                             kl * base.b * base.b + 2.0 / (lambda * lambda);
            break;
        }
        case DistKind::HyperExponential: {
            double tot = 0.0;
            z.weights.resize(base.p.size());
            for (std::size_t j = 0; j < base.p.size(); ++j) {
                z.weights[j] = base.p[j] / (lambda + base.rates[j]);
                tot += z.weights[j];
            }
            for (double& w : z.weights) w /= tot;
            z.mean = 0.0;
            z.secondMoment = 0.0;
            for (std::size_t j = 0; j < base.p.size(); ++j) {
                z.mean += z.weights[j] / base.rates[j];
                z.secondMoment += 2.0 * z.weights[j] / (base.rates[j] * base.rates[j]);
            }
            break;
        }
    }
    z.variance = z.secondMoment - z.mean * z.mean;
    return z;
}

double ExceptionalDistribution::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double lam = arrivalRate;
    switch (base.kind) {
        case DistKind::Exponential:
            return base.cdf(x);
        case DistKind::Deterministic: {
            if (x >= base.d0) return 1.0;
            const double cl = 1.0 / -std::expm1(-lam * base.d0);
            return cl * (std::exp(-lam * (base.d0 - x)) - std::exp(-lam * base.d0));
        }
        case DistKind::Uniform: {
            if (x >= base.b) return 1.0;
            const double kl = 1.0 / (base.b * lam + std::expm1(-lam * base.b));
            return kl * (lam * x - std::exp(-lam * base.b) * std::expm1(lam * x));
        }
        case DistKind::HyperExponential: {
            double f = 0.0;
            for (std::size_t j = 0; j < weights.size(); ++j)
                f += weights[j] * -std::expm1(-base.rates[j] * x);
            return f;
        }
    }
    return 0.0;
}

double ExceptionalDistribution::density(double x) const {
    if (x <= 0.0) return 0.0;
    const double lam = arrivalRate;
    switch (base.kind) {
        case DistKind::Exponential:
            return base.rate * std::exp(-base.rate * x);
        case DistKind::Deterministic: {
            if (x >= base.d0) return 0.0;
            const double cl = 1.0 / -std::expm1(-lam * base.d0);
            return lam * cl * std::exp(-lam * (base.d0 - x));
        }
        case DistKind::Uniform: {
            if (x >= base.b) return 0.0;
            const double kl = 1.0 / (base.b * lam + std::expm1(-lam * base.b));
            return lam * kl * -std::expm1(-lam * (base.b - x));
        }
        case DistKind::HyperExponential: {
            double f = 0.0;
            for (std::size_t j = 0; j < weights.size(); ++j)
                f += weights[j] * base.rates[j] * std::exp(-base.rates[j] * x);
            return f;
        }
    }
    return 0.0;
}

cplx ExceptionalDistribution::lst(cplx s) const {
    const double lam = arrivalRate;
    switch (base.kind) {
        case DistKind::Exponential:
            return cplx(base.rate) / (base.rate + s);
        case DistKind::Deterministic: {
            const double cl = 1.0 / -std::expm1(-lam * base.d0);
            return cl * lam * std::exp(-lam * base.d0) * base.d0 *
                   phi_ratio((lam - s) * base.d0);
        }
        case DistKind::Uniform: {
            const double kl = 1.0 / (base.b * lam + std::expm1(-lam * base.b));
            return lam * kl * base.b *
                   (phi_ratio(-s * base.b) -
                    std::exp(-lam * base.b) * phi_ratio((lam - s) * base.b));
        }
        case DistKind::HyperExponential: {
            cplx acc{};
            for (std::size_t j = 0; j < weights.size(); ++j)
                acc += weights[j] * base.rates[j] / (base.rates[j] + s);
            return acc;
        }
    }
    return {};
}

double exceptional_moment_quadrature(const ExceptionalDistribution& z, int k) {
    // find x_max with 1 - F_Z(x_max) < 1e-10
    double xmax = z.base.mean();
    while (1.0 - z.cdf(xmax) > 1e-10) {
        xmax *= 2.0;
        if (xmax > 1e9) throw domain_error("exceptional moment quadrature: no tail decay");
    }
    auto f = [&](double x) { return std::pow(x, k) * z.density(x); };
    return adaptive_simpson(f, 0.0, xmax, 1e-12);
}

DistanceDistribution h2_from_cv(double cv2, double meanDist) {
    if (cv2 < 1.0) throw domain_error("h2_from_cv: cv2 must be >= 1");
    if (!(meanDist > 0.0)) throw domain_error("h2_from_cv: mean must be > 0");
    const double p1 = 0.5 * (1.0 + std::sqrt((cv2 - 1.0) / (cv2 + 1.0)));
    const double p2 = 1.0 - p1;
    return DistanceDistribution::hyperexp({p1, p2},
                                          {2.0 * p1 / meanDist, 2.0 * p2 / meanDist});
}

DistanceDistribution parse_dist(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);

    auto num = [&](std::size_t i) {
        std::size_t pos = 0;
        const double v = std::stod(parts.at(i), &pos);
        if (pos != parts[i].size()) throw std::invalid_argument("bad number in '" + spec + "'");
        return v;
    };

    const std::string& k = parts[0];
    if (k == "exp" && parts.size() == 2) return DistanceDistribution::exponential(num(1));
    if (k == "det" && parts.size() == 2) return DistanceDistribution::deterministic(num(1));
    if (k == "unif" && parts.size() == 2) return DistanceDistribution::uniform(num(1));
    if (k == "h2" && (parts.size() == 2 || parts.size() == 3))
        return h2_from_cv(num(1), parts.size() == 3 ? num(2) : 1.0);
    throw std::invalid_argument(
        "cannot parse distribution '" + spec +
        "' (expected exp:RATE | det:D0 | unif:B | h2:CV2[:MEAN])");
}

DistanceDistribution dist_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_dist(j.get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exp" || kind == "exponential")
        return DistanceDistribution::exponential(j.at("rate").get<double>());
    if (kind == "det" || kind == "deterministic")
        return DistanceDistribution::deterministic(j.at("d0").get<double>());
    if (kind == "unif" || kind == "uniform")
        return DistanceDistribution::uniform(j.at("b").get<double>());
    if (kind == "h2" || kind == "hyperexp") {
        if (j.contains("cv2"))
            return h2_from_cv(j.at("cv2").get<double>(),
                              j.contains("mean") ? j.at("mean").get<double>() : 1.0);
        return DistanceDistribution::hyperexp(j.at("p").get<std::vector<double>>(),
                                              j.at("rates").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

nlohmann::json dist_to_json(const DistanceDistribution& d) {
    switch (d.kind) {
        case DistKind::Exponential: return {{"kind", "exp"}, {"rate", d.rate}};
        case DistKind::Deterministic: return {{"kind", "det"}, {"d0", d.d0}};
        case DistKind::Uniform: return {{"kind", "unif"}, {"b", d.b}};
        case DistKind::HyperExponential:
            return {{"kind", "hyperexp"}, {"p", d.p}, {"rates", d.rates}};
    }
    return {};
}

}  // namespace halfline
