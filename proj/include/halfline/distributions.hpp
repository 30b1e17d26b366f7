#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

#include "halfline/common.hpp"
#include "halfline/rng.hpp"

namespace halfline {

enum class DistKind { Exponential, Deterministic, Uniform, HyperExponential };

// Parametric inter-point distance law on the half-line.  Immutable after
// construction; safe to share across threads.
struct DistanceDistribution {
    DistKind kind = DistKind::Exponential;
    double rate = 1.0;          // Exponential
    double d0 = 1.0;            // Deterministic point mass
    double b = 1.0;             // Uniform on (0, b)
    std::vector<double> p;      // HyperExponential phase probabilities
    std::vector<double> rates;  // HyperExponential phase rates

    static DistanceDistribution exponential(double rate);
    static DistanceDistribution deterministic(double d0);
    static DistanceDistribution uniform(double b);
    static DistanceDistribution hyperexp(std::vector<double> p, std::vector<double> rates);

    void validate() const;  // throws domain_error on invalid parameters

    double mean() const;
    double second_moment() const;
    double variance() const;
    double cdf(double x) const;
    std::string describe() const;  // "exp:1", "det:2", "unif:2", "hyperexp[...]"
};

// One draw from the law.  Deterministic distributions consume no randomness;
// hyperexponentials consume two uniforms (phase, then magnitude).
double sample(const DistanceDistribution& d, PhiloxStream& rng);

// Laplace-Stieltjes transform F*(s) = E[e^{-sX}] and its s-derivative.
double lst(const DistanceDistribution& d, double s);
std::complex<double> lst(const DistanceDistribution& d, std::complex<double> s);
std::complex<double> lst_deriv(const DistanceDistribution& d, std::complex<double> s);

// Law of Z = X - Y conditioned on Y < X, with Y exponential(arrivalRate):
// the first-in-cycle service distribution.  All four base kinds have closed
// forms; exceptional_moment_quadrature provides an independent numeric route.
struct ExceptionalDistribution {
    DistanceDistribution base;
    double arrivalRate = 0.0;        // lambda
    double mean = 0.0;               // alpha_Z
    double secondMoment = 0.0;       // E[Z^2]
    double variance = 0.0;
    double conditionProb = 0.0;      // P(Y < X) = 1 - F_X*(lambda)
    std::vector<double> weights;     // hyperexponential base: reweighted phases

    double cdf(double x) const;
    double density(double x) const;
    std::complex<double> lst(std::complex<double> s) const;
};

ExceptionalDistribution exceptional(const DistanceDistribution& base, double lambda);

// k-th moment of Z by adaptive quadrature over the closed-form density
// (cross-check for the closed-form moments).
double exceptional_moment_quadrature(const ExceptionalDistribution& z, int k);

// Order-2 hyperexponential with balanced means, given squared coefficient of
// variation (>= 1) and mean.
DistanceDistribution h2_from_cv(double cv2, double meanDist);

// "exp:RATE" | "det:D0" | "unif:B" | "h2:CV2[:MEAN]"
DistanceDistribution parse_dist(const std::string& spec);

// {"kind":"exp","rate":..}, {"kind":"det","d0":..}, {"kind":"unif","b":..},
// {"kind":"hyperexp","cv2":..,"mean":..} or {"kind":"hyperexp","p":[..],"rates":[..]}
DistanceDistribution dist_from_json(const nlohmann::json& j);
nlohmann::json dist_to_json(const DistanceDistribution& d);

}  // namespace halfline
