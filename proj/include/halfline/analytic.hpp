#pragma once

#include <complex>
#include <vector>

#include "json.hpp"

#include "halfline/common.hpp"
#include "halfline/distributions.hpp"
#include "halfline/numerics.hpp"

namespace halfline {

// ---------------------------------------------------------------------------
// Poisson users / Poisson servers, fixed capacity c (batch-service M/M/1 view
// of the unidirectional policies).
// ---------------------------------------------------------------------------
struct BulkMM1Model {
    double lambda = 0.0;  // user rate (1 / mean inter-user gap)
    double mu = 0.0;      // server rate
    int c = 1;
};

struct BulkMM1Solved {
    BulkMM1Model model;
    double rho = 0.0;
    double r0 = 0.0;  // unique root of mu r^{c+1} - (lambda+mu) r + lambda in (0,1)
    double expectedDistance = 0.0;  // r0 / (lambda (1 - r0))
};

BulkMM1Solved bulk_mm1_solve(const BulkMM1Model& m);
double bulk_mm1_expected_distance(const BulkMM1Model& m);

// Density of the matched distance under the rightward-ray policy at c = 1:
// f(x) = e^{-(lambda+mu)x} I1(2x sqrt(lambda mu)) / (x sqrt(rho)).
// Normalized with mean 1/(mu-lambda); finite limit mu at x -> 0+.
double ugs_distance_density(double lambda, double mu, double x);

// ---------------------------------------------------------------------------
// Renewal users / Poisson servers (gate opens where the server lands).
// ---------------------------------------------------------------------------
struct GrpsModel {
    DistanceDistribution interUser;  // F_Y
    double mu = 0.0;                 // exponential server rate
    int c = 1;
};

struct GrpsSolved {
    GrpsModel model;
    double lambda = 0.0;  // 1 / mean(F_Y)
    double rho = 0.0;
    double r0 = 0.0;     // fixed point of r = F_Y*(mu - mu r^c) in (0,1)
    double C = 0.0;      // normalization constant (diagnostic)
    double omega = 0.0;  // 1 / F_Y*(mu) (diagnostic)
    double meanQueue = 0.0;
    double expectedDistance = 0.0;  // meanQueue/lambda + 1/mu
};

GrpsSolved grps_solve(const GrpsModel& m);
double grps_expected_distance(const GrpsModel& m);

// ---------------------------------------------------------------------------
// Poisson users / renewal servers: batch service with an exceptional
// first-in-cycle service law and accessible batches.
// ---------------------------------------------------------------------------
struct PrgsModel {
    double lambda = 0.0;             // Poisson user rate
    DistanceDistribution interServer;  // F_X
    int c = 1;
};

struct PrgsSolved {
    PrgsModel model;
    ExceptionalDistribution firstService;  // F_Z
    double rho = 0.0;     // lambda * mean(F_X)
    double rhoZ = 0.0;    // lambda * mean(F_Z)
    std::vector<cplx> roots;  // of z^c = F_X*(lambda(1-z)); interior first, 1 last
    std::vector<double> a;    // a_1..a_c, all real
    double p0 = 0.0;          // empty-system probability, sum(a)/lambda
    double meanQueue = 0.0;
    double expectedDistance = 0.0;
};

PrgsSolved prgs_solve(const PrgsModel& m);
double prgs_expected_distance(const PrgsModel& m);

// Stationary queue-length transform N(z) of the solved model.  N(1) = 1;
// N(0) = p0.  Throws when z sits on a non-removable denominator root.
cplx prgs_queue_pgf(const PrgsSolved& s, cplx z);

// ---------------------------------------------------------------------------
// Poisson users / renewal servers with i.i.d. random capacity in {1..c}.
// ---------------------------------------------------------------------------
struct HetCapModel {
    double lambda = 0.0;
    DistanceDistribution interServer;  // F_X
    std::vector<double> pmf;           // pmf[i] = P(capacity = i+1); back() > 0
};

struct HetCapSolved {
    HetCapModel model;
    double rho = 0.0;
    double cbar = 0.0;        // mean capacity
    std::vector<double> k;    // k_v: P(v users arrive within one server gap)
    std::vector<cplx> roots;  // of z^c = K(z) sum_i p_i z^{c-i}; interior first
    std::vector<double> pi;   // boundary probabilities pi_0..pi_{c-1}
    double hbar = 0.0;        // mean queue length seen at server arrivals
    double expectedDistance = 0.0;
};

HetCapSolved hetcap_solve(const HetCapModel& m);
double hetcap_expected_distance(const HetCapModel& m);

// Queue-length transform A(z)/B(z) of the solved model (diagnostic; used to
// cross-check hbar by numerical differentiation at z = 1).
cplx hetcap_queue_pgf(const HetCapSolved& s, cplx z);

// ---------------------------------------------------------------------------
// Limits and estimates
// ---------------------------------------------------------------------------

// G/G/1 heavy-traffic estimate at c = 1:
// alpha_X + (var_X + var_Y) / (2 alpha_Y (1 - rho)), rho = alpha_X / alpha_Y.
double heavy_traffic_estimate(const DistanceDistribution& interUser,
                              const DistanceDistribution& interServer);

enum class QueueSide { GRPS, PRGS };

// c -> infinity limits: GRPS side depends only on the server rate (1/rate);
// PRGS side on the server gap law, second_moment / (2 mean).
double uncapacitated_expected_distance(QueueSide side,
                                       const DistanceDistribution& dist,
                                       double rate);

nlohmann::json to_json(const BulkMM1Solved& s);
nlohmann::json to_json(const GrpsSolved& s);
nlohmann::json to_json(const PrgsSolved& s);
nlohmann::json to_json(const HetCapSolved& s);

}  // namespace halfline
