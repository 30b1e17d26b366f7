#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "halfline/common.hpp"

namespace halfline {

using cplx = std::complex<double>;

// phi(h) = (e^h - 1)/h and its derivative, series-evaluated near h = 0 where
// the direct form cancels catastrophically.
cplx phi_ratio(cplx h);
cplx phi_ratio_prime(cplx h);

// Modified Bessel function I1 by its power series; domain [0, 700].
double bessel_i1(double x);

// Root of f on (0,1) to absolute tolerance 1e-12: bracketing bisection,
// refined by Newton steps when a derivative is supplied.  Throws domain_error
// when no sign change exists (typically an unstable model, rho >= c).
double root_in_unit_interval(const std::function<double(double)>& f,
                             const std::function<double(double)>& df = {});

struct UnitDiskRoots {
    std::vector<cplx> roots;  // exactly c roots; the last is exactly 1
    bool multiplicityFlag = false;
};

// All c roots of z^c = A(z) in the closed unit disk, A a probability
// generating value there (A(1) = 1, A'(1) < c).  Per-branch fixed-point
// iteration z <- |A(z)|^{1/c} e^{i(arg A(z) + 2 pi k)/c} started from
// 0.5 e^{2 pi i k/c}, polished by Newton (derivative optional, else a
// central-difference derivative is used).  Roots closer than 1e-6 set
// multiplicityFlag.  Interior roots sorted by (Re, Im); root 1 last.
UnitDiskRoots unit_disk_roots(const std::function<cplx(cplx)>& A, int c,
                              const std::function<cplx(cplx)>& Aprime = {});

// Same root set for rational A = P/Q (ascending coefficients), computed as
// the unit-disk eigenvalues of the companion matrix of z^c Q(z) - P(z).
UnitDiskRoots unit_disk_roots_rational(const std::vector<cplx>& P,
                                       const std::vector<cplx>& Q, int c);

bool detect_root_cluster(const std::vector<cplx>& roots, double tol);

struct LinearSolveResult {
    std::vector<cplx> x;
    double residualInf = 0.0;       // ||Mx - b||_inf on the input system
    double conditionEstimate = 0.0; // inf-norm condition of row-equilibrated M
};

// Dense solve, n <= 64: row equilibration, partial-pivot LU, one step of
// iterative refinement.  Throws domain_error when the condition estimate
// exceeds 1e12.
LinearSolveResult solve_small_linear(const std::vector<std::vector<cplx>>& M,
                                     const std::vector<cplx>& b);

// Recursive adaptive Simpson quadrature on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10);

// First n Taylor coefficients at 0 of an analytic f, by trapezoid contour
// integration on |z| = radius (exact for trigonometric polynomials up to the
// node count).
std::vector<double> pgf_taylor_coeffs(const std::function<cplx(cplx)>& f,
                                      int n, double radius = 0.5,
                                      int nodes = 512);

}  // namespace halfline
