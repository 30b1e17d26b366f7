#include "halfline/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace halfline {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

cplx phi_ratio(cplx h) {
    if (std::abs(h) < 0.5) {
        cplx term = 1.0, sum = 1.0;  // n = 0
        for (int n = 1; n < 60; ++n) {
            term *= h / static_cast<double>(n + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(h) - 1.0) / h;
}

cplx phi_ratio_prime(cplx h) {
    if (std::abs(h) < 0.5) {
        cplx term = 0.5, sum = 0.5;  // n = 1 term: 1/2!
        for (int n = 2; n < 60; ++n) {
            term *= h * (static_cast<double>(n) / ((n - 1.0) * (n + 1.0)));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return ((h - 1.0) * std::exp(h) + 1.0) / (h * h);
}

double bessel_i1(double x) {
    if (x < 0.0 || x > 700.0)
        throw domain_error("bessel_i1: argument outside [0, 700]");
    if (x == 0.0) return 0.0;
    const double q = x * x / 4.0;
    double term = x / 2.0;  // m = 0
    double sum = term;
    for (int m = 1; m < 100000; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

double root_in_unit_interval(const std::function<double(double)>& f,
                             const std::function<double(double)>& df) {
    double lo = 1e-12, hi = 1.0 - 1e-9;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        // one fine scan for an interior bracket before declaring failure
        bool found = false;
        const int grid = 4096;
        double xp = lo, fp = flo;
        for (int i = 1; i <= grid; ++i) {
            const double x = lo + (hi - lo) * i / grid;
            const double fx = f(x);
            if (fp * fx <= 0.0) {
                lo = xp;
                hi = x;
                flo = fp;
                found = true;
                break;
            }
            xp = x;
            fp = fx;
        }
        if (!found)
            throw domain_error(
                "root_in_unit_interval: no sign change in (0,1); model unstable (rho >= c)?");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    double x = 0.5 * (lo + hi);
    if (df) {
        for (int it = 0; it < 8; ++it) {
            const double d = df(x);
            if (d == 0.0) break;
            const double step = f(x) / d;
            const double xn = x - step;
            if (xn <= lo || xn >= hi) break;
            x = xn;
            if (std::abs(step) < 1e-16) break;
        }
    }
    return x;
}

namespace {

cplx pow_int(cplx z, int c) {
    cplx r = 1.0;
    for (int i = 0; i < c; ++i) r *= z;
    return r;
}

cplx newton_polish(const std::function<cplx(cplx)>& A,
                   const std::function<cplx(cplx)>& Aprime, int c, cplx z) {
    for (int it = 0; it < 40; ++it) {
        const cplx fz = pow_int(z, c) - A(z);
        cplx ap;
        if (Aprime) {
            ap = Aprime(z);
        } else {
            const double h = 1e-7;
            ap = (A(z + h) - A(z - h)) / (2.0 * h);
        }
        const cplx dz = static_cast<double>(c) * pow_int(z, c - 1) - ap;
        if (std::abs(dz) == 0.0) break;
        const cplx step = fz / dz;
        z -= step;
        if (std::abs(z) > 2.0) break;  // diverged; caller checks the residual
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

// Shared tail: snap the root nearest 1, validate, sort, flag clusters.
UnitDiskRoots finalize_roots(std::vector<cplx> roots, int c,
                             const std::function<cplx(cplx)>& A) {
    if (static_cast<int>(roots.size()) != c)
        throw domain_error("unit_disk_roots: wrong root count in unit disk");
    std::size_t near1 = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double d = std::abs(roots[i] - 1.0);
        if (d < best) {
            best = d;
            near1 = i;
        }
    }
    if (best > 1e-8)
        throw domain_error("unit_disk_roots: root at z=1 not found");
    roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(near1));
    for (const cplx& z : roots) {
        if (std::abs(z) > 1.0 + 1e-9)
            throw domain_error("unit_disk_roots: root outside closed unit disk");
        if (A) {
            const cplx resid = pow_int(z, c) - A(z);
            if (std::abs(resid) > 1e-9)
                throw domain_error("unit_disk_roots: residual too large (no convergence)");
        }
    }
    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    roots.push_back(cplx(1.0, 0.0));
    UnitDiskRoots out;
    out.multiplicityFlag = detect_root_cluster(roots, 1e-6);
    out.roots = std::move(roots);
    return out;
}

}  // namespace

UnitDiskRoots unit_disk_roots(const std::function<cplx(cplx)>& A, int c,
                              const std::function<cplx(cplx)>& Aprime) {
    if (c < 1) throw domain_error("unit_disk_roots: c must be >= 1");
    std::vector<cplx> roots;
    roots.reserve(static_cast<std::size_t>(c));
    for (int k = 0; k < c; ++k) {
        cplx z = std::polar(0.5, kTwoPi * k / c);
        bool converged = false;
        for (int it = 0; it < 10000; ++it) {
            const cplx a = A(z);
            const double mod = std::pow(std::abs(a), 1.0 / c);
            const double ang = (std::arg(a) + kTwoPi * k) / c;
            const cplx zn = std::polar(mod, ang);
            const double delta = std::abs(zn - z);
            z = zn;
            if (delta < 1e-13) {
                converged = true;
                break;
            }
        }
        z = newton_polish(A, Aprime, c, z);
        if (!converged && std::abs(pow_int(z, c) - A(z)) > 1e-9)
            throw domain_error("unit_disk_roots: branch iteration did not converge");
        roots.push_back(z);
    }
    return finalize_roots(std::move(roots), c, A);
}

UnitDiskRoots unit_disk_roots_rational(const std::vector<cplx>& P,
                                       const std::vector<cplx>& Q, int c) {
    if (c < 1) throw domain_error("unit_disk_roots: c must be >= 1");
    // R(z) = z^c Q(z) - P(z), ascending coefficients
    std::vector<cplx> R(std::max(P.size(), Q.size() + static_cast<std::size_t>(c)), cplx(0.0));
    for (std::size_t i = 0; i < Q.size(); ++i) R[i + static_cast<std::size_t>(c)] += Q[i];
    for (std::size_t i = 0; i < P.size(); ++i) R[i] -= P[i];
    while (R.size() > 1 && std::abs(R.back()) < 1e-14) R.pop_back();
    const std::size_t n = R.size() - 1;  // degree
    if (n < static_cast<std::size_t>(c))
        throw domain_error("unit_disk_roots: degenerate rational polynomial");

    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i + 1 < n; ++i)
        C(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -R[i] / R[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw domain_error("unit_disk_roots: eigenvalue iteration failed");

    // polynomial Newton polish, then keep the unit-disk subset
    auto horner = [&R](cplx z, cplx* dp) {
        cplx v = R.back(), d = 0.0;
        for (std::size_t i = R.size() - 1; i-- > 0;) {
            d = d * z + v;
            v = v * z + R[i];
        }
        *dp = d;
        return v;
    };
    std::vector<cplx> inDisk;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        cplx z = es.eigenvalues()(i);
        for (int it = 0; it < 20; ++it) {
            cplx d;
            const cplx v = horner(z, &d);
            if (std::abs(d) == 0.0) break;
            const cplx step = v / d;
            z -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
        }
        if (std::abs(z) <= 1.0 + 1e-9) inDisk.push_back(z);
    }
    return finalize_roots(std::move(inDisk), c, {});
}

bool detect_root_cluster(const std::vector<cplx>& roots, double tol) {
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < tol) return true;
    return false;
}

LinearSolveResult solve_small_linear(const std::vector<std::vector<cplx>>& M,
                                     const std::vector<cplx>& b) {
    const std::size_t n = M.size();
    if (n == 0 || n > 64)
        throw domain_error("solve_small_linear: size must be in 1..64");
    if (b.size() != n)
        throw domain_error("solve_small_linear: shape mismatch");

    Eigen::MatrixXcd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (M[i].size() != n) throw domain_error("solve_small_linear: shape mismatch");
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(M[i][j]));
        if (scale == 0.0) throw domain_error("solve_small_linear: zero row");
        for (std::size_t j = 0; j < n; ++j)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M[i][j] / scale;
        rhs(static_cast<Eigen::Index>(i)) = b[i] / scale;
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::MatrixXcd inv = lu.inverse();
    auto normInf = [](const Eigen::MatrixXcd& X) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < X.cols(); ++j) s += std::abs(X(i, j));
            best = std::max(best, s);
        }
        return best;
    };
    const double cond = normInf(A) * normInf(inv);
    if (!(cond < 1e12))
        throw domain_error("solve_small_linear: condition estimate exceeds 1e12");

    Eigen::VectorXcd x = lu.solve(rhs);
    x += lu.solve(rhs - A * x);  // one refinement step

    LinearSolveResult out;
    out.conditionEstimate = cond;
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = x(static_cast<Eigen::Index>(i));
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = -b[i];
        for (std::size_t j = 0; j < n; ++j) acc += M[i][j] * out.x[j];
        resid = std::max(resid, std::abs(acc));
    }
    out.residualInf = resid;
    return out;
}

namespace {

// force > 0 subdivides unconditionally: the error estimate alone can be
// fooled by integrands concentrated far inside a wide interval.
double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth, int force) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double sum = left + right;
    if (depth <= 0 || (force <= 0 && std::abs(sum - whole) <= 15.0 * tol))
        return sum + (sum - whole) / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1,
                       force - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1,
                       force - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 60, 8);
}

std::vector<double> pgf_taylor_coeffs(const std::function<cplx(cplx)>& f,
                                      int n, double radius, int nodes) {
    std::vector<cplx> vals(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j)
        vals[static_cast<std::size_t>(j)] = f(std::polar(radius, kTwoPi * j / nodes));
    std::vector<double> out(static_cast<std::size_t>(n));
    double rk = 1.0;
    for (int k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < nodes; ++j)
            acc += vals[static_cast<std::size_t>(j)] *
                   std::polar(1.0, -kTwoPi * j * k / nodes);
        out[static_cast<std::size_t>(k)] = acc.real() / (nodes * rk);
        rk *= radius;
    }
    return out;
}

}  // namespace halfline
