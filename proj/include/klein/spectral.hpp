#ifndef KLEIN_SPECTRAL_HPP
#define KLEIN_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "klein/elliptic.hpp"
#include "klein/errors.hpp"
#include "klein/ode_solve.hpp"
#include "klein/quadrature.hpp"

// First-eigenvalue machinery for metrics of revolution on the Klein bottle.
//
// A metric is either conformal, f(y) g_a with f positive, even, a-periodic,
// or of the general revolution form M(v) du^2 + N(v) dv^2 with M, N positive
// and pi-periodic on the presentation cell [0,pi)^2.
//
// Conformal case: separating the circle harmonic exp(ikx) leaves the
// periodic Sturm-Liouville problem phi'' = (k^2 - lambda f) phi with parity
// (-1)^k under y -> -y, which reduces to [0, a/2] with Neumann (k even) or
// Dirichlet (k odd) conditions at both ends.
//
// General case: the u-circle of the presentation has period pi, i.e. the
// conformal angle x = 2u runs twice as fast, so the circle harmonic of
// index k carries u-frequency 2k, and the cell [0,pi)^2 is the orientable
// double cover of the bottle (its v-range spans one full conformal period).
// The profile reflection that encodes the gluing is an arc-length symmetry,
// not v -> -v; its two fixed points bound the half cell on which the
// separated problem is posed with the same Neumann/Dirichlet pairing.

namespace klein::spectral {

using ode::Params;

struct ConformalProfile {
    std::function<double(double)> f;  // conformal factor, even, period-periodic
    double period;                    // the y-period a
};

struct GeneralProfile {
    std::function<double(double)> M, N;  // du^2 and dv^2 coefficients
    double period;                       // pi
    // fixed points of the arc-length reflection in v; NaN = locate numerically
    double sym_lo = std::numeric_limits<double>::quiet_NaN();
    double sym_hi = std::numeric_limits<double>::quiet_NaN();
};

struct MetricProfile {
    std::variant<ConformalProfile, GeneralProfile> kind;
    std::string description;
};

struct SpectralResult {
    double lambda1 = 0.0;
    int k_min = -1;       // harmonic index achieving lambda1
    double area = 0.0;
    double product = 0.0; // lambda1 * area
    double err = 0.0;     // discretization estimate from grid refinement
};

inline MetricProfile flat_profile(double a) {
    if (!(a > 0.0)) throw domain_error("flat_profile: period must be positive");
    return {ConformalProfile{[](double) { return 1.0; }, a}, "flat"};
}

// The closed-form extremal metric: with c(v) = 1 + 8 cos^2 v,
//   M(v) = (9 + c^2)/c,   N(v) = (9 + c^2)/c^2,   period pi.
// The arc reflection is anchored at the minima of the conformal factor M,
// i.e. c = 3, which happens at v = pi/3 and 2pi/3 exactly.
inline MetricProfile g0_profile() {
    auto M = [](double v) {
        double c = 1.0 + 8.0 * std::cos(v) * std::cos(v);
        return (9.0 + c * c) / c;
    };
    auto N = [](double v) {
        double c = 1.0 + 8.0 * std::cos(v) * std::cos(v);
        return (9.0 + c * c) / (c * c);
    };
    return {GeneralProfile{M, N, elliptic::pi, elliptic::pi / 3.0,
                           2.0 * elliptic::pi / 3.0},
            "g0"};
}

namespace detail {

// Coefficients of  -(ps u')' + qs u = lambda ws u  on [lo, hi].
struct SLCoeffs {
    std::function<double(double)> ps, qs, ws;
    double lo, hi;
};

// Fixed points of the arc reflection for a general profile: the first
// anchors at a minimum of the conformal factor M, the second is half an arc
// period away (arc element 2 sqrt(N/M) dv).
inline std::pair<double, double> reflection_cell(const GeneralProfile& g) {
    if (std::isfinite(g.sym_lo) && std::isfinite(g.sym_hi))
        return {g.sym_lo, g.sym_hi};
    const int n = 4096;
    double best_v = 0.0, best = g.M(0.0);
    for (int i = 1; i < n; ++i) {
        double v = g.period * i / n;
        double m = g.M(v);
        if (m < best) {
            best = m;
            best_v = v;
        }
    }
    // parabolic refinement of the minimum
    double h = g.period / n;
    for (int it = 0; it < 60; ++it) {
        double m0 = g.M(best_v - h), m1 = g.M(best_v), m2 = g.M(best_v + h);
        double den = m0 - 2.0 * m1 + m2;
        if (den > 0.0) best_v += 0.5 * h * (m0 - m2) / den;
        h *= 0.5;
        if (h < 1e-14) break;
    }
    auto arc = [&](double a, double b) {
        return num::tanh_sinh_plain(
                   [&](double v) { return 2.0 * std::sqrt(g.N(v) / g.M(v)); }, a, b,
                   1e-13)
            .value;
    };
    double full = arc(best_v, best_v + g.period);
    double lo = best_v;
    double hi = num::brent(
        [&](double v) { return arc(best_v, v) - 0.5 * full; }, best_v + 0.1 * g.period,
        best_v + 0.9 * g.period, 1e-13);
    return {lo, hi};
}

inline SLCoeffs sl_coefficients(const MetricProfile& prof, int k) {
    if (const auto* c = std::get_if<ConformalProfile>(&prof.kind)) {
        auto f = c->f;
        return {[](double) { return 1.0; },
                [k](double) { return static_cast<double>(k) * k; },
                f, 0.0, 0.5 * c->period};
    }
    const auto& g = std::get<GeneralProfile>(prof.kind);
    auto [lo, hi] = reflection_cell(g);
    auto M = g.M;
    auto N = g.N;
    double freq = 2.0 * k;  // conformal angle runs twice as fast as u
    return {[M, N](double v) { return std::sqrt(M(v) / N(v)); },
            [M, N, freq](double v) { return freq * freq * std::sqrt(N(v) / M(v)); },
            [M, N](double v) { return std::sqrt(M(v) * N(v)); }, lo, hi};
}

struct Tridiag {
    std::vector<double> d;  // diagonal of A
    std::vector<double> e;  // subdiagonal of A
    std::vector<double> w;  // diagonal of B (positive weight)
};

// Symmetric second-order finite differences; Neumann ends use ghost
// elimination with half-cell row weights, Dirichlet ends drop the boundary
// unknowns. k's parity selects the condition.
inline Tridiag assemble(const SLCoeffs& co, int k, int n) {
    double h = (co.hi - co.lo) / n;
    bool neumann = (k % 2 == 0);
    std::vector<double> pmid(n), q(n + 1), wt(n + 1);
    for (int i = 0; i < n; ++i) pmid[i] = co.ps(co.lo + (i + 0.5) * h);
    for (int i = 0; i <= n; ++i) {
        double v = co.lo + i * h;
        q[i] = co.qs(v);
        wt[i] = co.ws(v);
        if (!(wt[i] > 0.0) || !(co.ps(v) > 0.0))
            throw domain_error("sl_eigen: profile must be strictly positive");
    }
    Tridiag t;
    double h2 = h * h;
    if (neumann) {
        int nd = n + 1;
        t.d.resize(nd);
        t.e.resize(nd - 1);
        t.w.resize(nd);
        t.d[0] = pmid[0] / h2 + 0.5 * q[0];
        t.w[0] = 0.5 * wt[0];
        for (int i = 1; i < n; ++i) {
            t.d[i] = (pmid[i - 1] + pmid[i]) / h2 + q[i];
            t.w[i] = wt[i];
        }
        t.d[n] = pmid[n - 1] / h2 + 0.5 * q[n];
        t.w[n] = 0.5 * wt[n];
        for (int i = 0; i < n; ++i) t.e[i] = -pmid[i] / h2;
    } else {
        int nd = n - 1;
        t.d.resize(nd);
        t.e.resize(nd - 1);
        t.w.resize(nd);
        for (int i = 1; i < n; ++i) {
            t.d[i - 1] = (pmid[i - 1] + pmid[i]) / h2 + q[i];
            t.w[i - 1] = wt[i];
        }
        for (int i = 1; i < n - 1; ++i) t.e[i - 1] = -pmid[i] / h2;
    }
    return t;
}

// Number of generalized eigenvalues of (A,B) strictly below sigma, by the
// signs of the LDL^T pivots of A - sigma B.
inline int sturm_count(const Tridiag& t, double sigma) {
    int cnt = 0;
    double piv = t.d[0] - sigma * t.w[0];
    if (piv < 0.0) ++cnt;
    for (size_t i = 1; i < t.d.size(); ++i) {
        double denom = piv;
        if (denom == 0.0) denom = 1e-300;
        piv = (t.d[i] - sigma * t.w[i]) - t.e[i - 1] * t.e[i - 1] / denom;
        if (piv < 0.0) ++cnt;
    }
    return cnt;
}

// j-th (0-based) eigenvalue by bisection on the Sturm count.
inline double bisect_eigenvalue(const Tridiag& t, int j) {
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < t.d.size(); ++i) {
        double off = 0.0;
        if (i > 0) off += std::abs(t.e[i - 1]);
        if (i + 1 < t.d.size()) off += std::abs(t.e[i]);
        lo = std::min(lo, (t.d[i] - off) / t.w[i]);
        hi = std::max(hi, (t.d[i] + off) / t.w[i]);
    }
    lo -= 1.0;
    hi += 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(t, mid) > j)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

inline std::vector<double> eigen_single_grid(const MetricProfile& prof, int k,
                                             int count, int n) {
    auto co = sl_coefficients(prof, k);
    auto t = assemble(co, k, n);
    std::vector<double> out;
    out.reserve(count);
    for (int j = 0; j < count; ++j) out.push_back(bisect_eigenvalue(t, j));
    return out;
}

// Inverse iteration at a shifted eigenvalue for nodal-count checks.
inline std::vector<double> eigenvector(const Tridiag& t, double lambda) {
    size_t n = t.d.size();
    std::vector<double> x(n, 1.0);
    double shift = lambda * (1.0 + 1e-10) + 1e-12;
    for (int pass = 0; pass < 4; ++pass) {
        // Thomas solve of (A - shift B) z = x with pivot flooring
        std::vector<double> dd(n), z(n);
        for (size_t i = 0; i < n; ++i) dd[i] = t.d[i] - shift * t.w[i];
        std::vector<double> cp(n, 0.0);
        double piv = dd[0];
        if (std::abs(piv) < 1e-300) piv = 1e-300;
        cp[0] = (n > 1) ? t.e[0] / piv : 0.0;
        z[0] = x[0] / piv;
        for (size_t i = 1; i < n; ++i) {
            piv = dd[i] - t.e[i - 1] * cp[i - 1];
            if (std::abs(piv) < 1e-300) piv = 1e-300;
            if (i + 1 < n) cp[i] = t.e[i] / piv;
            z[i] = (x[i] - t.e[i - 1] * z[i - 1]) / piv;
        }
        for (size_t i = n - 1; i-- > 0;) z[i] -= cp[i] * z[i + 1];
        double norm = 0.0;
        for (double v : z) norm += v * v;
        norm = std::sqrt(norm);
        for (size_t i = 0; i < n; ++i) x[i] = z[i] / norm;
    }
    return x;
}

}  // namespace detail

// Lowest `count` eigenvalues for harmonic index k, Richardson-extrapolated
// across grids n and 2n. Values ascend strictly.
inline std::vector<double> sl_eigen(const MetricProfile& prof, int k, int count,
                                    int grid, double* err_out = nullptr) {
    if (k < 0) throw domain_error("sl_eigen: k must be nonnegative");
    if (grid < 64) throw domain_error("sl_eigen: grid must be at least 64");
    if (count < 1) throw domain_error("sl_eigen: count must be positive");
    auto coarse = detail::eigen_single_grid(prof, k, count, grid);
    auto fine = detail::eigen_single_grid(prof, k, count, 2 * grid);
    std::vector<double> out(count);
    double err = 0.0;
    for (int j = 0; j < count; ++j) {
        double diff = fine[j] - coarse[j];
        if (std::abs(diff) > 0.5 * std::max(1.0, std::abs(fine[j])))
            throw accuracy_error("sl_eigen: refinement did not converge");
        out[j] = fine[j] + diff / 3.0;  // second-order scheme
        err = std::max(err, std::abs(diff) / 3.0);
    }
    if (err_out) *err_out = err;
    return out;
}

// Single-grid eigenvalues without extrapolation (grid-convergence studies).
inline std::vector<double> sl_eigen_raw(const MetricProfile& prof, int k, int count,
                                        int grid) {
    if (k < 0 || grid < 64) throw domain_error("sl_eigen_raw: bad arguments");
    return detail::eigen_single_grid(prof, k, count, grid);
}

// Node values of the index-j eigenfunction on the half interval.
inline std::vector<double> sl_eigenfunction(const MetricProfile& prof, int k, int index,
                                            int grid) {
    auto co = detail::sl_coefficients(prof, k);
    auto t = detail::assemble(co, k, grid);
    double lam = detail::bisect_eigenvalue(t, index);
    return detail::eigenvector(t, lam);
}

// Riemannian area. Conformal: pi * int_0^a f dy (the Klein bottle takes the
// half circle times the full profile period). General: half the sqrt(MN)
// integral over the presentation cell [0,pi)^2, since that cell is the
// orientable double cover of the bottle.
inline double area(const MetricProfile& prof, int n = 8192) {
    if (const auto* c = std::get_if<ConformalProfile>(&prof.kind)) {
        return elliptic::pi * num::trapezoid_periodic(c->f, 0.0, c->period, n);
    }
    const auto& g = std::get<GeneralProfile>(prof.kind);
    return 0.5 * elliptic::pi *
           num::trapezoid_periodic([&](double v) { return std::sqrt(g.M(v) * g.N(v)); },
                                   0.0, g.period, n);
}

// First positive eigenvalue over harmonic indices 0..k_max, with area and
// the scale-invariant product.
inline SpectralResult lambda1(const MetricProfile& prof, int k_max = 4,
                              int grid = 1024) {
    if (k_max < 3) throw domain_error("lambda1: k_max must be at least 3");
    SpectralResult res;
    res.lambda1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= k_max; ++k) {
        double err = 0.0;
        // the k = 0 Neumann problem always carries the constant as an exact
        // zero mode; its lowest positive eigenvalue is index 1
        auto eigs = sl_eigen(prof, k, k == 0 ? 2 : 1, grid, &err);
        double lam = eigs.back();
        if (lam < res.lambda1) {
            res.lambda1 = lam;
            res.k_min = k;
            res.err = err;
        }
    }
    res.area = area(prof);
    res.product = res.lambda1 * res.area;
    return res;
}

// Conformal profile f = phi1^2 + 4 phi2^2 rebuilt from one period of the
// admissible trajectory; dense samples with 4-point periodic interpolation.
inline MetricProfile reconstructed_profile(const Params& prm, double tol = 1e-12) {
    auto cls = ode::classify(prm);
    if (cls.kind != ode::SolutionKind::PeriodicAdmissible)
        throw domain_error("reconstructed_profile: solution is not admissible");
    double T = *cls.period_y;
    auto tr = ode::integrate(prm, T, tol);

    const int ns = 8192;
    auto samples = std::make_shared<std::vector<double>>(ns);
    for (int i = 0; i < ns; ++i) {
        auto s = tr.at(T * i / ns);
        (*samples)[i] = s.phi1 * s.phi1 + 4.0 * s.phi2 * s.phi2;
    }
    double period = T;
    auto f = [samples, period](double y) {
        const int n = static_cast<int>(samples->size());
        double x = y / period * n;
        x -= std::floor(x / n) * n;
        int i = static_cast<int>(std::floor(x));
        double tt = x - i;
        auto at = [&](int j) { return (*samples)[((j % n) + n) % n]; };
        double wm1 = -tt * (tt - 1.0) * (tt - 2.0) / 6.0;
        double w0 = (tt + 1.0) * (tt - 1.0) * (tt - 2.0) / 2.0;
        double w1 = -(tt + 1.0) * tt * (tt - 2.0) / 2.0;
        double w2 = (tt + 1.0) * tt * (tt - 1.0) / 6.0;
        return wm1 * at(i - 1) + w0 * at(i) + w1 * at(i + 1) + w2 * at(i + 2);
    };
    return {ConformalProfile{f, period}, "reconstructed"};
}

// Both verification routes for the extremal product.
struct RouteResult {
    double lambda1 = 0.0;
    double area = 0.0;
    double product = 0.0;
    int k_min = -1;
    double err = 0.0;
};

struct ConjectureReport {
    double target = 0.0;          // 12 pi E(8/9)
    RouteResult reconstruction;   // route 1: ODE profile at p = sqrt(3/8)
    RouteResult closed_form;      // route 2: g0 in (u,v) coordinates
    // pinned tolerances
    double lambda_tol = 1e-4;
    double r1_rel_tol = 1e-4;
    double r2_rel_tol = 2e-3;
    double agree_rel_tol = 2e-3;
    bool lambda_ok = false, r1_ok = false, r2_ok = false, agree_ok = false;
    bool pass = false;
};

inline ConjectureReport verify_conjecture(int grid = 1024) {
    ConjectureReport rep;
    rep.target = elliptic::extremal_product();

    auto rec = lambda1(reconstructed_profile(Params(ode::p_admissible)), 4, grid);
    rep.reconstruction = {rec.lambda1, rec.area, rec.product, rec.k_min, rec.err};

    auto g0 = lambda1(g0_profile(), 4, grid);
    rep.closed_form = {g0.lambda1, g0.area, g0.product, g0.k_min, g0.err};

    rep.lambda_ok = std::abs(rec.lambda1 - 2.0) <= rep.lambda_tol;
    rep.r1_ok = std::abs(rec.product - rep.target) <= rep.r1_rel_tol * rep.target;
    rep.r2_ok = std::abs(g0.product - rep.target) <= rep.r2_rel_tol * rep.target;
    rep.agree_ok =
        std::abs(rec.product - g0.product) <= rep.agree_rel_tol * rep.target;
    rep.pass = rep.lambda_ok && rep.r1_ok && rep.r2_ok && rep.agree_ok;
    return rep;
}

}  // namespace klein::spectral

#endif
