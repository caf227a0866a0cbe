#ifndef KLEIN_PERIODS_HPP
#define KLEIN_PERIODS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "klein/errors.hpp"
#include "klein/geometry.hpp"
#include "klein/ode_system.hpp"
#include "klein/parallel.hpp"
#include "klein/quadrature.hpp"
#include "klein/rootfind.hpp"

// Periods of the decoupled oscillations:
//
//   T_u(p) = 2 int_{alpha0}^{1/2} ds / sqrt(P(s))
//   T_v(p) = 2 int_{a0}^{a1}     ds / sqrt(P(s)) = 2 int_0^{1/2} dr / sqrt(Q(r))
//
// with inverse-square-root singularities at both endpoints (simple zeros of
// P). The integrands are evaluated with the endpoint root factors expressed
// through exact distances supplied by the tanh-sinh rule, so the endpoint
// behavior carries no cancellation. T_v is continuous across p = sqrt(3/8),
// where the v-interval degenerates and the limit is 8 pi / (3 sqrt(10)).

namespace klein::periods {

using ode::Params;

inline constexpr double tv_limit_value = 2.6492235375456268;  // 8 pi/(3 sqrt 10)

// Certified window for the ratio R = Tv/Tu over (0, sqrt(3)/2), slightly
// widened for quadrature slack.
inline constexpr double ratio_window_lo = 1.4795;
inline constexpr double ratio_window_hi = 1.5088;

struct PeriodData {
    double p;
    double Tu, Tv;
    double R;     // Tv / Tu
    double err;   // combined quadrature error estimate on R
};

namespace detail {

inline bool tv_limit_branch(const Params& prm) {
    return std::abs(3.0 - 8.0 * prm.p2()) < 1e-9;
}

// 2 * int over I1 of s^moment / sqrt(P(s)) ds.
inline num::QuadResult integral_u(const Params& prm, int moment,
                                  double rel_tol = 1e-13) {
    double p2 = prm.p2();
    auto iv = geometry::intervals(prm);
    double a = iv.i1_lo, b = iv.i1_hi;
    num::QuadResult q;
    if (p2 < 0.75) {
        // P = da * 2 db * (3+2s)(2p^2+s)(3-4p^2+2s)
        q = num::tanh_sinh(
            [&](double x, double da, double db) {
                double g = (3.0 + 2.0 * x) * (2.0 * p2 + x) * (3.0 - 4.0 * p2 + 2.0 * x);
                double w = moment ? x : 1.0;
                return w / std::sqrt(2.0 * da * db * g);
            },
            a, b, rel_tol);
    } else {
        // left endpoint is the zero of (3-4p^2+2s): P = 2 da * 2 db * s(3+2s)(2p^2+s)
        q = num::tanh_sinh(
            [&](double x, double da, double db) {
                double g = x * (3.0 + 2.0 * x) * (2.0 * p2 + x);
                double w = moment ? x : 1.0;
                return w / std::sqrt(4.0 * da * db * g);
            },
            a, b, rel_tol);
    }
    q.value *= 2.0;
    q.err *= 2.0;
    return q;
}

// 2 * int over I2 of s^moment / sqrt(P(s)) ds, in the original variable.
// On I2 the sign pattern gives P = 2 da db * (-s)(1-2s)(3+2s) for p^2 < 3/4
// and P = 2 da db * (-s)(1-2s)(2p^2+s) for p^2 > 3/4.
inline num::QuadResult integral_v_raw(const Params& prm, int moment,
                                      double rel_tol = 1e-13) {
    double p2 = prm.p2();
    auto iv = geometry::intervals(prm);
    double a = std::min(iv.a0, iv.a1), b = std::max(iv.a0, iv.a1);
    num::QuadResult q;
    if (p2 < 0.75) {
        q = num::tanh_sinh(
            [&](double x, double da, double db) {
                double g = (-x) * (1.0 - 2.0 * x) * (3.0 + 2.0 * x);
                double w = moment ? x : 1.0;
                return w / std::sqrt(2.0 * da * db * g);
            },
            a, b, rel_tol);
    } else {
        // endpoints -3/2 and 0 are zeros of (3+2s) and s
        q = num::tanh_sinh(
            [&](double x, double da, double db) {
                double g = (1.0 - 2.0 * x) * (2.0 * p2 + x) * -(3.0 - 4.0 * p2 + 2.0 * x);
                double w = moment ? x : 1.0;
                return w / std::sqrt(2.0 * da * db * g);
            },
            a, b, rel_tol);
    }
    q.value *= 2.0;
    q.err *= 2.0;
    return q;
}

// 2 * int_0^{1/2} dr / sqrt(Q(r)); Q = 4 da db * cubic(r).
inline num::QuadResult integral_v_subst(const Params& prm, double rel_tol = 1e-13) {
    double p2 = prm.p2();
    double c = 3.0 - 8.0 * p2;
    auto q = num::tanh_sinh(
        [&](double r, double da, double db) {
            double g = (2.0 * p2 + c * r) * (2.0 - 2.0 * p2 - c * r) *
                       (3.0 - 4.0 * p2 - 2.0 * c * r);
            return 1.0 / std::sqrt(4.0 * da * db * g);
        },
        0.0, 0.5, rel_tol);
    q.value *= 2.0;
    q.err *= 2.0;
    return q;
}

inline void require_below_decay(const Params& prm, const char* who) {
    if (prm.is(ode::p_decay))
        throw divergence_error(std::string(who) + ": period diverges at p = sqrt(3)/2");
}

}  // namespace detail

// Period of u. Defined for p in (0,1] away from sqrt(3)/2; for p above
// sqrt(3)/2 the oscillation interval is [2p^2-3/2, 1/2].
inline double period_u(const Params& prm) {
    detail::require_below_decay(prm, "period_u");
    return detail::integral_u(prm, 0).value;
}

// Period of v. Defined on (0, sqrt(3)/2); at p = sqrt(3/8) the defining
// integral degenerates and the limit value is returned.
inline double period_v(const Params& prm) {
    detail::require_below_decay(prm, "period_v");
    if (!(prm.p < ode::p_decay))
        throw divergence_error("period_v: defined only for p < sqrt(3)/2");
    if (detail::tv_limit_branch(prm)) return tv_limit_value;
    return detail::integral_v_subst(prm).value;
}

// int_0^{T_u} u(tau) dtau and int_0^{T_v} v(tau) dtau, by quadrature.
// Used to convert tau-periods into y-lengths via dy = (u - v) dtau.
inline double moment_u(const Params& prm) {
    detail::require_below_decay(prm, "moment_u");
    return detail::integral_u(prm, 1).value;
}

inline double moment_v(const Params& prm) {
    detail::require_below_decay(prm, "moment_v");
    if (!(prm.p < ode::p_decay))
        throw divergence_error("moment_v: defined only for p < sqrt(3)/2");
    if (detail::tv_limit_branch(prm)) return -0.75 * tv_limit_value;
    return detail::integral_v_raw(prm, 1).value;
}

// Both periods plus their ratio with an error estimate.
inline PeriodData ratio(const Params& prm) {
    detail::require_below_decay(prm, "ratio");
    if (!(prm.p < ode::p_decay))
        throw domain_error("ratio: defined only for p < sqrt(3)/2");
    auto qu = detail::integral_u(prm, 0);
    PeriodData d;
    d.p = prm.p;
    d.Tu = qu.value;
    double ev;
    if (detail::tv_limit_branch(prm)) {
        d.Tv = tv_limit_value;
        ev = 1e-15;
    } else {
        auto qv = detail::integral_v_subst(prm);
        d.Tv = qv.value;
        ev = qv.err;
    }
    d.R = d.Tv / d.Tu;
    d.err = d.R * (qu.err / d.Tu + ev / d.Tv);
    return d;
}

// Evaluates ratio() over a grid. Points that fail keep their slot with NaN
// entries rather than aborting the sweep. Output order matches the input.
inline std::vector<PeriodData> tabulate(const std::vector<double>& p_grid) {
    std::vector<PeriodData> out(p_grid.size());
    num::parallel_for(static_cast<int>(p_grid.size()), [&](int i) {
        try {
            out[i] = ratio(Params(p_grid[i]));
        } catch (const std::exception&) {
            double nan = std::nan("");
            out[i] = {p_grid[i], nan, nan, nan,
                      std::numeric_limits<double>::infinity()};
        }
    });
    return out;
}

// A reduced fraction q/m. Targets that can actually be hit have q > m >= 2
// (the ratio lives in (1,2)); anything else is rejected by the window check
// in find_p_for_ratio rather than here.
struct RationalTarget {
    long q, m;

    RationalTarget(long q_, long m_) : q(q_), m(m_) {
        if (q < 1 || m < 1) throw domain_error("RationalTarget: q, m must be positive");
        if (std::gcd(q, m) != 1) throw domain_error("RationalTarget: q/m not reduced");
    }

    double value() const { return static_cast<double>(q) / static_cast<double>(m); }
};

// All parameters p in the scan window where R(p) = q/m, each sign-change
// bracket refined to |R - q/m| <= 1e-11. Possibly empty. Targets outside the
// certified ratio window are refused.
inline std::vector<double> find_p_for_ratio(const RationalTarget& target,
                                            double scan_step = 1e-3) {
    double t = target.value();
    if (!(t > ratio_window_lo && t < ratio_window_hi))
        throw out_of_range_error("find_p_for_ratio: target outside certified ratio range");
    if (!(scan_step > 0.0)) throw domain_error("find_p_for_ratio: bad scan step");

    // uniform grid, densified near both endpoints where R flattens toward 3/2
    const double lo = 0.02, hi = ode::p_decay - 0.02;
    std::vector<double> grid;
    double edge = std::min(20.0 * scan_step, 0.25 * (hi - lo));
    for (double p = lo; p < lo + edge; p += 0.25 * scan_step) grid.push_back(p);
    {
        int n = static_cast<int>(std::floor((hi - edge - (lo + edge)) / scan_step)) + 1;
        for (int i = 0; i < n; ++i) grid.push_back(lo + edge + i * scan_step);
    }
    for (double p = hi - edge; p <= hi; p += 0.25 * scan_step) grid.push_back(p);
    std::sort(grid.begin(), grid.end());

    int n = static_cast<int>(grid.size());
    std::vector<double> g(n);
    num::parallel_for(n, [&](int i) { g[i] = ratio(Params(grid[i])).R - t; });

    auto gfun = [&](double p) { return ratio(Params(p)).R - t; };
    std::vector<double> roots;
    for (int i = 0; i + 1 < n; ++i) {
        if (g[i] == 0.0) {
            roots.push_back(grid[i]);
            continue;
        }
        if (g[i] * g[i + 1] < 0.0) {
            double r = num::brent(gfun, grid[i], grid[i + 1], 1e-14);
            // polish until the residual itself meets the contract
            for (int it = 0; it < 4 && std::abs(gfun(r)) > 1e-11; ++it) {
                double w = scan_step * std::pow(10.0, -3 - it);
                double gl = gfun(r - w), gr = gfun(r + w);
                if (gl * gr > 0.0) break;
                r = num::brent(gfun, r - w, r + w, 1e-15);
            }
            roots.push_back(r);
        }
    }
    if (n > 0 && g[n - 1] == 0.0) roots.push_back(grid[n - 1]);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double x, double y) {
                                return std::abs(x - y) < 0.25 * scan_step;
                            }),
                roots.end());
    return roots;
}

}  // namespace klein::periods

#endif
