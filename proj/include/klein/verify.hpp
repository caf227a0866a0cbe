#ifndef KLEIN_VERIFY_HPP
#define KLEIN_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "klein/elliptic.hpp"
#include "klein/geometry.hpp"
#include "klein/ode_solve.hpp"
#include "klein/periods.hpp"
#include "klein/spectral.hpp"

// The acceptance pipeline: every verification criterion with its tolerance
// pinned in code, reported as one row per check. Used by the acceptance test
// binary and by the CLI `verify` subcommand.

namespace klein::verify {

struct Row {
    std::string id;
    std::string name;
    double measured;
    double lo, hi;  // allowed interval
    bool pass;
};

struct Options {
    int grid = 1024;
    bool quick = false;   // skip the p-grid sweep
    double tol = 1e-12;
};

namespace detail {

inline Row check(std::string id, std::string name, double measured, double lo,
                 double hi) {
    bool ok = std::isfinite(measured) && measured >= lo && measured <= hi;
    return {std::move(id), std::move(name), measured, lo, hi, ok};
}

inline Row check_abs(std::string id, std::string name, double measured,
                     double target, double tol) {
    return check(std::move(id), std::move(name), measured, target - tol,
                 target + tol);
}

// max over a dense sample of |expr(state)| along a trajectory
template <class F>
double traj_max(const ode::Trajectory& tr, double y_end, F&& f, int n = 2048) {
    double mx = 0.0;
    for (int i = 0; i <= n; ++i) {
        auto s = tr.at(y_end * i / n);
        mx = std::max(mx, std::abs(f(s)));
    }
    return mx;
}

}  // namespace detail

// 1. Headline constant, route 1 (ODE reconstruction) and
// 2. route 2 (closed-form g0), plus mutual agreement.
inline void criteria_headline(std::vector<Row>& rows, const Options& opt) {
    auto rep = spectral::verify_conjecture(opt.grid);
    rows.push_back(detail::check_abs("1a", "route 1: lambda1(reconstructed) = 2",
                                     rep.reconstruction.lambda1, 2.0, 1e-4));
    rows.push_back(detail::check_abs(
        "1b", "route 1: lambda1*A = 12 pi E(8/9), relative",
        (rep.reconstruction.product - rep.target) / rep.target, 0.0, 1e-4));
    rows.push_back(detail::check_abs(
        "2a", "route 2: lambda1(g0)*A(g0) = 12 pi E(8/9), relative",
        (rep.closed_form.product - rep.target) / rep.target, 0.0, 2e-3));
    rows.push_back(detail::check_abs(
        "2b", "routes agree on the product, relative",
        (rep.reconstruction.product - rep.closed_form.product) / rep.target, 0.0,
        2e-3));
}

// 3. Special period values at p = sqrt(3/8).
inline void criteria_special_values(std::vector<Row>& rows) {
    ode::Params pa(ode::p_admissible);
    double Tu = periods::period_u(pa);
    double pi_ref = 0.8 * elliptic::elliptic_pi(0.4, 0.25);
    rows.push_back(detail::check_abs(
        "3a", "T_u(sqrt(3/8)) = (4/5) Pi(2/5,1/4), quadrature vs Carlson", Tu, pi_ref,
        1e-10));
    double tv_ref = 8.0 * elliptic::pi / (3.0 * std::sqrt(10.0));
    rows.push_back(detail::check_abs("3b", "T_v limit = 8 pi/(3 sqrt(10))",
                                     periods::period_v(pa), tv_ref, 1e-9));
    double worst = 0.0;
    for (double eps : {1e-7, -1e-7}) {
        double tv = periods::period_v(ode::Params(ode::p_admissible + eps));
        worst = std::max(worst, std::abs(tv - tv_ref));
    }
    rows.push_back(detail::check("3c", "T_v continuity across sqrt(3/8), |dev|",
                                 worst, 0.0, 1e-4));
}

// 4. Ratio range and period ordering over the certified grid.
inline void criteria_ratio_range(std::vector<Row>& rows) {
    std::vector<double> grid;
    const double lo = 0.05, hi = ode::p_decay - 0.05, step = 1e-3;
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) grid.push_back(lo + i * step);
    auto table = periods::tabulate(grid);
    double rmin = 1e300, rmax = -1e300, min_gap = 1e300;
    for (const auto& d : table) {
        if (!std::isfinite(d.R)) {
            rmin = rmax = std::nan("");
            break;
        }
        rmin = std::min(rmin, d.R);
        rmax = std::max(rmax, d.R);
        min_gap = std::min(min_gap, d.Tv - d.Tu);
    }
    rows.push_back(detail::check("4a", "grid sweep: min R(p)", rmin,
                                 periods::ratio_window_lo, 1e300));
    rows.push_back(detail::check("4b", "grid sweep: max R(p)", rmax, -1e300,
                                 periods::ratio_window_hi));
    rows.push_back(detail::check("4c", "grid sweep: min (T_v - T_u)", min_gap,
                                 1e-300, 1e300));
}

// 5. Asymptotic limits.
//
// 5c pins T_u against the -(2/3) ln p law of the *half-oscillation*
// integral int_0^{1/2} ds/sqrt(P). The period is twice that integral and
// grows like -(4/3) ln p, so this check reads FAIL by construction; the
// verification contract for this build fixes this exact form, and the true
// growth rate is covered by the constant-free slope checks in the unit
// tests.
inline void criteria_asymptotics(std::vector<Row>& rows) {
    rows.push_back(detail::check_abs("5a", "R(1e-6) near 3/2",
                                     periods::ratio(ode::Params(1e-6)).R, 1.5, 0.05));
    rows.push_back(detail::check_abs(
        "5b", "R(sqrt(3)/2 - 1e-6) near 3/2",
        periods::ratio(ode::Params(ode::p_decay - 1e-6)).R, 1.5, 0.05));
    double ratio_log =
        periods::period_u(ode::Params(1e-4)) / (-(2.0 / 3.0) * std::log(1e-4));
    rows.push_back(
        detail::check("5c", "T_u(1e-4) / (-(2/3) ln 1e-4)", ratio_log, 0.9, 1.1));
}

// 6. Conservation and parity at p = sqrt(3/8) over 5 periods.
inline void criteria_conservation(std::vector<Row>& rows) {
    ode::Params pa(ode::p_admissible);
    double T = ode::detect_period(pa).period_y;
    double span = 5.0 * T;
    auto fwd = ode::integrate(pa, span, 1e-12);
    rows.push_back(detail::check("6a", "max first-integral drift, 5 periods",
                                 fwd.max_drift, 0.0, 1e-9));
    auto bwd = ode::integrate(pa, -span, 1e-12);
    double defect = 0.0;
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        double y = span * i / n;
        auto sf = fwd.at(y);
        auto sb = bwd.at(-y);
        defect = std::max({defect, std::abs(sf.phi1 + sb.phi1),
                           std::abs(sf.phi2 - sb.phi2)});
    }
    rows.push_back(
        detail::check("6b", "parity defect (phi1 odd, phi2 even)", defect, 0.0, 1e-8));
}

// 7. Orbit algebra along the three closed-form orbits.
inline void criteria_orbits(std::vector<Row>& rows) {
    {
        ode::Params p1(1.0);
        auto tr = ode::integrate(p1, 30.0, 1e-12);
        double w1 = detail::traj_max(tr, 30.0, [&](const ode::State& s) {
            return s.phi1 * s.phi1 + s.phi2 * s.phi2 - 1.0;
        });
        rows.push_back(detail::check("7a", "p=1 orbit on the unit circle, max |w1|",
                                     w1, 0.0, 1e-8));
    }
    {
        // the homoclinic orbit is structurally unstable: noise near the
        // saddle at the origin grows like e^{2y}, so the ellipse is checked
        // over the span it can actually be tracked (detachment starts ~y=9)
        ode::Params pd(ode::p_decay);
        auto tr = ode::integrate(pd, 7.0, 1e-12);
        double dev = detail::traj_max(tr, 7.0, [&](const ode::State& s) {
            return s.phi1 * s.phi1 + 4.0 * s.phi2 * s.phi2 -
                   2.0 * std::sqrt(3.0) * s.phi2;
        });
        rows.push_back(detail::check(
            "7b", "p=sqrt(3)/2 orbit on the ellipse, max |dev|", dev, 0.0, 1e-8));
    }
    {
        ode::Params pa(ode::p_admissible);
        double T = ode::detect_period(pa).period_y;
        auto tr = ode::integrate(pa, T, 1e-12);
        double hyp = detail::traj_max(tr, T, [&](const ode::State& s) {
            return s.phi1 * s.phi1 - 4.0 * s.phi2 * s.phi2 + 1.5;
        });
        rows.push_back(detail::check(
            "7c", "p=sqrt(3/8) orbit on the hyperbola, max |dev|", hyp, 0.0, 1e-8));
        double w32 = detail::traj_max(tr, T, [&](const ode::State& s) {
            auto q = geometry::quadrics(s.phi1, s.phi2, pa);
            return q.w3 + 4.0 * q.w2;
        });
        rows.push_back(detail::check("7d", "p=sqrt(3/8): w3 + 4 w2 identically 0",
                                     w32, 0.0, 1e-12));
    }
}

// 8. Qualitative classification across the parameter families.
inline void criteria_classification(std::vector<Row>& rows) {
    auto cls = ode::classify(ode::Params(ode::p_admissible));
    bool adm = cls.kind == ode::SolutionKind::PeriodicAdmissible &&
               cls.zeros_phi1 == 2 && cls.min_phi2 > 0.0;
    rows.push_back(detail::check("8a",
                                 "classify(sqrt(3/8)) admissible with 2 zeros",
                                 adm ? 1.0 : 0.0, 1.0, 1.0));

    const std::pair<long, long> targets[] = {{3, 2}, {37, 25}, {44, 29}};
    int offending = 0, found = 0;
    for (auto [q, m] : targets) {
        std::vector<double> roots;
        try {
            roots = periods::find_p_for_ratio(periods::RationalTarget(q, m));
        } catch (const out_of_range_error&) {
            continue;  // target outside the certified window: no roots
        }
        for (double p : roots) {
            ++found;
            auto c = ode::classify(ode::Params(p));
            bool ok = (c.kind == ode::SolutionKind::PeriodicInadmissible ||
                       c.kind == ode::SolutionKind::PeriodicAdmissible) &&
                      c.zeros_phi1 >= 6;
            if (!ok) ++offending;
        }
    }
    rows.push_back(detail::check(
        "8b",
        "rational-ratio solutions have >= 6 zeros (" + std::to_string(found) +
            " roots checked)",
        static_cast<double>(offending), 0.0, 0.0));

    double worst = 0.0;
    for (double p : {0.9, 0.95, 1.0}) {
        auto tr = ode::integrate(ode::Params(p), 40.0, 1e-12);
        // locate a zero of phi2: scan then bisect
        double best = 1e300;
        const int n = 8192;
        double prev = tr.at(0.0).phi2;
        for (int i = 1; i <= n; ++i) {
            double y = 40.0 * i / n;
            double cur = tr.at(y).phi2;
            if (prev * cur <= 0.0) {
                double root = num::bisect(
                    [&](double yy) { return tr.at(yy).phi2; }, 40.0 * (i - 1) / n, y,
                    1e-13);
                best = std::abs(tr.at(root).phi2);
                break;
            }
            best = std::min(best, std::abs(cur));
            prev = cur;
        }
        worst = std::max(worst, best);
    }
    rows.push_back(detail::check(
        "8c", "phi2 attains 0 for p in {0.9, 0.95, 1.0}, max |phi2| at zero", worst,
        0.0, 1e-6));
}

// 9. Spectral oracle on flat metrics and scaling covariance.
inline void criteria_spectral_oracle(std::vector<Row>& rows, const Options& opt) {
    double worst = 0.0;
    for (double a : {1.0, 2.0, elliptic::pi, 2.0 * elliptic::pi, 8.0}) {
        auto r = spectral::lambda1(spectral::flat_profile(a), 4, opt.grid);
        double ref = std::min(std::pow(2.0 * elliptic::pi / a, 2), 4.0);
        worst = std::max(worst, std::abs(r.lambda1 - ref));
    }
    rows.push_back(detail::check("9a", "flat-metric Fourier oracle, max |dev|",
                                 worst, 0.0, 1e-8));

    auto base = spectral::lambda1(spectral::flat_profile(2.0), 4, 256);
    const double c = 2.5;
    spectral::MetricProfile scaled{
        spectral::ConformalProfile{[c](double) { return c; }, 2.0}, "scaled flat"};
    auto sc = spectral::lambda1(scaled, 4, 256);
    double dev = std::max({std::abs(sc.lambda1 - base.lambda1 / c),
                           std::abs(sc.area - base.area * c),
                           std::abs(sc.product - base.product)});
    rows.push_back(detail::check(
        "9b", "scaling covariance (lambda/c, area*c, same product)", dev, 0.0, 1e-10));
}

// 10. Separation consistency along a p = 1/2 trajectory.
inline void criteria_separation(std::vector<Row>& rows) {
    ode::Params ph(0.5);
    auto tr = ode::integrate(ph, 30.0, 1e-12);

    double sep = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        auto s = tr.at(30.0 * i / 2000);
        auto ps = geometry::to_parabolic(s, ph);
        sep = std::max({sep, std::abs(ps.du * ps.du - geometry::poly_P(ps.u, ph)),
                        std::abs(ps.dv * ps.dv - geometry::poly_P(ps.v, ph))});
    }
    rows.push_back(detail::check(
        "10a", "separation: max |udot^2 - P(u)|, |vdot^2 - P(v)|", sep, 0.0, 1e-7));

    double rt = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        auto s = tr.at(30.0 * i / 1000.7);
        auto back = geometry::from_parabolic(geometry::to_parabolic(s, ph), ph);
        rt = std::max({rt, std::abs(back.phi1 - s.phi1), std::abs(back.phi2 - s.phi2),
                       std::abs(back.dphi1 - s.dphi1),
                       std::abs(back.dphi2 - s.dphi2)});
    }
    rows.push_back(
        detail::check("10b", "parabolic round-trip on 1000 on-shell states", rt, 0.0,
                      1e-10));

    auto acc = geometry::accel0(ph);
    // h balances truncation against the 1/h^2-amplified noise that v picks
    // up from the tiny-u division near y = 0
    double h = 1e-2;
    auto u_of = [&](double y) { return geometry::to_parabolic(tr.at(y), ph).u; };
    auto v_of = [&](double y) { return geometry::to_parabolic(tr.at(y), ph).v; };
    // u and v are even in y, so one-sided second differences suffice;
    // Richardson across h and 2h removes the leading truncation term
    auto d2 = [&](auto&& f) {
        double dh = 2.0 * (f(h) - f(0.0)) / (h * h);
        double d2h = 2.0 * (f(2.0 * h) - f(0.0)) / (4.0 * h * h);
        return (4.0 * dh - d2h) / 3.0;
    };
    double dev = std::max(std::abs(d2(u_of) - acc[0]), std::abs(d2(v_of) - acc[1]));
    rows.push_back(detail::check(
        "10c", "accel0 matches second differences at y=0", dev, 0.0, 1e-5));
}

inline std::vector<Row> run_all(const Options& opt = {}) {
    std::vector<Row> rows;
    criteria_headline(rows, opt);
    criteria_special_values(rows);
    if (!opt.quick) criteria_ratio_range(rows);
    criteria_asymptotics(rows);
    criteria_conservation(rows);
    criteria_orbits(rows);
    criteria_classification(rows);
    criteria_spectral_oracle(rows, opt);
    criteria_separation(rows);
    return rows;
}

inline bool all_pass(const std::vector<Row>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
}

inline void print_rows(const std::vector<Row>& rows, std::FILE* out = stdout) {
    for (const auto& r : rows) {
        std::fprintf(out, "[%-3s] %s  %s  measured=%.12g allowed=[%.12g, %.12g]\n",
                     r.id.c_str(), r.pass ? "PASS" : "FAIL", r.name.c_str(),
                     r.measured, r.lo, r.hi);
    }
}

}  // namespace klein::verify

#endif
