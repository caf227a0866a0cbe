#ifndef KLEIN_ODE_SOLVE_HPP
#define KLEIN_ODE_SOLVE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "klein/errors.hpp"
#include "klein/ode_system.hpp"
#include "klein/periods.hpp"
#include "klein/rk_dopri.hpp"

namespace klein::ode {

struct Trajectory {
    Params params;
    std::vector<State> samples;  // states at the accepted steps, y monotone
    double H1_0 = 0.0, H2_0 = 0.0;
    double max_drift = 0.0;      // max_i max(|H1 - H1_0|, |H2 - H2_0|)
    double tol = 0.0;            // drift contract: max_drift <= 100 * tol
    num::DenseSolution<4> dense;

    State at(double y) const {
        auto x = dense.eval(y);
        return {y, x[0], x[1], x[2], x[3]};
    }

    double y_end() const { return dense.t_end; }
};

namespace detail {

inline void system_rhs(double, const std::array<double, 4>& x,
                       std::array<double, 4>& dx) {
    double q = 2.0 * x[0] * x[0] + 8.0 * x[1] * x[1];
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = (1.0 - q) * x[0];
    dx[3] = (4.0 - q) * x[1];
}

}  // namespace detail

// Integrates the initial-value family from y = 0 to y_end (either sign).
// The integrator runs tighter than the requested tolerance so the conserved
// quantities stay well inside the 100*tol drift contract.
inline Trajectory integrate(const Params& prm, double y_end, double tol = 1e-12) {
    if (!(tol > 0.0)) throw domain_error("integrate: tol must be positive");
    if (y_end == 0.0) throw domain_error("integrate: y_end must be nonzero");
    Trajectory tr{prm, {}, 0.0, 0.0, 0.0, tol, {}};
    State s0 = initial_state(prm);
    tr.H1_0 = first_integrals(s0)[0];
    tr.H2_0 = first_integrals(s0)[1];
    tr.samples.push_back(s0);

    double inner = std::max(tol * 1e-2, 1e-14);
    num::Dopri5<4, void (*)(double, const std::array<double, 4>&,
                            std::array<double, 4>&)>
        solver(&detail::system_rhs, inner, inner);
    std::array<double, 4> x0{s0.phi1, s0.phi2, s0.dphi1, s0.dphi2};
    tr.dense = solver.solve(0.0, x0, y_end, [&](double y, const std::array<double, 4>& x) {
        State s{y, x[0], x[1], x[2], x[3]};
        auto H = first_integrals(s);
        tr.max_drift = std::max({tr.max_drift, std::abs(H[0] - tr.H1_0),
                                 std::abs(H[1] - tr.H2_0)});
        tr.samples.push_back(s);
    });
    if (tr.max_drift > 100.0 * tol)
        throw accuracy_error("integrate: first-integral drift exceeded contract");
    return tr;
}

namespace detail {

// Best rational approximation q/m of x among continued-fraction convergents
// with denominator at most max_den.
inline std::optional<std::pair<long, long>> best_rational(double x, long max_den,
                                                          double tol) {
    long h0 = 1, k0 = 0;  // h_{-1}, k_{-1}
    long h1 = static_cast<long>(std::floor(x)), k1 = 1;
    double frac = x - std::floor(x);
    long best_q = h1, best_m = k1;
    double best_err = std::abs(x - static_cast<double>(h1));
    for (int it = 0; it < 48 && frac > 1e-15; ++it) {
        double inv = 1.0 / frac;
        double a = std::floor(inv);
        frac = inv - a;
        long h2 = static_cast<long>(a) * h1 + h0;
        long k2 = static_cast<long>(a) * k1 + k0;
        if (k2 > max_den || k2 <= 0) break;
        double err = std::abs(x - static_cast<double>(h2) / static_cast<double>(k2));
        if (err < best_err) {
            best_err = err;
            best_q = h2;
            best_m = k2;
        }
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
    }
    if (best_err <= tol) return std::make_pair(best_q, best_m);
    return std::nullopt;
}

}  // namespace detail

struct PeriodResult {
    bool periodic = false;
    double period_y = 0.0;          // period of (phi1, phi2) in y
    long q = 0, m = 0;              // Tv/Tu = q/m when periodic (0 for v-constant)
};

// Decides periodicity through the tau-domain period ratio and converts the
// tau-period to a y-period via dy = (u - v) dtau. The requested tolerance is
// clamped below by the resolution of the period quadratures (~3e-11): a
// rational match cannot be certified tighter than the ratio itself.
inline PeriodResult detect_period(const Params& prm, double tol = 1e-9,
                                  long max_denominator = 64) {
    if (prm.is(p_decay))
        throw domain_error("detect_period: solution decays at p = sqrt(3)/2");
    if (prm.p > p_decay)
        throw domain_error("detect_period: ratio machinery requires p < sqrt(3)/2");

    if (prm.is(p_admissible)) {
        // v is constant at -3/4: the (u,v) tau-period is Tu alone
        double Tu = periods::period_u(prm);
        double y_uv = periods::moment_u(prm) + 0.75 * Tu;
        return {true, 2.0 * y_uv, 0, 0};
    }

    auto pd = periods::ratio(prm);
    double match_tol = std::max(tol, 3e-11);
    auto qm = detail::best_rational(pd.R, max_denominator, match_tol);
    if (!qm) return {};
    auto [q, m] = *qm;
    // y-length of q u-periods (= m v-periods), phi-period doubles it
    double y_uv = static_cast<double>(q) * periods::moment_u(prm) -
                  static_cast<double>(m) * periods::moment_v(prm);
    return {true, 2.0 * y_uv, q, m};
}

enum class SolutionKind {
    PeriodicAdmissible,
    PeriodicInadmissible,
    QuasiPeriodic,
    DecayToOrigin,
    Phi2Vanishes,
};

inline const char* kind_name(SolutionKind k) {
    switch (k) {
        case SolutionKind::PeriodicAdmissible: return "PeriodicAdmissible";
        case SolutionKind::PeriodicInadmissible: return "PeriodicInadmissible";
        case SolutionKind::QuasiPeriodic: return "QuasiPeriodic";
        case SolutionKind::DecayToOrigin: return "DecayToOrigin";
        case SolutionKind::Phi2Vanishes: return "Phi2Vanishes";
    }
    return "?";
}

struct SolutionClass {
    SolutionKind kind;
    std::optional<double> period_y;  // set for the periodic kinds
    int zeros_phi1 = 0;              // zeros of phi1 per period (periodic only)
    double min_phi2 = 0.0;           // minimum of phi2 seen on the scan
};

namespace detail {

// Zeros of phi1 in [0, T): sign-change scan on dense output at step T/4096,
// each crossing refined by bisection to 1e-12 in y. A sample with
// |phi1| < 1e-13 counts once (and absorbs the adjacent sign change).
inline int count_phi1_zeros(const Trajectory& tr, double T) {
    const int n = 4096;
    const double h = T / n;
    const double at_node = 1e-13;
    int zeros = 0;
    double prev = tr.at(0.0).phi1;
    bool prev_is_zero = std::abs(prev) < at_node;
    if (prev_is_zero) ++zeros;
    for (int i = 1; i <= n; ++i) {
        double y = i * h;
        double cur = tr.at(std::min(y, T)).phi1;
        bool cur_is_zero = std::abs(cur) < at_node;
        if (cur_is_zero) {
            if (!prev_is_zero && y < T - 1e-8) ++zeros;
        } else if (!prev_is_zero && prev * cur < 0.0) {
            double root = num::bisect([&](double yy) { return tr.at(yy).phi1; },
                                      y - h, y, prev, cur, 1e-12);
            if (root < T - 1e-8) ++zeros;
        }
        prev = cur;
        prev_is_zero = cur_is_zero;
    }
    return zeros;
}

inline double min_phi2_on(const Trajectory& tr, double T, int n = 4096) {
    double mn = tr.at(0.0).phi2;
    for (int i = 1; i <= n; ++i) mn = std::min(mn, tr.at(i * (T / n)).phi2);
    return mn;
}

}  // namespace detail

// Qualitative classification of the solution for a given p. The three
// distinguished values sqrt(3/8), sqrt(3)/2, 1 take closed-form branches
// before any generic machinery runs.
inline SolutionClass classify(const Params& prm, double tol = 1e-9) {
    if (prm.is(p_decay)) {
        auto tr = integrate(prm, 50.0, 1e-10);
        SolutionClass sc{SolutionKind::DecayToOrigin, std::nullopt, 0,
                         detail::min_phi2_on(tr, 50.0)};
        return sc;
    }
    if (prm.p > p_decay) {
        auto tr = integrate(prm, 40.0, 1e-10);
        return {SolutionKind::Phi2Vanishes, std::nullopt, 0,
                detail::min_phi2_on(tr, 40.0, 8192)};
    }

    PeriodResult pr = detect_period(prm, tol);
    if (!pr.periodic) {
        auto tr = integrate(prm, 60.0, 1e-10);
        return {SolutionKind::QuasiPeriodic, std::nullopt, 0,
                detail::min_phi2_on(tr, 60.0, 8192)};
    }

    auto tr = integrate(prm, pr.period_y, 1e-12);
    int zeros = detail::count_phi1_zeros(tr, pr.period_y);
    double mn = detail::min_phi2_on(tr, pr.period_y);
    SolutionKind kind = (zeros == 2 && mn > 0.0) ? SolutionKind::PeriodicAdmissible
                                                 : SolutionKind::PeriodicInadmissible;
    return {kind, pr.period_y, zeros, mn};
}

}  // namespace klein::ode

#endif
