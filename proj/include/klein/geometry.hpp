#ifndef KLEIN_GEOMETRY_HPP
#define KLEIN_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <string>

#include "klein/errors.hpp"
#include "klein/ode_system.hpp"

// Algebraic scaffolding of the integrable structure: the quadrics bounding
// the orbit region, the quintic P whose inverse square root generates the
// period integrals, the parabolic separating coordinates (u,v) and the
// oscillation intervals I1, I2.

namespace klein::geometry {

using ode::Params;
using ode::State;

// P(s) = s (1-2s) (3+2s) (2p^2+s) (3-4p^2+2s), evaluated in factored form.
inline double poly_P(double s, const Params& prm) {
    double p2 = prm.p2();
    return s * (1.0 - 2.0 * s) * (3.0 + 2.0 * s) * (2.0 * p2 + s) *
           (3.0 - 4.0 * p2 + 2.0 * s);
}

// dP/ds by the product rule over the factored form.
inline double poly_P_deriv(double s, const Params& prm) {
    double p2 = prm.p2();
    const double f[5] = {s, 1.0 - 2.0 * s, 3.0 + 2.0 * s, 2.0 * p2 + s,
                         3.0 - 4.0 * p2 + 2.0 * s};
    const double df[5] = {1.0, -2.0, 2.0, 1.0, 2.0};
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        double prod = df[i];
        for (int j = 0; j < 5; ++j)
            if (j != i) prod *= f[j];
        sum += prod;
    }
    return sum;
}

// Q(r) = 2r (1-2r) [2p^2+(3-8p^2)r] [2-2p^2-(3-8p^2)r] [3-4p^2-2(3-8p^2)r],
// the substituted form of the second period integrand. Degenerates smoothly
// at p^2 = 3/8 where 3-8p^2 = 0.
inline double poly_Q(double r, const Params& prm) {
    double p2 = prm.p2();
    double c = 3.0 - 8.0 * p2;
    return 2.0 * r * (1.0 - 2.0 * r) * (2.0 * p2 + c * r) *
           (2.0 - 2.0 * p2 - c * r) * (3.0 - 4.0 * p2 - 2.0 * c * r);
}

struct QuadricValues {
    double w1, w2, w3, w4;
    double delta;  // -64 phi1^2 phi2^2 w1 w2 w3
};

inline QuadricValues quadrics(double phi1, double phi2, const Params& prm) {
    double p2 = prm.p2();
    double a = phi1 * phi1, b = phi2 * phi2;
    QuadricValues q;
    q.w1 = a + b - 1.0;
    q.w2 = p2 * a - (3.0 - 4.0 * p2) * b + p2 * (3.0 - 4.0 * p2);
    q.w3 = -(3.0 - 4.0 * p2) * a + 16.0 * p2 * b - 4.0 * p2 * (3.0 - 4.0 * p2);
    double r = a + 4.0 * b;
    q.w4 = r * r - 12.0 * b;
    q.delta = -64.0 * a * b * q.w1 * q.w2 * q.w3;
    return q;
}

// Oscillation intervals: u in I1 = [alpha0, 1/2], v in I2 = [a0, a1].
// Disjoint for every p != sqrt(3)/2, so u - v never vanishes.
struct IntervalData {
    double alpha0;      // left end of I1
    double i1_lo, i1_hi;
    double a0, a1;      // ends of I2
};

inline IntervalData intervals(const Params& prm) {
    if (prm.is(ode::p_decay))
        throw domain_error("intervals: undefined at p = sqrt(3)/2");
    double p2 = prm.p2();
    IntervalData d;
    d.i1_hi = 0.5;
    if (p2 < 0.75) {
        d.alpha0 = 0.0;
        if (p2 <= 0.375) {
            d.a0 = 2.0 * p2 - 1.5;
            d.a1 = -2.0 * p2;
        } else {
            d.a0 = -2.0 * p2;
            d.a1 = 2.0 * p2 - 1.5;
        }
    } else {
        d.alpha0 = 2.0 * p2 - 1.5;
        d.a0 = -1.5;
        d.a1 = 0.0;
    }
    d.i1_lo = d.alpha0;
    return d;
}

struct ParabolicState {
    double u, v;    // u >= 0 >= v, u in I1, v in I2
    double du, dv;  // d/dtau with dtau/dy = 1/(u-v)
    double tau = 0.0;
    int sign1 = 1;  // sign of phi1 (flips at u = 0 crossings)
    int sign2 = 1;  // sign of phi2 (flips at v = -3/2 crossings)
};

// Map a state on the energy surface of prm to parabolic coordinates.
// (u,v) solve  phi1^2 = -(4/3) u v,  phi2^2 = (3+2u)(3+2v)/12.
inline ParabolicState to_parabolic(const State& s, const Params& prm) {
    double K = ode::integral_constant(prm);
    auto H = ode::first_integrals(s);
    if (std::abs(H[0] - K) > 1e-8 || std::abs(H[1] - K) > 1e-8)
        throw constraint_error("to_parabolic: state off the energy surface");

    double a = s.phi1 * s.phi1, b = s.phi2 * s.phi2;
    // u+v and u*v from the two quadratic relations; extract the root of
    // larger magnitude through the non-cancelling sum, the other through the
    // product (the cancelling form loses the small root near the turning
    // points)
    double S = 0.5 * a + 2.0 * b - 1.5;
    double prod = -0.75 * a;
    double disc = S * S - 4.0 * prod;
    disc = disc > 0.0 ? std::sqrt(disc) : 0.0;
    ParabolicState ps;
    if (S >= 0.0) {
        ps.u = 0.5 * (S + disc);
        ps.v = (ps.u != 0.0) ? prod / ps.u : 0.0;
    } else {
        ps.v = 0.5 * (S - disc);
        ps.u = (ps.v != 0.0) ? prod / ps.v : 0.0;
    }
    if (ps.u < 0.0 && ps.u > -1e-13) ps.u = 0.0;
    if (ps.v > 0.0 && ps.v < 1e-13) ps.v = 0.0;

    // tau-velocities; linear in the phi-velocities, no division needed.
    double r1 = s.phi1 * s.dphi1;
    double r2 = 4.0 * s.phi2 * s.dphi2;
    ps.du = 0.5 * ((3.0 + 2.0 * ps.u) * r1 + 2.0 * ps.u * r2);
    ps.dv = -0.5 * ((3.0 + 2.0 * ps.v) * r1 + 2.0 * ps.v * r2);

    ps.sign1 = s.phi1 >= 0.0 ? 1 : -1;
    ps.sign2 = s.phi2 >= 0.0 ? 1 : -1;
    return ps;
}

// Inverse map. Radicands may dip microscopically negative under roundoff;
// anything below -1e-12 is treated as a genuine constraint violation.
inline State from_parabolic(const ParabolicState& ps, const Params& prm) {
    auto checked_sqrt = [](double r, const char* what) {
        if (r < -1e-12)
            throw constraint_error(std::string("from_parabolic: negative radicand in ") + what);
        return r > 0.0 ? std::sqrt(r) : 0.0;
    };
    double a = -(4.0 / 3.0) * ps.u * ps.v;                          // phi1^2
    double b = (3.0 + 2.0 * ps.u) * (3.0 + 2.0 * ps.v) / 12.0;      // phi2^2
    State s;
    s.phi1 = ps.sign1 * checked_sqrt(a, "phi1");
    s.phi2 = ps.sign2 * checked_sqrt(b, "phi2");

    double gap = ps.u - ps.v;
    if (!(gap > 0.0)) throw constraint_error("from_parabolic: u - v must be positive");
    double up = ps.du / gap;  // y-derivatives
    double vp = ps.dv / gap;

    double num1 = -(2.0 / 3.0) * (up * ps.v + ps.u * vp);  // = phi1 phi1'
    double num2 = (up * (3.0 + 2.0 * ps.v) + vp * (3.0 + 2.0 * ps.u)) / 12.0;
    double K = ode::integral_constant(prm);

    // The divisions phi1 phi1' / phi1 and phi2 phi2' / phi2 degenerate at the
    // respective turning edges; there the missing velocity is recovered
    // exactly from the first integrals instead. phi1 and phi2 never
    // degenerate simultaneously on shell (away from the decay family).
    bool phi2_safe =
        std::abs(s.phi2) >= 1e-7 || std::abs(s.phi2) >= std::abs(s.phi1);
    if (phi2_safe) {
        s.dphi2 = num2 / s.phi2;
        if (std::abs(s.phi1) > 1e-5) {
            s.dphi1 = num1 / s.phi1;
        } else {
            // u = 0 turning point: H1 gives phi1'^2 exactly
            double r = a + 4.0 * b;
            double mag2 = K - r * r + a + 16.0 * b - 4.0 * s.dphi2 * s.dphi2;
            double mag = checked_sqrt(mag2, "phi1'");
            double sgn = (std::abs(s.phi1) > 0.0)
                             ? (num1 >= 0.0 ? 1.0 : -1.0) * ps.sign1
                             : static_cast<double>(ps.sign1);
            s.dphi1 = sgn * mag;
        }
    } else {
        // phi2 at its zero edge (v near -3/2, p^2 > 3/4): phi1 is bounded
        // away from zero there, and H2 is an exact quadratic in phi2'
        s.dphi1 = num1 / s.phi1;
        double lin = 2.0 * s.phi1 * s.dphi1 * s.phi2;
        double cst = 12.0 * b * (b - 1.0) + 3.0 * a * b + b * s.dphi1 * s.dphi1 - K;
        double disc = lin * lin - 4.0 * (3.0 + a) * cst;
        double mag = checked_sqrt(disc, "phi2'") / (2.0 * (3.0 + a));
        double mid = lin / (2.0 * (3.0 + a));
        double sgn = (std::abs(s.phi2) > 0.0) ? (num2 >= 0.0 ? 1.0 : -1.0) * ps.sign2
                                              : static_cast<double>(ps.sign2);
        s.dphi2 = mid + sgn * mag;
    }
    return s;
}

// Initial accelerations (u''(0), v''(0)) in the y-time.
inline std::array<double, 2> accel0(const Params& prm) {
    if (prm.is(ode::p_decay))
        throw domain_error("accel0: undefined at p = sqrt(3)/2");
    double p2 = prm.p2();
    double au = 12.0 * p2 / (3.0 - 4.0 * p2);
    double av = 16.0 * p2 * (1.0 - p2) * (3.0 - 8.0 * p2) / (3.0 - 4.0 * p2);
    if (p2 < 0.75) return {au, av};
    return {av, au};
}

// The four critical points of the planar system on the boundary of the
// admissible region: A, B in the phi2 >= 0 half-plane and their mirrors
// A', B' across the phi2-axis. All four lie on (delta = 0).
struct CriticalPoints {
    std::array<double, 2> A, B, Ap, Bp;
};

inline CriticalPoints critical_points(const Params& prm) {
    if (!(prm.p < ode::p_decay && prm.p > 0.0))
        throw domain_error("critical_points: requires 0 < p < sqrt(3)/2");
    double x = 2.0 * prm.p / std::sqrt(3.0);
    double ysq = 1.0 - 4.0 * prm.p2() / 3.0;
    double y = ysq > 0.0 ? std::sqrt(ysq) : 0.0;
    CriticalPoints c;
    c.A = {x, y};
    c.B = {y, x};
    c.Ap = {-x, y};
    c.Bp = {-y, x};
    return c;
}

}  // namespace klein::geometry

#endif
