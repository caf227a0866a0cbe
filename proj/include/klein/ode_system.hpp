#ifndef KLEIN_ODE_SYSTEM_HPP
#define KLEIN_ODE_SYSTEM_HPP

#include <array>
#include <cmath>

#include "klein/errors.hpp"

// The planar second-order system behind critical metrics of revolution on
// the Klein bottle:
//
//   phi1'' = (1 - 2 phi1^2 - 8 phi2^2) phi1
//   phi2'' = (4 - 2 phi1^2 - 8 phi2^2) phi2
//
// with the one-parameter family of initial data
//   phi1(0) = 0, phi2(0) = p, phi1'(0) = 2p, phi2'(0) = 0,  p in (0,1].
//
// phi1 is odd and phi2 even in y. Two independent first integrals H1, H2 are
// conserved along solutions; both equal -4p^2(3-4p^2) on this family.

namespace klein::ode {

// Distinguished parameter values with closed-form orbits.
inline constexpr double p_admissible = 0.61237243569579452;  // sqrt(3/8)
inline constexpr double p_decay = 0.86602540378443865;       // sqrt(3)/2
inline constexpr double p_circle = 1.0;

struct Params {
    double p;

    explicit Params(double p_) : p(p_) {
        if (!(p > 0.0 && p <= 1.0))
            throw domain_error("Params: p must lie in (0,1]");
    }

    double p2() const { return p * p; }
    bool is(double special, double tol = 1e-12) const {
        return std::abs(p - special) <= tol;
    }
};

struct State {
    double y = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double dphi1 = 0.0;
    double dphi2 = 0.0;
};

inline State initial_state(const Params& prm) {
    return {0.0, 0.0, prm.p, 2.0 * prm.p, 0.0};
}

// Accelerations (phi1'', phi2'').
inline std::array<double, 2> rhs(const State& s) {
    double q = 2.0 * s.phi1 * s.phi1 + 8.0 * s.phi2 * s.phi2;
    return {(1.0 - q) * s.phi1, (4.0 - q) * s.phi2};
}

// The two first integrals. On the family above both equal -4p^2(3-4p^2).
inline std::array<double, 2> first_integrals(const State& s) {
    double f1 = s.phi1, f2 = s.phi2, d1 = s.dphi1, d2 = s.dphi2;
    double r = f1 * f1 + 4.0 * f2 * f2;
    double H1 = r * r - f1 * f1 - 16.0 * f2 * f2 + d1 * d1 + 4.0 * d2 * d2;
    double H2 = 12.0 * f2 * f2 * (f2 * f2 - 1.0) + 3.0 * f1 * f1 * f2 * f2 +
                f2 * f2 * d1 * d1 - 2.0 * f1 * d1 * f2 * d2 +
                (3.0 + f1 * f1) * d2 * d2;
    return {H1, H2};
}

inline double integral_constant(const Params& prm) {
    return -4.0 * prm.p2() * (3.0 - 4.0 * prm.p2());
}

// Rescaled coordinates q1 = phi1/sqrt(2), q2 = sqrt(2) phi2 put the system in
// Hamiltonian form with potential V = (q1^2+q2^2)^2 - q1^2/2 - 2 q2^2 and
// energy H = H1/4.
struct HamiltonianState {
    double q1, q2, dq1, dq2;
    double H;
};

inline double potential(double q1, double q2) {
    double r = q1 * q1 + q2 * q2;
    return r * r - 0.5 * q1 * q1 - 2.0 * q2 * q2;
}

inline HamiltonianState to_hamiltonian(const State& s) {
    constexpr double inv_sqrt2 = 0.70710678118654752;
    constexpr double sqrt2 = 1.4142135623730950;
    HamiltonianState h;
    h.q1 = inv_sqrt2 * s.phi1;
    h.q2 = sqrt2 * s.phi2;
    h.dq1 = inv_sqrt2 * s.dphi1;
    h.dq2 = sqrt2 * s.dphi2;
    h.H = 0.5 * (h.dq1 * h.dq1 + h.dq2 * h.dq2) + potential(h.q1, h.q2);
    return h;
}

}  // namespace klein::ode

#endif
