#ifndef KLEIN_ELLIPTIC_HPP
#define KLEIN_ELLIPTIC_HPP

#include <cmath>

#include "klein/errors.hpp"

// Complete elliptic integrals of the first, second and third kind.
//
// Argument convention: everything here takes the *parameter* m = k^2, where
// k is the modulus. A value quoted with modulus k (e.g. E(2*sqrt(2)/3)) maps
// to m = 8/9 here. The characteristic n of the third kind is the coefficient
// of sin^2 in the (1 - n sin^2) factor.

namespace klein::elliptic {

inline constexpr double pi = 3.141592653589793238462643383279502884;

struct KE {
    double K;  // first kind
    double E;  // second kind
};

// Arithmetic-geometric mean evaluation of K(m) and E(m).
// K diverges as m -> 1; values of m above 1 - 1e-12 are refused for the
// combined form since K is meaningless there.
inline KE complete_elliptic(double m) {
    if (!(m >= 0.0 && m <= 1.0))
        throw domain_error("complete_elliptic: parameter m must be in [0,1]");
    if (m > 1.0 - 1e-12)
        throw divergence_error("complete_elliptic: K(m) diverges as m -> 1");
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double sum = 0.5 * m;  // 2^{-1} c_0^2 with c_0 = sqrt(m)
    double pow2 = 0.5;
    for (int n = 0; n < 40; ++n) {
        double c = 0.5 * (a - b);
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
        // c stalls near one ulp of a; iterating past that only accumulates
        // exponentially weighted roundoff in the sum
        if (c < 1e-15 * a) break;
    }
    double K = 0.5 * pi / a;
    return {K, K * (1.0 - sum)};
}

inline double elliptic_K(double m) { return complete_elliptic(m).K; }

// E alone is defined on all of [0,1]; E(1) = 1 exactly.
inline double elliptic_E(double m) {
    if (!(m >= 0.0 && m <= 1.0))
        throw domain_error("elliptic_E: parameter m must be in [0,1]");
    if (m == 1.0) return 1.0;
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    double sum = 0.5 * m;
    double pow2 = 0.5;
    for (int n = 0; n < 40; ++n) {
        double c = 0.5 * (a - b);
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
        if (c < 1e-15 * a) break;
    }
    return 0.5 * pi / a * (1.0 - sum);
}

namespace detail {

// Carlson symmetric forms, duplication method. All arguments nonnegative
// here (x may be 0 in R_F/R_J), which is the only regime this project needs.

inline double carlson_rf(double x, double y, double z) {
    constexpr double ERRTOL = 1e-3;
    double ave, delx, dely, delz;
    do {
        double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        double lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        ave = (x + y + z) / 3.0;
        delx = (ave - x) / ave;
        dely = (ave - y) / ave;
        delz = (ave - z) / ave;
    } while (std::max({std::abs(delx), std::abs(dely), std::abs(delz)}) > ERRTOL);
    double e2 = delx * dely - delz * delz;
    double e3 = delx * dely * delz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) /
           std::sqrt(ave);
}

inline double carlson_rc(double x, double y) {
    constexpr double ERRTOL = 1e-3;
    double ave, s;
    do {
        double lam = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        ave = (x + y + y) / 3.0;
        s = (y - ave) / ave;
    } while (std::abs(s) > ERRTOL);
    return (1.0 + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * 9.0 / 22.0)))) /
           std::sqrt(ave);
}

inline double carlson_rj(double x, double y, double z, double p) {
    constexpr double ERRTOL = 1e-3;
    constexpr double C1 = 3.0 / 14.0, C2 = 1.0 / 3.0, C3 = 3.0 / 22.0,
                     C4 = 3.0 / 26.0, C5 = 0.75 * C3, C6 = 1.5 * C4,
                     C7 = 0.5 * C2, C8 = C3 + C3;
    double sum = 0.0, fac = 1.0;
    double ave, delx, dely, delz, delp;
    do {
        double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        double lam = sx * (sy + sz) + sy * sz;
        double alpha = p * (sx + sy + sz) + sx * sy * sz;
        alpha *= alpha;
        double beta = p * (p + lam) * (p + lam);
        sum += fac * carlson_rc(alpha, beta);
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        p = 0.25 * (p + lam);
        ave = 0.2 * (x + y + z + 2.0 * p);
        delx = (ave - x) / ave;
        dely = (ave - y) / ave;
        delz = (ave - z) / ave;
        delp = (ave - p) / ave;
    } while (std::max({std::abs(delx), std::abs(dely), std::abs(delz),
                       std::abs(delp)}) > ERRTOL);
    double ea = delx * (dely + delz) + dely * delz;
    double eb = delx * dely * delz;
    double ec = delp * delp;
    double ed = ea - 3.0 * ec;
    double ee = eb + 2.0 * delp * (ea - ec);
    return 3.0 * sum +
           fac *
               (1.0 + ed * (-C1 + C5 * ed - C6 * ee) +
                eb * (C7 + delp * (-C8 + delp * C4)) +
                delp * ea * (C2 - delp * C3) - C2 * delp * ec) /
               (ave * std::sqrt(ave));
}

}  // namespace detail

// Complete integral of the third kind,
//   Pi(n,m) = int_0^{pi/2} dth / ((1 - n sin^2 th) sqrt(1 - m sin^2 th)),
// via Carlson reduction Pi = R_F(0,1-m,1) + (n/3) R_J(0,1-m,1,1-n).
inline double elliptic_pi(double n, double m) {
    if (!(n < 1.0))
        throw domain_error("elliptic_pi: characteristic n must be < 1");
    if (!(m >= 0.0 && m < 1.0))
        throw domain_error("elliptic_pi: parameter m must be in [0,1)");
    double mc = 1.0 - m;
    double v = detail::carlson_rf(0.0, mc, 1.0);
    if (n != 0.0) v += (n / 3.0) * detail::carlson_rj(0.0, mc, 1.0, 1.0 - n);
    return v;
}

// The extremal value of lambda_1 * A on the Klein bottle: 12 pi E(m = 8/9).
inline double extremal_product() { return 12.0 * pi * elliptic_E(8.0 / 9.0); }

}  // namespace klein::elliptic

#endif
