#ifndef KLEIN_RK_DOPRI_HPP
#define KLEIN_RK_DOPRI_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "klein/errors.hpp"

// Adaptive embedded Dormand-Prince 5(4) pair with the standard fourth-order
// continuous extension. Coefficients follow Hairer-Norsett-Wanner.

namespace klein::num {

template <int N>
struct DenseSegment {
    double t0, h;
    std::array<std::array<double, N>, 5> rcont;

    std::array<double, N> eval(double t) const {
        double th = (t - t0) / h;
        std::array<double, N> out;
        for (int i = 0; i < N; ++i) {
            const auto& r = rcont;
            out[i] = r[0][i] +
                     th * (r[1][i] +
                           (1.0 - th) * (r[2][i] + th * (r[3][i] + (1.0 - th) * r[4][i])));
        }
        return out;
    }
};

template <int N>
struct DenseSolution {
    std::vector<DenseSegment<N>> segments;  // ordered along the direction of t
    double t_begin = 0.0, t_end = 0.0;

    bool forward() const { return t_end >= t_begin; }

    std::array<double, N> eval(double t) const {
        if (segments.empty())
            throw integration_error("dense output is empty", t_begin);
        // binary search for the segment containing t
        double lo = std::min(t_begin, t_end), hi = std::max(t_begin, t_end);
        t = std::clamp(t, lo, hi);
        size_t a = 0, b = segments.size();
        bool fwd = forward();
        while (b - a > 1) {
            size_t m = (a + b) / 2;
            double start = segments[m].t0;
            if (fwd ? (t >= start) : (t <= start))
                a = m;
            else
                b = m;
        }
        return segments[a].eval(t);
    }
};

template <int N, class RHS>
class Dopri5 {
  public:
    explicit Dopri5(RHS rhs, double rtol = 1e-12, double atol = 1e-12)
        : f_(rhs), rtol_(rtol), atol_(atol) {}

    // Integrates from t0 to t1 (either direction). step_cb, if provided, is
    // called after every accepted step with (t, state).
    template <class StepCb>
    DenseSolution<N> solve(double t0, std::array<double, N> x, double t1,
                           StepCb&& step_cb) {
        DenseSolution<N> sol;
        sol.t_begin = t0;
        sol.t_end = t1;
        if (t0 == t1) return sol;
        double dir = t1 > t0 ? 1.0 : -1.0;
        std::array<double, N> k1, k2, k3, k4, k5, k6, k7, xt, xnew;
        f_(t0, x, k1);
        double h = initial_step(t0, x, k1, dir, t1);
        double t = t0;
        int rejected_in_a_row = 0;
        while (dir * (t1 - t) > 0.0) {
            if (dir * (t + h - t1) > 0.0) h = t1 - t;
            if (std::abs(h) < 16.0 * eps_ * std::max(1.0, std::abs(t)))
                throw integration_error("step size underflow", t);

            stage(t, x, k1, k2, k3, k4, k5, k6, k7, xt, xnew, h);

            // scaled RMS error of the embedded pair
            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                double sk = atol_ + rtol_ * std::max(std::abs(x[i]), std::abs(xnew[i]));
                double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
                err += (e / sk) * (e / sk);
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                sol.segments.push_back(make_dense(t, h, x, xnew, k1, k3, k4, k5, k6, k7));
                t += h;
                x = xnew;
                k1 = k7;  // first-same-as-last
                step_cb(t, x);
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h *= std::clamp(fac, 0.2, 5.0);
                rejected_in_a_row = 0;
            } else {
                double fac = 0.9 * std::pow(err, -0.2);
                h *= std::clamp(fac, 0.1, 0.9);
                if (++rejected_in_a_row > 200)
                    throw integration_error("persistent step rejection", t);
            }
        }
        return sol;
    }

    DenseSolution<N> solve(double t0, std::array<double, N> x, double t1) {
        return solve(t0, x, t1, [](double, const std::array<double, N>&) {});
    }

  private:
    RHS f_;
    double rtol_, atol_;
    static constexpr double eps_ = 2.220446049250313e-16;

    // Dormand-Prince tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;

    void stage(double t, const std::array<double, N>& x, const std::array<double, N>& k1,
               std::array<double, N>& k2, std::array<double, N>& k3,
               std::array<double, N>& k4, std::array<double, N>& k5,
               std::array<double, N>& k6, std::array<double, N>& k7,
               std::array<double, N>& xt, std::array<double, N>& xnew, double h) {
        for (int i = 0; i < N; ++i) xt[i] = x[i] + h * a21 * k1[i];
        f_(t + c2 * h, xt, k2);
        for (int i = 0; i < N; ++i) xt[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f_(t + c3 * h, xt, k3);
        for (int i = 0; i < N; ++i)
            xt[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f_(t + c4 * h, xt, k4);
        for (int i = 0; i < N; ++i)
            xt[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f_(t + c5 * h, xt, k5);
        for (int i = 0; i < N; ++i)
            xt[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i]);
        f_(t + h, xt, k6);
        for (int i = 0; i < N; ++i)
            xnew[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        f_(t + h, xnew, k7);
    }

    DenseSegment<N> make_dense(double t, double h, const std::array<double, N>& x0,
                               const std::array<double, N>& x1,
                               const std::array<double, N>& k1,
                               const std::array<double, N>& k3,
                               const std::array<double, N>& k4,
                               const std::array<double, N>& k5,
                               const std::array<double, N>& k6,
                               const std::array<double, N>& k7) {
        DenseSegment<N> seg;
        seg.t0 = t;
        seg.h = h;
        for (int i = 0; i < N; ++i) {
            double dy = x1[i] - x0[i];
            seg.rcont[0][i] = x0[i];
            seg.rcont[1][i] = dy;
            seg.rcont[2][i] = h * k1[i] - dy;
            seg.rcont[3][i] = dy - h * k7[i] - seg.rcont[2][i];
            seg.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i] + d7 * k7[i]);
        }
        return seg;
    }

    double initial_step(double t0, const std::array<double, N>& x,
                        const std::array<double, N>& f0, double dir, double t1) {
        double d0 = 0.0, d1n = 0.0;
        for (int i = 0; i < N; ++i) {
            double sk = atol_ + rtol_ * std::abs(x[i]);
            d0 += (x[i] / sk) * (x[i] / sk);
            d1n += (f0[i] / sk) * (f0[i] / sk);
        }
        double h = (d1n > 0.0) ? 0.01 * std::sqrt(d0 / d1n) : 1e-6;
        h = std::min({h, 0.1 * std::abs(t1 - t0), 0.1});
        if (h <= 0.0 || !std::isfinite(h)) h = 1e-6;
        return dir * h;
    }
};

}  // namespace klein::num

#endif
