#include <doctest.h>

#include <cmath>
#include <random>

#include "klein/geometry.hpp"
#include "klein/ode_solve.hpp"

using namespace klein;
using geometry::poly_P;
using geometry::poly_P_deriv;
using geometry::poly_Q;
using ode::Params;

TEST_CASE("P has its advertised roots and values") {
    for (double p : {0.1, 0.5, 0.61237243569579452, 0.9}) {
        Params prm(p);
        CHECK(poly_P(0.0, prm) == 0.0);
        CHECK(poly_P(0.5, prm) == 0.0);
        CHECK(poly_P(-2.0 * p * p, prm) == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(poly_P(0.25, Params(0.5)) == doctest::Approx(0.8203125).epsilon(1e-15));
}

TEST_CASE("P' matches central differences") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> us(-1.4, 0.6), up(0.05, 0.99);
    for (int i = 0; i < 100; ++i) {
        Params prm(up(rng));
        double s = us(rng), h = 1e-6;
        double fd = (poly_P(s + h, prm) - poly_P(s - h, prm)) / (2.0 * h);
        CHECK(poly_P_deriv(s, prm) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("Q has its advertised roots and values") {
    for (double p : {0.2, 0.5, 0.8}) {
        Params prm(p);
        CHECK(poly_Q(0.0, prm) == 0.0);
        CHECK(poly_Q(0.5, prm) == 0.0);
    }
    CHECK(poly_Q(0.25, Params(0.5)) == doctest::Approx(0.3515625).epsilon(1e-15));
}

TEST_CASE("Q degenerates to a single quadratic factor at p = sqrt(3/8)") {
    Params pa(ode::p_admissible);
    // 3 - 8 p^2 = 0 freezes three factors at 3/4, 5/4, 3/2
    for (double r : {0.1, 0.25, 0.4}) {
        double expected = 2.0 * r * (1.0 - 2.0 * r) * 0.75 * 1.25 * 1.5;
        CHECK(poly_Q(r, pa) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("quadrics: unit circle, admissible degeneration, delta factor") {
    Params prm(0.4);
    for (int i = 0; i < 20; ++i) {
        double th = i * 0.31415;
        auto q = geometry::quadrics(std::cos(th), std::sin(th), prm);
        CHECK(std::abs(q.w1) < 1e-15);
    }
    Params pa(ode::p_admissible);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        auto q = geometry::quadrics(u(rng), u(rng), pa);
        CHECK(std::abs(q.w3 + 4.0 * q.w2) < 1e-12);
    }
    auto q0 = geometry::quadrics(0.0, 0.77, prm);
    CHECK(q0.delta == 0.0);
    auto q1 = geometry::quadrics(0.3, -0.4, prm);
    CHECK(q1.delta == doctest::Approx(-64.0 * 0.09 * 0.16 * q1.w1 * q1.w2 * q1.w3)
                          .epsilon(1e-14));
}

TEST_CASE("oscillation intervals per the case table") {
    auto d1 = geometry::intervals(Params(0.5));
    CHECK(d1.i1_lo == 0.0);
    CHECK(d1.i1_hi == 0.5);
    CHECK(d1.a0 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(d1.a1 == doctest::Approx(-0.5).epsilon(1e-15));

    auto d2 = geometry::intervals(Params(0.7));
    CHECK(d2.a0 == doctest::Approx(-0.98).epsilon(1e-14));
    CHECK(d2.a1 == doctest::Approx(-0.52).epsilon(1e-13));

    auto d3 = geometry::intervals(Params(0.9));
    CHECK(d3.i1_lo == doctest::Approx(0.12).epsilon(1e-13));
    CHECK(d3.i1_hi == 0.5);
    CHECK(d3.a0 == -1.5);
    CHECK(d3.a1 == 0.0);

    CHECK_THROWS_AS(geometry::intervals(Params(ode::p_decay)), domain_error);
}

TEST_CASE("intervals stay disjoint away from the decay parameter") {
    for (int i = 1; i <= 1000; ++i) {
        double p = i / 1001.0;
        if (std::abs(p - ode::p_decay) < 1e-3) continue;
        auto d = geometry::intervals(Params(p));
        CHECK(d.a1 < d.i1_lo + 1e-15);
        CHECK(d.a0 < d.a1 + 1e-15);
    }
}

TEST_CASE("parabolic map at the initial point") {
    for (double p : {0.3, 0.5, 0.7}) {
        Params prm(p);
        auto ps = geometry::to_parabolic(ode::initial_state(prm), prm);
        CHECK(ps.u == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(ps.v == doctest::Approx(2.0 * p * p - 1.5).epsilon(1e-14));
        CHECK(ps.du == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(ps.dv == doctest::Approx(0.0).epsilon(1e-14));
    }
    Params p9(0.9);
    auto ps9 = geometry::to_parabolic(ode::initial_state(p9), p9);
    CHECK(ps9.u == doctest::Approx(2.0 * 0.81 - 1.5).epsilon(1e-14));
    CHECK(ps9.v == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("v is frozen at -3/4 for p = sqrt(3/8), u at 1/2 for p = 1") {
    Params pa(ode::p_admissible);
    auto tra = ode::integrate(pa, 12.0, 1e-12);
    for (int i = 0; i <= 50; ++i) {
        auto ps = geometry::to_parabolic(tra.at(12.0 * i / 50), pa);
        CHECK(ps.v == doctest::Approx(-0.75).epsilon(1e-9));
    }
    Params p1(1.0);
    auto tr1 = ode::integrate(p1, 12.0, 1e-12);
    for (int i = 0; i <= 50; ++i) {
        auto ps = geometry::to_parabolic(tr1.at(12.0 * i / 50), p1);
        CHECK(ps.u == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("to_parabolic rejects off-shell states") {
    Params prm(0.5);
    auto s = ode::initial_state(prm);
    s.phi1 += 1e-3;
    CHECK_THROWS_AS(geometry::to_parabolic(s, prm), constraint_error);
}

TEST_CASE("from_parabolic inverts the corner and the turning point") {
    for (double p : {0.3, 0.6}) {
        Params prm(p);
        geometry::ParabolicState ps;
        ps.u = 0.0;
        ps.v = 2.0 * p * p - 1.5;
        ps.du = ps.dv = 0.0;
        ps.sign1 = 1;
        ps.sign2 = 1;
        auto s = geometry::from_parabolic(ps, prm);
        auto s0 = ode::initial_state(prm);
        CHECK(s.phi1 == doctest::Approx(s0.phi1).epsilon(1e-12));
        CHECK(s.phi2 == doctest::Approx(s0.phi2).epsilon(1e-12));
        CHECK(std::abs(s.dphi1) == doctest::Approx(s0.dphi1).epsilon(1e-12));
        CHECK(s.dphi2 == doctest::Approx(s0.dphi2).epsilon(1e-12));
    }
    Params pa(ode::p_admissible);
    geometry::ParabolicState A;
    A.u = 0.5;
    A.v = -0.75;
    A.du = A.dv = 0.0;
    A.sign1 = 1;
    A.sign2 = 1;
    auto sA = geometry::from_parabolic(A, pa);
    CHECK(sA.phi1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(sA.phi2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(sA.dphi1) < 1e-7);
    CHECK(std::abs(sA.dphi2) < 1e-7);
}

TEST_CASE("parabolic round trip on on-shell states") {
    Params prm(0.5);
    auto tr = ode::integrate(prm, 25.0, 1e-12);
    double worst = 0.0;
    for (int i = 1; i <= 200; ++i) {
        auto s = tr.at(25.0 * i / 200.33);
        auto back = geometry::from_parabolic(geometry::to_parabolic(s, prm), prm);
        worst = std::max({worst, std::abs(back.phi1 - s.phi1),
                          std::abs(back.phi2 - s.phi2),
                          std::abs(back.dphi1 - s.dphi1),
                          std::abs(back.dphi2 - s.dphi2)});
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("parabolic round trip survives the degenerate edges") {
    // tiny p: the initial corner has u = 0 and 3+2v = 4p^2 simultaneously
    // phi2^2 rides inside 3+2v there, so the chart resolves phi2 only to
    // about ulp(3)/phi2 ~ 1e-10 absolute at p = 1e-6
    Params tiny(1e-6);
    auto s0 = ode::initial_state(tiny);
    auto b0 = geometry::from_parabolic(geometry::to_parabolic(s0, tiny), tiny);
    CHECK(std::abs(b0.phi2 - s0.phi2) < 1e-9);
    CHECK(std::abs(b0.dphi1 - s0.dphi1) < 1e-9);
    auto trt = ode::integrate(tiny, 10.0, 1e-12);
    for (int i = 1; i <= 50; ++i) {
        auto s = trt.at(10.0 * i / 50.21);
        auto back = geometry::from_parabolic(geometry::to_parabolic(s, tiny), tiny);
        CHECK(std::abs(back.phi1 - s.phi1) < 1e-8);
        CHECK(std::abs(back.phi2 - s.phi2) < 1e-8);
        CHECK(std::abs(back.dphi1 - s.dphi1) < 1e-8);
        CHECK(std::abs(back.dphi2 - s.dphi2) < 1e-8);
    }

    // p > sqrt(3)/2: the trajectory crosses the phi2 = 0 edge at v = -3/2
    Params p9(0.9);
    auto tr9 = ode::integrate(p9, 20.0, 1e-12);
    for (int i = 1; i <= 200; ++i) {
        auto s = tr9.at(20.0 * i / 200.37);
        auto back = geometry::from_parabolic(geometry::to_parabolic(s, p9), p9);
        CHECK(std::abs(back.phi1 - s.phi1) < 1e-8);
        CHECK(std::abs(back.phi2 - s.phi2) < 1e-8);
        CHECK(std::abs(back.dphi1 - s.dphi1) < 1e-8);
        CHECK(std::abs(back.dphi2 - s.dphi2) < 1e-8);
    }
}

TEST_CASE("initial accelerations in y") {
    auto a5 = geometry::accel0(Params(0.5));
    CHECK(a5[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(a5[1] == doctest::Approx(1.5).epsilon(1e-15));
    auto aa = geometry::accel0(Params(ode::p_admissible));
    CHECK(std::abs(aa[1]) < 1e-14);
    auto a1 = geometry::accel0(Params(1.0));
    CHECK(std::abs(a1[0]) < 1e-14);
    CHECK_THROWS_AS(geometry::accel0(Params(ode::p_decay)), domain_error);
}

TEST_CASE("critical points sit on the discriminant boundary") {
    auto c = geometry::critical_points(Params(ode::p_admissible));
    CHECK(c.A[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(c.A[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(c.A[0] == doctest::Approx(c.B[0]).epsilon(1e-12));
    CHECK(c.A[1] == doctest::Approx(c.B[1]).epsilon(1e-12));

    auto cl = geometry::critical_points(Params(ode::p_decay - 1e-8));
    CHECK(cl.A[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(cl.A[1]) < 1e-3);

    for (double p : {0.3, 0.5, 0.7}) {
        Params prm(p);
        auto cp = geometry::critical_points(prm);
        for (auto pt : {cp.A, cp.B, cp.Ap, cp.Bp}) {
            auto q = geometry::quadrics(pt[0], pt[1], prm);
            CHECK(std::abs(q.delta) < 1e-12);
        }
    }
    CHECK_THROWS_AS(geometry::critical_points(Params(0.9)), domain_error);
}

TEST_CASE("discriminant equals (16/9) P(u) P(v) on shell") {
    Params prm(0.5);
    auto tr = ode::integrate(prm, 20.0, 1e-12);
    for (int i = 0; i <= 400; ++i) {
        auto s = tr.at(20.0 * i / 400);
        auto ps = geometry::to_parabolic(s, prm);
        auto q = geometry::quadrics(s.phi1, s.phi2, prm);
        double rhs = (16.0 / 9.0) * geometry::poly_P(ps.u, prm) *
                     geometry::poly_P(ps.v, prm);
        CHECK(q.delta == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("the quadrics factor into parallel lines in (u,v)") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uu(0.0, 0.5), uv(-1.5, 0.0),
        up(0.05, 0.99);
    for (int i = 0; i < 1000; ++i) {
        double u = uu(rng), v = uv(rng), p = up(rng);
        Params prm(p);
        double p2 = p * p;
        double phi1 = std::sqrt(std::max(0.0, -4.0 * u * v / 3.0));
        double phi2 = std::sqrt((3.0 + 2.0 * u) * (3.0 + 2.0 * v) / 12.0);
        auto q = geometry::quadrics(phi1, phi2, prm);
        CHECK(q.w1 == doctest::Approx(-0.25 * (1.0 - 2.0 * u) * (1.0 - 2.0 * v))
                          .epsilon(1e-11));
        CHECK(q.w2 == doctest::Approx(-(1.5 - 2.0 * p2 + u) * (1.5 - 2.0 * p2 + v))
                          .epsilon(1e-11));
        CHECK(q.w3 == doctest::Approx(4.0 * (2.0 * p2 + u) * (2.0 * p2 + v))
                          .epsilon(1e-11));
    }
}

TEST_CASE("separation holds along a trajectory") {
    Params prm(0.5);
    auto tr = ode::integrate(prm, 30.0, 1e-12);
    double worst = 0.0;
    for (int i = 0; i <= 500; ++i) {
        auto ps = geometry::to_parabolic(tr.at(30.0 * i / 500), prm);
        worst = std::max({worst, std::abs(ps.du * ps.du - poly_P(ps.u, prm)),
                          std::abs(ps.dv * ps.dv - poly_P(ps.v, prm))});
    }
    CHECK(worst < 1e-7);
}
