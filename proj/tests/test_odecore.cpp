#include <doctest.h>

#include <cmath>
#include <random>

#include "klein/ode_solve.hpp"
#include "klein/periods.hpp"

using namespace klein;
using ode::Params;
using ode::State;

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(Params(0.0), domain_error);
    CHECK_THROWS_AS(Params(-0.2), domain_error);
    CHECK_THROWS_AS(Params(1.0 + 1e-9), domain_error);
    CHECK_NOTHROW(Params(1.0));
}

TEST_CASE("initial data") {
    auto s = ode::initial_state(Params(0.5));
    CHECK(s.y == 0.0);
    CHECK(s.phi1 == 0.0);
    CHECK(s.phi2 == 0.5);
    CHECK(s.dphi1 == 1.0);
    CHECK(s.dphi2 == 0.0);
    auto sa = ode::initial_state(Params(ode::p_admissible));
    CHECK(sa.phi2 == doctest::Approx(0.61237243569579452).epsilon(1e-16));
    CHECK(sa.dphi1 == doctest::Approx(1.2247448713915890).epsilon(1e-15));
    auto s1 = ode::initial_state(Params(1.0));
    CHECK(s1.phi2 == 1.0);
    CHECK(s1.dphi1 == 2.0);
}

TEST_CASE("accelerations") {
    CHECK(ode::rhs({0, 0, 0, 0, 0})[0] == 0.0);
    CHECK(ode::rhs({0, 0, 0, 0, 0})[1] == 0.0);
    auto r = ode::rhs({0, 1.0, 0.0, 0, 0});
    CHECK(r[0] == doctest::Approx(-1.0).epsilon(1e-16));
    auto r2 = ode::rhs(ode::initial_state(Params(0.5)));
    CHECK(r2[0] == 0.0);
    CHECK(r2[1] == doctest::Approx(1.0).epsilon(1e-16));
}

TEST_CASE("first integrals take the closed-form constant on the family") {
    for (int i = 1; i <= 50; ++i) {
        double p = i / 51.0;
        auto H = ode::first_integrals(ode::initial_state(Params(p)));
        double K = -4.0 * p * p * (3.0 - 4.0 * p * p);
        CHECK(H[0] == doctest::Approx(K).epsilon(1e-14));
        CHECK(H[1] == doctest::Approx(K).epsilon(1e-14));
    }
    auto H5 = ode::first_integrals(ode::initial_state(Params(0.5)));
    CHECK(H5[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(H5[1] == doctest::Approx(-2.0).epsilon(1e-15));
    auto H0 = ode::first_integrals({0, 0, 0, 0, 0});
    CHECK(H0[0] == 0.0);
    CHECK(H0[1] == 0.0);
}

TEST_CASE("Hamiltonian form is H1/4 in the rescaled coordinates") {
    auto h = ode::to_hamiltonian(ode::initial_state(Params(0.5)));
    CHECK(h.q1 == 0.0);
    CHECK(h.q2 == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-15));
    CHECK(h.dq1 == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-15));
    CHECK(h.dq2 == 0.0);
    CHECK(h.H == doctest::Approx(-0.25 * (3.0 - 1.0)).epsilon(1e-14));

    auto hz = ode::to_hamiltonian({0, 0, 0, 0, 0});
    CHECK(hz.H == 0.0);
    auto hu = ode::to_hamiltonian({0, 1.0, 0.0, 0.0, 0.0});
    CHECK(hu.q1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(hu.H == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
        State s{0.0, u(rng), u(rng), u(rng), u(rng)};
        CHECK(ode::to_hamiltonian(s).H ==
              doctest::Approx(ode::first_integrals(s)[0] / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("integration conserves the first integrals") {
    Params pa(ode::p_admissible);
    double T = ode::detect_period(pa).period_y;
    auto tr = ode::integrate(pa, 5.0 * T, 1e-12);
    CHECK(tr.max_drift <= 1e-9);
    CHECK(tr.samples.front().y == 0.0);
    for (size_t i = 1; i < tr.samples.size(); ++i)
        CHECK(tr.samples[i].y > tr.samples[i - 1].y);
    // dense output agrees with the recorded states at the nodes
    auto mid = tr.samples[tr.samples.size() / 2];
    auto ev = tr.at(mid.y);
    CHECK(ev.phi1 == doctest::Approx(mid.phi1).epsilon(1e-13));
    CHECK(ev.dphi2 == doctest::Approx(mid.dphi2).epsilon(1e-13));
}

TEST_CASE("integration argument validation") {
    CHECK_THROWS_AS(ode::integrate(Params(0.5), 10.0, 0.0), domain_error);
    CHECK_THROWS_AS(ode::integrate(Params(0.5), 0.0, 1e-12), domain_error);
}

TEST_CASE("the decay orbit tends to the origin") {
    auto tr = ode::integrate(Params(ode::p_decay), 50.0, 1e-12);
    auto s = tr.at(50.0);
    CHECK(s.phi1 * s.phi1 + s.phi2 * s.phi2 < 1e-3);
}

TEST_CASE("phi2 dips to zero above the decay parameter") {
    auto tr = ode::integrate(Params(0.9), 40.0, 1e-12);
    double mn = 1e300;
    for (int i = 0; i <= 8000; ++i)
        mn = std::min(mn, tr.at(40.0 * i / 8000).phi2);
    CHECK(mn < 1e-8);
}

TEST_CASE("phi1 is odd and phi2 even under time reversal") {
    Params pa(ode::p_admissible);
    auto fwd = ode::integrate(pa, 8.0, 1e-12);
    auto bwd = ode::integrate(pa, -8.0, 1e-12);
    double defect = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double y = 8.0 * i / 400;
        auto sf = fwd.at(y);
        auto sb = bwd.at(-y);
        defect = std::max({defect, std::abs(sf.phi1 + sb.phi1),
                           std::abs(sf.phi2 - sb.phi2)});
    }
    CHECK(defect < 1e-8);
}

TEST_CASE("admissible envelope touches the unit circle exactly twice") {
    Params pa(ode::p_admissible);
    double T = ode::detect_period(pa).period_y;
    auto tr = ode::integrate(pa, T, 1e-12);
    const int n = 4096;
    double mx = 0.0;
    int clusters = 0;
    bool in_cluster = false;
    for (int i = 0; i < n; ++i) {
        auto s = tr.at(T * i / n);
        double g = s.phi1 * s.phi1 + s.phi2 * s.phi2;
        mx = std::max(mx, g);
        bool near = g > 1.0 - 1e-4;
        if (near && !in_cluster) ++clusters;
        in_cluster = near;
    }
    CHECK(std::abs(mx - 1.0) < 1e-8);
    CHECK(clusters == 2);
}

TEST_CASE("period detection at the admissible parameter") {
    Params pa(ode::p_admissible);
    auto pr = ode::detect_period(pa);
    REQUIRE(pr.periodic);
    CHECK(pr.period_y == doctest::Approx(3.3715007096251921).epsilon(1e-10));
    // the quadrature period really closes the trajectory
    auto tr = ode::integrate(pa, pr.period_y, 1e-12);
    auto s = tr.at(pr.period_y);
    auto s0 = ode::initial_state(pa);
    CHECK(std::abs(s.phi1 - s0.phi1) < 1e-7);
    CHECK(std::abs(s.phi2 - s0.phi2) < 1e-7);
    CHECK(std::abs(s.dphi1 - s0.dphi1) < 1e-7);
    CHECK(std::abs(s.dphi2 - s0.dphi2) < 1e-7);
    // and matches the u-moment form 2 (int u dtau + (3/4) T_u)
    double Tu = periods::period_u(pa);
    double ref = 2.0 * (periods::moment_u(pa) + 0.75 * Tu);
    CHECK(pr.period_y == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("period detection rejects the decay family") {
    CHECK_THROWS_AS(ode::detect_period(Params(ode::p_decay)), domain_error);
    CHECK_THROWS_AS(ode::detect_period(Params(0.95)), domain_error);
}

TEST_CASE("generic parameters are not periodic at tight tolerance") {
    CHECK_FALSE(ode::detect_period(Params(0.3)).periodic);
    CHECK_FALSE(ode::detect_period(Params(0.5)).periodic);
}

TEST_CASE("classification across the families") {
    auto admissible = ode::classify(Params(ode::p_admissible));
    CHECK(admissible.kind == ode::SolutionKind::PeriodicAdmissible);
    CHECK(admissible.zeros_phi1 == 2);
    CHECK(admissible.min_phi2 > 0.0);
    REQUIRE(admissible.period_y.has_value());

    auto decay = ode::classify(Params(ode::p_decay));
    CHECK(decay.kind == ode::SolutionKind::DecayToOrigin);

    auto vanish = ode::classify(Params(0.95));
    CHECK(vanish.kind == ode::SolutionKind::Phi2Vanishes);
    CHECK(vanish.min_phi2 < 1e-6);

    auto quasi = ode::classify(Params(0.3));
    CHECK(quasi.kind == ode::SolutionKind::QuasiPeriodic);
    CHECK(quasi.min_phi2 > 0.0);
}

TEST_CASE("a rational-ratio solution is periodic but inadmissible") {
    auto roots = periods::find_p_for_ratio(periods::RationalTarget(3, 2), 2e-3);
    REQUIRE(!roots.empty());
    auto pr = ode::detect_period(Params(roots[0]));
    REQUIRE(pr.periodic);
    CHECK(pr.q == 3);
    CHECK(pr.m == 2);
    auto tr = ode::integrate(Params(roots[0]), pr.period_y, 1e-12);
    auto s = tr.at(pr.period_y);
    auto s0 = ode::initial_state(Params(roots[0]));
    CHECK(std::abs(s.phi1 - s0.phi1) < 1e-6);
    CHECK(std::abs(s.dphi1 - s0.dphi1) < 1e-6);

    auto cls = ode::classify(Params(roots[0]));
    CHECK(cls.kind == ode::SolutionKind::PeriodicInadmissible);
    CHECK(cls.zeros_phi1 == 6);
    CHECK(cls.min_phi2 > 0.0);
}
