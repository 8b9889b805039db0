#include <cmath>
#include <random>

#include <doctest.h>

#include "tdgasci/errors.hpp"
#include "tdgasci/model.hpp"

using namespace tdgasci;

TEST_SUITE("model") {

TEST_CASE("nuclear potential values") {
    CHECK(nuclear_potential(PotentialSpec::atom(2.0), 0.0) == doctest::Approx(-2.0));
    CHECK(nuclear_potential(PotentialSpec::diatomic(1, 1, 0), 0.0) == doctest::Approx(-2.0));
    CHECK(nuclear_potential(PotentialSpec::diatomic(3, 1, 3), 1.5) == doctest::Approx(-3.0 - 1.0 / std::sqrt(10.0)));
}

TEST_CASE("parity") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-20, 20);
    const auto a = PotentialSpec::atom(4.0);
    const auto h2 = PotentialSpec::diatomic(1, 1, 1.7);
    const auto lih = PotentialSpec::diatomic(3, 1, 3);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        CHECK(nuclear_potential(a, x) == nuclear_potential(a, -x));
        CHECK(std::abs(nuclear_potential(h2, x) - nuclear_potential(h2, -x)) < 1e-15);
        CHECK(nuclear_potential(a, x) < 0.0);
        CHECK(nuclear_potential(lih, x) < 0.0);
    }
}

TEST_CASE("electron-electron interaction") {
    CHECK(ee_interaction(1.0, 0.3, 0.3) == 1.0);
    CHECK(ee_interaction(1.0, 0.0, std::sqrt(3.0)) == doctest::Approx(0.5));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 50; ++i) {
        const double a = u(rng), b = u(rng);
        CHECK(ee_interaction(1.0, a, b) == ee_interaction(1.0, b, a));
        CHECK(ee_interaction(1.0, a, b) <= 1.0);
    }
}

TEST_CASE("pulses") {
    PulseSpec p;
    p.F0 = 0.02;
    p.sigma = 30;
    p.t0 = 100;
    p.omega = 0.57;
    CHECK(field(p, 100.0) == doctest::Approx(0.02));
    p.phi_cep = M_PI;
    CHECK(field(p, 100.0) == doctest::Approx(-0.02));
    for (double t = 0; t < 300; t += 0.37) CHECK(std::abs(field(p, t)) <= 0.02 + 1e-15);
    CHECK(std::abs(field(p, 100 + 40 * 30)) < 1e-300 + 1e-200);

    PulseSpec k;
    k.shape = PulseShape::half_cycle;
    k.F0 = 0.001;
    k.sigma = 0.1;
    k.t0 = 1.0;
    CHECK(field(k, 1.1) == doctest::Approx(0.001 * std::exp(-0.5)));
    CHECK(field(k, 0.9) == doctest::Approx(0.001 * std::exp(-0.5)));

    PulseSpec bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("internuclear repulsion") {
    CHECK(internuclear_repulsion(PotentialSpec::diatomic(3, 1, 0)) == doctest::Approx(3.0));
    CHECK(internuclear_repulsion(PotentialSpec::diatomic(3, 1, 3)) == doctest::Approx(3.0 / std::sqrt(10.0)));
    double prev = 4.0;
    for (double R = 0; R < 1000; R += 7.0) {
        const double v = internuclear_repulsion(PotentialSpec::diatomic(3, 1, R));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 0.01);
    CHECK_THROWS_AS(internuclear_repulsion(PotentialSpec::atom(2)), ConfigError);
}

TEST_CASE("potential validation") {
    CHECK_THROWS_AS(PotentialSpec::atom(2, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(PotentialSpec::atom(-1).validate(), ConfigError);
    CHECK_THROWS_AS(PotentialSpec::diatomic(1, 1, -1).validate(), ConfigError);
}

TEST_CASE("cap shape") {
    double prev = 0.0;
    for (double x = 0; x <= 40.0; x += 0.25) {
        const double v = cap_value(x, 20, 40);
        CHECK(v >= prev);
        CHECK(cap_value(-x, 20, 40) == v);
        prev = v;
    }
    CHECK(cap_value(20.0, 20, 40) == 0.0);
}

}
