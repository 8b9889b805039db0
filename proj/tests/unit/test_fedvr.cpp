#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "tdgasci/errors.hpp"
#include "tdgasci/fedvr.hpp"
#include "tdgasci/model.hpp"

using namespace tdgasci;

TEST_SUITE("fedvr") {

TEST_CASE("lobatto closed forms") {
    const auto r2 = lobatto_rule(2);
    CHECK(r2.nodes[0] == doctest::Approx(-1.0));
    CHECK(r2.nodes[1] == doctest::Approx(1.0));
    CHECK(r2.weights[0] == doctest::Approx(1.0));
    CHECK(r2.weights[1] == doctest::Approx(1.0));

    const auto r3 = lobatto_rule(3);
    CHECK(std::abs(r3.nodes[1]) < 1e-15);
    CHECK(r3.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r3.weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    const auto r4 = lobatto_rule(4);
    const double a = 1.0 / std::sqrt(5.0);
    CHECK(r4.nodes[1] == doctest::Approx(-a).epsilon(1e-14));
    CHECK(r4.nodes[2] == doctest::Approx(a).epsilon(1e-14));
    CHECK(r4.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(r4.weights[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("lobatto exactness against analytic moments") {
    for (int n = 2; n <= 14; ++n) {
        const auto r = lobatto_rule(n);
        double wsum = 0.0;
        for (double w : r.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(std::abs(wsum - 2.0) < 1e-13);
        for (int k = 0; k <= 2 * n - 3; ++k) {
            double q = 0.0;
            for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
            const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
            CHECK(std::abs(q - exact) < 1e-12);
        }
    }
    CHECK_THROWS_AS(lobatto_rule(1), ConfigError);
}

TEST_CASE("grid counts") {
    CHECK(FedvrGrid::uniform(15, 10, 30, 8).n_b() == 209);
    CHECK(FedvrGrid::uniform(15, 10, 30, 8).n_c() == 139);
    CHECK(FedvrGrid::uniform(40, 10, 40, 7).n_b() == 239);
}

TEST_CASE("grid invariants") {
    const auto g = FedvrGrid::uniform(15, 10, 30, 8);
    CHECK(g.boundaries().front() == -15.0);
    CHECK(g.boundaries().back() == 15.0);
    for (int i = 1; i < g.n_b(); ++i) CHECK(g.nodes()[i] > g.nodes()[i - 1]);
    for (double w : g.weights()) CHECK(w > 0.0);
    for (int i = 0; i < g.n_b(); ++i) CHECK(std::abs(g.nodes()[i] + g.nodes()[g.n_b() - 1 - i]) < 1e-12);
    int bridges = 0;
    for (auto k : g.kinds()) bridges += k == FunctionKind::bridge;
    CHECK(bridges == 29);
    for (int p : g.central()) CHECK(std::abs(g.nodes()[p]) < 10.0);
    for (int p : g.outer()) CHECK(std::abs(g.nodes()[p]) >= 10.0 - 1e-12);
    CHECK(g.n_c() + static_cast<int>(g.outer().size()) == g.n_b());
    CHECK(!g.summary_table().empty());
}

TEST_CASE("grid construction errors") {
    CHECK_THROWS_AS(FedvrGrid::uniform(15, 9.9, 30, 8), ConfigError);
    CHECK_THROWS_AS(FedvrGrid::uniform(15, 10, 30, 1), ConfigError);
    CHECK_THROWS_AS(FedvrGrid::uniform(15, 10, 1, 8), ConfigError);
    CHECK_THROWS_AS(FedvrGrid::uniform(15, 20, 30, 8), ConfigError);
    CHECK_THROWS_AS(FedvrGrid::from_boundaries({-3, -1, 1, 2}, 1, 5), ConfigError);
}

TEST_CASE("explicit boundaries") {
    const auto g = FedvrGrid::from_boundaries({-10, -4, -2, -1, 0, 1, 2, 4, 10}, 2, 6);
    CHECK(g.n_b() == 8 * 5 - 1);
    for (int i = 1; i < g.n_b(); ++i) CHECK(g.nodes()[i] > g.nodes()[i - 1]);
}

TEST_CASE("DVR orthonormality under the grid quadrature") {
    const auto g = FedvrGrid::uniform(6, 2, 6, 6);
    double worst = 0.0;
    for (int p = 0; p < g.n_b(); ++p)
        for (int q = 0; q < g.n_b(); ++q) {
            double s = 0.0;
            for (int e = 0; e < g.n_elements(); ++e)
                for (std::size_t m = 0; m < g.element_nodes(e).size(); ++m) {
                    const double x = g.element_nodes(e)[m];
                    s += g.element_weights(e)[m] * g.basis_value(p, x) * g.basis_value(q, x);
                }
            worst = std::max(worst, std::abs(s - (p == q ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-13);
}

TEST_CASE("basis values at nodes are cardinal") {
    const auto g = FedvrGrid::uniform(6, 2, 6, 5);
    for (int p = 0; p < g.n_b(); ++p) {
        const auto vals = g.basis_values(g.nodes()[p]);
        for (const auto& [q, v] : vals) {
            const double expect = q == p ? 1.0 / std::sqrt(g.weights()[p]) : 0.0;
            CHECK(std::abs(v - expect) < 1e-12);
        }
    }
    CHECK(g.basis_value(0, 6.5) == 0.0);
}

TEST_CASE("kinetic matrix structure") {
    const auto g = FedvrGrid::uniform(15, 10, 30, 8);
    const auto t = kinetic_matrix(g);
    CHECK((t - t.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int p = 0; p < g.n_b(); ++p)
        for (int q = 0; q < g.n_b(); ++q) {
            const int ep = g.element_of(p), eq = g.element_of(q);
            const bool p_bridge = g.kinds()[p] == FunctionKind::bridge;
            const bool q_bridge = g.kinds()[q] == FunctionKind::bridge;
            const int ep_hi = ep + (p_bridge ? 1 : 0), eq_hi = eq + (q_bridge ? 1 : 0);
            const bool share = !(ep_hi < eq || eq_hi < ep);
            if (!share) CHECK(t(p, q) == 0.0);
        }
}

TEST_CASE("kinetic energy of a Gaussian") {
    // psi = exp(-x^2/2): <psi|T|psi> / <psi|psi> = 1/4.
    const auto g = FedvrGrid::uniform(12, 4, 12, 10);
    Eigen::VectorXd c(g.n_b());
    for (int p = 0; p < g.n_b(); ++p) c(p) = std::exp(-0.5 * g.nodes()[p] * g.nodes()[p]) * std::sqrt(g.weights()[p]);
    const auto t = kinetic_matrix(g);
    CHECK(std::abs(c.dot(t * c) / c.squaredNorm() - 0.25) < 1e-9);
}

TEST_CASE("harmonic oscillator spectrum") {
    const auto g = FedvrGrid::uniform(12, 4, 12, 14);
    Eigen::MatrixXd h = kinetic_matrix(g);
    h.diagonal() += diagonal_potential(g, [](double x) { return 0.5 * x * x; });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    for (int n = 0; n < 5; ++n) CHECK(std::abs(es.eigenvalues()(n) - (n + 0.5)) < 1e-8);
}

TEST_CASE("soft-Coulomb ground state against finite differences") {
    auto v = [](double x) { return -2.0 / std::sqrt(x * x + 1.0); };
    const auto g = FedvrGrid::uniform(15, 10, 30, 8);
    Eigen::MatrixXd h = kinetic_matrix(g);
    h.diagonal() += diagonal_potential(g, v);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double ref = oracle::fd_lowest_extrapolated(v, 15.0, 6000);
    CHECK(std::abs(es.eigenvalues()(0) - ref) < 1e-6);
}

TEST_CASE("diagonal potential") {
    const auto g = FedvrGrid::uniform(40, 10, 40, 7);
    const auto x = diagonal_potential(g, [](double y) { return y; });
    for (int p = 0; p < g.n_b(); ++p) CHECK(x(p) == g.nodes()[p]);
    const auto v = diagonal_potential(g, [](double y) { return nuclear_potential(PotentialSpec::atom(2.0), y); });
    const int mid = g.n_b() / 2;
    CHECK(g.nodes()[mid] == 0.0);
    CHECK(v(mid) == doctest::Approx(-2.0));
    const auto cap = diagonal_potential(g, [](double y) { return cap_value(y, 20.0, 40.0); });
    for (int p = 0; p < g.n_b(); ++p)
        if (std::abs(g.nodes()[p]) <= 20.0) CHECK(cap(p) == 0.0);
    CHECK(cap_value(40.0, 20.0, 40.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(diagonal_potential(g, [&g](double y) { return 1.0 / (y - g.nodes()[3]); }), ConfigError);
}

TEST_CASE("raw interaction has N_b^2 nonzeros") {
    const auto g = oracle::tiny_grid();
    const auto w = oracle::raw_two_electron(g);
    std::size_t nnz = 0;
    for (double v : w.v) nnz += v != 0.0;
    CHECK(nnz == static_cast<std::size_t>(g.n_b()) * g.n_b());
}

}
