#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "oracles.hpp"
#include "tdgasci/errors.hpp"
#include "tdgasci/integrals.hpp"

using namespace tdgasci;

namespace {

RotationMatrix random_rotation(const FedvrGrid& g, unsigned seed) {
    return assemble_rotation(g, OrbitalKind::hf_canonical, oracle::random_orthogonal(g.n_c(), seed));
}

Eigen::MatrixXd brute_one_electron(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& u) {
    const int n = static_cast<int>(raw.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(a, b) += u(i, a) * raw(i, j) * u(j, b);
    return out;
}

}  // namespace

TEST_SUITE("integrals") {

TEST_CASE("one-electron transform matches the dense double sum") {
    const auto g = FedvrGrid::uniform(4, 2, 4, 5);
    CHECK(g.n_b() == 15);
    const auto pot = PotentialSpec::atom(2);
    const auto rot = random_rotation(g, 7);
    const Eigen::MatrixXd raw = raw_one_electron(g, pot);
    const Eigen::MatrixXd h = transform_one_electron(raw, rot);
    const Eigen::MatrixXd ref = brute_one_electron(raw, rot.dense());
    CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const auto ints = IntegralStore::build(g, pot, rot);
    CHECK((ints.h() - ref).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(g.n_b(), g.n_b());
    for (int p = 0; p < g.n_b(); ++p) x(p, p) = g.nodes()[p];
    CHECK((ints.dipole() - brute_one_electron(x, rot.dense())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("identity rotation reproduces raw integrals") {
    const auto g = oracle::tiny_grid();
    const auto pot = PotentialSpec::atom(2);
    const auto rot = identity_rotation(g);
    const Eigen::MatrixXd raw = raw_one_electron(g, pot);
    const Eigen::MatrixXd u = rot.dense();
    CHECK((transform_one_electron(raw, rot) - u.transpose() * raw * u).cwiseAbs().maxCoeff() == 0.0);
    const auto ints = IntegralStore::build(g, pot, rot);
    const int nc = g.n_c();
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
            for (int c = 0; c < nc; ++c)
                for (int d = 0; d < nc; ++d) {
                    const double expect = (a == b && c == d)
                                              ? ee_interaction(1.0, g.nodes()[g.central()[a]], g.nodes()[g.central()[c]])
                                              : 0.0;
                    CHECK(ints.w(a, b, c, d) == doctest::Approx(expect).epsilon(1e-15));
                }
}

TEST_CASE("two-electron transform matches brute-force four-index transform") {
    const auto g = oracle::tiny_grid();
    REQUIRE(g.n_b() <= 12);
    const auto pot = PotentialSpec::atom(2);
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto rot = random_rotation(g, seed);
        const auto ref = oracle::four_index_transform(oracle::raw_two_electron(g), rot.dense());
        const auto ints = IntegralStore::build(g, pot, rot);
        const int n = g.n_b();
        double worst = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) worst = std::max(worst, std::abs(ints.w(a, b, c, d) - ref(a, b, c, d)));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("direct mode agrees with stored integrals") {
    const auto g = oracle::tiny_grid();
    const auto pot = PotentialSpec::atom(2);
    const auto rot = random_rotation(g, 4);
    IntegralOptions o;
    const double need = IntegralStore::estimate_bytes(g.n_c(), g.n_b() - g.n_c());
    const double central = 8.0 * static_cast<double>(IntegralStore::packed_size(g.n_c()));
    o.memory_budget_bytes = need - 0.5 * central;
    CHECK_THROWS_AS(IntegralStore::build(g, pot, rot, o), ResourceError);
    o.allow_direct = true;
    const auto direct = IntegralStore::build(g, pot, rot, o);
    CHECK(direct.direct());
    o.memory_budget_bytes = 0.5 * (need - central);
    CHECK_THROWS_AS(IntegralStore::build(g, pot, rot, o), ResourceError);
    const auto stored = IntegralStore::build(g, pot, rot);
    CHECK(!stored.direct());
    const int n = g.n_b();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) CHECK(std::abs(direct.w(a, b, c, d) - stored.w(a, b, c, d)) < 1e-13);
}

TEST_CASE("symmetries, positivity and structural zeros") {
    const auto g = FedvrGrid::uniform(8, 4, 8, 5);
    const auto rot = random_rotation(g, 9);
    const auto ints = IntegralStore::build(g, PotentialSpec::atom(3), rot);
    const int nc = g.n_c(), n = g.n_b();
    for (int a = 0; a < nc; ++a) CHECK(ints.w(a, a, a, a) >= 0.0);
    for (int a = 0; a < nc; a += 3)
        for (int b = 0; b < nc; b += 2)
            for (int c = 0; c < nc; c += 3)
                for (int d = 0; d < nc; d += 2) {
                    const double v = ints.w(a, b, c, d);
                    CHECK(v == ints.w(b, a, c, d));
                    CHECK(v == ints.w(a, b, d, c));
                    CHECK(v == ints.w(c, d, a, b));
                }
    for (int a = nc; a < n; ++a)
        for (int c = nc; c < n; ++c) {
            CHECK(ints.w(a, a, c, c) == ee_interaction(1.0, ints.outer_node(a), ints.outer_node(c)));
            if (a != c) CHECK(ints.w(a, c, a, c) == 0.0);
        }
    CHECK((ints.h() - ints.h().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ints.dipole() - ints.dipole().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ints.w_mixed().rows() == n - nc);
    CHECK(ints.w_central().size() == IntegralStore::packed_size(nc));
}

TEST_CASE("packed storage size") {
    // Canonical quadruples counted directly for small n, then the N_c = 139 value.
    for (int n = 1; n <= 9; ++n) {
        std::size_t count = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b <= a; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d <= c; ++d)
                        if (IntegralStore::pair_index(a, b) >= IntegralStore::pair_index(c, d)) ++count;
        CHECK(IntegralStore::packed_size(n) == count);
    }
    CHECK(IntegralStore::packed_size(139) == 47341315u);
    CHECK(IntegralStore::pair_index(3, 5) == IntegralStore::pair_index(5, 3));
    CHECK(IntegralStore::pair_index(0, 0) == 0u);
}

TEST_CASE("partner lists follow the one-electron matrix") {
    const auto g = oracle::tiny_grid();
    const auto ints = IntegralStore::build(g, PotentialSpec::atom(2), random_rotation(g, 5));
    for (int a = 0; a < g.n_b(); ++a) {
        std::vector<int> expect;
        for (int b = 0; b < g.n_b(); ++b)
            if (b != a && std::abs(ints.h()(a, b)) > 1e-14) expect.push_back(b);
        CHECK(ints.h_partners(a) == expect);
    }
}

TEST_CASE("cap and central-only stores") {
    const auto g = FedvrGrid::uniform(40, 10, 40, 7);
    auto ints = IntegralStore::build(g, PotentialSpec::atom(2), identity_rotation(g));
    CHECK_THROWS_AS(ints.set_cap(g, 5.0), ConfigError);
    ints.set_cap(g, 20.0);
    for (int a = 0; a < ints.n_orbitals(); ++a) {
        if (ints.is_central(a)) {
            CHECK(ints.cap()(a) == 0.0);
        } else {
            CHECK(ints.cap()(a) == doctest::Approx(cap_value(ints.outer_node(a), 20.0, 40.0)));
        }
    }
    IntegralOptions o;
    o.central_only = true;
    const auto c = IntegralStore::build(g, PotentialSpec::atom(2), identity_rotation(g), o);
    CHECK(c.n_orbitals() == g.n_c());
}

TEST_CASE("binary cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "tdgasci_cache_test";
    std::filesystem::remove_all(dir);
    const auto g = oracle::tiny_grid();
    const auto rot = random_rotation(g, 6);
    IntegralOptions o;
    o.cache_dir = dir.string();
    const auto a = IntegralStore::build(g, PotentialSpec::atom(2), rot, o);
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
    const auto b = IntegralStore::build(g, PotentialSpec::atom(2), rot, o);
    CHECK(a.content_hash() == b.content_hash());
    CHECK(a.w_central() == b.w_central());
    CHECK(a.w_mixed() == b.w_mixed());
    CHECK(a.h() == b.h());
    const auto c = IntegralStore::build(g, PotentialSpec::atom(3), rot, o);
    CHECK(c.content_hash() != a.content_hash());
    std::filesystem::remove_all(dir);
}

}
