#include <doctest.h>

#include <string>

#include "tdgasci/errors.hpp"
#include "tdgasci/scenario.hpp"

using namespace tdgasci;

namespace {

const char* kBase = R"([run]
name = unit

[grid]
x_s = 15
x_c = 10
elements = 30
n_g = 8

[potential]
kind = atom
Z = 2

[system]
electrons = 2
)";

std::string with(const std::string& extra) { return std::string(kBase) + extra; }

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("defaults and basic fields") {
    const Scenario s = parse_scenario_text(kBase);
    CHECK(s.name == "unit");
    CHECK(s.grid.elements == 30);
    CHECK(s.grid.n_g == 8);
    CHECK(s.potential.kind == PotentialKind::atom);
    CHECK(s.n_el == 2);
    CHECK(s.gas.scheme == GasScheme::fci);
    CHECK(s.orbitals.kind == OrbitalKind::p1);
    CHECK_FALSE(s.has_pulse);
    CHECK_FALSE(s.use_cap);
    CHECK(s.output_dir == "out/unit");
}

TEST_CASE("cas_star shorthand equals the long form") {
    const Scenario a = parse_scenario_text(with("[gas]\ncas_star = { frozen = 1, active_k = 6 }\n"));
    const Scenario b = parse_scenario_text(with("[gas]\nscheme = cas_star\nfrozen = 1\nactive_k = 6\n"));
    CHECK(a.gas.scheme == GasScheme::cas_star);
    CHECK(a.gas.frozen == 1);
    CHECK(a.gas.active_k == 6);
    CHECK(a.gas.make(4, 209).describe() == b.gas.make(4, 209).describe());
    CHECK_THROWS_AS(parse_scenario_text(with("[gas]\ncas_star = { frozen = 1 }\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[gas]\ncas_star = { frozen = 0, active = 2 }\n")), ConfigError);
}

TEST_CASE("raw GAS patterns") {
    const Scenario s = parse_scenario_text(with("[gas]\nscheme = raw\nboundaries = 1, 5\npatterns = 2 0; 1 1\n"));
    REQUIRE(s.gas.scheme == GasScheme::raw);
    CHECK(s.gas.boundaries == std::vector<int>{1, 5});
    REQUIRE(s.gas.patterns.size() == 2);
    CHECK(s.gas.patterns[1] == std::vector<int>{1, 1});
}

TEST_CASE("diatomic potential and R scan list") {
    const Scenario s = parse_scenario_text(std::string(R"([grid]
x_s = 50
x_c = 10
elements = 50
n_g = 8
[potential]
kind = diatomic
Z1 = 3
Z2 = 1
R = 3
[system]
electrons = 2
[scan]
R = 1.5, 2, 3, 6
)"));
    CHECK(s.potential.kind == PotentialKind::diatomic);
    CHECK(s.potential.R == 3.0);
    CHECK(s.scan_r == std::vector<double>{1.5, 2.0, 3.0, 6.0});
}

TEST_CASE("pulse, propagation and observables") {
    const Scenario s = parse_scenario_text(with(R"(
[pulse]
shape = half_cycle
F0 = 0.001
sigma = 0.1
t0 = 1
[propagation]
dt = 0.05
t_final = 10
r_cap = 12
field_at = step_end
[observables]
r_ion = 11
dipole_spectrum = yes
density_x = 0, 1, 2
[scan]
omega_min = 0.4
omega_max = 2
omega_points = 5
)"));
    CHECK(s.has_pulse);
    CHECK(s.pulse.shape == PulseShape::half_cycle);
    CHECK(s.pulse.sigma == 0.1);
    CHECK(s.use_cap);
    CHECK(s.r_cap == 12.0);
    CHECK(s.propagation.field_at == FieldEvaluation::step_end);
    CHECK(s.observables.dipole_spectrum);
    CHECK(s.observables.density_x.size() == 3);
    CHECK(s.scan_omega_points == 5);
}

TEST_CASE("cross-field validation") {
    CHECK_THROWS_AS(parse_scenario_text(with("[propagation]\nr_cap = 5\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[propagation]\nr_cap = 15\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[observables]\nr_ion = 9\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[scan]\nomega_min = 2\nomega_max = 1\nomega_points = 3\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("[grid]\nx_s = 10\nx_c = 12\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[gas]\nscheme = ras\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[orbitals]\nkind = p9\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[potential]\nkind = triatomic\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[pulse]\nsigma = 0\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[observables]\nasymmetry = maybe\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text(with("[grid]\nelements = many\n")), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("[grid\nx_s = 1\n"), ConfigError);
    CHECK_NOTHROW(parse_scenario_text(with("[propagation]\nr_cap = 10\n[observables]\nr_ion = 10\n")));
}

TEST_CASE("content hash is deterministic and content sensitive") {
    const Scenario a = parse_scenario_text(kBase);
    const Scenario b = parse_scenario_text(kBase, "other");
    const Scenario c = parse_scenario_text(with("\n"));
    CHECK(a.hash == b.hash);
    CHECK(a.hash_hex() == b.hash_hex());
    CHECK(a.hash != c.hash);
    CHECK(a.hash_hex().size() <= 16);
}

TEST_CASE("shipped scenarios parse") {
    for (const char* f : {"he_fci.cfg", "he_cis.cfg", "be_cas2_41_p1.cfg", "be_cas2_41_p2.cfg", "he_photoelectron.cfg",
                          "lih_eta.cfg", "h2_eta_control.cfg", "lih_scan.cfg", "he_ionization_scan.cfg", "be_kick_cis.cfg"}) {
        CAPTURE(f);
        CHECK_NOTHROW(load_scenario(std::string(TDGASCI_SCENARIO_DIR) + "/" + f));
    }
    CHECK_THROWS_AS(load_scenario(std::string(TDGASCI_SCENARIO_DIR) + "/does_not_exist.cfg"), ConfigError);
}

}
