#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdgasci/gas.hpp"
#include "tdgasci/model.hpp"
#include "tdgasci/orbitals.hpp"
#include "tdgasci/propagate.hpp"

namespace tdgasci {

struct GridBlock {
    double x_s = 15.0;
    double x_c = 10.0;
    int elements = 30;
    int n_g = 8;
    std::vector<double> boundaries;  // optional explicit partition
};

enum class GasScheme { fci, sae, cas_star, raw };

struct GasBlock {
    GasScheme scheme = GasScheme::fci;
    int frozen = 0;
    int active_k = 1;
    int two_ms = 0;
    std::vector<int> boundaries;
    std::vector<std::vector<int>> patterns;

    GasSpec make(int n_el, int n_b) const;
};

struct OrbitalBlock {
    OrbitalKind kind = OrbitalKind::p1;
    OrthoMode ortho = OrthoMode::gram_schmidt;
    GasBlock natural_gas;  // central-only CI used to build natural orbitals
};

struct ObservableBlock {
    double r_ion = 0.0;  // 0 disables the momentum spectrum
    double k_max = 0.0;  // 0 selects pi / (mean node spacing)
    int k_points = 2048;
    double e_max = 3.0;
    int e_points = 600;
    bool dipole_spectrum = false;
    int zero_padding = 4;
    bool asymmetry = false;  // run phi_cep and phi_cep + pi, report eta
    std::vector<double> density_x;  // optional density evaluation points for the final state
};

struct Scenario {
    std::string name;
    std::string source;  // file content
    std::uint64_t hash = 0;

    GridBlock grid;
    PotentialSpec potential;
    int n_el = 2;
    OrbitalBlock orbitals;
    GasBlock gas;
    bool has_pulse = false;
    PulseSpec pulse;
    PropagatorConfig propagation;
    bool use_cap = false;
    double r_cap = 0.0;
    ObservableBlock observables;
    std::vector<double> scan_r;
    // Photon-energy scan for propagate: yield per omega on a uniform grid.
    double scan_omega_min = 0.0;
    double scan_omega_max = 0.0;
    int scan_omega_points = 0;

    std::string output_dir = "out";
    int threads = 0;  // 0: all cores
    double memory_budget_gb = 3.0;
    bool allow_direct = false;
    double max_determinants = 2e8;

    std::string hash_hex() const;
    void validate() const;
};

Scenario parse_scenario_text(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);

}  // namespace tdgasci
