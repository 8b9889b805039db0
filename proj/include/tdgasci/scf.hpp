#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdgasci/fedvr.hpp"
#include "tdgasci/model.hpp"

namespace tdgasci {

enum class HfRegion { central, full };

struct ScfOptions {
    double density_tol = 1e-10;
    double energy_tol = 1e-12;
    int max_iterations = 1000;
    double mixing = 0.5;
    bool diis = true;
    int diis_size = 8;
    // Scales the electron-electron interaction; 0 gives the non-interacting limit.
    double ee_scale = 1.0;
};

// Closed-shell restricted Hartree-Fock solution expressed in a subset of DVR functions.
struct HfResult {
    std::vector<int> basis;            // global DVR indices spanned by the solution
    Eigen::MatrixXd coefficients;      // basis.size() x basis.size(), columns are orbitals
    Eigen::VectorXd orbital_energies;  // ascending
    Eigen::VectorXd populations;       // electrons per DVR function
    double energy = 0.0;               // electronic energy
    double last_energy_change = 0.0;
    int n_occ = 0;
    int iterations = 0;

    // Node density n(x_p) = population_p / w_p on the spanned functions.
    Eigen::VectorXd node_density(const FedvrGrid& grid) const;
    // Orbitals embedded in the full N_b DVR basis.
    Eigen::MatrixXd embedded(const FedvrGrid& grid) const;
    // Tabular text: node, then one column per orbital (values chi-weighted: c_p / sqrt(w_p)).
    std::string orbital_table(const FedvrGrid& grid, int n_orbitals) const;
};

HfResult solve_hf(const FedvrGrid& grid, const PotentialSpec& potential, int n_el, HfRegion region,
                  const ScfOptions& options = {});

// Hartree potential of a closed-shell HF density, evaluable anywhere.
class HartreePotential {
public:
    HartreePotential() = default;
    HartreePotential(double s, std::vector<double> x, std::vector<double> populations);

    double operator()(double x) const;
    double electrons() const;
    bool is_zero() const { return x_.empty(); }

private:
    double s_ = 1.0;
    std::vector<double> x_;
    std::vector<double> pop_;
};

// Hartree potential of the (n_el - 2)-electron HF ground state; identically zero for n_el == 2.
HartreePotential hartree_potential_minus2(const FedvrGrid& grid, const PotentialSpec& potential, int n_el,
                                          HfRegion region = HfRegion::central, const ScfOptions& options = {});

}  // namespace tdgasci
