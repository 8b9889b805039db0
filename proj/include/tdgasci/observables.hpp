#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdgasci/ci.hpp"
#include "tdgasci/fedvr.hpp"
#include "tdgasci/gas.hpp"
#include "tdgasci/orbitals.hpp"

namespace tdgasci {

// Spin-summed one-particle density matrix rho_pq = sum_sigma <c+_p c_q> in the orbital basis.
struct Rdm {
    Eigen::MatrixXcd rho;
    double trace() const { return std::real(rho.trace()); }
    // Eigenvalues in descending order.
    Eigen::VectorXd occupations() const;
};

// mask (optional, size n_orb): only entries with both orbitals masked are accumulated.
Rdm rdm(const DeterminantSpace& space, const cvec& state, const std::vector<char>& mask = {});
Rdm rdm(const DeterminantSpace& space, const Eigen::VectorXd& state, const std::vector<char>& mask = {});

// Real part of rho transformed back to the DVR functions of the central block (N_c x N_c).
Eigen::MatrixXd central_dvr_density(const Rdm& r, const RotationMatrix& rotation);

// n(x) = sum rho_pq phi_p(x) phi_q(x), orbitals evaluated through the Lobatto shape functions.
std::vector<double> spatial_density(const Rdm& r, const RotationMatrix& rotation, const FedvrGrid& grid,
                                    const std::vector<double>& x);
// Node-quadrature density n(x_p) on every DVR node (outer nodes exact, central via rotation).
Eigen::VectorXd node_density(const Rdm& r, const RotationMatrix& rotation, const FedvrGrid& grid);

// Momentum density from the outer functions with |x_p| > r_ion (plane-wave projection).
std::vector<double> momentum_density(const Rdm& r, const RotationMatrix& rotation, const FedvrGrid& grid, double r_ion,
                                     const std::vector<double>& k);

// Uniform k grid on [-k_max, k_max].
std::vector<double> uniform_grid(double lo, double hi, int n);

struct EnergySpectrum {
    std::vector<double> energy;
    std::vector<double> total;  // P(E) = P+(E) + P-(E)
    std::vector<double> plus;   // emission towards +x
    std::vector<double> minus;  // emission towards -x
    std::string to_tsv(const std::string& header_comment) const;
};

// P(E) from n(k) on a symmetric k grid via E = k^2/2, dk/dE = 1/k (linear interpolation in k).
EnergySpectrum photoelectron_energy_spectrum(const std::vector<double>& k, const std::vector<double>& n_k,
                                             const std::vector<double>& energies);

struct PeakInfo {
    double position = 0.0;  // abscissa of the maximum
    double height = 0.0;
    double center = 0.0;  // midpoint of the half-maximum crossings
};
PeakInfo main_peak(const std::vector<double>& x, const std::vector<double>& y, double x_min = -1e300,
                   double x_max = 1e300);

// P = 1 - <Psi|Psi>.
double ionization_probability(const cvec& state);

struct DipoleSpectrum {
    std::vector<double> omega;
    std::vector<double> power;
    std::string to_tsv(const std::string& header_comment) const;
};

// |F{window * (x - mean)}|^2 with Blackman window (0.42, 0.5, 0.08) and zero padding.
DipoleSpectrum dipole_spectrum(const std::vector<double>& t, const std::vector<double>& x, int zero_padding = 4);

// Local maxima of S(omega) above a relative threshold, ascending in omega.
std::vector<PeakInfo> spectrum_peaks(const DipoleSpectrum& s, double omega_min, double omega_max,
                                     double rel_threshold);

// Local maxima in [omega_min, omega_max] exceeding `contrast` times the median of S over
// [omega - half_width, omega + half_width].
std::vector<PeakInfo> prominent_peaks(const DipoleSpectrum& s, double omega_min, double omega_max,
                                      double half_width, double contrast);

// eta = P_minus / P_plus.
double emission_asymmetry(double p_minus, double p_plus);

}  // namespace tdgasci
