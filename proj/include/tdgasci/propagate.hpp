#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdgasci/ci.hpp"
#include "tdgasci/model.hpp"

namespace tdgasci {

enum class FieldEvaluation { midpoint, step_end };

struct PropagatorConfig {
    double dt = 0.05;
    double dtau = 0.1;
    int krylov_dim = 10;
    double itp_tol = 1e-10;
    int max_itp_steps = 100000;
    double t_final = 0.0;
    FieldEvaluation field_at = FieldEvaluation::midpoint;
    int observe_stride = 1;
    int checkpoint_stride = 0;  // 0 disables checkpoints
    std::string checkpoint_path;

    void validate() const;
};

using Apply = std::function<void(const cvec&, cvec&)>;
using ApplyReal = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// v <- exp(-i dt A) v for Hermitian A by Lanczos with full reorthogonalization.
// Returns the Krylov dimension actually used (smaller after breakdown).
int lanczos_exp(const Apply& apply, cvec& v, double dt, int krylov_dim);
// v <- exp(-i dt A) v for general A by Arnoldi.
int arnoldi_exp(const Apply& apply, cvec& v, double dt, int krylov_dim);
// v <- exp(-tau A) v for real symmetric A, shifted by the lowest Ritz value (norm not preserved).
int lanczos_exp_imag(const ApplyReal& apply, Eigen::VectorXd& v, double tau, int krylov_dim);

struct ItpResult {
    double energy = 0.0;
    Eigen::VectorXd state;
    int steps = 0;
    double last_change = 0.0;
};

// Imaginary-time relaxation to the lowest state reachable from seed.
ItpResult itp_ground_state(const SparseHamiltonian& h, const PropagatorConfig& config, const Eigen::VectorXd& seed);
// Normalized unit vector on the determinant with the lowest diagonal energy.
Eigen::VectorXd lowest_diagonal_seed(const SparseHamiltonian& h);

// Single real-time step from t to t + dt; the field is frozen at the midpoint or the step end.
void step(const SparseHamiltonian& h, const std::function<double(double)>& field_of_t, cvec& state, double t,
          const PropagatorConfig& config, bool use_cap);

struct TimeSample {
    double t = 0.0;
    double norm = 0.0;
    double dipole = 0.0;  // <x>
    double energy = 0.0;  // <H0>
    double field = 0.0;
};

struct TimeSeries {
    std::vector<TimeSample> samples;
    std::string to_tsv(const std::string& header_comment) const;
};

using Observer = std::function<void(double t, const cvec& state)>;

// Fixed-step propagation from t = 0 to config.t_final. Samples and observers run every
// observe_stride steps (and at t = 0 and the final time).
TimeSeries run(const SparseHamiltonian& h, const PulseSpec& pulse, cvec& state, const PropagatorConfig& config,
               bool use_cap, const std::vector<Observer>& observers = {}, double t_start = 0.0);

TimeSample measure(const SparseHamiltonian& h, const cvec& state, double t, double field_value);

// Checkpoint: (t, coefficients, space content hash), little-endian binary.
void save_checkpoint(const std::string& path, double t, const cvec& state, std::uint64_t space_hash);
// Throws ConfigError when the stored hash differs from the expected space hash.
double load_checkpoint(const std::string& path, cvec& state, std::uint64_t space_hash);

}  // namespace tdgasci
