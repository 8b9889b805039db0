#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdgasci/fedvr.hpp"
#include "tdgasci/model.hpp"
#include "tdgasci/scf.hpp"

namespace tdgasci {

enum class OrbitalKind { none, identity, hf_canonical, p1, p2, natural };

OrbitalKind parse_orbital_kind(const std::string& name);
std::string to_string(OrbitalKind kind);

// How the pseudo-orbital virtuals are made orthogonal to the occupied HF orbitals.
enum class OrthoMode {
    // Diagonalize in the full central block, drop the N_el/2 lowest eigenvectors and
    // Gram-Schmidt the remainder against the occupied orbitals in energy order.
    gram_schmidt,
    // Diagonalize the operator inside the orthogonal complement of the occupied span.
    projector,
};

// Partial rotation of the DVR basis. Orbital index layout: rotated central orbitals
// first (columns of b), then the untouched outer DVR functions in node order.
struct RotationMatrix {
    OrbitalKind kind = OrbitalKind::none;
    int n_b = 0;
    std::vector<int> central;  // DVR functions mixed by b
    std::vector<int> outer;    // DVR functions passed through
    Eigen::MatrixXd b;         // central.size() x central.size(), columns are orbitals
    Eigen::VectorXd labels;    // pseudo-energies or natural occupations of the central orbitals

    int n_orbitals() const { return n_b; }
    int n_central() const { return static_cast<int>(central.size()); }
    // DVR index of an outer orbital (orbital >= n_central()).
    int outer_function(int orbital) const { return outer[orbital - n_central()]; }
    // Full N_b x N_b transform; rows are DVR functions, columns orbitals.
    Eigen::MatrixXd dense() const;
    double orthogonality_error() const;
    // <x^2> of central orbital k.
    double second_moment(const FedvrGrid& grid, int k) const;
    // Central orbitals on the node grid: x, then phi_k(x_p) for k < n.
    std::string orbital_table(const FedvrGrid& grid, int n) const;
};

// Embeds a central block; the central set is grid.central().
RotationMatrix assemble_rotation(const FedvrGrid& grid, OrbitalKind kind, const Eigen::MatrixXd& central_block,
                                 const Eigen::VectorXd& labels = {});
// No rotated region at all: every orbital is a DVR function, in node order.
RotationMatrix unrotated(const FedvrGrid& grid);
// Identity central block (orbital order central-then-outer).
RotationMatrix identity_rotation(const FedvrGrid& grid);

RotationMatrix build_hf_canonical(const FedvrGrid& grid, const HfResult& hf);
RotationMatrix build_p1(const FedvrGrid& grid, const PotentialSpec& potential, const HfResult& hf,
                        OrthoMode mode = OrthoMode::gram_schmidt);
RotationMatrix build_p2(const FedvrGrid& grid, const PotentialSpec& potential, const HfResult& hf,
                        const HartreePotential& v_h, OrthoMode mode = OrthoMode::gram_schmidt);
// rho_central: spin-summed 1-RDM over grid.central() DVR functions.
RotationMatrix build_natural(const FedvrGrid& grid, const Eigen::MatrixXd& rho_central);

// Applies the sign convention (largest-magnitude coefficient positive) to every column.
void normalize_signs(Eigen::MatrixXd& c);

}  // namespace tdgasci
