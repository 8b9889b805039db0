#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdgasci/gas.hpp"
#include "tdgasci/integrals.hpp"

namespace tdgasci {

using cvec = Eigen::VectorXcd;

// Compressed sparse rows holding both triangles.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::uint64_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
    Eigen::MatrixXd to_dense() const;
    // Coordinate text dump "i j value" (0-based), one entry per line.
    std::string to_coordinate_text() const;
};

struct SparseHamiltonian {
    CsrMatrix h0;
    CsrMatrix dipole;
    Eigen::VectorXd cap;  // determinant-diagonal CAP; empty when absent
    Eigen::VectorXd diagonal;
    double nuclear_offset = 0.0;
    std::uint64_t space_hash = 0;

    std::size_t dim() const { return h0.n; }
    bool has_cap() const { return cap.size() > 0; }
};

struct AssembleOptions {
    bool with_dipole = true;
    double drop_tol = 1e-14;
};

// Slater-Condon matrix element <I|H0|J> (or of the dipole operator when dipole is true).
double matrix_element(const DeterminantSpace& space, const IntegralStore& ints, std::size_t i, std::size_t j,
                      bool dipole = false);

SparseHamiltonian assemble(const DeterminantSpace& space, const IntegralStore& ints,
                           const AssembleOptions& options = {});

// Determinant-diagonal CAP from the per-orbital CAP values stored in ints.
Eigen::VectorXd cap_matrix(const DeterminantSpace& space, const IntegralStore& ints);

// out = (H0 + F D - i CAP) c
void sigma(const SparseHamiltonian& h, double field, bool use_cap, const cvec& c, cvec& out);
// out = H0 c for real vectors.
void sigma_real(const SparseHamiltonian& h, const Eigen::VectorXd& c, Eigen::VectorXd& out);
// out = D c
void dipole_apply(const SparseHamiltonian& h, const cvec& c, cvec& out);

// Parity of moving spin orbital so past the occupied ones that precede it in the
// canonical order (all alpha spin orbitals by spatial index, then all beta).
int fermion_sign(const std::uint64_t* det, int n_words, int spin_orbital);

}  // namespace tdgasci
