#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdgasci/fedvr.hpp"
#include "tdgasci/model.hpp"
#include "tdgasci/orbitals.hpp"

namespace tdgasci {

struct IntegralOptions {
    double memory_budget_bytes = 3.0e9;
    // Above budget, evaluate central integrals on the fly instead of refusing.
    bool allow_direct = false;
    double ee_scale = 1.0;
    // Keep only the rotated central orbitals (drops the outer DVR functions).
    bool central_only = false;
    // Directory for the binary integral cache; empty disables caching.
    std::string cache_dir;
};

// Rotated-basis integrals. Orbitals [0, n_central) are rotated central orbitals,
// the rest are outer DVR functions. Two-electron integrals are kept as
//   w_central: (ab|cd) over central orbitals, packed by 8-fold symmetry;
//   w_mixed:   (ab|oo) for outer o and central pair (a,b), outer index first;
// plus the raw node-pair table for outer-outer pairs.
class IntegralStore {
public:
    static IntegralStore build(const FedvrGrid& grid, const PotentialSpec& potential, const RotationMatrix& rotation,
                               const IntegralOptions& options = {});

    int n_orbitals() const { return n_orb_; }
    int n_central() const { return n_c_; }
    bool is_central(int a) const { return a < n_c_; }
    bool direct() const { return direct_; }

    const Eigen::MatrixXd& h() const { return h_; }
    const Eigen::MatrixXd& dipole() const { return d_; }
    // Per-orbital CAP strength; zero on central orbitals.
    const Eigen::VectorXd& cap() const { return cap_; }
    void set_cap(const FedvrGrid& grid, double r_cap);
    // Node coordinate of an outer orbital.
    double outer_node(int a) const { return outer_x_[a - n_c_]; }

    // Chemist-notation (ab|cd).
    double w(int a, int b, int c, int d) const;

    static std::size_t pair_index(int a, int b) {
        return a >= b ? static_cast<std::size_t>(a) * (a + 1) / 2 + b : static_cast<std::size_t>(b) * (b + 1) / 2 + a;
    }
    static std::size_t packed_size(int n_c) {
        const std::size_t m = static_cast<std::size_t>(n_c) * (n_c + 1) / 2;
        return m * (m + 1) / 2;
    }
    static double estimate_bytes(int n_c, int n_outer);

    const std::vector<double>& w_central() const { return w_central_; }
    const Eigen::MatrixXd& w_mixed() const { return w_mixed_; }
    const Eigen::MatrixXd& w_outer() const { return w_outer_; }
    std::uint64_t content_hash() const { return hash_; }

    // Orbitals with nonzero one-electron coupling h(a, .) (excluding a itself), ascending.
    const std::vector<int>& h_partners(int a) const { return h_partners_[a]; }
    const std::vector<int>& dipole_partners(int a) const { return d_partners_[a]; }

private:
    double central_direct(int a, int b, int c, int d) const;
    void finalize_partners();
    bool load_cache(const std::string& path);
    void save_cache(const std::string& path) const;

    int n_orb_ = 0;
    int n_c_ = 0;
    bool direct_ = false;
    Eigen::MatrixXd h_;
    Eigen::MatrixXd d_;
    Eigen::VectorXd cap_;
    std::vector<double> outer_x_;
    std::vector<double> w_central_;
    Eigen::MatrixXd w_mixed_;
    Eigen::MatrixXd w_outer_;
    // Kept for on-the-fly evaluation in direct mode.
    Eigen::MatrixXd b_;
    Eigen::MatrixXd w_cc_nodes_;
    std::uint64_t hash_ = 0;
    std::vector<std::vector<int>> h_partners_;
    std::vector<std::vector<int>> d_partners_;
};

// One-electron transform of a DVR-basis operator into the rotated orbital basis.
Eigen::MatrixXd transform_one_electron(const Eigen::MatrixXd& raw, const RotationMatrix& rotation,
                                       bool central_only = false);

// Raw DVR one-electron Hamiltonian t + v and dipole x.
Eigen::MatrixXd raw_one_electron(const FedvrGrid& grid, const PotentialSpec& potential);

inline double IntegralStore::w(int a, int b, int c, int d) const {
    const bool ab_c = a < n_c_ && b < n_c_;
    const bool cd_c = c < n_c_ && d < n_c_;
    if (ab_c && cd_c) {
        if (direct_) return central_direct(a, b, c, d);
        const std::size_t p = pair_index(a, b);
        const std::size_t q = pair_index(c, d);
        return w_central_[p >= q ? p * (p + 1) / 2 + q : q * (q + 1) / 2 + p];
    }
    const bool ab_o = a == b && a >= n_c_;
    const bool cd_o = c == d && c >= n_c_;
    if (ab_c && cd_o) return w_mixed_(c - n_c_, static_cast<Eigen::Index>(pair_index(a, b)));
    if (ab_o && cd_c) return w_mixed_(a - n_c_, static_cast<Eigen::Index>(pair_index(c, d)));
    if (ab_o && cd_o) return w_outer_(a - n_c_, c - n_c_);
    return 0.0;
}

}  // namespace tdgasci
