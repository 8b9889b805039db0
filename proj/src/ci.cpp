#include "tdgasci/ci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

struct Difference {
    int level = 0;
    int holes[2] = {-1, -1};      // in the bra-side determinant only
    int particles[2] = {-1, -1};  // in the ket-side determinant only
};

// Holes: spin orbitals occupied in a but not b. Particles: occupied in b but not a.
Difference difference(const std::uint64_t* a, const std::uint64_t* b, int n_words) {
    Difference d;
    int nh = 0, np = 0;
    for (int s = 0; s < 2; ++s)
        for (int w = 0; w < n_words; ++w) {
            std::uint64_t x = a[s * n_words + w] & ~b[s * n_words + w];
            std::uint64_t y = b[s * n_words + w] & ~a[s * n_words + w];
            while (x) {
                const int so = 2 * ((w << 6) + std::countr_zero(x)) + s;
                if (nh < 2) d.holes[nh] = so;
                ++nh;
                x &= x - 1;
            }
            while (y) {
                const int so = 2 * ((w << 6) + std::countr_zero(y)) + s;
                if (np < 2) d.particles[np] = so;
                ++np;
                y &= y - 1;
            }
        }
    d.level = nh;
    return d;
}

// Phase of c^dagger_a c_i acting on det; det is updated in place.
int apply_excitation(std::uint64_t* det, int n_words, int i, int a) {
    int sign = fermion_sign(det, n_words, i);
    DeterminantSpace::flip(det, n_words, i);
    sign *= fermion_sign(det, n_words, a);
    DeterminantSpace::flip(det, n_words, a);
    return sign;
}

double diagonal_element(const std::vector<int>& occ, const IntegralStore& ints, bool dipole) {
    double e = 0.0;
    const auto& one = dipole ? ints.dipole() : ints.h();
    for (int k : occ) e += one(k >> 1, k >> 1);
    if (dipole) return e;
    for (std::size_t x = 0; x < occ.size(); ++x) {
        const int k = occ[x] >> 1;
        for (std::size_t y = x + 1; y < occ.size(); ++y) {
            const int l = occ[y] >> 1;
            e += ints.w(k, k, l, l);
            if ((occ[x] & 1) == (occ[y] & 1)) e -= ints.w(k, l, l, k);
        }
    }
    return e;
}

}  // namespace

int fermion_sign(const std::uint64_t* det, int n_words, int so) {
    const int p = so >> 1;
    int count = 0;
    const std::uint64_t* spin_words = det + (so & 1) * n_words;
    if (so & 1)
        for (int w = 0; w < n_words; ++w) count += std::popcount(det[w]);
    for (int w = 0; w < (p >> 6); ++w) count += std::popcount(spin_words[w]);
    const std::uint64_t mask = (p & 63) ? ((1ULL << (p & 63)) - 1) : 0ULL;
    count += std::popcount(spin_words[p >> 6] & mask);
    return (count & 1) ? -1 : 1;
}

double matrix_element(const DeterminantSpace& space, const IntegralStore& ints, std::size_t i, std::size_t j,
                      bool dipole) {
    if (i > j) std::swap(i, j);
    const int nw = space.n_words();
    const std::uint64_t* ket = space.det(i);
    const std::uint64_t* bra = space.det(j);
    const Difference d = difference(ket, bra, nw);
    if (d.level > 2) return 0.0;
    std::vector<int> occ;
    if (d.level == 0) {
        space.occupied(ket, occ);
        return diagonal_element(occ, ints, dipole);
    }
    std::uint64_t work[64];
    std::vector<std::uint64_t> big;
    std::uint64_t* tmp = work;
    if (space.det_words() > 64) {
        big.resize(space.det_words());
        tmp = big.data();
    }
    std::copy(ket, ket + space.det_words(), tmp);
    if (d.level == 1) {
        const int hi = d.holes[0];
        const int pa = d.particles[0];
        const int phase = apply_excitation(tmp, nw, hi, pa);
        const int a = pa >> 1, r = hi >> 1;
        if (dipole) return phase * ints.dipole()(a, r);
        double v = ints.h()(a, r);
        space.occupied(ket, occ);
        for (int k_so : occ) {
            if (k_so == hi) continue;
            const int k = k_so >> 1;
            v += ints.w(a, r, k, k);
            if ((k_so & 1) == (hi & 1)) v -= ints.w(a, k, k, r);
        }
        return phase * v;
    }
    if (dipole) return 0.0;
    int i1 = d.holes[0], i2 = d.holes[1];
    int a1 = d.particles[0], a2 = d.particles[1];
    if ((i1 & 1) != (a1 & 1) || (i2 & 1) != (a2 & 1)) std::swap(a1, a2);
    int phase = apply_excitation(tmp, nw, i1, a1);
    phase *= apply_excitation(tmp, nw, i2, a2);
    const int a = a1 >> 1, r = i1 >> 1, b = a2 >> 1, s = i2 >> 1;
    double v = ints.w(a, r, b, s);
    if ((a1 & 1) == (i2 & 1)) v -= ints.w(a, s, b, r);
    return phase * v;
}

Eigen::VectorXd cap_matrix(const DeterminantSpace& space, const IntegralStore& ints) {
    Eigen::VectorXd cap(space.size());
    const auto& c = ints.cap();
    const int nw = space.n_words();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < space.size(); ++i) {
        const std::uint64_t* d = space.det(i);
        double v = 0.0;
        for (int s = 0; s < 2; ++s)
            for (int w = 0; w < nw; ++w) {
                std::uint64_t word = d[s * nw + w];
                while (word) {
                    v += c((w << 6) + std::countr_zero(word));
                    word &= word - 1;
                }
            }
        cap(static_cast<Eigen::Index>(i)) = v;
    }
    return cap;
}

namespace {

struct RowBlock {
    std::vector<std::uint32_t> h_col, d_col;
    std::vector<double> h_val, d_val, diag;
    std::vector<std::uint32_t> h_count, d_count;
};

class RowBuilder {
public:
    RowBuilder(const DeterminantSpace& space, const IntegralStore& ints, const AssembleOptions& opt)
        : space_(space), ints_(ints), opt_(opt), nw_(space.n_words()), dw_(space.det_words()) {
        const int n = ints.n_orbitals();
        single_targets_.resize(n);
        for (int p = 0; p < n; ++p) {
            auto& t = single_targets_[p];
            t = ints.h_partners(p);
            if (ints.is_central(p))
                for (int q = 0; q < ints.n_central(); ++q)
                    if (q != p) t.push_back(q);
            std::sort(t.begin(), t.end());
            t.erase(std::unique(t.begin(), t.end()), t.end());
        }
        g_ = space.spec().n_subspaces();
    }

    void build(std::size_t i, RowBlock& out) {
        const std::uint64_t* det = space_.det(i);
        space_.occupied(det, occ_);
        counts_.assign(g_, 0);
        space_.subspace_counts(det, counts_.data());
        work_.assign(det, det + dw_);
        cols_.clear();

        auto try_add = [&]() {
            const auto j = space_.find(work_.data());
            if (j >= 0 && static_cast<std::size_t>(j) != i) cols_.push_back(static_cast<std::uint32_t>(j));
        };

        for (int so : occ_) {
            const int p = so >> 1, spin = so & 1, gi = space_.subspace_of(so);
            for (int q : single_targets_[p]) {
                const int to = 2 * q + spin;
                if (DeterminantSpace::test(det, nw_, to)) continue;
                const int ga = space_.subspace_of(to);
                --counts_[gi];
                ++counts_[ga];
                const bool ok = space_.pattern_allowed(counts_.data());
                ++counts_[gi];
                --counts_[ga];
                if (!ok) continue;
                DeterminantSpace::flip(work_.data(), nw_, so);
                DeterminantSpace::flip(work_.data(), nw_, to);
                try_add();
                DeterminantSpace::flip(work_.data(), nw_, so);
                DeterminantSpace::flip(work_.data(), nw_, to);
            }
        }

        const int nc = ints_.n_central();
        occ_c_.clear();
        for (int so : occ_)
            if ((so >> 1) < nc) occ_c_.push_back(so);
        if (occ_c_.size() >= 2) {
            virt_c_.clear();
            for (int so = 0; so < 2 * nc; ++so)
                if (!DeterminantSpace::test(det, nw_, so)) virt_c_.push_back(so);
            for (std::size_t x = 0; x < occ_c_.size(); ++x)
                for (std::size_t y = x + 1; y < occ_c_.size(); ++y) {
                    const int o1 = occ_c_[x], o2 = occ_c_[y];
                    --counts_[space_.subspace_of(o1)];
                    --counts_[space_.subspace_of(o2)];
                    const int beta_out = (o1 & 1) + (o2 & 1);
                    for (std::size_t u = 0; u < virt_c_.size(); ++u) {
                        const int v1 = virt_c_[u];
                        const int g1 = space_.subspace_of(v1);
                        ++counts_[g1];
                        if (partial_allowed()) {
                            for (std::size_t v = u + 1; v < virt_c_.size(); ++v) {
                                const int v2 = virt_c_[v];
                                if ((v1 & 1) + (v2 & 1) != beta_out) continue;
                                const int g2 = space_.subspace_of(v2);
                                ++counts_[g2];
                                const bool ok = space_.pattern_allowed(counts_.data());
                                --counts_[g2];
                                if (!ok) continue;
                                for (int so : {o1, o2, v1, v2}) DeterminantSpace::flip(work_.data(), nw_, so);
                                try_add();
                                for (int so : {o1, o2, v1, v2}) DeterminantSpace::flip(work_.data(), nw_, so);
                            }
                        }
                        --counts_[g1];
                    }
                    ++counts_[space_.subspace_of(o1)];
                    ++counts_[space_.subspace_of(o2)];
                }
        }

        std::sort(cols_.begin(), cols_.end());
        cols_.erase(std::unique(cols_.begin(), cols_.end()), cols_.end());

        // H0 row in column order with the diagonal in place.
        const double dval = matrix_element(space_, ints_, i, i);
        out.diag.push_back(dval);
        std::uint32_t count = 0;
        bool diag_done = false;
        auto emit_diag = [&]() {
            out.h_col.push_back(static_cast<std::uint32_t>(i));
            out.h_val.push_back(dval);
            ++count;
            diag_done = true;
        };
        for (std::uint32_t j : cols_) {
            if (!diag_done && j > i) emit_diag();
            const double v = matrix_element(space_, ints_, i, j);
            if (std::abs(v) < opt_.drop_tol) continue;
            out.h_col.push_back(j);
            out.h_val.push_back(v);
            ++count;
        }
        if (!diag_done) emit_diag();
        out.h_count.push_back(count);

        if (opt_.with_dipole) build_dipole(i, det, out);
    }

private:
    bool partial_allowed() const {
        for (const auto& pat : space_.spec().patterns) {
            bool ok = true;
            for (int g = 0; g < g_ && ok; ++g) ok = counts_[g] <= pat[g];
            if (ok) return true;
        }
        return false;
    }

    void build_dipole(std::size_t i, const std::uint64_t* det, RowBlock& out) {
        dcols_.clear();
        for (int so : occ_) {
            const int p = so >> 1, spin = so & 1;
            for (int q : ints_.dipole_partners(p)) {
                const int to = 2 * q + spin;
                if (DeterminantSpace::test(det, nw_, to)) continue;
                DeterminantSpace::flip(work_.data(), nw_, so);
                DeterminantSpace::flip(work_.data(), nw_, to);
                const auto j = space_.find(work_.data());
                if (j >= 0) dcols_.push_back(static_cast<std::uint32_t>(j));
                DeterminantSpace::flip(work_.data(), nw_, so);
                DeterminantSpace::flip(work_.data(), nw_, to);
            }
        }
        dcols_.push_back(static_cast<std::uint32_t>(i));
        std::sort(dcols_.begin(), dcols_.end());
        dcols_.erase(std::unique(dcols_.begin(), dcols_.end()), dcols_.end());
        std::uint32_t count = 0;
        for (std::uint32_t j : dcols_) {
            const double v = matrix_element(space_, ints_, i, j, true);
            if (std::abs(v) < opt_.drop_tol) continue;
            out.d_col.push_back(j);
            out.d_val.push_back(v);
            ++count;
        }
        out.d_count.push_back(count);
    }

    const DeterminantSpace& space_;
    const IntegralStore& ints_;
    const AssembleOptions& opt_;
    int nw_, dw_, g_ = 1;
    std::vector<std::vector<int>> single_targets_;
    std::vector<int> occ_, occ_c_, virt_c_, counts_;
    std::vector<std::uint64_t> work_;
    std::vector<std::uint32_t> cols_, dcols_;
};

void append(CsrMatrix& m, const std::vector<std::uint32_t>& cols, const std::vector<double>& vals,
            const std::vector<std::uint32_t>& counts) {
    m.col.insert(m.col.end(), cols.begin(), cols.end());
    m.val.insert(m.val.end(), vals.begin(), vals.end());
    for (std::uint32_t c : counts) m.row_ptr.push_back(m.row_ptr.back() + c);
}

}  // namespace

SparseHamiltonian assemble(const DeterminantSpace& space, const IntegralStore& ints, const AssembleOptions& opt) {
    if (space.n_orbitals() != ints.n_orbitals())
        throw ConfigError("assemble: determinant space and integrals use different orbital counts");
    if (space.size() >= (1ULL << 32)) throw ResourceError("assemble: too many determinants for 32-bit columns");
    SparseHamiltonian h;
    const std::size_t n = space.size();
    h.h0.n = n;
    h.dipole.n = n;
    h.space_hash = space.content_hash();
    h.diagonal.resize(static_cast<Eigen::Index>(n));

    int n_threads = 1;
#ifdef _OPENMP
    n_threads = omp_get_max_threads();
#endif
    const std::size_t chunk = 1024;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const std::size_t batch = static_cast<std::size_t>(n_threads) * 4;
    std::size_t diag_pos = 0;
    for (std::size_t b0 = 0; b0 < n_chunks; b0 += batch) {
        const std::size_t b1 = std::min(n_chunks, b0 + batch);
        std::vector<RowBlock> blocks(b1 - b0);
#pragma omp parallel
        {
            RowBuilder builder(space, ints, opt);
#pragma omp for schedule(dynamic, 1)
            for (std::size_t c = b0; c < b1; ++c) {
                const std::size_t r1 = std::min(n, (c + 1) * chunk);
                for (std::size_t r = c * chunk; r < r1; ++r) builder.build(r, blocks[c - b0]);
            }
        }
        for (auto& blk : blocks) {
            append(h.h0, blk.h_col, blk.h_val, blk.h_count);
            if (opt.with_dipole) append(h.dipole, blk.d_col, blk.d_val, blk.d_count);
            for (double v : blk.diag) h.diagonal(static_cast<Eigen::Index>(diag_pos++)) = v;
            blk = RowBlock{};
        }
    }
    if (!opt.with_dipole) h.dipole.row_ptr.assign(n + 1, 0);
    if (ints.cap().size() > 0 && ints.cap().maxCoeff() > 0.0) h.cap = cap_matrix(space, ints);
    return h;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d(static_cast<Eigen::Index>(i), col[k]) = val[k];
    return d;
}

std::string CsrMatrix::to_coordinate_text() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) os << i << ' ' << col[k] << ' ' << val[k] << '\n';
    return os.str();
}

void sigma(const SparseHamiltonian& h, double field, bool use_cap, const cvec& c, cvec& out) {
    const std::size_t n = h.dim();
    out.resize(static_cast<Eigen::Index>(n));
    const bool with_field = field != 0.0 && !h.dipole.val.empty();
    const bool with_cap = use_cap && h.has_cap();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> acc = 0.0;
        for (std::uint64_t k = h.h0.row_ptr[i]; k < h.h0.row_ptr[i + 1]; ++k) acc += h.h0.val[k] * c(h.h0.col[k]);
        if (with_field) {
            std::complex<double> f = 0.0;
            for (std::uint64_t k = h.dipole.row_ptr[i]; k < h.dipole.row_ptr[i + 1]; ++k)
                f += h.dipole.val[k] * c(h.dipole.col[k]);
            acc += field * f;
        }
        if (with_cap) acc -= std::complex<double>(0.0, h.cap(static_cast<Eigen::Index>(i))) * c(static_cast<Eigen::Index>(i));
        out(static_cast<Eigen::Index>(i)) = acc;
    }
}

void sigma_real(const SparseHamiltonian& h, const Eigen::VectorXd& c, Eigen::VectorXd& out) {
    const std::size_t n = h.dim();
    out.resize(static_cast<Eigen::Index>(n));
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::uint64_t k = h.h0.row_ptr[i]; k < h.h0.row_ptr[i + 1]; ++k) acc += h.h0.val[k] * c(h.h0.col[k]);
        out(static_cast<Eigen::Index>(i)) = acc;
    }
}

void dipole_apply(const SparseHamiltonian& h, const cvec& c, cvec& out) {
    const std::size_t n = h.dim();
    out.resize(static_cast<Eigen::Index>(n));
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> acc = 0.0;
        for (std::uint64_t k = h.dipole.row_ptr[i]; k < h.dipole.row_ptr[i + 1]; ++k)
            acc += h.dipole.val[k] * c(h.dipole.col[k]);
        out(static_cast<Eigen::Index>(i)) = acc;
    }
}

}  // namespace tdgasci
