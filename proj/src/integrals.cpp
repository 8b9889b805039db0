#include "tdgasci/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

constexpr double kPartnerTol = 1e-14;
constexpr std::uint64_t kCacheMagic = 0x31544e4943534754ULL;  // "TGSCINT1"

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ULL;
        }
    }
    template <class T>
    void value(const T& v) {
        bytes(&v, sizeof(T));
    }
    void doubles(const double* p, std::size_t n) { bytes(p, n * sizeof(double)); }
};

std::uint64_t integral_hash(const FedvrGrid& grid, const PotentialSpec& pot, const RotationMatrix& rot,
                            const IntegralOptions& opt) {
    Fnv1a f;
    f.value(grid.n_b());
    f.doubles(grid.nodes().data(), grid.nodes().size());
    f.doubles(grid.weights().data(), grid.weights().size());
    f.doubles(grid.boundaries().data(), grid.boundaries().size());
    f.value(static_cast<int>(pot.kind));
    for (double v : {pot.Z, pot.Z1, pot.Z2, pot.R, pot.s, opt.ee_scale}) f.value(v);
    f.value(static_cast<int>(opt.central_only));
    f.value(rot.n_central());
    f.doubles(rot.b.data(), static_cast<std::size_t>(rot.b.size()));
    return f.h;
}

// Rows: central pairs (a >= b) in pair_index order; columns: central DVR functions.
Eigen::MatrixXd pair_products(const Eigen::MatrixXd& b) {
    const int n = static_cast<int>(b.cols());
    const std::size_t m = static_cast<std::size_t>(n) * (n + 1) / 2;
    Eigen::MatrixXd p(static_cast<Eigen::Index>(m), b.rows());
    for (int a = 0; a < n; ++a)
        for (int c = 0; c <= a; ++c)
            p.row(static_cast<Eigen::Index>(IntegralStore::pair_index(a, c))) =
                b.col(a).cwiseProduct(b.col(c)).transpose();
    return p;
}

}  // namespace

Eigen::MatrixXd raw_one_electron(const FedvrGrid& grid, const PotentialSpec& potential) {
    Eigen::MatrixXd h = kinetic_matrix(grid);
    h.diagonal() += diagonal_potential(grid, [&](double x) { return nuclear_potential(potential, x); });
    return h;
}

Eigen::MatrixXd transform_one_electron(const Eigen::MatrixXd& raw, const RotationMatrix& rot, bool central_only) {
    const int nc = rot.n_central();
    const int no = central_only ? 0 : static_cast<int>(rot.outer.size());
    Eigen::MatrixXd out(nc + no, nc + no);
    if (nc > 0) {
        Eigen::MatrixXd cc(nc, nc);
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j) cc(i, j) = raw(rot.central[i], rot.central[j]);
        out.topLeftCorner(nc, nc) = rot.b.transpose() * cc * rot.b;
    }
    if (no > 0) {
        if (nc > 0) {
            Eigen::MatrixXd co(nc, no);
            for (int i = 0; i < nc; ++i)
                for (int k = 0; k < no; ++k) co(i, k) = raw(rot.central[i], rot.outer[k]);
            out.topRightCorner(nc, no) = rot.b.transpose() * co;
            out.bottomLeftCorner(no, nc) = out.topRightCorner(nc, no).transpose();
        }
        for (int k = 0; k < no; ++k)
            for (int l = 0; l < no; ++l) out(nc + k, nc + l) = raw(rot.outer[k], rot.outer[l]);
    }
    // exact symmetry of the central block
    if (nc > 0) {
        Eigen::MatrixXd cc = out.topLeftCorner(nc, nc);
        out.topLeftCorner(nc, nc) = 0.5 * (cc + cc.transpose());
    }
    return out;
}

double IntegralStore::estimate_bytes(int n_c, int n_outer) {
    const double m = 0.5 * n_c * (n_c + 1.0);
    return 8.0 * (0.5 * m * (m + 1.0) + n_outer * m + double(n_outer) * n_outer);
}

IntegralStore IntegralStore::build(const FedvrGrid& grid, const PotentialSpec& potential, const RotationMatrix& rot,
                                   const IntegralOptions& opt) {
    if (rot.n_b != grid.n_b()) throw ConfigError("IntegralStore: rotation does not match grid");
    IntegralStore s;
    s.n_c_ = rot.n_central();
    const int no = opt.central_only ? 0 : static_cast<int>(rot.outer.size());
    s.n_orb_ = s.n_c_ + no;
    s.hash_ = integral_hash(grid, potential, rot, opt);

    s.outer_x_.resize(no);
    for (int k = 0; k < no; ++k) s.outer_x_[k] = grid.nodes()[rot.outer[k]];
    s.cap_ = Eigen::VectorXd::Zero(s.n_orb_);

    const double need = estimate_bytes(s.n_c_, no);
    const double central_bytes = 8.0 * static_cast<double>(packed_size(s.n_c_));
    if (need > opt.memory_budget_bytes) {
        if (!opt.allow_direct || need - central_bytes > opt.memory_budget_bytes) {
            std::ostringstream os;
            os << "IntegralStore: " << need / 1e9 << " GB of integrals exceeds the budget of "
               << opt.memory_budget_bytes / 1e9 << " GB";
            throw ResourceError(os.str());
        }
        s.direct_ = true;
    }

    std::string cache_path;
    if (!opt.cache_dir.empty() && !s.direct_) {
        std::ostringstream os;
        os << opt.cache_dir << "/integrals_" << std::hex << s.hash_ << ".bin";
        cache_path = os.str();
        if (s.load_cache(cache_path)) {
            s.finalize_partners();
            return s;
        }
    }

    const Eigen::MatrixXd raw_h = raw_one_electron(grid, potential);
    Eigen::MatrixXd raw_d = Eigen::MatrixXd::Zero(grid.n_b(), grid.n_b());
    raw_d.diagonal() = diagonal_potential(grid, [](double x) { return x; });
    s.h_ = transform_one_electron(raw_h, rot, opt.central_only);
    s.d_ = transform_one_electron(raw_d, rot, opt.central_only);

    const double sc = opt.ee_scale;
    auto wnode = [&](int p, int q) { return sc * ee_interaction(potential.s, grid.nodes()[p], grid.nodes()[q]); };

    const int nc = s.n_c_;
    if (nc > 0) {
        Eigen::MatrixXd w_cc(nc, nc);
        for (int i = 0; i < nc; ++i)
            for (int k = 0; k < nc; ++k) w_cc(i, k) = wnode(rot.central[i], rot.central[k]);
        const Eigen::MatrixXd p = pair_products(rot.b);
        if (s.direct_) {
            s.b_ = rot.b;
            s.w_cc_nodes_ = w_cc;
        } else {
            const Eigen::Index m = p.rows();
            s.w_central_.assign(packed_size(nc), 0.0);
            const Eigen::MatrixXd t = p * w_cc;
            const Eigen::Index block = 256;
            for (Eigen::Index r0 = 0; r0 < m; r0 += block) {
                const Eigen::Index r1 = std::min(m, r0 + block);
                const Eigen::MatrixXd blk = t.middleRows(r0, r1 - r0) * p.topRows(r1).transpose();
                for (Eigen::Index r = r0; r < r1; ++r) {
                    double* dst = s.w_central_.data() + static_cast<std::size_t>(r) * (r + 1) / 2;
                    for (Eigen::Index q = 0; q <= r; ++q) dst[q] = blk(r - r0, q);
                }
            }
        }
        if (no > 0) {
            Eigen::MatrixXd w_oc(no, nc);
            for (int k = 0; k < no; ++k)
                for (int i = 0; i < nc; ++i) w_oc(k, i) = wnode(rot.outer[k], rot.central[i]);
            s.w_mixed_ = w_oc * p.transpose();
        }
    }
    s.w_outer_.resize(no, no);
    for (int k = 0; k < no; ++k)
        for (int l = 0; l < no; ++l) s.w_outer_(k, l) = wnode(rot.outer[k], rot.outer[l]);

    if (!cache_path.empty()) s.save_cache(cache_path);
    s.finalize_partners();
    return s;
}

double IntegralStore::central_direct(int a, int b, int c, int d) const {
    const Eigen::VectorXd ab = b_.col(a).cwiseProduct(b_.col(b));
    const Eigen::VectorXd cd = b_.col(c).cwiseProduct(b_.col(d));
    return ab.dot(w_cc_nodes_ * cd);
}

void IntegralStore::set_cap(const FedvrGrid& grid, double r_cap) {
    if (r_cap < grid.x_c() - 1e-12)
        throw ConfigError("set_cap: r_cap must not lie inside the rotated region (r_cap >= x_c)");
    if (!(r_cap < grid.x_s())) throw ConfigError("set_cap: r_cap must be smaller than x_s");
    cap_.setZero(n_orb_);
    for (int a = n_c_; a < n_orb_; ++a) cap_(a) = cap_value(outer_node(a), r_cap, grid.x_s());
}

void IntegralStore::finalize_partners() {
    h_partners_.assign(n_orb_, {});
    d_partners_.assign(n_orb_, {});
    for (int a = 0; a < n_orb_; ++a)
        for (int c = 0; c < n_orb_; ++c) {
            if (c == a) continue;
            if (std::abs(h_(a, c)) > kPartnerTol) h_partners_[a].push_back(c);
            if (std::abs(d_(a, c)) > kPartnerTol) d_partners_[a].push_back(c);
        }
}

// Cache layout (little-endian): magic u64, hash u64, n_orb i32, n_c i32,
// then h, d (n_orb^2 column-major), outer nodes, w_central (packed),
// w_mixed (n_outer x M column-major), w_outer (n_outer^2).
void IntegralStore::save_cache(const std::string& path) const {
    std::error_code ec;
    std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
    const std::string tmp = path + ".tmp";
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;
    auto put = [&](const void* p, std::size_t n) { out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); };
    put(&kCacheMagic, 8);
    put(&hash_, 8);
    put(&n_orb_, 4);
    put(&n_c_, 4);
    put(h_.data(), 8 * h_.size());
    put(d_.data(), 8 * d_.size());
    put(outer_x_.data(), 8 * outer_x_.size());
    put(w_central_.data(), 8 * w_central_.size());
    put(w_mixed_.data(), 8 * w_mixed_.size());
    put(w_outer_.data(), 8 * w_outer_.size());
    out.close();
    if (out) std::filesystem::rename(tmp, path, ec);
}

bool IntegralStore::load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    auto get = [&](void* p, std::size_t n) { return static_cast<bool>(in.read(static_cast<char*>(p), static_cast<std::streamsize>(n))); };
    std::uint64_t magic = 0, hash = 0;
    int n_orb = 0, n_c = 0;
    if (!get(&magic, 8) || !get(&hash, 8) || !get(&n_orb, 4) || !get(&n_c, 4)) return false;
    if (magic != kCacheMagic || hash != hash_ || n_orb != n_orb_ || n_c != n_c_) return false;
    const int no = n_orb_ - n_c_;
    const Eigen::Index m = static_cast<Eigen::Index>(n_c_) * (n_c_ + 1) / 2;
    h_.resize(n_orb_, n_orb_);
    d_.resize(n_orb_, n_orb_);
    outer_x_.resize(no);
    w_central_.resize(packed_size(n_c_));
    w_mixed_.resize(n_c_ > 0 ? no : 0, n_c_ > 0 ? m : 0);
    w_outer_.resize(no, no);
    return get(h_.data(), 8 * h_.size()) && get(d_.data(), 8 * d_.size()) && get(outer_x_.data(), 8 * outer_x_.size()) &&
           get(w_central_.data(), 8 * w_central_.size()) && get(w_mixed_.data(), 8 * w_mixed_.size()) &&
           get(w_outer_.data(), 8 * w_outer_.size());
}

}  // namespace tdgasci
