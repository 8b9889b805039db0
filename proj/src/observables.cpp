#include "tdgasci/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <sstream>

#include <fftw3.h>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

template <class Scalar>
Eigen::MatrixXcd rdm_impl(const DeterminantSpace& space, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c,
                          const std::vector<char>& mask) {
    const int n = space.n_orbitals();
    const int nw = space.n_words();
    const int dw = space.det_words();
    const bool masked = !mask.empty();
    if (c.size() != static_cast<Eigen::Index>(space.size())) throw ConfigError("rdm: state has the wrong dimension");
    if (masked && static_cast<int>(mask.size()) != n) throw ConfigError("rdm: mask has the wrong size");
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
    // Fixed row blocks summed in block order keep the result independent of the thread count.
    constexpr std::size_t block = 4096;
    const std::size_t n_blocks = (space.size() + block - 1) / block;
#pragma omp parallel
    {
        Eigen::MatrixXcd local(n, n);
        std::vector<int> occ;
        std::vector<std::uint64_t> work(dw);
#pragma omp for ordered schedule(static, 1)
        for (std::size_t b = 0; b < n_blocks; ++b) {
            local.setZero();
            const std::size_t j_end = std::min(space.size(), (b + 1) * block);
            for (std::size_t j = b * block; j < j_end; ++j) {
                const std::complex<double> cj = c(static_cast<Eigen::Index>(j));
                if (cj == 0.0) continue;
                const std::uint64_t* det = space.det(j);
                space.occupied(det, occ);
                std::copy(det, det + dw, work.begin());
                for (int q_so : occ) {
                    const int q = q_so >> 1;
                    if (masked && !mask[q]) continue;
                    local(q, q) += std::norm(cj);
                    const int spin = q_so & 1;
                    for (int p = 0; p < n; ++p) {
                        if (masked && !mask[p]) continue;
                        const int p_so = 2 * p + spin;
                        if (DeterminantSpace::test(det, nw, p_so)) continue;
                        int sign = fermion_sign(work.data(), nw, q_so);
                        DeterminantSpace::flip(work.data(), nw, q_so);
                        sign *= fermion_sign(work.data(), nw, p_so);
                        DeterminantSpace::flip(work.data(), nw, p_so);
                        const auto i = space.find(work.data());
                        DeterminantSpace::flip(work.data(), nw, p_so);
                        DeterminantSpace::flip(work.data(), nw, q_so);
                        if (i < 0) continue;
                        local(p, q) += static_cast<double>(sign) * std::conj(std::complex<double>(c(i))) * cj;
                    }
                }
            }
#pragma omp ordered
            total += local;
        }
    }
    return total;
}

struct OrbitalMap {
    std::vector<int> central_row;  // DVR index -> row in b, or -1
    std::vector<int> outer_orbital;  // DVR index -> orbital index, or -1
};

OrbitalMap orbital_map(const RotationMatrix& rot) {
    OrbitalMap m;
    m.central_row.assign(rot.n_b, -1);
    m.outer_orbital.assign(rot.n_b, -1);
    for (int i = 0; i < rot.n_central(); ++i) m.central_row[rot.central[i]] = i;
    for (std::size_t k = 0; k < rot.outer.size(); ++k) m.outer_orbital[rot.outer[k]] = rot.n_central() + static_cast<int>(k);
    return m;
}

std::string series_tsv(const std::string& comment, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& cols) {
    std::ostringstream os;
    os << "# " << comment << '\n';
    for (std::size_t c = 0; c < names.size(); ++c) os << (c ? "\t" : "") << names[c];
    os << '\n' << std::setprecision(12);
    const std::size_t n = cols.empty() ? 0 : cols[0]->size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "\t" : "") << (*cols[c])[i];
        os << '\n';
    }
    return os.str();
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double v) {
    if (v <= x.front()) return v < x.front() ? 0.0 : y.front();
    if (v >= x.back()) return v > x.back() ? 0.0 : y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double f = (v - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - f) * y[i - 1] + f * y[i];
}

}  // namespace

Eigen::VectorXd Rdm::occupations() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    return es.eigenvalues().reverse();
}

Rdm rdm(const DeterminantSpace& space, const cvec& state, const std::vector<char>& mask) {
    return Rdm{rdm_impl<std::complex<double>>(space, state, mask)};
}

Rdm rdm(const DeterminantSpace& space, const Eigen::VectorXd& state, const std::vector<char>& mask) {
    return Rdm{rdm_impl<double>(space, state, mask)};
}

Eigen::MatrixXd central_dvr_density(const Rdm& r, const RotationMatrix& rot) {
    const int nc = rot.n_central();
    const Eigen::MatrixXd rc = r.rho.topLeftCorner(nc, nc).real();
    return rot.b * rc * rot.b.transpose();
}

std::vector<double> spatial_density(const Rdm& r, const RotationMatrix& rot, const FedvrGrid& grid,
                                    const std::vector<double>& x) {
    const OrbitalMap map = orbital_map(rot);
    const int nc = rot.n_central();
    std::vector<double> out(x.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < x.size(); ++ix) {
        const auto vals = grid.basis_values(x[ix]);
        Eigen::VectorXd uc = Eigen::VectorXd::Zero(nc);
        std::vector<std::pair<int, double>> uo;
        bool any_central = false;
        for (auto [p, v] : vals) {
            if (map.central_row[p] >= 0) {
                uc += v * rot.b.row(map.central_row[p]).transpose();
                any_central = true;
            } else {
                uo.emplace_back(map.outer_orbital[p], v);
            }
        }
        double n = 0.0;
        if (any_central) {
            const Eigen::VectorXcd ucc = uc.cast<std::complex<double>>();
            n += std::real(ucc.dot(r.rho.topLeftCorner(nc, nc) * ucc));
            for (auto [a, v] : uo) n += 2.0 * v * std::real(r.rho.col(a).head(nc).dot(ucc));
        }
        for (auto [a, va] : uo)
            for (auto [b, vb] : uo) n += va * vb * std::real(r.rho(a, b));
        out[ix] = n;
    }
    return out;
}

Eigen::VectorXd node_density(const Rdm& r, const RotationMatrix& rot, const FedvrGrid& grid) {
    const auto n = spatial_density(r, rot, grid, grid.nodes());
    return Eigen::Map<const Eigen::VectorXd>(n.data(), static_cast<Eigen::Index>(n.size()));
}

std::vector<double> momentum_density(const Rdm& r, const RotationMatrix& rot, const FedvrGrid& grid, double r_ion,
                                     const std::vector<double>& k) {
    if (r_ion < grid.x_c() - 1e-12) throw ConfigError("momentum_density: r_ion must be >= x_c");
    std::vector<int> orbs;
    std::vector<double> xs, sw;
    for (int a = rot.n_central(); a < rot.n_b; ++a) {
        const int p = rot.outer_function(a);
        const double x = grid.nodes()[p];
        if (std::abs(x) <= r_ion) continue;
        orbs.push_back(a);
        xs.push_back(x);
        sw.push_back(std::sqrt(grid.weights()[p]));
    }
    std::vector<double> out(k.size(), 0.0);
    const int m = static_cast<int>(orbs.size());
    if (m == 0) return out;
    Eigen::MatrixXcd rho(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) rho(i, j) = r.rho(orbs[i], orbs[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
    const double lmax = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    std::vector<int> keep;
    for (int i = 0; i < m; ++i)
        if (std::abs(es.eigenvalues()(i)) > 1e-14 * lmax) keep.push_back(i);
#pragma omp parallel for schedule(static)
    for (std::size_t ik = 0; ik < k.size(); ++ik) {
        Eigen::VectorXcd phase(m);
        for (int q = 0; q < m; ++q) phase(q) = sw[q] * std::polar(1.0, k[ik] * xs[q]);
        double n = 0.0;
        for (int mm : keep) n += es.eigenvalues()(mm) * std::norm((phase.transpose() * es.eigenvectors().col(mm)).value());
        out[ik] = n / (2.0 * M_PI);
    }
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

EnergySpectrum photoelectron_energy_spectrum(const std::vector<double>& k, const std::vector<double>& n_k,
                                             const std::vector<double>& energies) {
    if (k.size() != n_k.size() || k.size() < 2) throw ConfigError("photoelectron spectrum: bad k grid");
    EnergySpectrum s;
    s.energy = energies;
    for (double e : energies) {
        if (e <= 0.0) {
            s.plus.push_back(0.0);
            s.minus.push_back(0.0);
        } else {
            const double kk = std::sqrt(2.0 * e);
            s.plus.push_back(interpolate(k, n_k, kk) / kk);
            s.minus.push_back(interpolate(k, n_k, -kk) / kk);
        }
        s.total.push_back(s.plus.back() + s.minus.back());
    }
    return s;
}

std::string EnergySpectrum::to_tsv(const std::string& header_comment) const {
    return series_tsv(header_comment, {"E", "P", "P_plus", "P_minus"}, {&energy, &total, &plus, &minus});
}

PeakInfo main_peak(const std::vector<double>& x, const std::vector<double>& y, double x_min, double x_max) {
    PeakInfo p;
    std::size_t best = x.size();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= x_min && x[i] <= x_max && (best == x.size() || y[i] > y[best])) best = i;
    if (best == x.size()) return p;
    p.position = x[best];
    p.height = y[best];
    const double half = 0.5 * y[best];
    double left = x[best], right = x[best];
    for (std::size_t i = best; i > 0; --i)
        if (y[i - 1] < half) {
            left = x[i - 1] + (half - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);
            break;
        }
    for (std::size_t i = best; i + 1 < x.size(); ++i)
        if (y[i + 1] < half) {
            right = x[i] + (y[i] - half) * (x[i + 1] - x[i]) / (y[i] - y[i + 1]);
            break;
        }
    p.center = 0.5 * (left + right);
    return p;
}

double ionization_probability(const cvec& state) { return 1.0 - state.squaredNorm(); }

DipoleSpectrum dipole_spectrum(const std::vector<double>& t, const std::vector<double>& x, int zero_padding) {
    const std::size_t n = x.size();
    if (n < 4 || t.size() != n) throw ConfigError("dipole_spectrum: need at least four samples");
    if (zero_padding < 1) throw ConfigError("dipole_spectrum: zero padding must be >= 1");
    const double dt = (t.back() - t.front()) / (n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) throw ConfigError("dipole_spectrum: non-uniform sampling");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    const std::size_t np = n * static_cast<std::size_t>(zero_padding);
    double* in = fftw_alloc_real(np);
    fftw_complex* out = fftw_alloc_complex(np / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(np), in, out, FFTW_ESTIMATE);
    for (std::size_t i = 0; i < np; ++i) in[i] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / (n - 1);
        const double w = 0.42 - 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
        in[i] = w * (x[i] - mean);
    }
    fftw_execute(plan);
    DipoleSpectrum s;
    for (std::size_t k = 0; k <= np / 2; ++k) {
        s.omega.push_back(2.0 * M_PI * k / (np * dt));
        const double re = out[k][0] * dt, im = out[k][1] * dt;
        s.power.push_back(re * re + im * im);
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    return s;
}

std::string DipoleSpectrum::to_tsv(const std::string& header_comment) const {
    return series_tsv(header_comment, {"omega", "S"}, {&omega, &power});
}

std::vector<PeakInfo> spectrum_peaks(const DipoleSpectrum& s, double omega_min, double omega_max, double rel_threshold) {
    double ref = 0.0;
    for (std::size_t i = 0; i < s.omega.size(); ++i)
        if (s.omega[i] >= omega_min && s.omega[i] <= omega_max) ref = std::max(ref, s.power[i]);
    std::vector<PeakInfo> peaks;
    for (std::size_t i = 1; i + 1 < s.omega.size(); ++i) {
        if (s.omega[i] < omega_min || s.omega[i] > omega_max) continue;
        if (s.power[i] >= s.power[i - 1] && s.power[i] > s.power[i + 1] && s.power[i] > rel_threshold * ref) {
            PeakInfo p;
            p.position = s.omega[i];
            p.center = s.omega[i];
            p.height = s.power[i];
            peaks.push_back(p);
        }
    }
    return peaks;
}

std::vector<PeakInfo> prominent_peaks(const DipoleSpectrum& s, double omega_min, double omega_max, double half_width,
                                      double contrast) {
    if (half_width <= 0.0 || s.omega.size() < 3) throw ConfigError("prominent_peaks: empty background window");
    const double dw = s.omega[1] - s.omega[0];
    const auto h = static_cast<std::ptrdiff_t>(std::llround(half_width / dw));
    const auto n = static_cast<std::ptrdiff_t>(s.omega.size());
    std::vector<PeakInfo> peaks;
    std::vector<double> window;
    for (std::ptrdiff_t i = 1; i + 1 < n; ++i) {
        if (s.omega[i] < omega_min || s.omega[i] > omega_max) continue;
        if (!(s.power[i] >= s.power[i - 1] && s.power[i] > s.power[i + 1])) continue;
        window.assign(s.power.begin() + std::max<std::ptrdiff_t>(0, i - h),
                      s.power.begin() + std::min(n, i + h + 1));
        auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
        std::nth_element(window.begin(), mid, window.end());
        if (s.power[i] > contrast * *mid) {
            PeakInfo p;
            p.position = s.omega[i];
            p.center = s.omega[i];
            p.height = s.power[i];
            peaks.push_back(p);
        }
    }
    return peaks;
}

double emission_asymmetry(double p_minus, double p_plus) {
    if (p_plus == 0.0) throw ConfigError("emission_asymmetry: P+ is zero");
    return p_minus / p_plus;
}

}  // namespace tdgasci
