#include "tdgasci/gas.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "tdgasci/errors.hpp"

namespace tdgasci {

namespace {

struct SubspaceOrbitals {
    std::vector<int> alpha;  // spatial indices with an alpha spin orbital in the subspace
    std::vector<int> beta;
};

std::vector<SubspaceOrbitals> split_subspaces(const GasSpec& spec, int n_b) {
    const int n_so = 2 * n_b;
    std::vector<SubspaceOrbitals> out(spec.n_subspaces());
    for (int g = 0; g < spec.n_subspaces(); ++g) {
        const int lo = spec.boundaries[g] - 1;
        const int hi = g + 1 < spec.n_subspaces() ? spec.boundaries[g + 1] - 1 : n_so;
        for (int so = lo; so < hi; ++so) (so % 2 == 0 ? out[g].alpha : out[g].beta).push_back(so / 2);
    }
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

void for_each_combination(const std::vector<int>& items, int k, const std::function<void(const std::vector<int>&)>& fn) {
    const int n = static_cast<int>(items.size());
    if (k > n || k < 0) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> pick(k);
    while (true) {
        for (int i = 0; i < k; ++i) pick[i] = items[idx[i]];
        fn(pick);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

int n_alpha_of(const GasSpec& spec) { return (spec.n_el + spec.two_ms) / 2; }

}  // namespace

void GasSpec::validate(int n_b) const {
    const int n_so = 2 * n_b;
    if (n_el <= 0) throw ConfigError("GAS: N_el must be positive");
    if ((n_el + two_ms) % 2 != 0 || std::abs(two_ms) > n_el) throw ConfigError("GAS: inconsistent M_s");
    if (boundaries.empty() || boundaries.front() != 1) throw ConfigError("GAS: first boundary must be 1");
    for (std::size_t g = 1; g < boundaries.size(); ++g)
        if (boundaries[g] <= boundaries[g - 1]) throw ConfigError("GAS: boundaries must be strictly increasing");
    if (boundaries.back() > n_so) throw ConfigError("GAS: boundary beyond the number of spin orbitals");
    if (patterns.empty()) throw ConfigError("GAS: no occupation patterns");
    for (const auto& pat : patterns) {
        if (static_cast<int>(pat.size()) != n_subspaces())
            throw ConfigError("GAS: pattern length differs from the number of subspaces");
        int sum = 0;
        for (int g = 0; g < n_subspaces(); ++g) {
            const int cap = (g + 1 < n_subspaces() ? boundaries[g + 1] : n_so + 1) - boundaries[g];
            if (pat[g] < 0 || pat[g] > cap) throw ConfigError("GAS: pattern exceeds subspace capacity");
            sum += pat[g];
        }
        if (sum != n_el) throw ConfigError("GAS: pattern does not sum to N_el");
    }
}

std::string GasSpec::describe() const {
    std::ostringstream os;
    os << "N_el=" << n_el << " 2Ms=" << two_ms << " boundaries=[";
    for (std::size_t g = 0; g < boundaries.size(); ++g) os << (g ? "," : "") << boundaries[g];
    os << "] patterns=[";
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        os << (i ? "," : "") << "(";
        for (std::size_t g = 0; g < patterns[i].size(); ++g) os << (g ? "," : "") << patterns[i][g];
        os << ")";
    }
    os << "]";
    return os.str();
}

GasSpec make_cas_star(int n_el, int f, int K, int n_b) {
    const int n_act = n_el - 2 * f;
    if (f < 0) throw ConfigError("CAS*: negative frozen count");
    if (n_act < 1) throw ConfigError("CAS*: no active electrons");
    if (2 * K < n_act) throw ConfigError("CAS*: active space too small for its electrons");
    if (f + K > n_b) throw ConfigError("CAS*: frozen + active orbitals exceed N_b");
    GasSpec s;
    s.n_el = n_el;
    s.boundaries.clear();
    if (f > 0) s.boundaries.push_back(1);
    s.boundaries.push_back(2 * f + 1);
    const bool has_rest = f + K < n_b;
    if (has_rest) s.boundaries.push_back(2 * (f + K) + 1);
    auto pat = [&](int active, int rest) {
        std::vector<int> p;
        if (f > 0) p.push_back(2 * f);
        p.push_back(active);
        if (has_rest) p.push_back(rest);
        return p;
    };
    s.patterns.push_back(pat(n_act, 0));
    if (has_rest) s.patterns.push_back(pat(n_act - 1, 1));
    s.validate(n_b);
    return s;
}

GasSpec make_fci(int n_el, int n_b, int two_ms) {
    GasSpec s;
    s.n_el = n_el;
    s.two_ms = two_ms;
    s.boundaries = {1};
    s.patterns = {{n_el}};
    s.validate(n_b);
    return s;
}

GasSpec make_sae(int n_el, int n_b) {
    if (n_el < 2) return make_fci(n_el, n_b);
    GasSpec s;
    s.n_el = n_el;
    s.boundaries = {1, n_el};
    s.patterns = {{n_el - 1, 1}};
    s.validate(n_b);
    return s;
}

double count_determinants(const GasSpec& spec, int n_b) {
    spec.validate(n_b);
    const auto subs = split_subspaces(spec, n_b);
    const int n_alpha = n_alpha_of(spec);
    double total = 0.0;
    for (const auto& pat : spec.patterns) {
        // ways[a]: number of partial determinants with a alpha electrons
        std::vector<double> ways(n_alpha + 1, 0.0);
        ways[0] = 1.0;
        for (int g = 0; g < spec.n_subspaces(); ++g) {
            std::vector<double> next(n_alpha + 1, 0.0);
            const int na = static_cast<int>(subs[g].alpha.size());
            const int nb = static_cast<int>(subs[g].beta.size());
            for (int a0 = 0; a0 <= n_alpha; ++a0) {
                if (ways[a0] == 0.0) continue;
                for (int a = 0; a <= pat[g] && a0 + a <= n_alpha; ++a)
                    next[a0 + a] += ways[a0] * binomial(na, a) * binomial(nb, pat[g] - a);
            }
            ways = std::move(next);
        }
        total += ways[n_alpha];
    }
    return total;
}

DeterminantSpace DeterminantSpace::enumerate(const GasSpec& spec, int n_b, std::size_t max_determinants) {
    const double count = count_determinants(spec, n_b);
    if (count > static_cast<double>(max_determinants)) {
        std::ostringstream os;
        os << "DeterminantSpace: " << static_cast<long double>(count) << " determinants exceed the cap of "
           << max_determinants;
        throw ResourceError(os.str());
    }
    DeterminantSpace ds;
    ds.spec_ = spec;
    ds.n_orb_ = n_b;
    ds.n_words_ = (n_b + 63) / 64;
    ds.subspace_.resize(2 * n_b);
    for (int so = 0; so < 2 * n_b; ++so) {
        int g = 0;
        while (g + 1 < spec.n_subspaces() && so + 1 >= spec.boundaries[g + 1]) ++g;
        ds.subspace_[so] = g;
    }
    const auto subs = split_subspaces(spec, n_b);
    const int n_alpha = n_alpha_of(spec);
    const int dw = ds.det_words();
    const int nw = ds.n_words_;
    std::vector<std::uint64_t> cur(dw, 0);
    std::vector<std::uint64_t> bits;
    bits.reserve(static_cast<std::size_t>(count) * dw);

    auto set_bits = [&](const std::vector<int>& orbs, int spin) {
        for (int p : orbs) cur[spin * nw + (p >> 6)] ^= 1ULL << (p & 63);
    };
    for (const auto& pat : spec.patterns) {
        std::function<void(int, int)> rec = [&](int g, int a_used) {
            if (g == spec.n_subspaces()) {
                if (a_used == n_alpha) bits.insert(bits.end(), cur.begin(), cur.end());
                return;
            }
            for (int a = 0; a <= pat[g] && a_used + a <= n_alpha; ++a) {
                const int b = pat[g] - a;
                if (a > static_cast<int>(subs[g].alpha.size()) || b > static_cast<int>(subs[g].beta.size())) continue;
                for_each_combination(subs[g].alpha, a, [&](const std::vector<int>& ca) {
                    set_bits(ca, 0);
                    for_each_combination(subs[g].beta, b, [&](const std::vector<int>& cb) {
                        set_bits(cb, 1);
                        rec(g + 1, a_used + a);
                        set_bits(cb, 1);
                    });
                    set_bits(ca, 0);
                });
            }
        };
        rec(0, 0);
    }

    const std::size_t n = bits.size() / dw;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t x, std::size_t y) {
        const std::uint64_t* a = bits.data() + x * dw;
        const std::uint64_t* b = bits.data() + y * dw;
        for (int s = 0; s < 2; ++s)
            for (int w = nw - 1; w >= 0; --w) {
                const std::uint64_t u = a[s * nw + w];
                const std::uint64_t v = b[s * nw + w];
                if (u != v) return u < v;
            }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    ds.bits_.resize(n * dw);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t* src = bits.data() + order[i] * dw;
        if (kept > 0 && std::equal(src, src + dw, ds.bits_.data() + (kept - 1) * dw)) continue;
        std::copy(src, src + dw, ds.bits_.data() + kept * dw);
        ++kept;
    }
    ds.bits_.resize(kept * dw);
    ds.n_det_ = kept;
    ds.build_index();
    return ds;
}

void DeterminantSpace::build_index() {
    index_.clear();
    index_.reserve(n_det_ * 2);
    const std::size_t bytes = det_words() * sizeof(std::uint64_t);
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n_det_; ++i) {
        const auto* p = reinterpret_cast<const char*>(det(i));
        index_.emplace(std::string_view(p, bytes), static_cast<std::uint32_t>(i));
        for (std::size_t k = 0; k < bytes; ++k) {
            h ^= static_cast<unsigned char>(p[k]);
            h *= 1099511628211ULL;
        }
    }
    hash_ = h ^ (static_cast<std::uint64_t>(n_orb_) << 32);
}

std::int64_t DeterminantSpace::find(const std::uint64_t* d) const {
    const std::string_view key(reinterpret_cast<const char*>(d), det_words() * sizeof(std::uint64_t));
    auto it = index_.find(key);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

bool DeterminantSpace::pattern_allowed(const int* counts) const {
    const int g_n = spec_.n_subspaces();
    for (const auto& pat : spec_.patterns) {
        bool ok = true;
        for (int g = 0; g < g_n && ok; ++g) ok = pat[g] == counts[g];
        if (ok) return true;
    }
    return false;
}

void DeterminantSpace::subspace_counts(const std::uint64_t* d, int* counts) const {
    std::fill(counts, counts + spec_.n_subspaces(), 0);
    for (int s = 0; s < 2; ++s)
        for (int w = 0; w < n_words_; ++w) {
            std::uint64_t word = d[s * n_words_ + w];
            while (word) {
                const int p = (w << 6) + std::countr_zero(word);
                ++counts[subspace_[2 * p + s]];
                word &= word - 1;
            }
        }
}

void DeterminantSpace::occupied(const std::uint64_t* d, std::vector<int>& out) const {
    out.clear();
    for (int s = 0; s < 2; ++s)
        for (int w = 0; w < n_words_; ++w) {
            std::uint64_t word = d[s * n_words_ + w];
            while (word) {
                out.push_back(2 * ((w << 6) + std::countr_zero(word)) + s);
                word &= word - 1;
            }
        }
    std::sort(out.begin(), out.end());
}

int excitation_level(const std::uint64_t* a, const std::uint64_t* b, int det_words) {
    int diff = 0;
    for (int w = 0; w < det_words; ++w) diff += std::popcount(a[w] ^ b[w]);
    return diff / 2;
}

std::vector<std::vector<Connection>> excitation_connectivity(const DeterminantSpace& space) {
    const int dw = space.det_words();
    const int nw = space.n_words();
    const int n_so = 2 * space.n_orbitals();
    std::vector<std::vector<Connection>> out(space.size());
    std::vector<int> occ;
    std::vector<int> virt;
    std::vector<std::uint64_t> work(dw);
    for (std::size_t i = 0; i < space.size(); ++i) {
        const std::uint64_t* d = space.det(i);
        space.occupied(d, occ);
        virt.clear();
        for (int so = 0; so < n_so; ++so)
            if (!DeterminantSpace::test(d, nw, so)) virt.push_back(so);
        auto& row = out[i];
        row.push_back({static_cast<std::uint32_t>(i), 0});
        std::copy(d, d + dw, work.begin());
        for (int a : occ)
            for (int r : virt) {
                if ((a & 1) != (r & 1)) continue;
                DeterminantSpace::flip(work.data(), nw, a);
                DeterminantSpace::flip(work.data(), nw, r);
                const auto j = space.find(work.data());
                if (j >= 0) row.push_back({static_cast<std::uint32_t>(j), 1});
                DeterminantSpace::flip(work.data(), nw, a);
                DeterminantSpace::flip(work.data(), nw, r);
            }
        for (std::size_t x = 0; x < occ.size(); ++x)
            for (std::size_t y = x + 1; y < occ.size(); ++y)
                for (std::size_t u = 0; u < virt.size(); ++u)
                    for (std::size_t v = u + 1; v < virt.size(); ++v) {
                        const int a = occ[x], b = occ[y], r = virt[u], s = virt[v];
                        const int spin_out = (a & 1) + (b & 1);
                        const int spin_in = (r & 1) + (s & 1);
                        if (spin_out != spin_in) continue;
                        for (int so : {a, b, r, s}) DeterminantSpace::flip(work.data(), nw, so);
                        const auto j = space.find(work.data());
                        if (j >= 0) row.push_back({static_cast<std::uint32_t>(j), 2});
                        for (int so : {a, b, r, s}) DeterminantSpace::flip(work.data(), nw, so);
                    }
        std::sort(row.begin(), row.end(), [](const Connection& p, const Connection& q) { return p.index < q.index; });
    }
    return out;
}

}  // namespace tdgasci
