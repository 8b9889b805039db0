#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tdgasci {

// Word-wise multiplicative hash of a packed determinant key.
struct DeterminantHash {
    std::size_t operator()(std::string_view key) const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ key.size();
        const std::size_t n = key.size() / sizeof(std::uint64_t);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t w;
            __builtin_memcpy(&w, key.data() + i * sizeof(std::uint64_t), sizeof(w));
            h = (h ^ w) * 0xFF51AFD7ED558CCDULL;
            h ^= h >> 32;
        }
        return static_cast<std::size_t>(h);
    }
};

// Generalized active space. Spin orbital index is 2 * spatial + spin (alpha = 0, beta = 1).
// boundaries holds the 1-based first spin orbital of each subspace; each pattern gives the
// electron count of every subspace.
struct GasSpec {
    std::vector<int> boundaries{1};
    std::vector<std::vector<int>> patterns;
    int n_el = 0;
    int two_ms = 0;  // 2 * M_s

    int n_subspaces() const { return static_cast<int>(boundaries.size()); }
    void validate(int n_b_spatial) const;
    std::string describe() const;
};

// CAS*(N_el - 2f, K): f frozen doubly occupied spatial orbitals, K active spatial orbitals,
// and single excitations from the active space into the remaining orbitals.
GasSpec make_cas_star(int n_el, int n_frozen_spatial, int K, int n_b_spatial);
GasSpec make_fci(int n_el, int n_b_spatial, int two_ms = 0);
// Single-active-electron: the lowest N_el - 1 spin orbitals frozen.
GasSpec make_sae(int n_el, int n_b_spatial);

// Number of M_s-restricted determinants of a CAS*(2, K) space.
inline std::size_t cas_star2_count(int n_b, int f, int K) {
    return static_cast<std::size_t>(K) * K + 2ULL * K * (n_b - f - K);
}

// Size of the determinant space without enumerating it (double to survive overflow).
double count_determinants(const GasSpec& spec, int n_b_spatial);

// Enumerated determinant space with lexicographic (alpha, beta) order and hashed lookup.
// A determinant is stored as n_words alpha words followed by n_words beta words.
class DeterminantSpace {
public:
    static DeterminantSpace enumerate(const GasSpec& spec, int n_b_spatial,
                                      std::size_t max_determinants = 200'000'000);

    std::size_t size() const { return n_det_; }
    int n_orbitals() const { return n_orb_; }
    int n_words() const { return n_words_; }
    int det_words() const { return 2 * n_words_; }
    const GasSpec& spec() const { return spec_; }

    const std::uint64_t* det(std::size_t i) const { return bits_.data() + i * det_words(); }
    // Position of a determinant, or -1 when it is not in the space.
    std::int64_t find(const std::uint64_t* d) const;

    int subspace_of(int spin_orbital) const { return subspace_[spin_orbital]; }
    bool pattern_allowed(const int* counts) const;
    void subspace_counts(const std::uint64_t* d, int* counts) const;
    // Occupied spin orbitals in ascending order.
    void occupied(const std::uint64_t* d, std::vector<int>& out) const;

    std::uint64_t content_hash() const { return hash_; }

    static bool test(const std::uint64_t* d, int n_words, int spin_orbital) {
        const int p = spin_orbital >> 1;
        const int w = (spin_orbital & 1) * n_words + (p >> 6);
        return (d[w] >> (p & 63)) & 1ULL;
    }
    static void flip(std::uint64_t* d, int n_words, int spin_orbital) {
        const int p = spin_orbital >> 1;
        const int w = (spin_orbital & 1) * n_words + (p >> 6);
        d[w] ^= 1ULL << (p & 63);
    }

private:
    void build_index();

    GasSpec spec_;
    int n_orb_ = 0;
    int n_words_ = 1;
    std::size_t n_det_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<int> subspace_;
    std::unordered_map<std::string_view, std::uint32_t, DeterminantHash> index_;
    std::uint64_t hash_ = 0;
};

// Number of spin orbitals by which two determinants differ, divided by two (0, 1, 2, ...).
int excitation_level(const std::uint64_t* a, const std::uint64_t* b, int det_words);

// For each determinant, the connected determinants (excitation level <= 2) with their level.
struct Connection {
    std::uint32_t index;
    std::uint8_t level;
};
std::vector<std::vector<Connection>> excitation_connectivity(const DeterminantSpace& space);

}  // namespace tdgasci
