#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mxkit {

struct RepeatedIndex : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadIndex : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidExcitation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RankMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimensions of the particle-hole excitation space built on a closed-shell
/// reference: n_occ hole orbitals (0 .. n_occ-1), n_virt particle orbitals
/// (n_occ .. L-1), excitations up to rank m, in D spatial dimensions.
struct BasisSpec {
    int n_occ = 0;
    int n_virt = 0;
    int m = 1;
    int D = 1;

    BasisSpec() = default;
    BasisSpec(int n_occ_, int n_virt_, int m_, int D_ = 1);

    int L() const { return n_occ + n_virt; }
    /// Bits per packed orbital index, ceil(log2 L), at least 1.
    int bits_per_index() const;
    /// Bits for the rank field of a packed key.
    int rank_bits() const;

    bool is_hole(int p) const { return p >= 0 && p < n_occ; }
    bool is_particle(int p) const { return p >= n_occ && p < L(); }
};

/// Canonical m-particle/m-hole label. Hole and particle indices are stored
/// strictly decreasing; `sign` is the parity of the permutation that brought
/// the constructor arguments into that order. The rank-0 string is the Fermi
/// vacuum.
class ExcitationString {
  public:
    static constexpr int kMaxRank = 6;

    ExcitationString() = default;

    int rank() const { return rank_; }
    int sign() const { return sign_; }
    int hole(int t) const { return holes_[static_cast<std::size_t>(t)]; }
    int particle(int t) const { return parts_[static_cast<std::size_t>(t)]; }
    std::span<const std::int32_t> holes() const { return {holes_.data(), static_cast<std::size_t>(rank_)}; }
    std::span<const std::int32_t> particles() const { return {parts_.data(), static_cast<std::size_t>(rank_)}; }

    bool is_vacuum() const { return rank_ == 0; }
    bool has_hole(int p) const;
    bool has_particle(int p) const;

    /// Same string except hole slot t replaced by new_hole (possibly out of
    /// order; result is re-canonicalized and the sign reflects the re-sort).
    ExcitationString with_hole(int t, int new_hole, const BasisSpec& spec) const;
    ExcitationString with_particle(int t, int new_particle, const BasisSpec& spec) const;

    bool operator==(const ExcitationString& o) const;

    std::string str() const;

    friend ExcitationString canonicalize(const BasisSpec& spec, std::span<const int> holes,
                                         std::span<const int> particles);

  private:
    std::array<std::int32_t, kMaxRank> holes_{};
    std::array<std::int32_t, kMaxRank> parts_{};
    std::int8_t rank_ = 0;
    std::int8_t sign_ = 1;
};

/// Sorts the index lists strictly decreasing and records the permutation
/// parity: sign = parity(holes) * parity(particles). Throws RepeatedIndex on
/// a duplicated index (exclusion principle) and BadIndex if an index is not
/// in the hole/particle range of `spec` or the rank exceeds spec.m.
ExcitationString canonicalize(const BasisSpec& spec, std::span<const int> holes,
                              std::span<const int> particles);

inline ExcitationString canonicalize(const BasisSpec& spec, std::initializer_list<int> holes,
                                     std::initializer_list<int> particles) {
    return canonicalize(spec, std::span<const int>(holes.begin(), holes.size()),
                        std::span<const int>(particles.begin(), particles.size()));
}

/// Fixed-width key packing, documented stable layout from most- to least-
/// significant bits: [rank][hole_0 .. hole_{m-1}][particle_0 .. particle_{m-1}]
/// with bits_per_index() bits per index field and unused fields zero.
/// Injective over all strings of rank <= m.
std::uint64_t encode(const ExcitationString& s, const BasisSpec& spec);

ExcitationString decode(std::uint64_t key, const BasisSpec& spec);

/// Number of canonical rank-k strings, C(n_occ,k) * C(n_virt,k).
std::uint64_t dimension(const BasisSpec& spec, int k);

std::uint64_t binomial(int n, int k);

/// All canonical strings of rank k, sorted by encoded key.
std::vector<ExcitationString> enumerate_rank(const BasisSpec& spec, int k);

/// Occupation bit vector over the L spin orbitals.
class Determinant {
  public:
    Determinant() = default;
    explicit Determinant(int n_orbitals);

    /// Hartree-Fock reference: orbitals 0 .. n_occ-1 filled.
    static Determinant fermi_vacuum(const BasisSpec& spec);

    int n_orbitals() const { return n_orb_; }
    bool occupied(int p) const;
    void set(int p);
    void clear(int p);
    int popcount() const;
    /// Number of occupied orbitals with index < p.
    int count_below(int p) const;

    /// Orbitals occupied in *this but not in `other` (ascending).
    std::vector<int> occupied_minus(const Determinant& other) const;
    std::vector<int> occupied_list() const;

    bool operator==(const Determinant& o) const { return n_orb_ == o.n_orb_ && words_ == o.words_; }

  private:
    std::vector<std::uint64_t> words_;
    int n_orb_ = 0;
};

/// Applies the string's creation/annihilation pairs c+_a c_i to the Fermi
/// vacuum, slot 0 first. Fermionic phase convention: each operator picks up
/// (-1)^(number of occupied orbitals below the acted index), and the string's
/// canonical sign multiplies the result.
std::pair<Determinant, int> to_determinant(const ExcitationString& s, const BasisSpec& spec);

/// Keyed amplitude vector over encoded excitation strings.
class SparseState {
  public:
    using Amplitude = std::complex<double>;
    using Map = std::unordered_map<std::uint64_t, Amplitude>;

    SparseState() = default;

    void add(std::uint64_t key, Amplitude v) { amps_[key] += v; }
    void set(std::uint64_t key, Amplitude v) { amps_[key] = v; }
    Amplitude get(std::uint64_t key) const;

    std::size_t support() const { return amps_.size(); }
    bool empty() const { return amps_.empty(); }
    void clear() { amps_.clear(); }

    /// Removes entries with |amplitude| <= threshold.
    void prune(double threshold);

    void scale(Amplitude a);
    /// *this += a * x
    void axpy(Amplitude a, const SparseState& x);
    /// <this|x> with conjugation on *this.
    Amplitude dot(const SparseState& x) const;
    double norm() const;

    const Map& entries() const { return amps_; }
    /// Entries sorted by key; the deterministic order used for dumps and
    /// energy reductions.
    std::vector<std::pair<std::uint64_t, Amplitude>> sorted_entries() const;

    static SparseState unit(std::uint64_t key);

  private:
    Map amps_;
};

} // namespace mxkit
