#include "mxkit/basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace mxkit {

BasisSpec::BasisSpec(int n_occ_, int n_virt_, int m_, int D_)
    : n_occ(n_occ_), n_virt(n_virt_), m(m_), D(D_) {
    if (n_occ < 1 || n_virt < 1)
        throw BadIndex("BasisSpec: need at least one occupied and one virtual orbital");
    if (m < 1 || m > ExcitationString::kMaxRank)
        throw BadIndex("BasisSpec: unsupported excitation rank m=" + std::to_string(m));
    if (n_occ < m || n_virt < m)
        throw BadIndex("BasisSpec: rank m exceeds orbital counts");
    if (D < 1 || D > 3)
        throw BadIndex("BasisSpec: spatial dimension must be 1..3");
    if (rank_bits() + 2 * m * bits_per_index() > 64)
        throw BadIndex("BasisSpec: packed key does not fit in 64 bits");
}

int BasisSpec::bits_per_index() const {
    int b = 1;
    while ((1 << b) < L())
        ++b;
    return b;
}

int BasisSpec::rank_bits() const {
    int b = 1;
    while ((1 << b) < m + 1)
        ++b;
    return b;
}

bool ExcitationString::has_hole(int p) const {
    for (int t = 0; t < rank_; ++t)
        if (holes_[static_cast<std::size_t>(t)] == p)
            return true;
    return false;
}

bool ExcitationString::has_particle(int p) const {
    for (int t = 0; t < rank_; ++t)
        if (parts_[static_cast<std::size_t>(t)] == p)
            return true;
    return false;
}

namespace {

// Sorts strictly decreasing in place, returns permutation parity (+1/-1).
// Throws on duplicates.
int sort_desc_parity(std::vector<int>& v) {
    int parity = 1;
    for (std::size_t i = 1; i < v.size(); ++i) {
        int x = v[i];
        std::size_t j = i;
        while (j > 0 && v[j - 1] < x) {
            v[j] = v[j - 1];
            parity = -parity;
            --j;
        }
        v[j] = x;
    }
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1])
            throw RepeatedIndex("repeated index " + std::to_string(v[i]));
    return parity;
}

} // namespace

ExcitationString canonicalize(const BasisSpec& spec, std::span<const int> holes,
                              std::span<const int> particles) {
    if (holes.size() != particles.size())
        throw BadIndex("hole and particle lists differ in length");
    if (holes.size() > static_cast<std::size_t>(spec.m))
        throw BadIndex("rank exceeds spec.m");
    for (int i : holes)
        if (!spec.is_hole(i))
            throw BadIndex("hole index " + std::to_string(i) + " out of range");
    for (int a : particles)
        if (!spec.is_particle(a))
            throw BadIndex("particle index " + std::to_string(a) + " out of range");

    std::vector<int> h(holes.begin(), holes.end());
    std::vector<int> p(particles.begin(), particles.end());
    const int sh = sort_desc_parity(h);
    const int sp = sort_desc_parity(p);

    ExcitationString s;
    s.rank_ = static_cast<std::int8_t>(h.size());
    s.sign_ = static_cast<std::int8_t>(sh * sp);
    for (std::size_t t = 0; t < h.size(); ++t) {
        s.holes_[t] = h[t];
        s.parts_[t] = p[t];
    }
    return s;
}

ExcitationString ExcitationString::with_hole(int t, int new_hole, const BasisSpec& spec) const {
    std::vector<int> h(holes().begin(), holes().end());
    std::vector<int> p(particles().begin(), particles().end());
    h[static_cast<std::size_t>(t)] = new_hole;
    ExcitationString out = mxkit::canonicalize(spec, h, p);
    // carry the original sign through the re-sort
    if (sign_ < 0) {
        out.sign_ = static_cast<std::int8_t>(-out.sign_);
    }
    return out;
}

ExcitationString ExcitationString::with_particle(int t, int new_particle, const BasisSpec& spec) const {
    std::vector<int> h(holes().begin(), holes().end());
    std::vector<int> p(particles().begin(), particles().end());
    p[static_cast<std::size_t>(t)] = new_particle;
    ExcitationString out = mxkit::canonicalize(spec, h, p);
    if (sign_ < 0) {
        out.sign_ = static_cast<std::int8_t>(-out.sign_);
    }
    return out;
}

bool ExcitationString::operator==(const ExcitationString& o) const {
    if (rank_ != o.rank_ || sign_ != o.sign_)
        return false;
    for (int t = 0; t < rank_; ++t)
        if (holes_[static_cast<std::size_t>(t)] != o.holes_[static_cast<std::size_t>(t)] ||
            parts_[static_cast<std::size_t>(t)] != o.parts_[static_cast<std::size_t>(t)])
            return false;
    return true;
}

std::string ExcitationString::str() const {
    if (rank_ == 0)
        return "|0>";
    std::ostringstream os;
    os << "|";
    for (int t = 0; t < rank_; ++t)
        os << parts_[static_cast<std::size_t>(t)] << (t + 1 < rank_ ? "," : "");
    os << ";";
    for (int t = 0; t < rank_; ++t)
        os << holes_[static_cast<std::size_t>(t)] << (t + 1 < rank_ ? "," : "");
    os << ">";
    if (sign_ < 0)
        os << "(-)";
    return os.str();
}

std::uint64_t encode(const ExcitationString& s, const BasisSpec& spec) {
    if (s.rank() > spec.m)
        throw RankMismatch("encode: string rank exceeds spec.m");
    const int b = spec.bits_per_index();
    std::uint64_t key = static_cast<std::uint64_t>(s.rank());
    for (int t = 0; t < spec.m; ++t) {
        const std::uint64_t field = t < s.rank() ? static_cast<std::uint64_t>(s.hole(t)) : 0;
        key = (key << b) | field;
    }
    for (int t = 0; t < spec.m; ++t) {
        const std::uint64_t field = t < s.rank() ? static_cast<std::uint64_t>(s.particle(t)) : 0;
        key = (key << b) | field;
    }
    return key;
}

ExcitationString decode(std::uint64_t key, const BasisSpec& spec) {
    const int b = spec.bits_per_index();
    const std::uint64_t mask = (std::uint64_t{1} << b) - 1;
    std::vector<int> parts(static_cast<std::size_t>(spec.m));
    std::vector<int> holes(static_cast<std::size_t>(spec.m));
    for (int t = spec.m - 1; t >= 0; --t) {
        parts[static_cast<std::size_t>(t)] = static_cast<int>(key & mask);
        key >>= b;
    }
    for (int t = spec.m - 1; t >= 0; --t) {
        holes[static_cast<std::size_t>(t)] = static_cast<int>(key & mask);
        key >>= b;
    }
    const int rank = static_cast<int>(key);
    if (rank > spec.m)
        throw RankMismatch("decode: rank field exceeds spec.m");
    holes.resize(static_cast<std::size_t>(rank));
    parts.resize(static_cast<std::size_t>(rank));
    return canonicalize(spec, holes, parts);
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

std::uint64_t dimension(const BasisSpec& spec, int k) {
    if (k < 0 || k > spec.m)
        throw RankMismatch("dimension: rank out of range");
    return binomial(spec.n_occ, k) * binomial(spec.n_virt, k);
}

namespace {

void combinations_desc(int lo, int hi, int k, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    // pick next (smaller) element below the last chosen one
    const int start = cur.empty() ? hi - 1 : cur.back() - 1;
    for (int v = start; v >= lo + (k - static_cast<int>(cur.size())) - 1; --v) {
        cur.push_back(v);
        combinations_desc(lo, hi, k, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<ExcitationString> enumerate_rank(const BasisSpec& spec, int k) {
    if (k < 0 || k > spec.m)
        throw RankMismatch("enumerate_rank: rank out of range");
    std::vector<ExcitationString> out;
    if (k == 0) {
        out.push_back(ExcitationString{});
        return out;
    }
    std::vector<std::vector<int>> holes, parts;
    std::vector<int> cur;
    combinations_desc(0, spec.n_occ, k, cur, holes);
    combinations_desc(spec.n_occ, spec.L(), k, cur, parts);
    out.reserve(holes.size() * parts.size());
    for (const auto& h : holes)
        for (const auto& p : parts)
            out.push_back(canonicalize(spec, h, p));
    std::sort(out.begin(), out.end(), [&](const ExcitationString& a, const ExcitationString& b) {
        return encode(a, spec) < encode(b, spec);
    });
    return out;
}

Determinant::Determinant(int n_orbitals)
    : words_(static_cast<std::size_t>((n_orbitals + 63) / 64), 0), n_orb_(n_orbitals) {}

Determinant Determinant::fermi_vacuum(const BasisSpec& spec) {
    Determinant d(spec.L());
    for (int p = 0; p < spec.n_occ; ++p)
        d.set(p);
    return d;
}

bool Determinant::occupied(int p) const {
    return (words_[static_cast<std::size_t>(p >> 6)] >> (p & 63)) & 1;
}

void Determinant::set(int p) { words_[static_cast<std::size_t>(p >> 6)] |= std::uint64_t{1} << (p & 63); }

void Determinant::clear(int p) { words_[static_cast<std::size_t>(p >> 6)] &= ~(std::uint64_t{1} << (p & 63)); }

int Determinant::popcount() const {
    int n = 0;
    for (auto w : words_)
        n += std::popcount(w);
    return n;
}

int Determinant::count_below(int p) const {
    int n = 0;
    const int w_full = p >> 6;
    for (int w = 0; w < w_full; ++w)
        n += std::popcount(words_[static_cast<std::size_t>(w)]);
    const int rem = p & 63;
    if (rem > 0)
        n += std::popcount(words_[static_cast<std::size_t>(w_full)] & ((std::uint64_t{1} << rem) - 1));
    return n;
}

std::vector<int> Determinant::occupied_minus(const Determinant& other) const {
    std::vector<int> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t diff = words_[w] & ~other.words_[w];
        while (diff) {
            const int bit = std::countr_zero(diff);
            out.push_back(static_cast<int>(w) * 64 + bit);
            diff &= diff - 1;
        }
    }
    return out;
}

std::vector<int> Determinant::occupied_list() const {
    std::vector<int> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            const int bit = std::countr_zero(bits);
            out.push_back(static_cast<int>(w) * 64 + bit);
            bits &= bits - 1;
        }
    }
    return out;
}

std::pair<Determinant, int> to_determinant(const ExcitationString& s, const BasisSpec& spec) {
    Determinant d = Determinant::fermi_vacuum(spec);
    int phase = s.sign();
    for (int t = 0; t < s.rank(); ++t) {
        const int i = s.hole(t);
        const int a = s.particle(t);
        if (!d.occupied(i))
            throw InvalidExcitation("annihilating empty orbital " + std::to_string(i));
        if (d.count_below(i) % 2 != 0)
            phase = -phase;
        d.clear(i);
        if (d.occupied(a))
            throw InvalidExcitation("creating filled orbital " + std::to_string(a));
        if (d.count_below(a) % 2 != 0)
            phase = -phase;
        d.set(a);
    }
    return {d, phase};
}

SparseState::Amplitude SparseState::get(std::uint64_t key) const {
    auto it = amps_.find(key);
    return it == amps_.end() ? Amplitude{0.0, 0.0} : it->second;
}

void SparseState::prune(double threshold) {
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (std::abs(it->second) <= threshold)
            it = amps_.erase(it);
        else
            ++it;
    }
}

void SparseState::scale(Amplitude a) {
    for (auto& [k, v] : amps_)
        v *= a;
}

void SparseState::axpy(Amplitude a, const SparseState& x) {
    for (const auto& [k, v] : x.amps_)
        amps_[k] += a * v;
}

SparseState::Amplitude SparseState::dot(const SparseState& x) const {
    // iterate the smaller map
    const SparseState* small = this;
    const SparseState* big = &x;
    bool conj_small = true;
    if (x.amps_.size() < amps_.size()) {
        small = &x;
        big = this;
        conj_small = false;
    }
    Amplitude acc{0.0, 0.0};
    for (const auto& [k, v] : small->amps_) {
        auto it = big->amps_.find(k);
        if (it == big->amps_.end())
            continue;
        acc += conj_small ? std::conj(v) * it->second : std::conj(it->second) * v;
    }
    return acc;
}

double SparseState::norm() const {
    double acc = 0.0;
    for (const auto& [k, v] : amps_)
        acc += std::norm(v);
    return std::sqrt(acc);
}

std::vector<std::pair<std::uint64_t, SparseState::Amplitude>> SparseState::sorted_entries() const {
    std::vector<std::pair<std::uint64_t, Amplitude>> out(amps_.begin(), amps_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

SparseState SparseState::unit(std::uint64_t key) {
    SparseState s;
    s.set(key, {1.0, 0.0});
    return s;
}

} // namespace mxkit
