#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mxkit/basis.hpp"

namespace mxkit {

struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line) : std::runtime_error(msg), line_number(line) {}
    long line_number;
};
struct InconsistentIntegrals : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Point = std::array<double, 3>;

enum class ModelMode { File, Lattice, Crystal };

/// Two orbitals (one valence, one conduction level) per lattice site, with
/// three interaction classes by index pattern: density-density U/(1+r) with
/// no cutoff, one-index-changed lambda_cd/(1+r)^2 and two-index-changed
/// lambda_dd/(1+r)^3, both truncated to zero beyond R_c. W = V / eps_screen.
struct ModelConfig {
    ModelMode mode = ModelMode::Lattice;
    int D = 1;
    int n_sites = 4;      // per axis
    double eps_gap = 2.0; // valence-conduction gap
    double t_hop = 0.0;
    double U = 0.0;
    double eps_screen = 1.0;
    double lambda_cd = 0.0;
    double lambda_dd = 0.0;
    double R_c = 1.0;
    double R_loc = 1.0;
    double drop_threshold = 1e-14;
    int n_fragments = 1;       // replicated decoupled blocks along axis 0
    double fragment_gap = 0.0; // extra spacing between blocks

    void validate() const;
};

ModelConfig parse_model_config(const std::string& json_text);
ModelConfig load_model_config(const std::string& path);

/// Provider of one- and two-electron integrals, orbital geometry and the
/// screening/cutoff metadata. Orbitals 0..S-1 are the occupied (valence)
/// set, S..2S-1 the virtual (conduction) set for generated models; file
/// providers declare their own occupied count. Immutable after construction.
class IntegralSet {
  public:
    virtual ~IntegralSet() = default;

    virtual int L() const = 0;
    virtual int n_occ() const = 0;
    virtual int D() const = 0;
    virtual ModelMode mode() const = 0;

    virtual double t(int p, int q) const = 0;
    virtual double V(int p, int q, int r, int s) const = 0;
    virtual double W(int p, int q, int r, int s) const = 0;
    virtual double f(int p, int q) const = 0;

    virtual Point position(int p) const = 0;
    /// Euclidean inter-orbital distance (minimum image in crystal mode).
    virtual double distance(int p, int q) const;

    virtual double eps_screen() const = 0;
    /// Off-diagonal interaction cutoff; negative means unknown/unbounded.
    virtual double r_cut() const = 0;
    virtual double r_loc() const = 0;
    virtual double drop_threshold() const { return 1e-14; }

    /// Radius within which any off-diagonal scattering element can be
    /// nonzero (max of R_c and R_loc); negative for file providers.
    double scatter_radius() const;

    /// Orbitals of the same occ/virt type as p within `radius` of p,
    /// including p itself. radius < 0 means all orbitals of that type.
    virtual std::vector<int> same_type_within(int p, double radius) const;
    /// Orbitals of the given type (true = occupied block) within `radius`
    /// of orbital `center`. radius < 0 means the whole type block.
    virtual std::vector<int> type_within(bool occupied_type, int center, double radius) const;

    bool is_occ(int p) const { return p < n_occ(); }

    /// <0|H|0> relative to nothing (plain reference energy). Cached.
    double e_hf() const;

    int n_virt() const { return L() - n_occ(); }

  private:
    mutable std::optional<double> e_hf_cache_;
};

/// Toy semiconductor on a D-dimensional lattice; `crystal` switches on
/// periodic boundary conditions with minimum-image distances, in which case
/// every integral depends only on the relative displacement.
class LatticeModel final : public IntegralSet {
  public:
    explicit LatticeModel(const ModelConfig& cfg);

    int L() const override { return 2 * n_sites_total_; }
    int n_occ() const override { return n_sites_total_; }
    int D() const override { return cfg_.D; }
    ModelMode mode() const override { return cfg_.mode; }

    double t(int p, int q) const override;
    double V(int p, int q, int r, int s) const override;
    double W(int p, int q, int r, int s) const override;
    double f(int p, int q) const override;

    Point position(int p) const override;
    double distance(int p, int q) const override;

    double eps_screen() const override { return cfg_.eps_screen; }
    double r_cut() const override { return cfg_.R_c; }
    double r_loc() const override { return cfg_.R_loc; }
    double drop_threshold() const override { return cfg_.drop_threshold; }

    std::vector<int> same_type_within(int p, double radius) const override;
    std::vector<int> type_within(bool occupied_type, int center, double radius) const override;

    const ModelConfig& config() const { return cfg_; }
    int n_sites_total() const { return n_sites_total_; }
    int site_of(int p) const { return p % n_sites_total_; }

  private:
    ModelConfig cfg_;
    int n_sites_total_;
    int cell_sites_; // sites per fragment block
    std::vector<Point> site_pos_;

    double site_distance(int s1, int s2) const;
    std::vector<int> sites_within(int site, double radius) const;
    double pair_diameter(int p, int q, int r, int s) const;
};

std::unique_ptr<IntegralSet> build_lattice(const ModelConfig& cfg);
std::unique_ptr<IntegralSet> build_crystal(ModelConfig cfg);

/// Tabulated integrals loaded from the `exints v1` text format. Untabulated
/// entries are zero; the Fock matrix is built from t and V.
class FileIntegrals final : public IntegralSet {
  public:
    int L() const override { return L_; }
    int n_occ() const override { return n_occ_; }
    int D() const override { return D_; }
    ModelMode mode() const override { return ModelMode::File; }

    double t(int p, int q) const override;
    double V(int p, int q, int r, int s) const override;
    double W(int p, int q, int r, int s) const override;
    double f(int p, int q) const override;

    Point position(int p) const override { return pos_[static_cast<std::size_t>(p)]; }

    double eps_screen() const override { return 1.0; }
    double r_cut() const override { return -1.0; }
    double r_loc() const override { return -1.0; }

    friend std::unique_ptr<IntegralSet> load_integrals(std::istream& in);

  private:
    int L_ = 0;
    int n_occ_ = 0;
    int D_ = 1;
    std::vector<Point> pos_;
    std::unordered_map<std::uint64_t, double> t_;
    std::unordered_map<std::uint64_t, double> v_;
    std::unordered_map<std::uint64_t, double> w_;
    mutable std::vector<double> f_cache_;

    void build_fock() const;
};

std::unique_ptr<IntegralSet> load_integrals(std::istream& in);
std::unique_ptr<IntegralSet> load_integrals(const std::string& path);

/// Writes every nonzero integral (canonical symmetry representatives once)
/// in the exints v1 format. Exact round-trip: values printed with
/// max_digits10 precision.
void dump_integrals(const IntegralSet& I, std::ostream& out);
void dump_integrals(const IntegralSet& I, const std::string& path);

/// Max deviation of the provider's f from t + sum_i (V_piqi - V_piiq); the
/// generated models build f directly and derive t, so this checks the two
/// routes against each other.
double fock_residual(const IntegralSet& I);

/// BasisSpec matching the provider's orbital partition.
BasisSpec basis_for(const IntegralSet& I, int m);

} // namespace mxkit
