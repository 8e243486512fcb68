#include "mxkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mxkit {

namespace {

constexpr double kCutTol = 1e-9;

double euclid(const Point& a, const Point& b) {
    double acc = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double dx = a[static_cast<std::size_t>(d)] - b[static_cast<std::size_t>(d)];
        acc += dx * dx;
    }
    return std::sqrt(acc);
}

} // namespace

void ModelConfig::validate() const {
    if (D < 1 || D > 3)
        throw InvalidConfig("D must be 1..3");
    if (n_sites < 1)
        throw InvalidConfig("n_sites must be positive");
    if (eps_gap <= 0.0)
        throw InvalidConfig("eps_gap must be > 0");
    if (eps_screen < 1.0)
        throw InvalidConfig("eps_screen must be >= 1");
    if (R_c < 1.0)
        throw InvalidConfig("R_c must be >= 1");
    if (R_loc <= 0.0)
        throw InvalidConfig("R_loc must be > 0");
    if (t_hop < 0.0 || U < 0.0 || lambda_cd < 0.0 || lambda_dd < 0.0)
        throw InvalidConfig("amplitudes must be >= 0");
    if (drop_threshold < 0.0)
        throw InvalidConfig("drop_threshold must be >= 0");
    if (n_fragments < 1)
        throw InvalidConfig("n_fragments must be >= 1");
    if (fragment_gap < 0.0)
        throw InvalidConfig("fragment_gap must be >= 0");
    if (mode == ModelMode::Crystal && n_fragments != 1)
        throw InvalidConfig("crystal mode does not support fragments");
    if (mode == ModelMode::File)
        throw InvalidConfig("file mode is not buildable from a lattice config");
}

ModelConfig parse_model_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what(),
                         static_cast<long>(e.byte));
    }
    ModelConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "mode") {
            const std::string m = val.get<std::string>();
            if (m == "lattice")
                cfg.mode = ModelMode::Lattice;
            else if (m == "crystal")
                cfg.mode = ModelMode::Crystal;
            else
                throw InvalidConfig("unknown mode '" + m + "'");
        } else if (key == "D")
            cfg.D = val.get<int>();
        else if (key == "n_sites")
            cfg.n_sites = val.get<int>();
        else if (key == "eps_gap")
            cfg.eps_gap = val.get<double>();
        else if (key == "t_hop")
            cfg.t_hop = val.get<double>();
        else if (key == "U")
            cfg.U = val.get<double>();
        else if (key == "eps_screen")
            cfg.eps_screen = val.get<double>();
        else if (key == "lambda_cd")
            cfg.lambda_cd = val.get<double>();
        else if (key == "lambda_dd")
            cfg.lambda_dd = val.get<double>();
        else if (key == "R_c")
            cfg.R_c = val.get<double>();
        else if (key == "R_loc")
            cfg.R_loc = val.get<double>();
        else if (key == "drop_threshold")
            cfg.drop_threshold = val.get<double>();
        else if (key == "n_fragments")
            cfg.n_fragments = val.get<int>();
        else if (key == "fragment_gap")
            cfg.fragment_gap = val.get<double>();
        else
            throw InvalidConfig("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file " + path, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_config(ss.str());
}

double IntegralSet::distance(int p, int q) const { return euclid(position(p), position(q)); }

double IntegralSet::scatter_radius() const {
    if (r_cut() < 0.0)
        return -1.0;
    return std::max(r_cut(), r_loc());
}

std::vector<int> IntegralSet::same_type_within(int p, double radius) const {
    return type_within(is_occ(p), p, radius);
}

std::vector<int> IntegralSet::type_within(bool occupied_type, int center, double radius) const {
    std::vector<int> out;
    const int lo = occupied_type ? 0 : n_occ();
    const int hi = occupied_type ? n_occ() : L();
    for (int q = lo; q < hi; ++q)
        if (radius < 0.0 || distance(center, q) <= radius + kCutTol)
            out.push_back(q);
    return out;
}

double IntegralSet::e_hf() const {
    if (!e_hf_cache_) {
        double e = 0.0;
        for (int i = 0; i < n_occ(); ++i)
            e += t(i, i);
        for (int i = 0; i < n_occ(); ++i)
            for (int j = 0; j < n_occ(); ++j)
                e += 0.5 * (V(i, j, i, j) - V(i, j, j, i));
        e_hf_cache_ = e;
    }
    return *e_hf_cache_;
}

LatticeModel::LatticeModel(const ModelConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    cell_sites_ = 1;
    for (int d = 0; d < cfg_.D; ++d)
        cell_sites_ *= cfg_.n_sites;
    n_sites_total_ = cell_sites_ * cfg_.n_fragments;
    if (n_sites_total_ > 1 << 14)
        throw InvalidConfig("lattice too large (" + std::to_string(n_sites_total_) + " sites)");

    site_pos_.resize(static_cast<std::size_t>(n_sites_total_));
    for (int s = 0; s < n_sites_total_; ++s) {
        const int frag = s / cell_sites_;
        int rem = s % cell_sites_;
        Point x{0.0, 0.0, 0.0};
        for (int d = 0; d < cfg_.D; ++d) {
            x[static_cast<std::size_t>(d)] = static_cast<double>(rem % cfg_.n_sites);
            rem /= cfg_.n_sites;
        }
        x[0] += static_cast<double>(frag) * (static_cast<double>(cfg_.n_sites) + cfg_.fragment_gap);
        site_pos_[static_cast<std::size_t>(s)] = x;
    }
}

double LatticeModel::site_distance(int s1, int s2) const {
    const Point& a = site_pos_[static_cast<std::size_t>(s1)];
    const Point& b = site_pos_[static_cast<std::size_t>(s2)];
    if (cfg_.mode != ModelMode::Crystal)
        return euclid(a, b);
    double acc = 0.0;
    const double span = static_cast<double>(cfg_.n_sites);
    for (int d = 0; d < cfg_.D; ++d) {
        double dx = std::abs(a[static_cast<std::size_t>(d)] - b[static_cast<std::size_t>(d)]);
        dx = std::min(dx, span - dx); // minimum image
        acc += dx * dx;
    }
    return std::sqrt(acc);
}

Point LatticeModel::position(int p) const { return site_pos_[static_cast<std::size_t>(site_of(p))]; }

double LatticeModel::distance(int p, int q) const { return site_distance(site_of(p), site_of(q)); }

double LatticeModel::pair_diameter(int p, int q, int r, int s) const {
    const int sites[4] = {site_of(p), site_of(q), site_of(r), site_of(s)};
    double diam = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            diam = std::max(diam, site_distance(sites[a], sites[b]));
    return diam;
}

double LatticeModel::V(int p, int q, int r, int s) const {
    const bool e1 = (p != r);
    const bool e2 = (q != s);
    if (!e1 && !e2) {
        // density-density: long range, no cutoff
        if (cfg_.U == 0.0)
            return 0.0;
        return cfg_.U / (1.0 + site_distance(site_of(p), site_of(q)));
    }
    const double diam = pair_diameter(p, q, r, s);
    if (diam > cfg_.R_c + kCutTol)
        return 0.0;
    const double denom = 1.0 + diam;
    if (e1 != e2) // charge-dipole
        return cfg_.lambda_cd / (denom * denom);
    return cfg_.lambda_dd / (denom * denom * denom); // dipole-dipole
}

double LatticeModel::W(int p, int q, int r, int s) const { return V(p, q, r, s) / cfg_.eps_screen; }

double LatticeModel::f(int p, int q) const {
    const bool po = is_occ(p);
    const bool qo = is_occ(q);
    if (po != qo)
        return 0.0; // Brillouin condition by construction
    if (p == q)
        return po ? -0.5 * cfg_.eps_gap : 0.5 * cfg_.eps_gap;
    if (cfg_.t_hop == 0.0)
        return 0.0;
    const double r = site_distance(site_of(p), site_of(q));
    if (r > cfg_.R_loc + kCutTol)
        return 0.0;
    return cfg_.t_hop * std::exp(-r / cfg_.R_loc);
}

double LatticeModel::t(int p, int q) const {
    double exch = 0.0;
    for (int i = 0; i < n_occ(); ++i)
        exch += V(p, i, q, i) - V(p, i, i, q);
    return f(p, q) - exch;
}

std::vector<int> LatticeModel::sites_within(int site, double radius) const {
    std::vector<int> out;
    for (int s = 0; s < n_sites_total_; ++s)
        if (site_distance(site, s) <= radius + kCutTol)
            out.push_back(s);
    return out;
}

std::vector<int> LatticeModel::same_type_within(int p, double radius) const {
    return type_within(is_occ(p), p, radius);
}

std::vector<int> LatticeModel::type_within(bool occupied_type, int center, double radius) const {
    if (radius < 0.0)
        return IntegralSet::type_within(occupied_type, center, radius);
    const int offset = occupied_type ? 0 : n_occ();
    std::vector<int> out;
    for (int s : sites_within(site_of(center), radius))
        out.push_back(offset + s);
    return out;
}

std::unique_ptr<IntegralSet> build_lattice(const ModelConfig& cfg) {
    ModelConfig c = cfg;
    c.mode = ModelMode::Lattice;
    return std::make_unique<LatticeModel>(c);
}

std::unique_ptr<IntegralSet> build_crystal(ModelConfig cfg) {
    cfg.mode = ModelMode::Crystal;
    return std::make_unique<LatticeModel>(cfg);
}

// ---------------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------------

namespace {

std::uint64_t pack2(int p, int q) {
    if (p > q)
        std::swap(p, q); // t and f are symmetric
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p)) << 32) |
           static_cast<std::uint32_t>(q);
}

std::uint64_t pack4(int p, int q, int r, int s) {
    return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(p)) << 48) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(q)) << 32) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(r)) << 16) |
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(s));
}

// Canonical representative of (p,q,r,s) under the real-integral 8-fold group
// generated by p<->r, q<->s and the electron relabel (p<->q, r<->s).
std::uint64_t v_canonical(int p, int q, int r, int s) {
    std::uint64_t best = ~std::uint64_t{0};
    const int tup[4] = {p, q, r, s};
    for (int mask = 0; mask < 8; ++mask) {
        int a = tup[0], b = tup[1], c = tup[2], d = tup[3];
        if (mask & 1)
            std::swap(a, c);
        if (mask & 2)
            std::swap(b, d);
        if (mask & 4) {
            std::swap(a, b);
            std::swap(c, d);
        }
        best = std::min(best, pack4(a, b, c, d));
    }
    return best;
}

void insert_checked(std::unordered_map<std::uint64_t, double>& map, std::uint64_t key, double val,
                    const char* what) {
    auto [it, fresh] = map.try_emplace(key, val);
    if (!fresh && std::abs(it->second - val) > 1e-10)
        throw InconsistentIntegrals(std::string(what) +
                                    " entries violate the integral symmetry beyond 1e-10");
}

} // namespace

double FileIntegrals::t(int p, int q) const {
    auto it = t_.find(pack2(p, q));
    return it == t_.end() ? 0.0 : it->second;
}

double FileIntegrals::V(int p, int q, int r, int s) const {
    auto it = v_.find(v_canonical(p, q, r, s));
    return it == v_.end() ? 0.0 : it->second;
}

double FileIntegrals::W(int p, int q, int r, int s) const {
    auto it = w_.find(v_canonical(p, q, r, s));
    return it == w_.end() ? 0.0 : it->second;
}

void FileIntegrals::build_fock() const {
    if (!f_cache_.empty())
        return;
    f_cache_.assign(static_cast<std::size_t>(L_) * static_cast<std::size_t>(L_), 0.0);
    for (int p = 0; p < L_; ++p)
        for (int q = p; q < L_; ++q) {
            double val = t(p, q);
            for (int i = 0; i < n_occ_; ++i)
                val += V(p, i, q, i) - V(p, i, i, q); // f = t + sum_occ (J - K)
            f_cache_[static_cast<std::size_t>(p) * static_cast<std::size_t>(L_) +
                     static_cast<std::size_t>(q)] = val;
            f_cache_[static_cast<std::size_t>(q) * static_cast<std::size_t>(L_) +
                     static_cast<std::size_t>(p)] = val;
        }
}

double FileIntegrals::f(int p, int q) const {
    build_fock();
    return f_cache_[static_cast<std::size_t>(p) * static_cast<std::size_t>(L_) +
                    static_cast<std::size_t>(q)];
}

std::unique_ptr<IntegralSet> load_integrals(std::istream& in) {
    auto I = std::make_unique<FileIntegrals>();
    std::string line;
    long lineno = 0;
    bool have_header = false;

    auto fail = [&](const std::string& msg) -> void { throw ParseError(msg + " (line " + std::to_string(lineno) + ")", lineno); };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag))
            continue;

        if (!have_header) {
            if (tag != "exints")
                fail("expected 'exints v1' header");
            std::string version;
            ss >> version;
            if (version != "v1")
                fail("unsupported format version '" + version + "'");
            std::string field;
            int L = 0, nocc = 0, D = 0;
            while (ss >> field) {
                if (field.rfind("L=", 0) == 0)
                    L = std::stoi(field.substr(2));
                else if (field.rfind("nocc=", 0) == 0)
                    nocc = std::stoi(field.substr(5));
                else if (field.rfind("D=", 0) == 0)
                    D = std::stoi(field.substr(2));
                else
                    fail("unknown header field '" + field + "'");
            }
            if (L < 2 || nocc < 1 || nocc >= L || D < 1 || D > 3)
                fail("invalid header dimensions");
            if (L > (1 << 16))
                fail("L exceeds the packed-index limit");
            I->L_ = L;
            I->n_occ_ = nocc;
            I->D_ = D;
            I->pos_.assign(static_cast<std::size_t>(L), Point{0.0, 0.0, 0.0});
            have_header = true;
            continue;
        }

        auto read_orbital = [&](int& p) {
            if (!(ss >> p))
                fail("missing orbital index");
            if (p < 0 || p >= I->L_)
                fail("orbital index " + std::to_string(p) + " out of range");
        };

        if (tag == "pos") {
            int p = 0;
            read_orbital(p);
            Point x{0.0, 0.0, 0.0};
            for (int d = 0; d < I->D_; ++d)
                if (!(ss >> x[static_cast<std::size_t>(d)]))
                    fail("missing coordinate");
            I->pos_[static_cast<std::size_t>(p)] = x;
        } else if (tag == "t") {
            int p = 0, q = 0;
            double val = 0.0;
            read_orbital(p);
            read_orbital(q);
            if (!(ss >> val))
                fail("missing value");
            insert_checked(I->t_, pack2(p, q), val, "t");
        } else if (tag == "V" || tag == "W") {
            int p = 0, q = 0, r = 0, s = 0;
            double val = 0.0;
            read_orbital(p);
            read_orbital(q);
            read_orbital(r);
            read_orbital(s);
            if (!(ss >> val))
                fail("missing value");
            insert_checked(tag == "V" ? I->v_ : I->w_, v_canonical(p, q, r, s), val, tag.c_str());
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    if (!have_header)
        throw ParseError("missing 'exints v1' header", lineno);
    return I;
}

std::unique_ptr<IntegralSet> load_integrals(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open integral file " + path, 0);
    return load_integrals(in);
}

void dump_integrals(const IntegralSet& I, std::ostream& out) {
    const int L = I.L();
    if (L > 48)
        throw std::runtime_error("dump_integrals: only systems with L <= 48 can be tabulated");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "exints v1 L=" << L << " nocc=" << I.n_occ() << " D=" << I.D() << "\n";
    for (int p = 0; p < L; ++p) {
        const Point x = I.position(p);
        out << "pos " << p;
        for (int d = 0; d < I.D(); ++d)
            out << " " << x[static_cast<std::size_t>(d)];
        out << "\n";
    }
    for (int p = 0; p < L; ++p)
        for (int q = p; q < L; ++q) {
            const double val = I.t(p, q);
            if (val != 0.0)
                out << "t " << p << " " << q << " " << val << "\n";
        }
    for (char which : {'V', 'W'}) {
        for (int p = 0; p < L; ++p)
            for (int q = 0; q < L; ++q)
                for (int r = 0; r < L; ++r)
                    for (int s = 0; s < L; ++s) {
                        if (v_canonical(p, q, r, s) != pack4(p, q, r, s))
                            continue; // one representative per symmetry orbit
                        const double val = which == 'V' ? I.V(p, q, r, s) : I.W(p, q, r, s);
                        if (val != 0.0)
                            out << which << " " << p << " " << q << " " << r << " " << s << " "
                                << val << "\n";
                    }
    }
}

void dump_integrals(const IntegralSet& I, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file " + path);
    dump_integrals(I, out);
}

double fock_residual(const IntegralSet& I) {
    double worst = 0.0;
    for (int p = 0; p < I.L(); ++p)
        for (int q = 0; q < I.L(); ++q) {
            double val = I.t(p, q);
            for (int i = 0; i < I.n_occ(); ++i)
                val += I.V(p, i, q, i) - I.V(p, i, i, q);
            worst = std::max(worst, std::abs(I.f(p, q) - val));
        }
    return worst;
}

BasisSpec basis_for(const IntegralSet& I, int m) { return BasisSpec(I.n_occ(), I.n_virt(), m, I.D()); }

} // namespace mxkit
