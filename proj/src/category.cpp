#include "tubecalc/category.hpp"

#include "tubecalc/linalg.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tubecalc {

namespace {

Scalar parse_field(const nlohmann::json& j, const char* key, const std::string& fallback,
                   Backend backend, const std::string& where) {
    std::string text = fallback;
    if (j.contains(key)) {
        const auto& v = j.at(key);
        if (v.is_string()) text = v.get<std::string>();
        else if (v.is_number_integer()) text = std::to_string(v.get<long>());
        else throw SpecError(where + ": field '" + key + "' must be a scalar expression");
    } else if (fallback.empty()) {
        throw SpecError(where + ": missing field '" + key + "'");
    }
    try {
        return parse_scalar(text, backend);
    } catch (const std::exception& e) {
        throw SpecError(where + ": cannot parse '" + text + "': " + e.what());
    }
}

std::string str_field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw SpecError(where + ": missing string field '" + key + "'");
    return j.at(key).get<std::string>();
}

int int_field(const nlohmann::json& j, const char* key, int fallback, bool required,
              const std::string& where) {
    if (!j.contains(key)) {
        if (required) throw SpecError(where + ": missing integer field '" + key + "'");
        return fallback;
    }
    if (!j.at(key).is_number_integer())
        throw SpecError(where + ": field '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

}  // namespace

SpecDocument parse_spec_document(const std::string& json_text, Backend backend) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw SpecError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("spec document must be a JSON object");
    SpecDocument doc;
    doc.backend = backend;
    doc.name = j.value("name", std::string("unnamed"));
    doc.zero_cells = int_field(j, "zero_cells", 1, true, "spec");
    if (doc.zero_cells < 1) throw SpecError("zero_cells must be positive");
    if (!j.contains("simples") || !j["simples"].is_array()) throw SpecError("missing array 'simples'");
    for (std::size_t k = 0; k < j["simples"].size(); ++k) {
        const auto& s = j["simples"][k];
        std::string where = "simples[" + std::to_string(k) + "]";
        SpecDocument::Simple x;
        x.name = str_field(s, "name", where);
        x.source = int_field(s, "source", 0, true, where);
        x.target = int_field(s, "target", 0, true, where);
        x.dual = str_field(s, "dual", where);
        x.qdim = parse_field(s, "qdim", "", backend, where);
        x.sqrt_qdim = parse_field(s, "sqrt_qdim", "", backend, where);
        x.pivotal = parse_field(s, "pivotal", "1", backend, where);
        doc.simples.push_back(x);
    }
    if (j.contains("fusion")) {
        if (!j["fusion"].is_array()) throw SpecError("'fusion' must be an array");
        for (std::size_t k = 0; k < j["fusion"].size(); ++k) {
            const auto& s = j["fusion"][k];
            std::string where = "fusion[" + std::to_string(k) + "]";
            SpecDocument::Fusion f{str_field(s, "a", where), str_field(s, "b", where),
                                   str_field(s, "c", where), int_field(s, "mult", 1, false, where)};
            if (f.mult < 1) throw SpecError(where + ": mult must be >= 1");
            doc.fusion.push_back(f);
        }
    }
    if (j.contains("F")) {
        if (!j["F"].is_array()) throw SpecError("'F' must be an array");
        for (std::size_t k = 0; k < j["F"].size(); ++k) {
            const auto& s = j["F"][k];
            std::string where = "F[" + std::to_string(k) + "]";
            SpecDocument::FEntry f;
            f.a = str_field(s, "a", where);
            f.b = str_field(s, "b", where);
            f.c = str_field(s, "c", where);
            f.d = str_field(s, "d", where);
            f.e = str_field(s, "e", where);
            f.f = str_field(s, "f", where);
            f.mu = int_field(s, "mu", 0, false, where);
            f.nu = int_field(s, "nu", 0, false, where);
            f.rho = int_field(s, "rho", 0, false, where);
            f.sigma = int_field(s, "sigma", 0, false, where);
            f.value = parse_field(s, "value", "", backend, where);
            doc.F.push_back(f);
        }
    }
    return doc;
}

SpecDocument load_spec_file(const std::string& path, Backend backend) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec_document(ss.str(), backend);
}

bool ValidationReport::ok() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Real ValidationReport::residual(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c.residual;
    throw std::out_of_range("no check named " + name);
}

template <class T>
Category<T>::Category(const SpecDocument& doc, const TolerancePolicy& pol) : doc_(doc) {
    name_ = doc.name;
    zero_cells_ = doc.zero_cells;
    const int n = static_cast<int>(doc.simples.size());
    if (n == 0) throw SpecError("no simples");
    for (const auto& s : doc.simples) {
        if (find(s.name) >= 0) throw SpecError("duplicate simple name " + s.name);
        names_.push_back(s.name);
    }
    auto resolve = [&](const std::string& nm, const std::string& where) {
        int id = find(nm);
        if (id < 0) throw SpecError(where + ": dangling label '" + nm + "'");
        return id;
    };
    for (int a = 0; a < n; ++a) {
        const auto& s = doc.simples[a];
        if (s.source < 0 || s.source >= zero_cells_ || s.target < 0 || s.target >= zero_cells_)
            throw SpecError("simple " + s.name + ": 0-cell out of range");
        source_.push_back(s.source);
        target_.push_back(s.target);
        dual_.push_back(resolve(s.dual, "simple " + s.name));
        d_.push_back(Field<T>::from_scalar(s.qdim));
        sqrtd_.push_back(Field<T>::from_scalar(s.sqrt_qdim));
        p_.push_back(Field<T>::from_scalar(s.pivotal));
        qdim_s_.push_back(s.qdim);
    }
    N_.assign(static_cast<std::size_t>(n) * n * n, 0);
    for (const auto& f : doc.fusion) {
        int a = resolve(f.a, "fusion"), b = resolve(f.b, "fusion"), c = resolve(f.c, "fusion");
        if (target_[a] != source_[b] || source_[a] != source_[c] || target_[b] != target_[c])
            throw SpecError("fusion " + f.a + "*" + f.b + "->" + f.c + " is not composable");
        N_[(a * n + b) * n + c] = f.mult;
    }
    // unit of each 0-cell: the diagonal simple acting trivially by fusion
    unit_.assign(zero_cells_, -1);
    for (int u = 0; u < n; ++u) {
        if (source_[u] != target_[u]) continue;
        bool is_u = true;
        for (int b = 0; b < n && is_u; ++b) {
            if (source_[b] == source_[u])
                for (int c = 0; c < n; ++c)
                    if (N(u, b, c) != (b == c ? 1 : 0)) is_u = false;
            if (target_[b] == source_[u])
                for (int c = 0; c < n; ++c)
                    if (N(b, u, c) != (b == c ? 1 : 0)) is_u = false;
        }
        if (!is_u) continue;
        if (unit_[source_[u]] >= 0) throw SpecError("two unit simples for one 0-cell");
        unit_[source_[u]] = u;
    }
    for (int i = 0; i < zero_cells_; ++i)
        if (unit_[i] < 0) throw SpecError("0-cell " + std::to_string(i) + " has no unit simple");
    for (int a = 0; a < n; ++a)
        if (diagonal(a)) diag_.push_back(a);
    build_blocks(doc, pol);
}

template <class T>
int Category<T>::find(const std::string& nm) const {
    for (int a = 0; a < static_cast<int>(names_.size()); ++a)
        if (names_[a] == nm) return a;
    return -1;
}

template <class T>
const FBlock<T>* Category<T>::F(int a, int b, int c, int d) const {
    auto it = blocks_.find({a, b, c, d});
    return it == blocks_.end() ? nullptr : &it->second;
}

template <class T>
void Category<T>::build_blocks(const SpecDocument& doc, const TolerancePolicy& pol) {
    const int n = size();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (!composable(a, b)) continue;
            for (int c = 0; c < n; ++c) {
                if (!composable(b, c)) continue;
                for (int d = 0; d < n; ++d) {
                    if (source_[d] != source_[a] || target_[d] != target_[c]) continue;
                    FBlock<T> blk;
                    blk.row_offset.assign(n, -1);
                    blk.col_offset.assign(n, -1);
                    for (int e = 0; e < n; ++e) {
                        int m1 = N(a, b, e), m2 = N(e, c, d);
                        if (!m1 || !m2) continue;
                        blk.row_offset[e] = static_cast<int>(blk.rows.size());
                        for (int mu = 0; mu < m1; ++mu)
                            for (int nu = 0; nu < m2; ++nu) blk.rows.push_back({e, mu, nu});
                    }
                    for (int f = 0; f < n; ++f) {
                        int m1 = N(b, c, f), m2 = N(a, f, d);
                        if (!m1 || !m2) continue;
                        blk.col_offset[f] = static_cast<int>(blk.cols.size());
                        for (int rho = 0; rho < m1; ++rho)
                            for (int sg = 0; sg < m2; ++sg) blk.cols.push_back({f, rho, sg});
                    }
                    if (blk.rows.empty() && blk.cols.empty()) continue;
                    if (blk.rows.size() != blk.cols.size())
                        throw SpecError("non-square F-block at (" + label(a) + "," + label(b) + "," +
                                        label(c) + ";" + label(d) + ")");
                    const auto k = static_cast<Eigen::Index>(blk.rows.size());
                    blk.m = Mat<T>::Zero(k, k);
                    if (is_unit(a) || is_unit(b) || is_unit(c)) {
                        // gauge: identity between matching trees
                        for (Eigen::Index r = 0; r < k; ++r) {
                            auto [e, mu, nu] = blk.rows[r];
                            int f, rho, sg;
                            if (is_unit(a)) {
                                f = d;
                                rho = nu;
                                sg = 0;
                            } else if (is_unit(b)) {
                                f = c;
                                rho = 0;
                                sg = nu;
                            } else {
                                f = b;
                                rho = 0;
                                sg = mu;
                            }
                            int cidx = blk.col(f, rho, sg, N(a, f, d));
                            blk.m(r, cidx) = Field<T>::one();
                        }
                    }
                    blocks_.emplace(std::array<int, 4>{a, b, c, d}, std::move(blk));
                }
            }
        }
    std::map<std::array<int, 4>, Mat<T>> listed;
    for (const auto& f : doc.F) {
        int a = find(f.a), b = find(f.b), c = find(f.c), d = find(f.d), e = find(f.e),
            ff = find(f.f);
        for (const auto* nm : {&f.a, &f.b, &f.c, &f.d, &f.e, &f.f})
            if (find(*nm) < 0) throw SpecError("F entry: dangling label '" + *nm + "'");
        auto it = blocks_.find({a, b, c, d});
        if (it == blocks_.end())
            throw SpecError("F entry for an empty block (" + f.a + "," + f.b + "," + f.c + ";" + f.d + ")");
        auto& blk = it->second;
        if (blk.row_offset[e] < 0 || blk.col_offset[ff] < 0 || f.mu >= N(a, b, e) ||
            f.nu >= N(e, c, d) || f.rho >= N(b, c, ff) || f.sigma >= N(a, ff, d))
            throw SpecError("F entry with inadmissible indices (" + f.a + "," + f.b + "," + f.c + ";" +
                            f.d + ";" + f.e + "," + f.f + ")");
        int r = blk.row(e, f.mu, f.nu, N(e, c, d));
        int col = blk.col(ff, f.rho, f.sigma, N(a, ff, d));
        T v = Field<T>::from_scalar(f.value);
        if (is_unit(a) || is_unit(b) || is_unit(c)) {
            T expect = blk.m(r, col);
            Real tol = Field<T>::exact ? Real(0) : Real(pol.abs_tol) + Real(1e-12);
            if (!Field<T>::is_zero(T(v - expect), tol))
                throw SpecError("F-blocks with a unit label must be identity matrices");
            continue;
        }
        blk.m(r, col) = v;
    }
    for (auto& [key, blk] : blocks_) {
        try {
            blk.inv = inverse<T>(blk.m, pol);
        } catch (const std::exception&) {
            throw SpecError("F-block (" + label(key[0]) + "," + label(key[1]) + "," + label(key[2]) + ";" +
                            label(key[3]) + ") is not invertible");
        }
    }
}

template <class T>
long hom_dimension(const Category<T>& cat, int anchor_cell, const std::vector<int>& word) {
    const int n = cat.size();
    std::vector<long> cur(n, 0), next(n, 0);
    cur[cat.unit(anchor_cell)] = 1;
    for (int x : word) {
        std::fill(next.begin(), next.end(), 0);
        for (int t = 0; t < n; ++t) {
            if (!cur[t] || !cat.composable(t, x)) continue;
            for (int s = 0; s < n; ++s) next[s] += cur[t] * cat.N(t, x, s);
        }
        std::swap(cur, next);
    }
    return cur[cat.unit(anchor_cell)];
}

template <class T>
T global_dimension(const Category<T>& cat, int cell) {
    T g = Field<T>::zero();
    for (int a = 0; a < cat.size(); ++a)
        if (cat.source(a) == cell && cat.target(a) == cell) g += cat.d(a) * cat.d(a);
    return g;
}

namespace {

template <class T>
struct Tracker {
    Real worst{0};
    void see(const T& v) {
        Real m = Field<T>::exact ? (Field<T>::is_zero(v, Real(0)) ? Real(0) : abs(Field<T>::to_complex(v)))
                                 : abs(Field<T>::to_complex(v));
        if (m > worst) worst = m;
    }
};

}  // namespace

template <class T>
ValidationReport validate(const Category<T>& cat, const TolerancePolicy& pol) {
    ValidationReport rep;
    const int n = cat.size();
    const Real tol(pol.abs_tol);
    auto add = [&](const std::string& name, const Real& r) {
        rep.checks.push_back({name, r, r <= tol});
    };

    {  // pentagon
        Tracker<T> tr;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (!cat.composable(a, b)) continue;
                for (int c = 0; c < n; ++c) {
                    if (!cat.composable(b, c)) continue;
                    for (int dd = 0; dd < n; ++dd) {
                        if (!cat.composable(c, dd)) continue;
                        for (int u = 0; u < n; ++u) {
                            if (cat.source(u) != cat.source(a) || cat.target(u) != cat.target(dd)) continue;
                            // fully left trees (e,v1)(f,v2)(u,v3); fully right (h,w1)(g,y1)(u,y2)
                            for (int e = 0; e < n; ++e)
                                for (int f = 0; f < n; ++f) {
                                    int m1 = cat.N(a, b, e), m2 = cat.N(e, c, f), m3 = cat.N(f, dd, u);
                                    if (!m1 || !m2 || !m3) continue;
                                    for (int g = 0; g < n; ++g)
                                        for (int h = 0; h < n; ++h) {
                                            int k1 = cat.N(c, dd, h), k2 = cat.N(b, h, g), k3 = cat.N(a, g, u);
                                            if (!k1 || !k2 || !k3) continue;
                                            for (int v1 = 0; v1 < m1; ++v1)
                                                for (int v2 = 0; v2 < m2; ++v2)
                                                    for (int v3 = 0; v3 < m3; ++v3)
                                                        for (int w1 = 0; w1 < k1; ++w1)
                                                            for (int y1 = 0; y1 < k2; ++y1)
                                                                for (int y2 = 0; y2 < k3; ++y2) {
                                                                    // path 1: F^{ecd}_u then F^{abh}_u
                                                                    T lhs = Field<T>::zero();
                                                                    const auto* F1 = cat.F(e, c, dd, u);
                                                                    const auto* F2 = cat.F(a, b, h, u);
                                                                    if (F1 && F2 && F1->col_offset[h] >= 0 &&
                                                                        F2->col_offset[g] >= 0) {
                                                                        int nw2 = cat.N(e, h, u);
                                                                        for (int w2 = 0; w2 < nw2; ++w2) {
                                                                            T x = F1->m(F1->row(f, v2, v3, m3),
                                                                                        F1->col(h, w1, w2, nw2));
                                                                            T y = F2->m(F2->row(e, v1, w2, nw2),
                                                                                        F2->col(g, y1, y2, k3));
                                                                            lhs += x * y;
                                                                        }
                                                                    }
                                                                    // path 2: F^{abc}_f, F^{akd}_u, F^{bcd}_g
                                                                    T rhs = Field<T>::zero();
                                                                    const auto* G1 = cat.F(a, b, c, f);
                                                                    const auto* G3 = cat.F(b, c, dd, g);
                                                                    for (int k = 0; k < n; ++k) {
                                                                        int nz1 = cat.N(b, c, k), nz2 = cat.N(a, k, f);
                                                                        int nq1 = cat.N(k, dd, g);
                                                                        if (!nz1 || !nz2 || !nq1) continue;
                                                                        const auto* G2 = cat.F(a, k, dd, u);
                                                                        for (int z1 = 0; z1 < nz1; ++z1)
                                                                            for (int z2 = 0; z2 < nz2; ++z2)
                                                                                for (int q1 = 0; q1 < nq1; ++q1) {
                                                                                    T x = G1->m(G1->row(e, v1, v2, m2),
                                                                                                G1->col(k, z1, z2, nz2));
                                                                                    T y = G2->m(G2->row(f, z2, v3, m3),
                                                                                                G2->col(g, q1, y2, k3));
                                                                                    T z = G3->m(G3->row(k, z1, q1, nq1),
                                                                                                G3->col(h, w1, y1, k2));
                                                                                    rhs += x * y * z;
                                                                                }
                                                                    }
                                                                    tr.see(T(lhs - rhs));
                                                                }
                                        }
                                }
                        }
                    }
                }
            }
        add("pentagon", tr.worst);
    }
    {  // unit laws and rigidity of the fusion rules
        Real bad(0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (!cat.composable(a, b)) continue;
                if (cat.is_unit(a) && cat.N(a, b, b) != 1) bad = 1;
                if (cat.is_unit(b) && cat.N(a, b, a) != 1) bad = 1;
            }
        for (int a = 0; a < n; ++a) {
            int ad = cat.dual(a);
            if (cat.N(a, ad, cat.unit(cat.source(a))) != 1) bad = 1;
        }
        add("unit-law", bad);
    }
    {  // Frobenius reciprocity
        Real bad(0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    int v = cat.N(a, b, c);
                    if (!cat.composable(a, b)) continue;
                    if (v != cat.N(b, cat.dual(c), cat.dual(a)) || v != cat.N(cat.dual(c), a, cat.dual(b)))
                        bad = 1;
                }
        add("frobenius-reciprocity", bad);
    }
    {  // d_a d_b = sum_c N d_c
        Tracker<T> tr;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (!cat.composable(a, b)) continue;
                T s = Field<T>::zero();
                for (int c = 0; c < n; ++c)
                    if (cat.N(a, b, c)) s += Field<T>::from_int(cat.N(a, b, c)) * cat.d(c);
                tr.see(T(cat.d(a) * cat.d(b) - s));
            }
        add("dimension-equation", tr.worst);
    }
    {  // duality data
        Tracker<T> tr;
        Real bad(0);
        for (int a = 0; a < n; ++a) {
            int ad = cat.dual(a);
            if (cat.dual(ad) != a || cat.source(ad) != cat.target(a) || cat.target(ad) != cat.source(a)) bad = 1;
            tr.see(T(cat.d(a) - cat.d(ad)));
            tr.see(T(cat.pivotal(a) - cat.pivotal(ad)));
        }
        for (int i = 0; i < cat.zero_cells(); ++i) {
            int u = cat.unit(i);
            if (cat.dual(u) != u) bad = 1;
            tr.see(T(cat.d(u) - Field<T>::one()));
            tr.see(T(cat.pivotal(u) - Field<T>::one()));
        }
        add("dual-involution", std::max(bad, tr.worst));
    }
    {
        Tracker<T> tr;
        for (int a = 0; a < n; ++a) tr.see(T(cat.sqrtd(a) * cat.sqrtd(a) - cat.d(a)));
        add("sqrt-consistency", tr.worst);
    }
    {  // both snake identities expressed through F and the cup/cap scales
        Tracker<T> tr;
        for (int a = 0; a < n; ++a) {
            int ad = cat.dual(a);
            int ua = cat.unit(cat.source(a)), uad = cat.unit(cat.source(ad));
            const auto* F1 = cat.F(a, ad, a, a);
            T v1 = F1->m(F1->row(ua, 0, 0, 1), F1->col(uad, 0, 0, 1));
            tr.see(T(cat.cup_scale(a) * cat.cap_scale(ad) * v1 - Field<T>::one()));
            const auto* F2 = cat.F(ad, a, ad, ad);
            T v2 = F2->inv(F2->col(ua, 0, 0, 1), F2->row(uad, 0, 0, 1));
            tr.see(T(cat.cup_scale(a) * cat.cap_scale(ad) * v2 - Field<T>::one()));
        }
        add("snake", tr.worst);
    }
    {  // left and right traces of identities both equal d_a
        Tracker<T> tr;
        for (int a = 0; a < n; ++a) {
            int ad = cat.dual(a);
            T left = cat.cup_scale(ad) * cat.cap_scale(ad);
            T right = cat.cup_scale(a) * cat.cap_scale(a);
            tr.see(T(left - right));
            tr.see(T(left - cat.d(a)));
        }
        add("spherical-trace", tr.worst);
    }
    return rep;
}

template class Category<Cplx>;
template class Category<Cyclo>;
template ValidationReport validate(const Category<Cplx>&, const TolerancePolicy&);
template ValidationReport validate(const Category<Cyclo>&, const TolerancePolicy&);
template long hom_dimension(const Category<Cplx>&, int, const std::vector<int>&);
template long hom_dimension(const Category<Cyclo>&, int, const std::vector<int>&);
template Cplx global_dimension(const Category<Cplx>&, int);
template Cyclo global_dimension(const Category<Cyclo>&, int);

}  // namespace tubecalc
