#include "tubecalc/center.hpp"

#include "tubecalc/linalg.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace tubecalc {

namespace {

std::string scalar_text(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long>());
    throw SpecError(where + ": expected a scalar expression");
}

}  // namespace

CenterFixtureDocument parse_center_fixture(const std::string& json_text, Backend backend) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw SpecError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("center fixture must be a JSON object");
    CenterFixtureDocument doc;
    if (!j.contains("spec") || !j.at("spec").is_string()) throw SpecError("center fixture: missing 'spec'");
    doc.spec_path = j.at("spec").get<std::string>();
    doc.complete = j.value("complete", false);
    doc.negative = j.value("negative", false);
    if (!j.contains("objects") || !j.at("objects").is_array()) throw SpecError("center fixture: missing 'objects'");
    for (const auto& o : j.at("objects")) {
        HalfBraidingDocument hb;
        hb.name = o.value("name", "");
        const std::string where = "object '" + hb.name + "'";
        if (!o.contains("object") || !o.at("object").is_object()) throw SpecError(where + ": missing 'object'");
        for (const auto& [k, v] : o.at("object").items()) {
            if (!v.is_number_integer() || v.get<int>() < 0) throw SpecError(where + ": bad multiplicity for " + k);
            hb.object[k] = v.get<int>();
        }
        for (const auto& s : o.value("sigma", nlohmann::json::array())) {
            if (!s.contains("x") || !s.contains("matrix") || !s.at("matrix").is_array())
                throw SpecError(where + ": sigma entries need 'x' and 'matrix'");
            std::vector<Scalar> m;
            for (const auto& v : s.at("matrix")) {
                try {
                    m.push_back(parse_scalar(scalar_text(v, where), backend));
                } catch (const ParseError& e) {
                    throw SpecError(where + ": " + e.what());
                }
            }
            hb.sigma.emplace_back(s.at("x").get<std::string>(), std::move(m));
        }
        doc.objects.push_back(std::move(hb));
    }
    for (const auto& p : j.value("pairs", nlohmann::json::array())) {
        if (!p.is_array() || p.size() != 2) throw SpecError("center fixture: pairs are two-element arrays");
        doc.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return doc;
}

CenterFixtureDocument load_center_fixture(const std::string& path, Backend backend) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto doc = parse_center_fixture(ss.str(), backend);
    std::filesystem::path sp(doc.spec_path);
    if (sp.is_relative()) doc.spec_path = (std::filesystem::path(path).parent_path() / sp).string();
    return doc;
}

template <class T>
HalfBraiding<T> make_halfbraiding(const Category<T>& cat, const HalfBraidingDocument& doc,
                                  const TolerancePolicy& pol) {
    HalfBraiding<T> hb;
    hb.name = doc.name;
    const int n = cat.size();
    hb.mult.assign(n, 0);
    for (const auto& [name, m] : doc.object) {
        int a = cat.find(name);
        if (a < 0) throw SpecError(doc.name + ": unknown simple " + name);
        if (!cat.diagonal(a)) throw SpecError(doc.name + ": " + name + " is not diagonal");
        hb.mult[a] = m;
    }
    std::map<int, const std::vector<Scalar>*> given;
    for (const auto& [xs, m] : doc.sigma) {
        int x = cat.find(xs);
        if (x < 0) throw SpecError(doc.name + ": unknown simple " + xs);
        given[x] = &m;
    }
    for (int x = 0; x < n; ++x) {
        auto& cols = hb.cols[x];
        auto& rows = hb.rows[x];
        for (int e = 0; e < n; ++e)
            for (int a = 0; a < n; ++a)
                for (int v = 0; v < hb.mult[a]; ++v) {
                    if (cat.composable(x, a))
                        for (int mu = 0; mu < cat.N(x, a, e); ++mu) cols.emplace(SigmaIndex{e, a, v, mu}, 0);
                    if (cat.composable(a, x))
                        for (int mu = 0; mu < cat.N(a, x, e); ++mu) rows.emplace(SigmaIndex{e, a, v, mu}, 0);
                }
        int i = 0;
        for (auto& [k, idx] : cols) idx = i++;
        i = 0;
        for (auto& [k, idx] : rows) idx = i++;
        const int nr = static_cast<int>(rows.size()), nc = static_cast<int>(cols.size());
        if (nr != nc) throw SpecError(doc.name + ": x X and X x differ in size for x = " + cat.label(x));
        if (!nr) continue;
        Mat<T> s;
        auto it = given.find(x);
        if (it == given.end()) {
            if (!cat.is_unit(x)) throw SpecError(doc.name + ": no sigma for " + cat.label(x));
            s = Mat<T>::Identity(nr, nc);
        } else {
            if (static_cast<int>(it->second->size()) != nr * nc)
                throw SpecError(doc.name + ": sigma for " + cat.label(x) + " needs " + std::to_string(nr * nc) +
                                " entries");
            s.resize(nr, nc);
            for (int r = 0; r < nr; ++r)
                for (int c = 0; c < nc; ++c) s(r, c) = Field<T>::from_scalar((*it->second)[r * nc + c]);
        }
        if (rank(s, pol) != nr) throw SpecError(doc.name + ": sigma for " + cat.label(x) + " is singular");
        hb.sigma[x] = s;
        hb.sigma_inv[x] = inverse(s, pol);
    }
    return hb;
}

template <class T>
int CenterRep<T>::row(int c, const std::vector<int>& labels, const std::vector<int>& copies, int k) const {
    auto it = lookup.find({c, labels, copies, k});
    if (it == lookup.end()) throw std::out_of_range("no such basis vector of E");
    return it->second;
}

namespace {

template <class T>
struct Term {
    std::vector<int> copies;
    HomVector<T> h;
};

template <class T>
using TermMap = std::map<std::pair<std::vector<int>, std::vector<int>>, HomVector<T>>;

template <class T>
std::vector<Term<T>> flatten(const TermMap<T>& m) {
    std::vector<Term<T>> out;
    for (const auto& [k, h] : m) out.push_back({k.first, h});
    return out;
}

// Rewrites the first vertex of each term. Its two letters are a letter of
// factor `slot` at position sx and the plain letter x at 1 - sx; afterwards the
// order is reversed. M maps src vertex indices to dst vertex indices.
template <class T>
std::vector<Term<T>> swap_front(const HomCalc<T>& h, const std::vector<Term<T>>& terms, int slot, int sx, int x,
                                const Mat<T>& M, const std::map<SigmaIndex, int>& src,
                                const std::map<SigmaIndex, int>& dst) {
    const auto& cat = h.cat();
    TermMap<T> acc;
    for (const auto& term : terms) {
        const auto& B = h.basis(term.h.word);
        for (int i = 0; i < B.size(); ++i) {
            const T& coef = term.h.c(i);
            if (Field<T>::is_zero(coef, Real(0))) continue;
            const Tree& tr = B.trees[i];
            const int a = term.h.word.labels[sx];
            const int r = src.at({tr.t[2], a, term.copies[slot], tr.mu[1]});
            for (const auto& [k, col] : dst) {
                if (k.e != tr.t[2]) continue;
                const T& w = M(col, r);
                if (Field<T>::is_zero(w, Real(0))) continue;
                std::vector<int> labels = term.h.word.labels;
                labels[1 - sx] = k.a;
                labels[sx] = x;
                Tree nt = tr;
                nt.t[0] = cat.unit(cat.source(labels[0]));
                nt.t[1] = labels[0];
                nt.mu[0] = 0;
                nt.mu[1] = k.mu;
                nt.t.back() = nt.t[0];
                Word w2 = h.word(labels);
                const int j = h.basis(w2).find(nt);
                if (j < 0) throw std::logic_error("half-braiding produced a tree outside the basis");
                std::vector<int> copies = term.copies;
                copies[slot] = k.v;
                auto key = std::make_pair(copies, labels);
                auto it = acc.find(key);
                if (it == acc.end()) it = acc.emplace(key, h.zero(w2)).first;
                it->second.c(j) += coef * w;
            }
        }
    }
    return flatten(acc);
}

template <class T>
std::vector<Term<T>> rotate_all(const HomCalc<T>& h, const std::vector<Term<T>>& terms, int times) {
    std::vector<Term<T>> out;
    for (const auto& t : terms) out.push_back({t.copies, times ? h.rotate(t.h, times) : t.h});
    return out;
}

// Enumerates label tuples with one simple per factor (weighted by its multiplicity).
template <class T>
void label_tuples(const std::vector<const HalfBraiding<T>*>& f, std::size_t pos, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
    if (pos == f.size()) {
        out.push_back(cur);
        return;
    }
    for (std::size_t a = 0; a < f[pos]->mult.size(); ++a) {
        if (!f[pos]->mult[a]) continue;
        cur.push_back(static_cast<int>(a));
        label_tuples(f, pos + 1, cur, out);
        cur.pop_back();
    }
}

template <class T>
void copy_tuples(const std::vector<const HalfBraiding<T>*>& f, const std::vector<int>& labels, std::size_t pos,
                 std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (pos == f.size()) {
        out.push_back(cur);
        return;
    }
    for (int v = 0; v < f[pos]->mult[labels[pos]]; ++v) {
        cur.push_back(v);
        copy_tuples(f, labels, pos + 1, cur, out);
        cur.pop_back();
    }
}

template <class T>
void emit(const CenterRep<T>& E, Mat<T>& out, int col, int c, const std::vector<Term<T>>& terms, int skip) {
    for (const auto& t : terms) {
        std::vector<int> labels(t.h.word.labels.begin() + skip, t.h.word.labels.end());
        for (Eigen::Index k = 0; k < t.h.c.size(); ++k) {
            if (Field<T>::is_zero(t.h.c(k), Real(0))) continue;
            out(E.row(c, labels, t.copies, static_cast<int>(k)), col) += t.h.c(k);
        }
    }
}

}  // namespace

template <class T>
CenterRep<T> from_halfbraiding(const TubeAlgebra<T>& A, const std::vector<const HalfBraiding<T>*>& factors) {
    const auto& h = A.hom();
    const auto& cat = A.cat();
    CenterRep<T> E;
    E.factors = factors;
    E.rep.dims.assign(A.grades().size(), 0);
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur;
    label_tuples(factors, 0, cur, tuples);
    for (std::size_t g = 0; g < A.grades().size(); ++g) {
        const int c = A.grades()[g];
        for (const auto& labels : tuples) {
            std::vector<int> w{cat.dual(c)};
            w.insert(w.end(), labels.begin(), labels.end());
            bool ok = true;
            for (std::size_t i = 0; i < w.size(); ++i) ok = ok && cat.composable(w[i], w[(i + 1) % w.size()]);
            if (!ok) continue;
            const int nh = h.dim(h.word(w));
            if (!nh) continue;
            std::vector<std::vector<int>> copies;
            std::vector<int> cc;
            copy_tuples(factors, labels, 0, cc, copies);
            for (const auto& vs : copies)
                for (int k = 0; k < nh; ++k) {
                    E.lookup[{c, labels, vs, k}] = static_cast<int>(E.index.size());
                    E.index.push_back({c, labels, vs, k});
                    ++E.rep.dims[g];
                }
        }
    }
    const int n = E.rep.total();
    const int len = static_cast<int>(factors.size());
    E.rep.action.assign(A.dim(), Mat<T>::Zero(n, n));
    for (int f = 0; f < A.dim(); ++f) {
        const auto& ti = A.basis()[f];
        const int x = ti.x;
        auto F = h.basis_vector(A.word(ti.a, ti.b, x), ti.tree);
        for (int r = 0; r < n; ++r) {
            const auto& idx = E.index[r];
            if (idx.c != ti.a) continue;
            std::vector<int> w{cat.dual(idx.c)};
            w.insert(w.end(), idx.labels.begin(), idx.labels.end());
            auto m = h.basis_vector(h.word(w), idx.k);
            // bdbar xbar X x; then x moves left across every letter of X
            std::vector<Term<T>> terms{{idx.copies, h.glue(F, 2, m, 0, 1)}};
            const int total = len + 3;
            for (int p = len; p >= 1; --p) {
                const int pos = 1 + p;  // letter of factor p-1; x sits right after it
                const auto* hb = factors[p - 1];
                terms = rotate_all(h, terms, pos);
                terms = swap_front(h, terms, p - 1, 0, x, hb->sigma_inv.at(x), hb->rows.at(x), hb->cols.at(x));
                terms = rotate_all(h, terms, total - pos);
            }
            for (auto& t : terms) t.h = cat.d(x) * h.contract(t.h, 1);
            emit(E, E.rep.action[f], r, ti.b, terms, 1);
        }
    }
    return E;
}

template <class T>
Mat<T> center_braiding(const TubeAlgebra<T>& A, const CenterRep<T>& xy, const CenterRep<T>& yx) {
    const auto& h = A.hom();
    const auto& cat = A.cat();
    if (xy.factors.size() != 2) throw std::invalid_argument("center_braiding expects two factors");
    const auto* X = xy.factors[0];
    Mat<T> out = Mat<T>::Zero(yx.rep.total(), xy.rep.total());
    for (int r = 0; r < xy.rep.total(); ++r) {
        const auto& idx = xy.index[r];
        const int b = idx.labels[1];
        auto m = h.basis_vector(h.word({cat.dual(idx.c), idx.labels[0], b}), idx.k);
        // b crosses the letter of X the same way the tube line does in E
        std::vector<Term<T>> terms{{idx.copies, h.rotate(m, 1)}};
        terms = swap_front(h, terms, 0, 0, b, X->sigma_inv.at(b), X->rows.at(b), X->cols.at(b));
        terms = rotate_all(h, terms, 2);
        for (auto& t : terms) std::swap(t.copies[0], t.copies[1]);
        emit(yx, out, r, idx.c, terms, 1);
    }
    return out;
}

template <class T>
Mat<T> psi(const Monoidal<T>& mon, const Product<T>& p, const CenterRep<T>& x, const CenterRep<T>& y,
           const CenterRep<T>& xy) {
    const auto& A = mon.algebra();
    const auto& h = A.hom();
    const auto& cat = A.cat();
    Mat<T> out = Mat<T>::Zero(xy.rep.total(), p.rep.total());
    auto vec = [&](const CenterRep<T>& E, int row) {
        const auto& idx = E.index[row];
        std::vector<int> w{cat.dual(idx.c)};
        w.insert(w.end(), idx.labels.begin(), idx.labels.end());
        return h.basis_vector(h.word(w), idx.k);
    };
    for (int col = 0; col < p.rep.total(); ++col) {
        const auto& pi = p.index[col];
        const int rx = x.rep.offset(A.grade_index(pi.a)) + pi.i;
        const int ry = y.rep.offset(A.grade_index(pi.b)) + pi.j;
        const auto& ix = x.index[rx];
        const auto& iy = y.index[ry];
        auto P = h.basis_vector(mon.rep_word(pi.c, pi.a, pi.b), pi.k);
        auto G = h.glue(P, 1, vec(x, rx), 0, 1);
        G = h.glue(G, 1 + static_cast<int>(ix.labels.size()), vec(y, ry), 0, 1);
        std::vector<int> copies = ix.copies;
        copies.insert(copies.end(), iy.copies.begin(), iy.copies.end());
        emit(xy, out, col, pi.c, std::vector<Term<T>>{{copies, G}}, 1);
    }
    return out;
}

bool CenterReport::ok() const {
    for (const auto& o : objects)
        if (!o.module_ok) return false;
    for (const auto& p : pairs)
        if (!p.ok) return false;
    return !complete || bijection;
}

template <class T>
CenterReport compare(const Monoidal<T>& mon, const std::vector<SimpleModule<T>>& simples,
                     const CenterFixtureDocument& fixture, const TolerancePolicy& pol, const Real& tol) {
    const auto& A = mon.algebra();
    CenterReport rep;
    rep.complete = fixture.complete;
    std::vector<HalfBraiding<T>> hbs;
    for (const auto& d : fixture.objects) hbs.push_back(make_halfbraiding(A.cat(), d, pol));
    std::vector<CenterRep<T>> es;
    std::map<std::string, int> by_name;
    for (std::size_t i = 0; i < hbs.size(); ++i) {
        by_name[hbs[i].name] = static_cast<int>(i);
        es.push_back(from_halfbraiding(A, std::vector<const HalfBraiding<T>*>{&hbs[i]}));
        CenterObjectReport o;
        o.name = hbs[i].name;
        o.module_residual = module_residual(A, es[i].rep);
        o.module_ok = o.module_residual <= tol;
        if (o.module_ok) {
            o.multiplicities = multiplicities(simples, es[i].rep, pol);
            int total = 0;
            for (std::size_t s = 0; s < o.multiplicities.size(); ++s)
                if (o.multiplicities[s]) {
                    total += o.multiplicities[s];
                    o.match = static_cast<int>(s);
                }
            if (total != 1) o.match = -1;
        }
        rep.objects.push_back(o);
    }
    std::set<int> hit;
    bool all_simple = true;
    for (const auto& o : rep.objects) {
        if (o.match < 0) all_simple = false;
        else hit.insert(o.match);
    }
    rep.bijection = all_simple && hit.size() == rep.objects.size() && hit.size() == simples.size();

    auto pairs = fixture.pairs;
    if (pairs.empty())
        for (const auto& a : hbs)
            for (const auto& b : hbs) pairs.emplace_back(a.name, b.name);
    for (const auto& [xn, yn] : pairs) {
        CenterPairReport pr;
        pr.x = xn;
        pr.y = yn;
        pr.intertwining = pr.square = Real(0);
        auto ix = by_name.find(xn), iy = by_name.find(yn);
        if (ix == by_name.end() || iy == by_name.end()) throw SpecError("center fixture: unknown pair " + xn + ", " + yn);
        const int i = ix->second, j = iy->second;
        if (!rep.objects[i].module_ok || !rep.objects[j].module_ok) {
            rep.pairs.push_back(pr);
            continue;
        }
        const auto& X = es[i];
        const auto& Y = es[j];
        auto exy = from_halfbraiding(A, std::vector<const HalfBraiding<T>*>{&hbs[i], &hbs[j]});
        auto eyx = from_halfbraiding(A, std::vector<const HalfBraiding<T>*>{&hbs[j], &hbs[i]});
        auto p = mon.tensor(X.rep, Y.rep);
        auto q = mon.tensor(Y.rep, X.rep);
        Mat<T> pxy = psi(mon, p, X, Y, exy);
        Mat<T> pyx = psi(mon, q, Y, X, eyx);
        Real w = std::max(module_residual(A, exy.rep), module_residual(A, eyx.rep));
        for (int f = 0; f < A.dim(); ++f)
            w = std::max(w, max_abs<T>(Mat<T>(pxy * p.rep.action[f] - exy.rep.action[f] * pxy)));
        pr.evaluated = true;
        pr.intertwining = w;
        pr.invertible = pxy.rows() == pxy.cols() && rank(pxy, pol) == pxy.rows();
        Mat<T> lhs = center_braiding(A, exy, eyx) * pxy;
        Mat<T> rhs = pyx * mon.braiding(p, q);
        pr.square = max_abs<T>(Mat<T>(lhs - rhs));
        pr.ok = pr.invertible && pr.intertwining <= tol && pr.square <= tol;
        rep.pairs.push_back(pr);
    }
    return rep;
}

#define TUBECALC_CENTER_INST(T)                                                                               \
    template struct CenterRep<T>;                                                                             \
    template HalfBraiding<T> make_halfbraiding(const Category<T>&, const HalfBraidingDocument&,              \
                                               const TolerancePolicy&);                                      \
    template CenterRep<T> from_halfbraiding(const TubeAlgebra<T>&, const std::vector<const HalfBraiding<T>*>&); \
    template Mat<T> center_braiding(const TubeAlgebra<T>&, const CenterRep<T>&, const CenterRep<T>&);         \
    template Mat<T> psi(const Monoidal<T>&, const Product<T>&, const CenterRep<T>&, const CenterRep<T>&,      \
                        const CenterRep<T>&);                                                                \
    template CenterReport compare(const Monoidal<T>&, const std::vector<SimpleModule<T>>&,                    \
                                  const CenterFixtureDocument&, const TolerancePolicy&, const Real&);

TUBECALC_CENTER_INST(Cplx)
TUBECALC_CENTER_INST(Cyclo)

}  // namespace tubecalc
