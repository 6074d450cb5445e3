#include "tubecalc/homspace.hpp"

#include "tubecalc/linalg.hpp"

#include <functional>
#include <sstream>

namespace tubecalc {

std::vector<int> Tree::key() const {
    std::vector<int> k;
    k.reserve(t.size() + mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        k.push_back(t[i + 1]);
        k.push_back(mu[i]);
    }
    return k;
}

int HomBasis::find(const Tree& tr) const {
    auto it = index.find(tr.key());
    return it == index.end() ? -1 : it->second;
}

template <class T>
HomVector<T>& HomVector<T>::operator+=(const HomVector& o) {
    if (!(word == o.word)) throw std::invalid_argument("adding vectors on different words");
    c += o.c;
    return *this;
}

template <class T>
HomVector<T>& HomVector<T>::operator-=(const HomVector& o) {
    if (!(word == o.word)) throw std::invalid_argument("subtracting vectors on different words");
    c -= o.c;
    return *this;
}

template <class T>
HomCalc<T>::HomCalc(std::shared_ptr<const Category<T>> cat, TolerancePolicy pol)
    : cat_(std::move(cat)), pol_(pol) {}

template <class T>
Word HomCalc<T>::word(const std::vector<int>& labels) const {
    if (labels.empty()) throw std::invalid_argument("empty word needs an explicit anchor");
    return word(cat_->source(labels.front()), labels);
}

template <class T>
Word HomCalc<T>::word(int anchor, const std::vector<int>& labels) const {
    const auto& c = *cat_;
    if (anchor < 0 || anchor >= c.zero_cells()) throw std::invalid_argument("anchor out of range");
    int at = anchor;
    for (int x : labels) {
        if (x < 0 || x >= c.size()) throw std::invalid_argument("label out of range");
        if (c.source(x) != at) throw std::invalid_argument("word is not composable");
        at = c.target(x);
    }
    if (at != anchor) throw std::invalid_argument("word is not cyclically closed");
    return Word{anchor, labels};
}

template <class T>
Word HomCalc<T>::dual_word(const Word& w) const {
    Word d{w.anchor, {}};
    for (auto it = w.labels.rbegin(); it != w.labels.rend(); ++it) d.labels.push_back(cat_->dual(*it));
    return d;
}

template <class T>
std::string HomCalc<T>::describe(const Word& w) const {
    std::ostringstream os;
    os << "<";
    for (std::size_t i = 0; i < w.labels.size(); ++i) os << (i ? " " : "") << cat_->label(w.labels[i]);
    os << ">@" << w.anchor;
    return os.str();
}

template <class T>
const HomBasis& HomCalc<T>::basis(const Word& w) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = bases_.find(w);
    if (it != bases_.end()) return *it->second;
    const auto& c = *cat_;
    auto b = std::make_unique<HomBasis>();
    b->word = w;
    const int n = w.size();
    const int u = c.unit(w.anchor);
    Tree cur;
    cur.t.assign(n + 1, u);
    cur.mu.assign(n, 0);
    // depth-first enumeration in lexicographic order of (t1, mu0, t2, mu1, ...)
    std::function<void(int)> rec = [&](int k) {
        if (k == n) {
            if (cur.t[n] == u) {
                b->index.emplace(cur.key(), b->size());
                b->trees.push_back(cur);
            }
            return;
        }
        int prev = cur.t[k];
        for (int s = 0; s < c.size(); ++s) {
            int mult = c.N(prev, w.labels[k], s);
            if (!mult) continue;
            if (k + 1 == n && s != u) continue;
            cur.t[k + 1] = s;
            for (int m = 0; m < mult; ++m) {
                cur.mu[k] = m;
                rec(k + 1);
            }
        }
    };
    rec(0);
    return *bases_.emplace(w, std::move(b)).first->second;
}

template <class T>
HomVector<T> HomCalc<T>::zero(const Word& w) const {
    return HomVector<T>{w, Vec<T>::Constant(dim(w), Field<T>::zero())};
}

template <class T>
HomVector<T> HomCalc<T>::basis_vector(const Word& w, int i) const {
    auto v = zero(w);
    v.c(i) = Field<T>::one();
    return v;
}

template <class T>
HomVector<T> HomCalc<T>::random(const Word& w, std::mt19937_64& rng) const {
    auto v = zero(w);
    for (Eigen::Index i = 0; i < v.c.size(); ++i) v.c(i) = Field<T>::random(rng);
    return v;
}

template <class T>
HomVector<T> HomCalc<T>::cup(int y) const {
    Word w = word({y, cat_->dual(y)});
    auto v = zero(w);
    v.c(0) = cat_->cup_scale(y);
    return v;
}

template <class T>
HomVector<T> HomCalc<T>::one(int cell) const {
    auto v = zero(Word{cell, {}});
    v.c(0) = Field<T>::one();
    return v;
}

template <class T>
HomVector<T> HomCalc<T>::unit(const std::vector<int>& x) const {
    if (x.empty()) throw std::invalid_argument("unit of an empty word");
    // e_{x1...xm} = nested cups: xm_bar (... (x1_bar x1) ...) xm
    HomVector<T> e = cup(cat_->dual(x.back()));
    for (int k = static_cast<int>(x.size()) - 2; k >= 0; --k) {
        int depth = static_cast<int>(x.size()) - 1 - k;
        e = insert(e, depth, cup(cat_->dual(x[k])));
    }
    return e;
}

template <class T>
HomVector<T> HomCalc<T>::concat(const HomVector<T>& u, const HomVector<T>& v) const {
    return insert(u, u.word.size(), v);
}

template <class T>
const std::vector<typename HomCalc<T>::AbsorbTerm>& HomCalc<T>::absorb(int t, const Word& u, int tree) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto key = std::make_tuple(t, u, tree);
    auto it = abs_.find(key);
    if (it != abs_.end()) return *it->second;
    const auto& c = *cat_;
    const Tree& tr = basis(u).trees[tree];
    const int n = u.size();
    struct State {
        int e;
        int comb;
        std::vector<int> e_path, nu_path;  // filled from the top
        T coef;
    };
    std::vector<State> states{{t, 0, std::vector<int>(n + 1, -1), std::vector<int>(n, -1), Field<T>::one()}};
    states[0].e_path[n] = t;
    for (int k = n; k >= 1; --k) {
        std::vector<State> next;
        int s_prev = tr.t[k - 1], s_k = tr.t[k], x = u.labels[k - 1];
        for (auto& st : states) {
            const auto* F = c.F(t, s_prev, x, st.e);
            if (!F) continue;
            int col = F->col(s_k, tr.mu[k - 1], st.comb, c.N(t, s_k, st.e));
            for (Eigen::Index r = 0; r < F->inv.cols(); ++r) {
                const T& v = F->inv(col, r);
                if (Field<T>::is_zero(v, Real(0))) continue;
                auto [e2, mu2, nu2] = F->rows[r];
                State ns = st;
                ns.e = e2;
                ns.comb = mu2;
                ns.e_path[k - 1] = e2;
                ns.nu_path[k - 1] = nu2;
                ns.coef = st.coef * v;
                next.push_back(std::move(ns));
            }
        }
        states = std::move(next);
    }
    auto out = std::make_unique<std::vector<AbsorbTerm>>();
    for (auto& st : states) {
        if (st.e != t || st.comb != 0) continue;
        out->push_back(AbsorbTerm{std::move(st.e_path), std::move(st.nu_path), st.coef});
    }
    return *abs_.emplace(key, std::move(out)).first->second;
}

template <class T>
HomVector<T> HomCalc<T>::insert(const HomVector<T>& v, int k, const HomVector<T>& u) const {
    const auto& c = *cat_;
    const Word& W = v.word;
    const Word& U = u.word;
    if (k < 0 || k > W.size()) throw std::invalid_argument("insert position out of range");
    int cell = k == 0 ? W.anchor : c.target(W.labels[k - 1]);
    if (U.anchor != cell) throw std::invalid_argument("inserted word starts at the wrong 0-cell");
    Word R{W.anchor, {}};
    R.labels.insert(R.labels.end(), W.labels.begin(), W.labels.begin() + k);
    R.labels.insert(R.labels.end(), U.labels.begin(), U.labels.end());
    R.labels.insert(R.labels.end(), W.labels.begin() + k, W.labels.end());
    const auto& BW = basis(W);
    const auto& BU = basis(U);
    const auto& BR = basis(R);
    HomVector<T> out = zero(R);
    const int n = U.size();
    for (int i = 0; i < BW.size(); ++i) {
        if (Field<T>::is_zero(v.c(i), Real(0))) continue;
        const Tree& tw = BW.trees[i];
        for (int j = 0; j < BU.size(); ++j) {
            if (Field<T>::is_zero(u.c(j), Real(0))) continue;
            T base = v.c(i) * u.c(j);
            for (const auto& term : absorb(tw.t[k], U, j)) {
                Tree nt;
                nt.t.assign(tw.t.begin(), tw.t.begin() + k + 1);
                for (int q = 1; q <= n; ++q) nt.t.push_back(term.e[q]);
                nt.t.insert(nt.t.end(), tw.t.begin() + k + 1, tw.t.end());
                nt.mu.assign(tw.mu.begin(), tw.mu.begin() + k);
                nt.mu.insert(nt.mu.end(), term.nu.begin(), term.nu.end());
                nt.mu.insert(nt.mu.end(), tw.mu.begin() + k, tw.mu.end());
                int idx = BR.find(nt);
                if (idx < 0) throw std::logic_error("insert produced an inadmissible tree");
                out.c(idx) += base * term.coef;
            }
        }
    }
    return out;
}

template <class T>
Word HomCalc<T>::contracted(const Word& w, int k) const {
    if (k < 0 || k + 1 >= w.size()) throw std::invalid_argument("contraction position out of range");
    if (cat_->dual(w.labels[k]) != w.labels[k + 1])
        throw std::invalid_argument("contracted letters are not dual");
    Word r = w;
    r.labels.erase(r.labels.begin() + k, r.labels.begin() + k + 2);
    return r;
}

template <class T>
const Mat<T>& HomCalc<T>::contraction_matrix(const Word& w, int k) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto key = std::make_pair(w, k);
    auto it = con_.find(key);
    if (it != con_.end()) return *it->second;
    const auto& c = *cat_;
    Word r = contracted(w, k);
    const auto& B = basis(w);
    const auto& BR = basis(r);
    auto m = std::make_unique<Mat<T>>(Mat<T>::Zero(BR.size(), B.size()));
    const int x = w.labels[k], xb = w.labels[k + 1];
    const int f = c.unit(c.source(x));
    for (int i = 0; i < B.size(); ++i) {
        const Tree& tr = B.trees[i];
        if (tr.t[k + 2] != tr.t[k]) continue;
        const auto* F = c.F(tr.t[k], x, xb, tr.t[k + 2]);
        int row = F->row(tr.t[k + 1], tr.mu[k], tr.mu[k + 1], c.N(tr.t[k + 1], xb, tr.t[k + 2]));
        int col = F->col(f, 0, 0, 1);
        Tree nt;
        nt.t.assign(tr.t.begin(), tr.t.begin() + k + 1);
        nt.t.insert(nt.t.end(), tr.t.begin() + k + 3, tr.t.end());
        nt.mu.assign(tr.mu.begin(), tr.mu.begin() + k);
        nt.mu.insert(nt.mu.end(), tr.mu.begin() + k + 2, tr.mu.end());
        int j = BR.find(nt);
        (*m)(j, i) += F->m(row, col) * c.cap_scale(x);
    }
    return *con_.emplace(key, std::move(m)).first->second;
}

template <class T>
HomVector<T> HomCalc<T>::contract(const HomVector<T>& v, int k) const {
    Word r = contracted(v.word, k);
    return HomVector<T>{r, contraction_matrix(v.word, k) * v.c};
}

template <class T>
Word HomCalc<T>::rotated(const Word& w) const {
    if (w.labels.empty()) return w;
    Word r{cat_->target(w.labels.front()), {}};
    r.labels.assign(w.labels.begin() + 1, w.labels.end());
    r.labels.push_back(w.labels.front());
    return r;
}

template <class T>
const Mat<T>& HomCalc<T>::rotation_matrix(const Word& w) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = rot_.find(w);
    if (it != rot_.end()) return *it->second;
    Word r = rotated(w);
    auto m = std::make_unique<Mat<T>>(Mat<T>::Zero(dim(r), dim(w)));
    if (w.labels.empty()) {
        *m = Mat<T>::Identity(dim(w), dim(w));
    } else {
        int y = w.labels.front();
        HomVector<T> cp = cup(cat_->dual(y));
        for (int i = 0; i < dim(w); ++i) {
            auto img = contract(insert(cp, 1, basis_vector(w, i)), 0);
            m->col(i) = img.c;
        }
    }
    return *rot_.emplace(w, std::move(m)).first->second;
}

template <class T>
HomVector<T> HomCalc<T>::rotate(const HomVector<T>& v, int times) const {
    HomVector<T> out = v;
    const int n = v.word.size();
    if (n == 0) return out;
    times = ((times % n) + n) % n;
    for (int i = 0; i < times; ++i) {
        const Mat<T>& m = rotation_matrix(out.word);
        out = HomVector<T>{rotated(out.word), m * out.c};
    }
    return out;
}

template <class T>
HomVector<T> HomCalc<T>::strip_units(const HomVector<T>& v) const {
    Word w{v.word.anchor, {}};
    for (int x : v.word.labels)
        if (!cat_->is_unit(x)) w.labels.push_back(x);
    return HomVector<T>{w, v.c};
}

template <class T>
HomVector<T> HomCalc<T>::reword(const HomVector<T>& v, const Word& w) const {
    auto a = strip_units(v);
    Word s{w.anchor, {}};
    for (int x : w.labels)
        if (!cat_->is_unit(x)) s.labels.push_back(x);
    if (!(a.word == s)) throw std::invalid_argument("reword: words differ beyond unit letters");
    return HomVector<T>{w, v.c};
}

template <class T>
HomVector<T> HomCalc<T>::glue(const HomVector<T>& f, int fpos, const HomVector<T>& g, int gpos, int m,
                              bool scaled) const {
    const auto& c = *cat_;
    const auto& F = f.word.labels;
    const auto& G = g.word.labels;
    if (fpos < 0 || fpos + m > f.word.size() || gpos < 0 || gpos + m > g.word.size())
        throw std::invalid_argument("glue segment out of range");
    for (int i = 0; i < m; ++i)
        if (c.dual(F[fpos + i]) != G[gpos + m - 1 - i]) throw std::invalid_argument("glued segments are not dual");
    HomVector<T> gr = rotate(g, gpos);
    HomVector<T> out = insert(f, fpos + m, gr);
    for (int i = 0; i < m; ++i) out = contract(out, fpos + m - 1 - i);
    if (scaled) {
        T s = Field<T>::one();
        for (int i = 0; i < m; ++i) s *= c.sqrtd(F[fpos + i]);
        out *= s;
    }
    return out;
}

template <class T>
T HomCalc<T>::scalar(const HomVector<T>& v) const {
    for (int x : v.word.labels)
        if (!cat_->is_unit(x)) throw std::invalid_argument("scalar of a vector on a nontrivial word");
    return v.c(0);
}

template <class T>
T HomCalc<T>::pair(const HomVector<T>& u, const HomVector<T>& v) const {
    if (v.word.size() == 0) return u.c(0) * v.c(0);
    return scalar(glue(u, 0, v, 0, v.word.size()));
}

template <class T>
T HomCalc<T>::trace(const HomVector<T>& v) const {
    HomVector<T> w = v;
    while (w.word.size() > 0) {
        if (w.word.size() % 2) throw std::invalid_argument("trace of an odd word");
        w = contract(w, w.word.size() / 2 - 1);
    }
    return w.c(0);
}

template <class T>
const DualBasis<T>& HomCalc<T>::dual_basis(const Word& w) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = duals_.find(w);
    if (it != duals_.end()) return *it->second;
    auto db = std::make_unique<DualBasis<T>>();
    db->word = w;
    db->dual_word = dual_word(w);
    const int n = dim(w);
    Mat<T> G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = pair(basis_vector(db->dual_word, i), basis_vector(w, j));
    Mat<T> Gi;
    try {
        Gi = inverse<T>(G, pol_);
    } catch (const std::exception&) {
        throw std::runtime_error("singular pairing on " + describe(w));
    }
    for (int i = 0; i < n; ++i) {
        db->basis.push_back(basis_vector(w, i));
        db->dual.push_back(HomVector<T>{db->dual_word, Gi.row(i).transpose()});
    }
    return *duals_.emplace(w, std::move(db)).first->second;
}

template <class T>
std::map<int, HomVector<T>> HomCalc<T>::star(const HomVector<T>& f, int p, int q, int m) const {
    const auto& c = *cat_;
    const auto& L = f.word.labels;
    if (m < 1 || p < 0 || q < 0 || p + m > f.word.size() || q + m > f.word.size() ||
        (p < q ? p + m > q : q + m > p))
        throw std::invalid_argument("star: bad segments");
    std::vector<int> X(L.begin() + p, L.begin() + p + m);
    for (int i = 0; i < m; ++i)
        if (c.dual(X[i]) != L[q + m - 1 - i]) throw std::invalid_argument("star: segments are not dual");
    T dX = Field<T>::one();
    for (int x : X) dX *= c.d(x);
    std::map<int, HomVector<T>> out;
    const int s0 = c.source(X.front()), s1 = c.target(X.back());
    for (int t = 0; t < c.size(); ++t) {
        if (c.source(t) != s0 || c.target(t) != s1) continue;
        std::vector<int> lab = X;
        lab.push_back(c.dual(t));
        Word w = word(s0, lab);
        if (dim(w) == 0) continue;
        const auto& db = dual_basis(w);
        int p2 = p < q ? p : p - m + 1;
        HomVector<T> acc;
        bool have = false;
        for (std::size_t i = 0; i < db.basis.size(); ++i) {
            auto g1 = glue(f, q, db.basis[i], 0, m);
            auto g2 = glue(g1, p2, db.dual[i], 1, m);
            if (!have) {
                acc = g2;
                have = true;
            } else {
                acc += g2;
            }
        }
        acc *= dX;
        out.emplace(t, std::move(acc));
    }
    return out;
}

template struct HomVector<Cplx>;
template struct HomVector<Cyclo>;
template class HomCalc<Cplx>;
template class HomCalc<Cyclo>;

}  // namespace tubecalc
