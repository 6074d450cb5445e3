#include "tubecalc/monoidal.hpp"

#include "tubecalc/linalg.hpp"

namespace tubecalc {

template <class T>
int Product<T>::row(int c, int a, int b, int i, int j, int k) const {
    const auto& bl = blocks.at({c, a, b});
    return bl.start + (i * bl.nn + j) * bl.nh + k;
}

template <class T>
Mat<T> grade_block(const Representation<T>& m, const Mat<T>& full, int g_row, int g_col) {
    return full.block(m.offset(g_row), m.offset(g_col), m.dims[g_row], m.dims[g_col]);
}

namespace {

template <class T>
Mat<T> sub(const Mat<T>& full, const Representation<T>& rows, int gr, const Representation<T>& cols, int gc) {
    return full.block(rows.offset(gr), cols.offset(gc), rows.dims[gr], cols.dims[gc]);
}

template <class T>
Mat<T> eye(int n) {
    return Mat<T>::Identity(n, n);
}

}  // namespace

template <class T>
Monoidal<T>::Monoidal(const TubeAlgebra<T>& A) : A_(&A) {}

template <class T>
Word Monoidal<T>::pi_word(int c, int a, int b, int x) const {
    const auto& k = A_->cat();
    return A_->hom().word({k.dual(c), k.dual(x), a, b, x});
}

template <class T>
Word Monoidal<T>::rep_word(int c, int a, int b) const {
    const auto& k = A_->cat();
    return A_->hom().word({k.dual(c), a, b});
}

template <class T>
const std::vector<typename Monoidal<T>::CfTerm>& Monoidal<T>::cf_terms(int c, int a, int b, int x) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    std::array<int, 4> key{c, a, b, x};
    auto it = cf_.find(key);
    if (it != cf_.end()) return *it->second;

    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    auto out = std::make_unique<std::vector<CfTerm>>();
    const Word w5 = pi_word(c, a, b, x);
    const int n5 = h.dim(w5);
    for (int t : A.grades()) {
        if (A.block(a, t, x).second == 0) continue;
        const auto& Dt = h.dual_basis(A.word(a, t, x));
        for (int s : A.grades()) {
            if (A.block(b, s, x).second == 0) continue;
            if (k.source(t) != k.source(c) || k.source(s) != k.source(c)) continue;
            const Word w3 = rep_word(c, t, s);
            const int n3 = h.dim(w3);
            if (!n3) continue;
            const auto& Ds = h.dual_basis(A.word(b, s, x));
            T weight = k.d(t) * k.d(s) / k.d(x);
            for (std::size_t p = 0; p < Dt.basis.size(); ++p)
                for (std::size_t q = 0; q < Ds.basis.size(); ++q) {
                    CfTerm term{t, s, A.element(a, t, x, Dt.basis[p]), A.element(b, s, x, Ds.basis[q]),
                                Mat<T>::Zero(n3, n5)};
                    for (int col = 0; col < n5; ++col) {
                        auto e = h.basis_vector(w5, col);
                        auto g1 = h.glue(e, 1, Dt.dual[p], 1, 2);       // cbar t xbar b x
                        auto g2 = h.glue(g1, 3, Ds.dual[q], 0, 2);      // cbar t xbar x s
                        auto r = h.reword(h.contract(g2, 2), w3);
                        term.K.col(col) = weight * r.c;
                    }
                    out->push_back(std::move(term));
                }
        }
    }
    return *cf_.emplace(key, std::move(out)).first->second;
}

template <class T>
const std::map<int, Mat<T>>& Monoidal<T>::weld_map(int f, int a, int b, int x) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    std::array<int, 4> key{f, a, b, x};
    auto it = weld_.find(key);
    if (it != weld_.end()) return *it->second;

    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& bf = A.basis()[f];
    auto out = std::make_unique<std::map<int, Mat<T>>>();
    const Word w5 = pi_word(bf.a, a, b, x);
    const int n5 = h.dim(w5);
    auto g = h.basis_vector(A.word(bf.a, bf.b, bf.x), bf.tree);
    for (int col = 0; col < n5; ++col) {
        for (auto& [z, v] : A.weld_word(h.basis_vector(w5, col), 2, g)) {
            Word wz = pi_word(bf.b, a, b, z);
            auto r = h.reword(v, wz);
            auto& m = (*out)[z];
            if (m.size() == 0) m = Mat<T>::Zero(h.dim(wz), n5);
            m.col(col) = r.c;
        }
    }
    return *weld_.emplace(key, std::move(out)).first->second;
}

template <class T>
std::map<int, HomVector<T>> Monoidal<T>::pair_weld(const HomVector<T>& pi, const HomVector<T>& A,
                                                     const HomVector<T>& B) const {
    const auto& h = A_->hom();
    // A on (abar ubar a' u), B on (bbar ubar b' u): join along the middle u
    auto P = h.rotate(h.glue(A, 3, B, 1, 1), 5);  // bbar abar ubar a' b' u
    auto G = h.glue(pi, 2, P, 0, 2);               // cbar xbar ubar a' b' u x
    return h.star(G, 5, 1, 2);
}

template <class T>
Mat<T> Monoidal<T>::canonical_form(const Product<T>& p, int c, int a, int b, int x, const Mat<T>& U,
                                   const Mat<T>& V, const Mat<T>& W) const {
    const auto& A = *A_;
    Mat<T> out = Mat<T>::Zero(p.rep.total(), U.cols() * V.cols() * W.cols());
    const int ga = A.grade_index(a), gb = A.grade_index(b);
    for (const auto& term : cf_terms(c, a, b, x)) {
        auto it = p.blocks.find({c, term.t, term.s});
        if (it == p.blocks.end()) continue;
        const int gt = A.grade_index(term.t), gs = A.grade_index(term.s);
        Mat<T> Mt = grade_block(p.left, act(p.left, term.mu_bar), gt, ga) * U;
        Mat<T> Ns = grade_block(p.right, act(p.right, term.nu_bar), gs, gb) * V;
        Mat<T> KW = term.K * W;
        Mat<T> blk = kron<T>(kron<T>(Mt, Ns), KW);
        out.middleRows(it->second.start, blk.rows()) += blk;
    }
    return out;
}

template <class T>
Product<T> Monoidal<T>::tensor(const Representation<T>& m, const Representation<T>& n) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    const auto& gr = A.grades();
    Product<T> p;
    p.left = m;
    p.right = n;
    p.rep.dims.assign(gr.size(), 0);
    for (std::size_t gc = 0; gc < gr.size(); ++gc) {
        int c = gr[gc];
        for (std::size_t ga = 0; ga < gr.size(); ++ga) {
            int a = gr[ga];
            if (k.source(a) != k.source(c) || !m.dims[ga]) continue;
            for (std::size_t gb = 0; gb < gr.size(); ++gb) {
                int b = gr[gb];
                if (k.source(b) != k.source(c) || !n.dims[gb]) continue;
                int nH = h.dim(rep_word(c, a, b));
                if (!nH) continue;
                p.blocks[{c, a, b}] = {static_cast<int>(p.index.size()), m.dims[ga], n.dims[gb], nH};
                for (int i = 0; i < m.dims[ga]; ++i)
                    for (int j = 0; j < n.dims[gb]; ++j)
                        for (int q = 0; q < nH; ++q) p.index.push_back({c, a, b, i, j, q});
                p.rep.dims[gc] += m.dims[ga] * n.dims[gb] * nH;
            }
        }
    }
    const int N = p.rep.total();
    for (int f = 0; f < A.dim(); ++f) {
        Mat<T> act_f = Mat<T>::Zero(N, N);
        const auto& bf = A.basis()[f];
        for (const auto& [key, bl] : p.blocks) {
            auto [c, a, b] = key;
            if (c != bf.a) continue;
            int u = k.unit(k.source(a));
            for (const auto& [z, W] : weld_map(f, a, b, u))
                act_f.middleCols(bl.start, bl.size()) += canonical_form(p, bf.b, a, b, z, eye<T>(bl.nm), eye<T>(bl.nn), W);
        }
        p.rep.action.push_back(std::move(act_f));
    }
    return p;
}

template <class T>
QuotientPresentation<T> Monoidal<T>::presentation(const Product<T>& p) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    const auto& gr = A.grades();
    const auto& M = p.left;
    const auto& N = p.right;
    QuotientPresentation<T> q;
    std::map<std::array<int, 4>, int> start;
    std::map<std::array<int, 4>, int> hdim;
    for (int c : gr)
        for (int a : gr) {
            int ga = A.grade_index(a);
            if (!M.dims[ga]) continue;
            for (int b : gr) {
                int gb = A.grade_index(b);
                if (!N.dims[gb] || k.source(a) != k.source(b)) continue;
                for (int x = 0; x < k.size(); ++x) {
                    if (k.source(x) != k.source(a) || k.target(x) != k.source(c)) continue;
                    int nH = h.dim(pi_word(c, a, b, x));
                    if (!nH) continue;
                    start[{c, a, b, x}] = static_cast<int>(q.index.size());
                    hdim[{c, a, b, x}] = nH;
                    for (int i = 0; i < M.dims[ga]; ++i)
                        for (int j = 0; j < N.dims[gb]; ++j)
                            for (int r = 0; r < nH; ++r) q.index.push_back({c, a, b, x, i, j, r});
                }
            }
        }
    const int F = static_cast<int>(q.index.size());

    for (int f = 0; f < A.dim(); ++f) {
        Mat<T> m = Mat<T>::Zero(F, F);
        const auto& bf = A.basis()[f];
        for (const auto& [key, st] : start) {
            auto [c, a, b, x] = key;
            if (c != bf.a) continue;
            int nm = M.dims[A.grade_index(a)], nn = N.dims[A.grade_index(b)];
            for (const auto& [z, W] : weld_map(f, a, b, x)) {
                auto it = start.find({bf.b, a, b, z});
                if (it == start.end()) continue;
                Mat<T> blk = kron<T>(eye<T>(nm * nn), W);
                m.block(it->second, st, blk.rows(), blk.cols()) += blk;
            }
        }
        q.action.push_back(std::move(m));
    }

    q.to_quotient = Mat<T>::Zero(p.rep.total(), F);
    q.from_quotient = Mat<T>::Zero(F, p.rep.total());
    for (const auto& [key, st] : start) {
        auto [c, a, b, x] = key;
        int nm = M.dims[A.grade_index(a)], nn = N.dims[A.grade_index(b)];
        int nH = hdim[key];
        q.to_quotient.middleCols(st, nm * nn * nH) = canonical_form(p, c, a, b, x, eye<T>(nm), eye<T>(nn), eye<T>(nH));
        if (k.is_unit(x)) {
            int ps = p.blocks.at({c, a, b}).start;
            for (int r = 0; r < nm * nn * nH; ++r) q.from_quotient(st + r, ps + r) = Field<T>::one();
        }
    }

    // relation generators, one column per (tube element, m, n, pi)
    std::vector<Mat<T>> cols;
    for (int f = 0; f < A.dim(); ++f) {
        const auto& bf = A.basis()[f];
        auto fv = h.basis_vector(A.word(bf.a, bf.b, bf.x), bf.tree);
        Vec<T> fvec = A.zero();
        fvec(f) = Field<T>::one();
        const int u = bf.x;
        for (const auto& [key, st] : start) {
            auto [c, a, b, x] = key;
            const int nH = hdim[key];
            const Word w5 = pi_word(c, a, b, x);
            // Rel1: f in T_{a';a} acting on M, m in M_{a'}
            if (bf.b == a) {
                const int a1 = bf.a;
                const int ga1 = A.grade_index(a1), ga = A.grade_index(a), gb = A.grade_index(b);
                const int nm1 = M.dims[ga1], nn = N.dims[gb];
                if (nm1) {
                    Mat<T> rel = Mat<T>::Zero(F, nm1 * nn * nH);
                    Mat<T> lhs = kron<T>(kron<T>(grade_block(M, act(M, fvec), ga, ga1), eye<T>(nn)), eye<T>(nH));
                    rel.middleRows(st, lhs.rows()) += lhs;
                    for (int bt : gr) {
                        if (A.block(bt, b, u).second == 0) continue;
                        const int gbt = A.grade_index(bt);
                        if (!N.dims[gbt]) continue;
                        const auto& Db = h.dual_basis(A.word(bt, b, u));
                        T w = k.d(bt) / k.d(u);
                        for (std::size_t j = 0; j < Db.basis.size(); ++j) {
                            Vec<T> beta_bar = A.element(b, bt, k.dual(u), h.rotate(Db.dual[j], 1));
                            Mat<T> nb = grade_block(N, act(N, beta_bar), gbt, gb);
                            std::map<int, Mat<T>> pw;
                            for (int r = 0; r < nH; ++r)
                                for (auto& [z, v] : pair_weld(h.basis_vector(w5, r), fv, Db.basis[j])) {
                                    Word wz = pi_word(c, a1, bt, z);
                                    auto& mz = pw[z];
                                    if (mz.size() == 0) mz = Mat<T>::Zero(h.dim(wz), nH);
                                    mz.col(r) = h.reword(v, wz).c;
                                }
                            for (auto& [z, mz] : pw) {
                                auto it = start.find({c, a1, bt, z});
                                if (it == start.end()) continue;
                                Mat<T> blk = kron<T>(kron<T>(eye<T>(nm1), nb), mz);
                                rel.middleRows(it->second, blk.rows()) -= w * blk;
                            }
                        }
                    }
                    cols.push_back(std::move(rel));
                }
            }
            // Rel2: g in T_{b';b} acting on N, n in N_{b'}
            if (bf.b == b) {
                const int b1 = bf.a;
                const int gb1 = A.grade_index(b1), ga = A.grade_index(a), gb = A.grade_index(b);
                const int nm = M.dims[ga], nn1 = N.dims[gb1];
                if (nn1) {
                    Mat<T> rel = Mat<T>::Zero(F, nm * nn1 * nH);
                    Mat<T> lhs = kron<T>(kron<T>(eye<T>(nm), grade_block(N, act(N, fvec), gb, gb1)), eye<T>(nH));
                    rel.middleRows(st, lhs.rows()) += lhs;
                    for (int at : gr) {
                        if (A.block(at, a, u).second == 0) continue;
                        const int gat = A.grade_index(at);
                        if (!M.dims[gat]) continue;
                        const auto& Da = h.dual_basis(A.word(at, a, u));
                        T w = k.d(at) / k.d(u);
                        for (std::size_t i = 0; i < Da.basis.size(); ++i) {
                            Vec<T> alpha_bar = A.element(a, at, k.dual(u), h.rotate(Da.dual[i], 1));
                            Mat<T> ma = grade_block(M, act(M, alpha_bar), gat, ga);
                            std::map<int, Mat<T>> pw;
                            for (int r = 0; r < nH; ++r)
                                for (auto& [z, v] : pair_weld(h.basis_vector(w5, r), Da.basis[i], fv)) {
                                    Word wz = pi_word(c, at, b1, z);
                                    auto& mz = pw[z];
                                    if (mz.size() == 0) mz = Mat<T>::Zero(h.dim(wz), nH);
                                    mz.col(r) = h.reword(v, wz).c;
                                }
                            for (auto& [z, mz] : pw) {
                                auto it = start.find({c, at, b1, z});
                                if (it == start.end()) continue;
                                Mat<T> blk = kron<T>(kron<T>(ma, eye<T>(nn1)), mz);
                                rel.middleRows(it->second, blk.rows()) -= w * blk;
                            }
                        }
                    }
                    cols.push_back(std::move(rel));
                }
            }
        }
    }
    int total = 0;
    for (const auto& c : cols) total += static_cast<int>(c.cols());
    q.relations = Mat<T>::Zero(F, total);
    int at = 0;
    for (const auto& c : cols) {
        q.relations.middleCols(at, c.cols()) = c;
        at += static_cast<int>(c.cols());
    }
    return q;
}

template <class T>
Mat<T> Monoidal<T>::tensor_maps(const Product<T>& src, const Product<T>& dst, const Mat<T>& F,
                                const Mat<T>& G) const {
    const auto& A = *A_;
    Mat<T> out = Mat<T>::Zero(dst.rep.total(), src.rep.total());
    for (const auto& [key, bl] : src.blocks) {
        auto [c, a, b] = key;
        auto it = dst.blocks.find(key);
        if (it == dst.blocks.end()) continue;
        const int ga = A.grade_index(a), gb = A.grade_index(b);
        Mat<T> blk = kron<T>(kron<T>(sub(F, dst.left, ga, src.left, ga), sub(G, dst.right, gb, src.right, gb)), eye<T>(bl.nh));
        out.block(it->second.start, bl.start, blk.rows(), blk.cols()) = blk;
    }
    return out;
}

template <class T>
Mat<T> Monoidal<T>::associator(const Product<T>& mn, const Product<T>& mn_l, const Product<T>& nl,
                               const Product<T>& m_nl) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    Mat<T> out = Mat<T>::Zero(m_nl.rep.total(), mn_l.rep.total());
    for (int col = 0; col < mn_l.rep.total(); ++col) {
        const auto& o = mn_l.index[col];  // (d, c, e, p, l, r)
        const int d = o.c, c = o.a, e = o.b;
        const auto& in = mn.index[mn.rep.offset(A.grade_index(c)) + o.i];  // (c, a, b, i, j, k)
        const int a = in.a, b = in.b;
        auto pi = h.basis_vector(rep_word(c, a, b), in.k);
        auto rho = h.basis_vector(rep_word(d, c, e), o.k);
        auto v = h.rotate(h.glue(pi, 0, rho, 1, 1), 1);  // dbar a b e
        for (int g : A.grades()) {
            if (k.source(g) != k.source(b)) continue;
            Word wk = rep_word(g, b, e);
            if (!h.dim(wk) || !nl.has(g, b, e) || !m_nl.has(d, a, g)) continue;
            const auto& db = h.dual_basis(wk);
            for (std::size_t kap = 0; kap < db.basis.size(); ++kap) {
                auto sigma = h.reword(h.glue(v, 2, db.dual[kap], 0, 2), rep_word(d, a, g));
                int q = nl.row(g, b, e, in.j, o.j, static_cast<int>(kap)) - nl.rep.offset(A.grade_index(g));
                for (Eigen::Index s = 0; s < sigma.c.size(); ++s)
                    out(m_nl.row(d, a, g, in.i, q, static_cast<int>(s)), col) += k.d(g) * sigma.c(s);
            }
        }
    }
    return out;
}

template <class T>
Mat<T> Monoidal<T>::left_unitor(const Product<T>& im) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    const auto& M = im.right;
    Mat<T> out = Mat<T>::Zero(im.rep.total(), M.total());
    for (int a : A.grades()) {
        int ga = A.grade_index(a);
        if (!M.dims[ga]) continue;
        int u = k.unit(k.source(a));
        auto e = h.reword(h.unit({a}), rep_word(a, u, a));
        for (int i = 0; i < M.dims[ga]; ++i)
            for (Eigen::Index s = 0; s < e.c.size(); ++s)
                out(im.row(a, u, a, 0, i, static_cast<int>(s)), M.offset(ga) + i) = e.c(s);
    }
    return out;
}

template <class T>
Mat<T> Monoidal<T>::right_unitor(const Product<T>& mi) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    const auto& M = mi.left;
    Mat<T> out = Mat<T>::Zero(mi.rep.total(), M.total());
    for (int a : A.grades()) {
        int ga = A.grade_index(a);
        if (!M.dims[ga]) continue;
        int u = k.unit(k.source(a));
        auto e = h.reword(h.unit({a}), rep_word(a, a, u));
        for (int i = 0; i < M.dims[ga]; ++i)
            for (Eigen::Index s = 0; s < e.c.size(); ++s)
                out(mi.row(a, a, u, i, 0, static_cast<int>(s)), M.offset(ga) + i) = e.c(s);
    }
    return out;
}

template <class T>
Mat<T> Monoidal<T>::braiding(const Product<T>& mn, const Product<T>& nm) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    Mat<T> out = Mat<T>::Zero(nm.rep.total(), mn.rep.total());
    for (const auto& [key, bl] : mn.blocks) {
        auto [c, a, b] = key;
        const int st = bl.start;
        const int ga = A.grade_index(a), gb = A.grade_index(b);
        const int nM = mn.left.dims[ga], nN = mn.right.dims[gb];
        const Word w3 = rep_word(c, a, b);
        const int nH = h.dim(w3);
        // N's strand is carried once around the tube: x = b, weighted by 1/d_b.
        const int x = b;
        const Word w5 = pi_word(c, b, a, x);
        const T inv_d = Field<T>::one() / k.d(x);
        Mat<T> W = Mat<T>::Zero(h.dim(w5), nH);
        for (int r = 0; r < nH; ++r)
            W.col(r) = h.reword(h.insert(h.basis_vector(w3, r), 1, h.cup(k.dual(b))), w5).c * inv_d;
        Mat<T> tr = grade_block(mn.right, act(mn.right, A.twist_inverse(b)), gb, gb);
        Mat<T> img = canonical_form(nm, c, b, a, x, tr, eye<T>(nM), W);  // columns (j, i, r)
        for (int i = 0; i < nM; ++i)
            for (int j = 0; j < nN; ++j)
                for (int r = 0; r < nH; ++r) out.col(st + (i * nN + j) * nH + r) = img.col((j * nM + i) * nH + r);
    }
    return out;
}

template <class T>
Mat<T> Monoidal<T>::twist(const Representation<T>& m) const {
    const auto& A = *A_;
    Vec<T> t = A.zero();
    for (std::size_t g = 0; g < A.grades().size(); ++g)
        if (m.dims[g]) t += A.twist(A.grades()[g]);
    return act(m, t);
}

namespace {

template <class T>
std::vector<int> unit_dims(const TubeAlgebra<T>& A) {
    std::vector<int> d(A.grades().size(), 0);
    for (std::size_t g = 0; g < d.size(); ++g)
        if (A.cat().is_unit(A.grades()[g])) d[g] = 1;
    return d;
}

int offset_of(const std::vector<int>& dims, int g) {
    int s = 0;
    for (int k = 0; k < g; ++k) s += dims[k];
    return s;
}

}  // namespace

template <class T>
Mat<T> Monoidal<T>::ev(const Product<T>& mbar_m) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    const auto idims = unit_dims(A);
    int itotal = 0;
    for (int d : idims) itotal += d;
    Mat<T> out = Mat<T>::Zero(itotal, mbar_m.rep.total());
    const auto& Mb = mbar_m.left;
    for (const auto& [key, bl] : mbar_m.blocks) {
        auto [c, a, b] = key;
        const int st = bl.start;
        if (!k.is_unit(c)) continue;
        Word wab = h.word({a, b});
        if (!h.dim(wab)) continue;
        const auto& db = h.dual_basis(wab);
        const int ga = A.grade_index(a), gbb = A.grade_index(k.dual(b));
        const int nH = h.dim(rep_word(c, a, b));
        const int nM = Mb.dims[ga], nN = mbar_m.right.dims[A.grade_index(b)];
        for (std::size_t kap = 0; kap < db.basis.size(); ++kap) {
            Vec<T> tube = A.element(a, k.dual(b), k.unit(k.source(a)), h.rotate(db.basis[kap], 1));
            Mat<T> phi = grade_block(Mb, act(Mb, tube), gbb, ga);  // rows: Mbar_{bbar} = M_b^*
            for (int r = 0; r < nH; ++r) {
                T s = h.scalar(h.glue(h.basis_vector(rep_word(c, a, b), r), 1, db.dual[kap], 0, 2));
                for (int i = 0; i < nM; ++i)
                    for (int j = 0; j < nN; ++j)
                        out(offset_of(idims, A.grade_index(c)), st + (i * nN + j) * nH + r) += phi(j, i) * s;
            }
        }
    }
    return out;
}

template <class T>
Mat<T> Monoidal<T>::coev(const Product<T>& m_mbar) const {
    const auto& A = *A_;
    const auto& h = A.hom();
    const auto& k = A.cat();
    const auto idims = unit_dims(A);
    int itotal = 0;
    for (int d : idims) itotal += d;
    Mat<T> out = Mat<T>::Zero(m_mbar.rep.total(), itotal);
    const auto& M = m_mbar.left;
    for (int c : A.grades()) {
        if (!k.is_unit(c)) continue;
        const int col = offset_of(idims, A.grade_index(c));
        for (int t : A.grades()) {
            int gt = A.grade_index(t);
            if (k.source(t) != k.source(c) || !M.dims[gt]) continue;
            if (!m_mbar.has(c, t, k.dual(t))) continue;
            auto e = h.reword(h.cup(t), rep_word(c, t, k.dual(t)));
            for (int i = 0; i < M.dims[gt]; ++i)
                for (Eigen::Index s = 0; s < e.c.size(); ++s)
                    out(m_mbar.row(c, t, k.dual(t), i, i, static_cast<int>(s)), col) += k.d(t) * e.c(s);
        }
    }
    return out;
}

template <class T>
T Monoidal<T>::trace(const Representation<T>& x, const Mat<T>& g) const {
    const auto& A = *A_;
    auto xb = dual(A, x);
    auto xxb = tensor(x, xb);
    auto xbx = tensor(xb, x);
    Mat<T> mid = tensor_maps(xxb, xxb, Mat<T>(twist(x) * g), eye<T>(xb.total()));
    Mat<T> r = ev(xbx) * braiding(xxb, xbx) * mid * coev(xxb);
    return r(0, 0);
}

template <class T>
std::vector<std::vector<std::vector<int>>> Monoidal<T>::fusion_table(const std::vector<SimpleModule<T>>& simples,
                                                                     const TolerancePolicy& pol) const {
    const std::size_t n = simples.size();
    std::vector<std::vector<std::vector<int>>> N(n, std::vector<std::vector<int>>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) N[i][j] = multiplicities(simples, tensor(simples[i].rep, simples[j].rep).rep, pol);
    return N;
}

namespace {

Cplx field_sqrt(const Cplx& z) { return Cplx(sqrt(z.real()), Real(0)); }

Cyclo field_sqrt(const Cyclo& z) {
    if (!z.is_rational() || z.rational_part() <= 0)
        throw std::domain_error("global dimension has no exact square root in this backend");
    Rational q = z.rational_part();
    auto num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
    boost::multiprecision::mpz_int prod = num * den;
    return Cyclo::sqrt_int(prod.convert_to<long>()) * Cyclo(Rational(1) / Rational(den));
}

}  // namespace

template <class T>
ModularData<T> Monoidal<T>::modular_data(const std::vector<SimpleModule<T>>& simples,
                                         const TolerancePolicy& pol) const {
    const auto& A = *A_;
    ModularData<T> md;
    md.simples = simples;
    const int n = static_cast<int>(simples.size());
    auto triv = trivial(A);
    md.unit = -1;
    for (int i = 0; i < n && md.unit < 0; ++i)
        if (hom(triv, simples[i].rep, pol).size() == 1) md.unit = i;
    for (const auto& s : simples) {
        md.twists.push_back(s.twist);
        md.dims.push_back(trace(s.rep, eye<T>(s.rep.total())));
    }
    md.S_raw = Mat<T>::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            auto pij = tensor(simples[i].rep, simples[j].rep);
            auto pji = tensor(simples[j].rep, simples[i].rep);
            Mat<T> dbl = braiding(pji, pij) * braiding(pij, pji);
            md.S_raw(i, j) = trace(pij.rep, dbl);
            md.S_raw(j, i) = md.S_raw(i, j);
        }
    T D2 = Field<T>::zero();
    for (const auto& d : md.dims) D2 += d * d;
    md.global_dim_sqrt = field_sqrt(D2);
    md.S = md.S_raw / md.global_dim_sqrt;
    md.fusion = fusion_table(simples, pol);
    return md;
}

template struct Product<Cplx>;
template struct Product<Cyclo>;
template class Monoidal<Cplx>;
template class Monoidal<Cyclo>;
template Mat<Cplx> grade_block(const Representation<Cplx>&, const Mat<Cplx>&, int, int);
template Mat<Cyclo> grade_block(const Representation<Cyclo>&, const Mat<Cyclo>&, int, int);

}  // namespace tubecalc
