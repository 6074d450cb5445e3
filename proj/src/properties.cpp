#include "tubecalc/properties.hpp"

#include "tubecalc/linalg.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace tubecalc {

namespace {

// Residual reported when the two sides do not even live on the same word.
const Real kShapeMismatch(1e10);

PropertyResult finish(std::string suite, std::string name, Real residual, long samples, const PropertyOptions& opt,
                      long min_samples = 1) {
    return {std::move(suite), std::move(name), residual, samples, residual <= opt.tol && samples >= min_samples};
}

template <class T>
Real gap(const HomVector<T>& a, const HomVector<T>& b) {
    if (!(a.word == b.word)) return kShapeMismatch;
    return max_abs<T>(Mat<T>(a.c - b.c));
}

template <class T>
Real gap(const Mat<T>& a, const Mat<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return kShapeMismatch;
    return max_abs<T>(Mat<T>(a - b));
}

template <class T>
Real gap(const T& a, const T& b) {
    return Field<T>::mag(a - b);
}

// Two families of components keyed by simple; a missing key counts as zero.
template <class K, class T>
Real gap(const std::map<K, HomVector<T>>& a, const std::map<K, HomVector<T>>& b) {
    Real worst(0);
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        worst = std::max(worst, it == b.end() ? max_abs<T>(Mat<T>(v.c)) : gap(v, it->second));
    }
    for (const auto& [k, v] : b)
        if (!a.count(k)) worst = std::max(worst, max_abs<T>(Mat<T>(v.c)));
    return worst;
}

template <class K, class T>
void accumulate(std::map<K, HomVector<T>>& into, const K& k, const HomVector<T>& v) {
    auto it = into.find(k);
    if (it == into.end()) into.emplace(k, v);
    else it->second += v;
}

template <class T>
bool closed(const Category<T>& c, const std::vector<int>& w) {
    if (w.empty()) return false;
    for (std::size_t k = 0; k < w.size(); ++k)
        if (c.target(w[k]) != c.source(w[(k + 1) % w.size()])) return false;
    return true;
}

template <class T>
std::vector<int> rdual(const Category<T>& c, const std::vector<int>& w) {
    std::vector<int> out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(c.dual(*it));
    return out;
}

std::vector<int> cat_words(std::initializer_list<std::vector<int>> parts) {
    std::vector<int> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

// Random labels and words drawn from all simples; callers reject samples
// whose words are not composable or whose spaces vanish.
template <class T>
struct Sampler {
    const HomCalc<T>& h;
    std::mt19937_64 rng;

    int simple() { return static_cast<int>(rng() % static_cast<std::uint64_t>(h.cat().size())); }
    std::vector<int> word(int n) {
        std::vector<int> w(n);
        for (int& x : w) x = simple();
        return w;
    }
    int length(int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool live(const std::vector<int>& w) { return closed(h.cat(), w) && h.dim(h.word(w)) > 0; }
    HomVector<T> random(const std::vector<int>& w) { return h.random(h.word(w), rng); }

    // Repeats `attempt` until it reports a usable sample or the budget runs out.
    bool draw(const std::function<bool()>& attempt, int budget = 4000) {
        for (int k = 0; k < budget; ++k)
            if (attempt()) return true;
        return false;
    }
};

template <class T>
Mat<T> outer(const Vec<T>& u, const Vec<T>& v) {
    return u * v.transpose();
}

template <class T>
Mat<T> random_columns(int rows, int cols, std::mt19937_64& rng) {
    Mat<T> m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = Field<T>::random(rng);
    return m;
}

template <class T>
Mat<T> eye(int n) {
    return Mat<T>::Identity(n, n);
}

}  // namespace

std::vector<PropertyResult> scalar_properties(const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    std::mt19937_64 rng(opt.seed);
    const char* exprs[] = {"sqrt(2)*sqrt(3)", "cyclo(8,1)+cyclo(8,7)", "(1+sqrt(5))/2", "cyclo(6,1)*cyclo(6,1)",
                           "sqrt(2)*sqrt(2)", "-cyclo(12,5)/3+1/2", "(cyclo(5,1)+cyclo(5,4))*(cyclo(5,2)+cyclo(5,3))"};
    Real worst(0);
    long n = 0;
    for (const char* e : exprs) {
        auto x = parse_scalar(e, Backend::Exact).exact();
        auto once = x.normalized();
        if (!(once == once.normalized()) || once.order() != once.normalized().order() ||
            once.to_string() != once.normalized().to_string())
            worst = Real(1);
        ++n;
    }
    for (int k = 0; k < 200; ++k) {
        Cyclo x = Field<Cyclo>::random(rng) * Cyclo::zeta(1 + static_cast<long>(rng() % 24), 1) +
                  Field<Cyclo>::random(rng) * Cyclo::sqrt_int(2 + static_cast<long>(rng() % 5));
        auto once = x.normalized();
        if (!(once == once.normalized()) || once.to_string() != once.normalized().to_string()) worst = Real(1);
        ++n;
    }
    out.push_back(finish("scalars", "normalization idempotent", worst, n, opt));

    Real fworst(0);
    for (int k = 0; k < 1000; ++k) {
        Cplx a = Field<Cplx>::random(rng), b = Field<Cplx>::random(rng), c = Field<Cplx>::random(rng);
        fworst = std::max({fworst, Field<Cplx>::mag((a * b) * c - a * (b * c)),
                           Field<Cplx>::mag(a * (b + c) - (a * b + a * c))});
    }
    out.push_back(finish("scalars", "field axioms (float)", fworst, 1000, opt));

    Real eworst(0);
    for (int k = 0; k < 1000; ++k) {
        Cyclo a = Field<Cyclo>::random(rng) * Cyclo::zeta(5, 1) + Field<Cyclo>::random(rng);
        Cyclo b = Field<Cyclo>::random(rng) + Cyclo::sqrt_int(2);
        Cyclo c = Field<Cyclo>::random(rng) * Cyclo::zeta(3, 1);
        if (!((a * b) * c == a * (b * c)) || !(a * (b + c) == a * b + a * c)) eworst = Real(1);
    }
    out.push_back(finish("scalars", "field axioms (exact)", eworst, 1000, opt));

    Real cworst(0);
    long cn = 0;
    for (long nn = 2; nn <= 24; ++nn)
        for (long k = 1; k < nn; ++k, ++cn)
            if (!(Cyclo::zeta(nn, k).conj() == Cyclo::zeta(nn, nn - k))) cworst = Real(1);
    out.push_back(finish("scalars", "conj(cyclo(n,k)) = cyclo(n,n-k)", cworst, cn, opt));
    return out;
}

template <class T>
std::vector<PropertyResult> category_properties(const Category<T>& c, const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    auto rep = validate(c, opt.pol);
    for (const auto& ch : rep.checks) out.push_back(finish("category", ch.name, ch.residual, 1, opt));

    // exactly one unit in a abar
    Real bad(0);
    for (int a = 0; a < c.size(); ++a) {
        int units = 0;
        for (int u = 0; u < c.size(); ++u)
            if (c.is_unit(u)) units += c.N(a, c.dual(a), u);
        if (units != 1) bad = Real(1);
    }
    out.push_back(finish("category", "rigidity of fusion rules", bad, c.size(), opt));

    // global dimension agrees across 0-cells joined by some simple
    Real gd(0);
    long pairs = 0;
    for (int a = 0; a < c.size(); ++a) {
        if (c.diagonal(a)) continue;
        gd = std::max(gd, gap<T>(global_dimension(c, c.source(a)), global_dimension(c, c.target(a))));
        ++pairs;
    }
    out.push_back(finish("category", "global dimension per 0-cell", gd, pairs, opt, 0));
    return out;
}

template <class T>
std::vector<PropertyResult> homspace_properties(const HomCalc<T>& h, const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    const auto& c = h.cat();
    const T one = Field<T>::one(), zero = Field<T>::zero();
    Sampler<T> S{h, std::mt19937_64(opt.seed * 7919 + 1)};

    // every closed word of length <= 4
    std::vector<std::vector<int>> words;
    for (int n = 1; n <= 4; ++n) {
        std::vector<int> w(n, 0);
        while (true) {
            if (closed(c, w)) words.push_back(w);
            int k = 0;
            while (k < n && ++w[k] == c.size()) w[k++] = 0;
            if (k == n) break;
        }
    }
    {
        Real worst(0);
        long n = 0;
        for (const auto& w : words) {
            Word W = h.word(w);
            for (int i = 0; i < h.dim(W); ++i, ++n) {
                auto v = h.basis_vector(W, i);
                worst = std::max(worst, gap(h.rotate(v, W.size()), v));
            }
        }
        out.push_back(finish("homspace", "rotation periodicity", worst, n, opt));
    }
    {
        Real worst(0);
        long n = 0;
        bool nondeg = true;
        for (const auto& w : words) {
            Word W = h.word(w);
            if (h.dim(W) == 0) continue;
            const auto& db = h.dual_basis(W);
            if (static_cast<int>(db.dual.size()) != h.dim(W)) nondeg = false;
            for (std::size_t i = 0; i < db.dual.size(); ++i)
                for (std::size_t j = 0; j < db.basis.size(); ++j)
                    worst = std::max(worst, gap<T>(h.pair(db.dual[i], db.basis[j]), i == j ? one : zero));
            ++n;
        }
        out.push_back(finish("homspace", "dual-basis delta", nondeg ? worst : kShapeMismatch, n, opt));
    }

    // d_y f o_a g = <f,g> e_y
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                int y = S.simple();
                auto a = S.word(S.length(1, 2));
                auto fw = cat_words({{y}, a});
                if (!S.live(fw)) return false;
                auto f = S.random(fw), g = S.random(rdual(c, fw));
                auto comp = h.glue(f, 1, g, 0, static_cast<int>(a.size()));
                auto e = h.rotate(h.unit({y}), 1);
                worst = std::max(worst, gap(c.d(y) * comp, h.pair(f, g) * e));
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "pairing against units", worst, n, opt, opt.draws));
    }

    // <f .y g, h .y k> = <f,k><g,h>
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                int y = S.simple();
                auto x = S.word(S.length(1, 2)), z = S.word(S.length(1, 2));
                auto fw = cat_words({x, {y}}), gw = cat_words({{c.dual(y)}, z});
                if (!S.live(fw) || !S.live(gw)) return false;
                auto hw = cat_words({rdual(c, z), {y}}), kw = rdual(c, fw);
                if (!S.live(hw)) return false;
                auto f = S.random(fw), g = S.random(gw), hh = S.random(hw), k = S.random(kw);
                const int lx = static_cast<int>(x.size()), lz = static_cast<int>(z.size());
                auto fg = h.glue(f, lx, g, 0, 1, true), hk = h.glue(hh, lz, k, 0, 1, true);
                worst = std::max(worst, gap<T>(h.pair(fg, hk), h.pair(f, k) * h.pair(g, hh)));
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "pairing multiplicativity", worst, n, opt, opt.draws));
    }

    // e_ab = sum_t d_t abar_t,i o alpha_t^i on every composable pair
    {
        Real worst(0);
        long n = 0;
        for (int a = 0; a < c.size(); ++a)
            for (int b = 0; b < c.size(); ++b) {
                if (c.target(a) != c.source(b)) continue;
                auto eab = h.unit({a, b});
                HomVector<T> sum = h.zero(eab.word);
                for (int t = 0; t < c.size(); ++t) {
                    std::vector<int> bt{c.dual(b), c.dual(a), t};
                    if (!closed(c, bt) || h.dim(h.word(bt)) == 0) continue;
                    const auto& db = h.dual_basis(h.word(bt));
                    for (std::size_t i = 0; i < db.basis.size(); ++i)
                        sum += c.d(t) * h.glue(db.basis[i], 2, db.dual[i], 0, 1);
                }
                worst = std::max(worst, gap(sum, eab));
                ++n;
            }
        out.push_back(finish("homspace", "dominance", worst, n, opt));
    }

    // sum_i abar_i f (x) alpha^i = sum_j bbar_j (x) f beta^j in H<xbar b> (x) H<a x>
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                auto a = S.word(S.length(1, 2)), b = S.word(S.length(1, 2)), x = S.word(S.length(1, 2));
                auto fw = cat_words({a, b}), aw = cat_words({a, x}), bw = cat_words({rdual(c, b), x});
                if (!S.live(fw) || !S.live(aw) || !S.live(bw)) return false;
                const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
                const int lx = static_cast<int>(x.size());
                auto f = S.random(fw);
                const auto& al = h.dual_basis(h.word(aw));
                const auto& be = h.dual_basis(h.word(bw));
                Mat<T> lhs, rhs;
                Word lw, rw;
                for (std::size_t i = 0; i < al.basis.size(); ++i) {
                    auto left = h.glue(al.dual[i], lx, f, 0, la);
                    Mat<T> term = outer<T>(left.c, al.basis[i].c);
                    lhs = i ? Mat<T>(lhs + term) : term;
                    lw = left.word;
                }
                for (std::size_t j = 0; j < be.basis.size(); ++j) {
                    auto right = h.glue(f, la, be.basis[j], 0, lb);
                    Mat<T> term = outer<T>(be.dual[j].c, right.c);
                    rhs = j ? Mat<T>(rhs + term) : term;
                    rw = be.dual[j].word;
                }
                worst = std::max(worst, lw == rw ? gap<T>(lhs, rhs) : kShapeMismatch);
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "base change", worst, n, opt, opt.draws));
    }

    // {beta_t^i .t psi_t^j} and {betabar_t,i .t psibar_t,j} are dual bases of H<a b c>
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                auto a = S.word(S.length(1, 2)), b = S.word(S.length(1, 2)), cc = S.word(S.length(1, 2));
                auto abc = cat_words({a, b, cc});
                if (!S.live(abc)) return false;
                const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
                const int lc = static_cast<int>(cc.size());
                std::vector<HomVector<T>> basis, dual;
                for (int t = 0; t < c.size(); ++t) {
                    auto pw = cat_words({a, {t}, cc}), bw = cat_words({b, {c.dual(t)}});
                    if (!closed(c, pw) || !closed(c, bw) || h.dim(h.word(pw)) == 0 || h.dim(h.word(bw)) == 0)
                        continue;
                    const auto& ps = h.dual_basis(h.word(pw));
                    const auto& bs = h.dual_basis(h.word(bw));
                    for (std::size_t i = 0; i < bs.basis.size(); ++i)
                        for (std::size_t j = 0; j < ps.basis.size(); ++j) {
                            basis.push_back(h.glue(ps.basis[j], la, bs.basis[i], lb, 1, true));
                            dual.push_back(h.glue(ps.dual[j], lc, bs.dual[i], 0, 1, true));
                        }
                }
                Real r = static_cast<int>(basis.size()) == h.dim(h.word(abc)) ? Real(0) : kShapeMismatch;
                for (std::size_t i = 0; i < dual.size(); ++i)
                    for (std::size_t j = 0; j < basis.size(); ++j)
                        r = std::max(r, gap<T>(h.pair(dual[i], basis[j]), i == j ? one : zero));
                worst = std::max(worst, r);
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "bases composition", worst, n, opt, opt.draws));
    }

    // (i) star_y(f o_z g) = star_y(f) o_z g, plain and scaled
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                auto y = S.word(2);
                auto x = S.word(S.length(1, 2)), z = S.word(1), w = S.word(S.length(1, 2));
                auto fw = cat_words({rdual(c, y), x, y, z}), gw = cat_words({rdual(c, z), w});
                if (!S.live(fw) || !S.live(gw)) return false;
                const int ly = 2, lx = static_cast<int>(x.size());
                auto f = S.random(fw), g = S.random(gw);
                for (bool scaled : {false, true}) {
                    auto fg = h.glue(f, ly + lx + ly, g, 0, 1, scaled);
                    auto lhs = h.star(fg, ly + lx, 0, ly);
                    std::map<int, HomVector<T>> rhs;
                    for (const auto& [t, ft] : h.star(f, ly + lx, 0, ly))
                        rhs.emplace(t, h.glue(ft, 1 + lx + 1, g, 0, 1, scaled));
                    worst = std::max(worst, gap(lhs, rhs));
                }
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "star (i) commutes with composition", worst, n, opt, opt.draws));
    }

    // (ii) star_xyz = sum star_xt star_yz = sum star_tz star_xy
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                int a = S.simple(), b = S.simple(), x = S.simple(), y = S.simple(), z = S.simple();
                std::vector<int> fw{a, x, y, z, b, c.dual(z), c.dual(y), c.dual(x)};
                if (!S.live(fw)) return false;
                auto f = S.random(fw);
                auto whole = h.star(f, 1, 5, 3);
                std::map<int, HomVector<T>> right, left;
                for (const auto& [s, fs] : h.star(f, 2, 5, 2))
                    for (const auto& [t, ft] : h.star(fs, 1, 4, 2)) accumulate(right, t, ft);
                for (const auto& [s, fs] : h.star(f, 1, 6, 2))
                    for (const auto& [t, ft] : h.star(fs, 1, 4, 2)) accumulate(left, t, ft);
                worst = std::max({worst, gap(whole, right), gap(whole, left)});
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "star (ii) associativity", worst, n, opt, opt.draws));
    }

    // (iii) star_z star_y = star_y star_z, and star_yz through the pieces
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                auto y = S.word(S.length(1, 2)), z = S.word(S.length(1, 2));
                int x = S.simple(), w = S.simple();
                auto fw = cat_words({{x}, y, z, {w}, rdual(c, z), rdual(c, y)});
                if (!S.live(fw)) return false;
                const int ly = static_cast<int>(y.size()), lz = static_cast<int>(z.size());
                auto f = S.random(fw);
                // positions: x | y | z | w | zbar | ybar
                const int py = 1, pz = 1 + ly, pzb = 2 + ly + lz, pyb = 2 + ly + 2 * lz;
                std::map<std::pair<int, int>, HomVector<T>> yz, zy;
                for (const auto& [s, fs] : h.star(f, py, pyb, ly))  // x s z w zbar sbar
                    for (const auto& [t, ft] : h.star(fs, 2, 3 + lz, lz)) accumulate(yz, std::pair{s, t}, ft);
                for (const auto& [t, ft] : h.star(f, pz, pzb, lz))  // x y t w tbar ybar
                    for (const auto& [s, fs] : h.star(ft, 1, 4 + ly, ly)) accumulate(zy, std::pair{s, t}, fs);
                auto whole = h.star(f, py, pzb, ly + lz);
                std::map<int, HomVector<T>> iter;
                for (const auto& [st, v] : yz)
                    for (const auto& [u, vu] : h.star(v, 1, 4, 2)) accumulate(iter, u, vu);
                worst = std::max({worst, gap(yz, zy), gap(whole, iter)});
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "star (iii) commutation", worst, n, opt, opt.draws));
    }

    // (iv) star_x f = f for simple x
    {
        Real worst(0);
        long n = 0;
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                int a = S.simple(), x = S.simple(), b = S.simple();
                std::vector<int> fw{a, x, c.dual(b), c.dual(x)};
                if (!S.live(fw)) return false;
                auto f = S.random(fw);
                std::map<int, HomVector<T>> want{{x, f}};
                worst = std::max(worst, gap(h.star(f, 1, 3, 1), want));
                ++n;
                return true;
            });
        }
        out.push_back(finish("homspace", "star (iv) simple labels", worst, n, opt, opt.draws));
    }
    return out;
}

template <class T>
std::vector<PropertyResult> tube_properties(const TubeAlgebra<T>& A, const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    const auto& c = A.cat();
    const auto& h = A.hom();
    const int n = A.dim();
    auto e_i = [&](int i) {
        Vec<T> f = A.zero();
        f(i) = Field<T>::one();
        return f;
    };
    {
        Real worst(0);
        long count = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (A.basis()[i].b != A.basis()[j].a) continue;
                const Vec<T> ij = A.product(i, j);
                for (int k = 0; k < n; ++k) {
                    if (A.basis()[j].b != A.basis()[k].a) continue;
                    worst = std::max(worst, gap<T>(A.weld(ij, e_i(k)), A.weld(e_i(i), A.product(j, k))));
                    ++count;
                }
            }
        out.push_back(finish("tube", "welding associativity", worst, count, opt));
    }
    {
        Real worst(0);
        Mat<T> G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = A.epsilon(A.product(i, j));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) worst = std::max(worst, gap<T>(G(i, j), G(j, i)));
        out.push_back(finish("tube", "epsilon symmetry", worst, static_cast<long>(n) * n, opt));
        const bool full = rank<T>(G, opt.pol) == n;
        out.push_back(finish("tube", "epsilon nondegeneracy", full ? Real(0) : Real(1), n, opt));
    }
    {
        // e_F f e_F = f for every subset F of grades containing f's grades
        std::mt19937_64 rng(opt.seed * 31 + 5);
        Real worst(0);
        long count = 0;
        const auto& gr = A.grades();
        for (int mask = 1; mask < (1 << gr.size()); ++mask) {
            std::vector<int> F;
            for (std::size_t k = 0; k < gr.size(); ++k)
                if (mask >> k & 1) F.push_back(gr[k]);
            auto eF = A.local_unit(F);
            Vec<T> f = A.zero();
            for (int i = 0; i < n; ++i) {
                const auto& b = A.basis()[i];
                if (std::count(F.begin(), F.end(), b.a) && std::count(F.begin(), F.end(), b.b))
                    f(i) = Field<T>::random(rng);
            }
            worst = std::max(worst, gap<T>(A.weld(A.weld(eF, f), eF), f));
            ++count;
        }
        out.push_back(finish("tube", "local units", worst, count, opt));
    }
    {
        Real worst(0);
        for (int a : A.grades()) {
            worst = std::max(worst, gap<T>(A.epsilon(A.unit(a)), c.d(a)));
            worst = std::max(worst, gap<T>(A.weld(A.twist(a), A.twist_inverse(a)), A.unit(a)));
        }
        for (int i = 0; i < n; ++i) worst = std::max(worst, gap<T>(A.sharp(A.sharp(e_i(i))), e_i(i)));
        out.push_back(finish("tube", "units, twist and involution", worst, n, opt));
    }

    // (v): sum_t d_t sum_ij (abar_i . bbar_j) (x) (alpha^i o_t beta^j) o_xy f
    //      = (d_x d_y / d_w) sum_i etabar_i (x) f o_w eta^i
    {
        Sampler<T> S{h, std::mt19937_64(opt.seed * 104729 + 3)};
        Real worst(0);
        long count = 0;
        const auto& gr = A.grades();
        auto grade = [&] { return gr[S.rng() % gr.size()]; };
        for (int d = 0; d < opt.draws; ++d) {
            S.draw([&] {
                int a = grade(), b = grade(), x = S.simple(), y = S.simple(), w = S.simple();
                std::vector<int> fw{w, c.dual(y), c.dual(x)};
                if (!S.live(fw) || !closed(c, {c.dual(b), c.dual(w), a, w}) ||
                    h.dim(A.word(a, b, w)) == 0)
                    return false;
                auto f = S.random(fw);
                Mat<T> lhs, rhs;
                Word lw, rw;
                bool any = false;
                for (int t : gr) {
                    if (!closed(c, {c.dual(t), c.dual(x), a, x}) || !closed(c, {c.dual(b), c.dual(y), t, y})) continue;
                    Word aw = A.word(a, t, x), bw = A.word(t, b, y);
                    if (h.dim(aw) == 0 || h.dim(bw) == 0) continue;
                    const auto& al = h.dual_basis(aw);
                    const auto& be = h.dual_basis(bw);
                    for (std::size_t i = 0; i < al.basis.size(); ++i)
                        for (std::size_t j = 0; j < be.basis.size(); ++j) {
                            Vec<T> prod = A.weld(A.element(a, t, x, al.basis[i]), A.element(t, b, y, be.basis[j]));
                            auto r = h.glue(h.glue(al.dual[i], 3, be.dual[j], 1, 1), 2, f, 1, 2);
                            Mat<T> term = c.d(t) * outer<T>(prod, r.c);
                            lhs = any ? Mat<T>(lhs + term) : term;
                            lw = r.word;
                            any = true;
                        }
                }
                if (!any) return false;
                const auto& et = h.dual_basis(A.word(a, b, w));
                const T scale = c.d(x) * c.d(y) / c.d(w);
                for (std::size_t i = 0; i < et.basis.size(); ++i) {
                    auto r = h.rotate(h.glue(h.rotate(f, 1), 2, et.dual[i], 0, 1), 1);
                    Mat<T> term = scale * outer<T>(A.element(a, b, w, et.basis[i]), r.c);
                    rhs = i ? Mat<T>(rhs + term) : term;
                    rw = r.word;
                }
                worst = std::max(worst, lw == rw ? gap<T>(lhs, rhs) : kShapeMismatch);
                ++count;
                return true;
            });
        }
        out.push_back(finish("tube", "star (v) welding against a trivalent vertex", worst, count, opt, opt.draws));
    }
    return out;
}

template <class T>
std::vector<PropertyResult> rep_properties(const TubeAlgebra<T>& A, const PropertyOptions& opt,
                                           std::vector<SimpleModule<T>>* simples_out) {
    std::vector<PropertyResult> out;
    auto R = regular(A);
    out.push_back(finish("rep", "regular module law", module_residual(A, R), 1, opt));
    auto s = decompose(A, R, opt.seed, opt.pol);
    long sq = 0;
    for (const auto& m : s) sq += static_cast<long>(m.rep.total()) * m.rep.total();
    out.push_back(finish("rep", "sum of squared dims equals dim", sq == A.dim() ? Real(0) : Real(1), s.size(), opt));
    auto again = decompose(A, R, opt.seed, opt.pol);
    bool same = again.size() == s.size();
    for (std::size_t i = 0; same && i < s.size(); ++i) {
        same = s[i].rep.dims == again[i].rep.dims && s[i].multiplicity == again[i].multiplicity &&
               s[i].rep.action.size() == again[i].rep.action.size();
        for (std::size_t k = 0; same && k < s[i].rep.action.size(); ++k)
            same = s[i].rep.action[k] == again[i].rep.action[k];
    }
    out.push_back(finish("rep", "seed-deterministic decomposition", same ? Real(0) : Real(1), 2, opt));
    Real worst(0);
    for (const auto& m : s) worst = std::max(worst, module_residual(A, m.rep));
    out.push_back(finish("rep", "simple module laws", worst, s.size(), opt));
    if (simples_out) *simples_out = std::move(s);
    return out;
}

template <class T>
Mat<T> pentagon_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N,
                    const Representation<T>& L, const Representation<T>& K) {
    auto mn = mon.tensor(M, N), nl = mon.tensor(N, L), lk = mon.tensor(L, K);
    auto mn_l = mon.tensor(mn.rep, L), m_nl = mon.tensor(M, nl.rep), nl_k = mon.tensor(nl.rep, K);
    auto n_lk = mon.tensor(N, lk.rep), mn_lk = mon.tensor(mn.rep, lk.rep);
    auto mn_l_k = mon.tensor(mn_l.rep, K), m_nl_k = mon.tensor(m_nl.rep, K);
    auto m_nl_k2 = mon.tensor(M, nl_k.rep), m_n_lk = mon.tensor(M, n_lk.rep);
    Mat<T> lhs = mon.associator(mn, mn_lk, n_lk, m_n_lk) * mon.associator(mn_l, mn_l_k, lk, mn_lk);
    Mat<T> rhs = mon.tensor_maps(m_nl_k2, m_n_lk, eye<T>(M.total()), mon.associator(nl, nl_k, lk, n_lk)) *
                 mon.associator(m_nl, m_nl_k, nl_k, m_nl_k2) *
                 mon.tensor_maps(mn_l_k, m_nl_k, mon.associator(mn, mn_l, nl, m_nl), eye<T>(K.total()));
    return lhs - rhs;
}

template <class T>
Mat<T> triangle_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N) {
    auto I = trivial(mon.algebra());
    auto mn = mon.tensor(M, N), mi = mon.tensor(M, I), in = mon.tensor(I, N);
    auto mi_n = mon.tensor(mi.rep, N), m_in = mon.tensor(M, in.rep);
    Mat<T> lhs = mon.associator(mi, mi_n, in, m_in) * mon.tensor_maps(mn, mi_n, mon.right_unitor(mi), eye<T>(N.total()));
    Mat<T> rhs = mon.tensor_maps(mn, m_in, eye<T>(M.total()), mon.left_unitor(in));
    return lhs - rhs;
}

template <class T>
Mat<T> hexagon_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N,
                   const Representation<T>& L, const TolerancePolicy& pol) {
    auto mn = mon.tensor(M, N), nm = mon.tensor(N, M), nl = mon.tensor(N, L), ml = mon.tensor(M, L);
    auto lm = mon.tensor(L, M), ln = mon.tensor(L, N);
    auto mn_l = mon.tensor(mn.rep, L), m_nl = mon.tensor(M, nl.rep), nl_m = mon.tensor(nl.rep, M);
    auto n_lm = mon.tensor(N, lm.rep), nm_l = mon.tensor(nm.rep, L), n_ml = mon.tensor(N, ml.rep);
    // (MN)L -> N(LM)
    Mat<T> h1l = mon.associator(nl, nl_m, lm, n_lm) * mon.braiding(m_nl, nl_m) * mon.associator(mn, mn_l, nl, m_nl);
    Mat<T> h1r = mon.tensor_maps(n_ml, n_lm, eye<T>(N.total()), mon.braiding(ml, lm)) *
                 mon.associator(nm, nm_l, ml, n_ml) * mon.tensor_maps(mn_l, nm_l, mon.braiding(mn, nm), eye<T>(L.total()));
    // M(NL) -> (LM)N, pulled back to (MN)L so both rows share a source
    auto l_mn = mon.tensor(L, mn.rep), lm_n = mon.tensor(lm.rep, N), m_ln = mon.tensor(M, ln.rep);
    auto ml_n = mon.tensor(ml.rep, N);
    Mat<T> a_mnl = mon.associator(mn, mn_l, nl, m_nl);
    Mat<T> h2l = inverse<T>(mon.associator(lm, lm_n, mn, l_mn), pol) * mon.braiding(mn_l, l_mn);
    Mat<T> h2r = mon.tensor_maps(ml_n, lm_n, mon.braiding(ml, lm), eye<T>(N.total())) *
                 inverse<T>(mon.associator(ml, ml_n, ln, m_ln), pol) *
                 mon.tensor_maps(m_nl, m_ln, eye<T>(M.total()), mon.braiding(nl, ln)) * a_mnl;
    Mat<T> out(h1l.rows() + h2l.rows(), h1l.cols());
    out << Mat<T>(h1l - h1r), Mat<T>(h2l - h2r);
    return out;
}

template <class T>
Mat<T> ribbon_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N) {
    auto mn = mon.tensor(M, N), nm = mon.tensor(N, M);
    Mat<T> lhs = mon.tensor_maps(mn, mn, mon.twist(M), mon.twist(N)) * mon.braiding(nm, mn) * mon.braiding(mn, nm);
    return lhs - mon.twist(mn.rep);
}

template <class T>
std::vector<PropertyResult> monoidal_properties(const Monoidal<T>& mon, const std::vector<SimpleModule<T>>& simples,
                                                const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    const auto& A = mon.algebra();
    const int k = static_cast<int>(simples.size());
    std::mt19937_64 rng(opt.seed * 6007 + 11);
    auto pick = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(k)); };
    auto probe = [&](const Mat<T>& D) {
        return D.cols() == 0 ? Real(0) : max_abs<T>(Mat<T>(D * random_columns<T>(static_cast<int>(D.cols()), 1, rng)));
    };

    // coherence diagrams, one random simple tuple per probe vector; maps are cached per tuple
    auto coherence = [&](const char* name, int arity, const std::function<Mat<T>(const std::vector<int>&)>& make) {
        std::map<std::vector<int>, Mat<T>> cache;
        Real worst(0);
        for (int v = 0; v < opt.vectors; ++v) {
            std::vector<int> tuple(arity);
            for (int& x : tuple) x = pick();
            auto it = cache.find(tuple);
            if (it == cache.end()) it = cache.emplace(tuple, make(tuple)).first;
            worst = std::max(worst, probe(it->second));
        }
        out.push_back(finish("monoidal", name, worst, opt.vectors, opt, opt.vectors));
    };
    auto R = [&](int i) -> const Representation<T>& { return simples[i].rep; };
    coherence("pentagon", 4, [&](const std::vector<int>& t) { return pentagon_gap(mon, R(t[0]), R(t[1]), R(t[2]), R(t[3])); });
    coherence("triangle", 2, [&](const std::vector<int>& t) { return triangle_gap(mon, R(t[0]), R(t[1])); });
    coherence("hexagon", 3, [&](const std::vector<int>& t) { return hexagon_gap(mon, R(t[0]), R(t[1]), R(t[2]), opt.pol); });
    coherence("ribbon", 2, [&](const std::vector<int>& t) { return ribbon_gap(mon, R(t[0]), R(t[1])); });

    // quotient: relation closure, canonical form on cosets, dimension triangle
    auto fus = mon.fusion_table(simples, opt.pol);
    Real closure(0), coset(0), triangle(0);
    long pairs = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            auto p = mon.tensor(R(i), R(j));
            auto q = mon.presentation(p);
            const int full = static_cast<int>(q.index.size());
            const int r = rank<T>(q.relations, opt.pol);
            for (const auto& act_f : q.action) {
                Mat<T> both(full, 2 * q.relations.cols());
                both << q.relations, Mat<T>(act_f * q.relations);
                if (rank<T>(both, opt.pol) != r) closure = Real(1);
            }
            // CF kills relations and fixes the representatives
            coset = std::max({coset, max_abs<T>(Mat<T>(q.to_quotient * q.relations)),
                              gap<T>(Mat<T>(q.to_quotient * q.from_quotient), eye<T>(p.rep.total()))});
            // a random vector and its CF image differ by a relation
            if (full > 0) {
                Mat<T> v = random_columns<T>(full, 1, rng);
                Mat<T> diff = v - q.from_quotient * q.to_quotient * v;
                Mat<T> both(full, q.relations.cols() + 1);
                both << q.relations, diff;
                if (rank<T>(both, opt.pol) != r) coset = std::max(coset, Real(1));
            }
            // quotient dim = aux dim - relation rank = fusion prediction per grade
            std::vector<int> predicted(p.rep.dims.size(), 0);
            for (int m = 0; m < k; ++m)
                for (std::size_t g = 0; g < predicted.size(); ++g)
                    predicted[g] += fus[i][j][m] * simples[m].rep.dims[g];
            if (full - r != p.rep.total() || predicted != p.rep.dims) triangle = Real(1);
            ++pairs;
        }
    out.push_back(finish("monoidal", "relation span invariant under the action", closure, pairs, opt));
    out.push_back(finish("monoidal", "canonical form lands in the relation coset", coset, pairs, opt));
    out.push_back(finish("monoidal", "dimension triangle", triangle, pairs, opt));

    // naturality against random intertwiners on a sum with a nontrivial endomorphism algebra
    {
        Real worst(0);
        long count = 0;
        for (int i = 0; i < k; ++i) {
            auto M = direct_sum<T>({R(i), R((i + 1) % k), R(i)});
            auto& N = R(pick());
            auto ends = hom(M, M, opt.pol);
            Mat<T> g = Mat<T>::Zero(M.total(), M.total());
            for (const auto& e : ends) g += Field<T>::random(rng) * e;
            auto mn = mon.tensor(M, N), nm = mon.tensor(N, M);
            auto b = mon.braiding(mn, nm);
            Mat<T> G = mon.tensor_maps(mn, mn, g, eye<T>(N.total()));
            worst = std::max(worst, gap<T>(Mat<T>(b * G), Mat<T>(mon.tensor_maps(nm, nm, eye<T>(N.total()), g) * b)));
            worst = std::max(worst, gap<T>(Mat<T>(mon.twist(mn.rep) * G), Mat<T>(G * mon.twist(mn.rep))));
            ++count;
        }
        out.push_back(finish("monoidal", "naturality of braiding and twist", worst, count, opt));
    }

    // modular data: Verlinde reproduces the fusion table whenever S is invertible
    auto md = mon.modular_data(simples, opt.pol);
    if (rank<T>(md.S, opt.pol) == k) {
        Real worst(0);
        const Mat<T> Sinv = inverse<T>(md.S, opt.pol);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                for (int m = 0; m < k; ++m) {
                    T v = Field<T>::zero();
                    for (int l = 0; l < k; ++l) v += md.S(i, l) * md.S(j, l) * Sinv(l, m) / md.S(md.unit, l);
                    worst = std::max(worst, gap<T>(v, Field<T>::from_int(md.fusion[i][j][m])));
                }
        out.push_back(finish("monoidal", "Verlinde formula", worst, static_cast<long>(k) * k * k, opt));
    }
    return out;
}

template <class T>
std::vector<PropertyResult> center_properties(const Monoidal<T>& mon, const std::vector<SimpleModule<T>>& simples,
                                              const CenterFixtureDocument& fixture, const PropertyOptions& opt) {
    std::vector<PropertyResult> out;
    auto rep = compare(mon, simples, fixture, opt.pol, opt.tol);
    Real module(0), inter(0), square(0);
    bool invertible = true, all_module = true;
    for (const auto& o : rep.objects) {
        module = std::max(module, o.module_residual);
        all_module = all_module && o.module_ok;
    }
    if (fixture.negative) {
        // a corrupted half-braiding must be caught by the module law
        out.push_back({"center", "corrupted sigma fails the module law", all_module ? Real(1) : Real(0),
                       static_cast<long>(rep.objects.size()), !all_module});
        return out;
    }
    for (const auto& p : rep.pairs) {
        inter = std::max(inter, p.intertwining);
        square = std::max(square, p.square);
        invertible = invertible && p.invertible && p.evaluated;
    }
    out.push_back(finish("center", "E(X) module law", module, rep.objects.size(), opt));
    if (fixture.complete)
        out.push_back(finish("center", "E is a bijection onto the simples", rep.bijection ? Real(0) : Real(1),
                             rep.objects.size(), opt));
    out.push_back(finish("center", "Psi intertwines", inter, rep.pairs.size(), opt));
    out.push_back(finish("center", "Psi invertible", invertible ? Real(0) : Real(1), rep.pairs.size(), opt));
    out.push_back(finish("center", "braiding square", square, rep.pairs.size(), opt));
    return out;
}

#define TUBECALC_PROPERTIES_INST(T)                                                                              \
    template std::vector<PropertyResult> category_properties(const Category<T>&, const PropertyOptions&);       \
    template std::vector<PropertyResult> homspace_properties(const HomCalc<T>&, const PropertyOptions&);        \
    template std::vector<PropertyResult> tube_properties(const TubeAlgebra<T>&, const PropertyOptions&);        \
    template std::vector<PropertyResult> rep_properties(const TubeAlgebra<T>&, const PropertyOptions&,          \
                                                        std::vector<SimpleModule<T>>*);                         \
    template std::vector<PropertyResult> monoidal_properties(const Monoidal<T>&,                                \
                                                             const std::vector<SimpleModule<T>>&,               \
                                                             const PropertyOptions&);                           \
    template std::vector<PropertyResult> center_properties(const Monoidal<T>&, const std::vector<SimpleModule<T>>&, \
                                                           const CenterFixtureDocument&, const PropertyOptions&); \
    template Mat<T> pentagon_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&,         \
                                 const Representation<T>&, const Representation<T>&);                           \
    template Mat<T> triangle_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&);       \
    template Mat<T> hexagon_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&,         \
                                const Representation<T>&, const TolerancePolicy&);                              \
    template Mat<T> ribbon_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&);

TUBECALC_PROPERTIES_INST(Cplx)
TUBECALC_PROPERTIES_INST(Cyclo)

}  // namespace tubecalc
