#include "tubecalc/rep.hpp"

#include "tubecalc/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace tubecalc {

template <class T>
int Representation<T>::total() const {
    int s = 0;
    for (int d : dims) s += d;
    return s;
}

template <class T>
int Representation<T>::offset(int g) const {
    int s = 0;
    for (int k = 0; k < g; ++k) s += dims[k];
    return s;
}

template <class T>
std::vector<int> Representation<T>::grade_of_row() const {
    std::vector<int> out;
    for (std::size_t g = 0; g < dims.size(); ++g)
        for (int k = 0; k < dims[g]; ++k) out.push_back(static_cast<int>(g));
    return out;
}

template <class T>
Mat<T> act(const Representation<T>& m, const Vec<T>& f) {
    const int n = m.total();
    Mat<T> out = Mat<T>::Zero(n, n);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (!Field<T>::is_zero(f(i), Real(0))) out += f(i) * m.action[i];
    return out;
}

template <class T>
Representation<T> regular(const TubeAlgebra<T>& A) {
    Representation<T> r;
    const auto& gr = A.grades();
    r.dims.assign(gr.size(), 0);
    std::vector<int> pos(A.dim());
    // M_b = sum over c of T_{c;b}, in tube basis order inside each grade
    std::vector<std::vector<int>> members(gr.size());
    for (int i = 0; i < A.dim(); ++i) members[A.grade_index(A.basis()[i].b)].push_back(i);
    int at = 0;
    for (std::size_t g = 0; g < gr.size(); ++g) {
        r.dims[g] = static_cast<int>(members[g].size());
        for (int i : members[g]) pos[i] = at++;
    }
    for (int j = 0; j < A.dim(); ++j) {
        Mat<T> m = Mat<T>::Zero(A.dim(), A.dim());
        for (int i = 0; i < A.dim(); ++i) {
            if (A.basis()[i].b != A.basis()[j].a) continue;
            const Vec<T>& p = A.product(i, j);
            for (int k = 0; k < A.dim(); ++k)
                if (!Field<T>::is_zero(p(k), Real(0))) m(pos[k], pos[i]) = p(k);
        }
        r.action.push_back(std::move(m));
    }
    return r;
}

template <class T>
Representation<T> trivial(const TubeAlgebra<T>& A) {
    const auto& c = A.cat();
    const auto& h = A.hom();
    Representation<T> r;
    const auto& gr = A.grades();
    r.dims.assign(gr.size(), 0);
    for (std::size_t g = 0; g < gr.size(); ++g)
        if (c.is_unit(gr[g])) r.dims[g] = 1;
    const int n = r.total();
    for (int i = 0; i < A.dim(); ++i) {
        Mat<T> m = Mat<T>::Zero(n, n);
        const auto& b = A.basis()[i];
        if (c.is_unit(b.a) && c.is_unit(b.b)) {
            // l.f = d_x ptr_x(l o f) with l the generator of H<1>
            auto f = h.basis_vector(A.word(b.a, b.b, b.x), b.tree);
            auto l = h.reword(h.one(c.source(b.a)), h.word({b.a}));
            auto v = h.contract(h.glue(f, 2, l, 0, 1), 1);
            m(r.offset(A.grade_index(b.b)), r.offset(A.grade_index(b.a))) = c.d(b.x) * h.scalar(v);
        }
        r.action.push_back(std::move(m));
    }
    return r;
}

template <class T>
Representation<T> dual(const TubeAlgebra<T>& A, const Representation<T>& m) {
    const auto& c = A.cat();
    const auto& gr = A.grades();
    Representation<T> r;
    r.dims.assign(gr.size(), 0);
    for (std::size_t g = 0; g < gr.size(); ++g) r.dims[g] = m.dims[A.grade_index(c.dual(gr[g]))];
    const int n = r.total();
    // coordinates of dual grade g are those of grade dual(g) in m
    std::vector<int> perm(n);
    for (std::size_t g = 0; g < gr.size(); ++g) {
        int src = m.offset(A.grade_index(c.dual(gr[g])));
        for (int k = 0; k < r.dims[g]; ++k) perm[r.offset(static_cast<int>(g)) + k] = src + k;
    }
    for (int i = 0; i < A.dim(); ++i) {
        Vec<T> e = A.zero();
        e(i) = Field<T>::one();
        Mat<T> s = act(m, A.sharp(e)).transpose();
        Mat<T> out(n, n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) out(p, q) = s(perm[p], perm[q]);
        r.action.push_back(std::move(out));
    }
    return r;
}

template <class T>
Representation<T> direct_sum(const std::vector<Representation<T>>& parts) {
    Representation<T> r;
    if (parts.empty()) return r;
    const std::size_t G = parts.front().dims.size();
    r.dims.assign(G, 0);
    for (const auto& p : parts)
        for (std::size_t g = 0; g < G; ++g) r.dims[g] += p.dims[g];
    const int n = r.total();
    // position of (part, local row)
    std::vector<std::vector<int>> pos(parts.size());
    std::vector<int> fill(G, 0);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (std::size_t g = 0; g < G; ++g)
            for (int j = 0; j < parts[k].dims[g]; ++j)
                pos[k].push_back(r.offset(static_cast<int>(g)) + fill[g] + j);
        for (std::size_t g = 0; g < G; ++g) fill[g] += parts[k].dims[g];
    }
    for (std::size_t i = 0; i < parts.front().action.size(); ++i) {
        Mat<T> m = Mat<T>::Zero(n, n);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const auto& a = parts[k].action[i];
            for (Eigen::Index p = 0; p < a.rows(); ++p)
                for (Eigen::Index q = 0; q < a.cols(); ++q) m(pos[k][p], pos[k][q]) = a(p, q);
        }
        r.action.push_back(std::move(m));
    }
    return r;
}

template <class T>
Real module_residual(const TubeAlgebra<T>& A, const Representation<T>& m) {
    Real worst(0);
    auto see = [&](const Mat<T>& d) {
        Real v = max_abs<T>(d);
        if (v > worst) worst = v;
    };
    const int n = A.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (A.basis()[i].b != A.basis()[j].a) {
                see(Mat<T>(m.action[j] * m.action[i]));
                continue;
            }
            see(Mat<T>(act(m, A.product(i, j)) - m.action[j] * m.action[i]));
        }
    for (std::size_t g = 0; g < A.grades().size(); ++g) {
        Mat<T> p = Mat<T>::Zero(m.total(), m.total());
        for (int k = 0; k < m.dims[g]; ++k) p(m.offset(static_cast<int>(g)) + k, m.offset(static_cast<int>(g)) + k) = Field<T>::one();
        see(Mat<T>(act(m, A.unit(A.grades()[g])) - p));
    }
    return worst;
}

template <class T>
std::vector<Mat<T>> hom(const Representation<T>& m, const Representation<T>& n, const TolerancePolicy& pol) {
    const std::size_t G = m.dims.size();
    std::vector<int> var_off(G + 1, 0);
    for (std::size_t g = 0; g < G; ++g) var_off[g + 1] = var_off[g] + n.dims[g] * m.dims[g];
    const int nvar = var_off[G];
    std::vector<int> grade_m = m.grade_of_row();
    std::vector<Mat<T>> out;
    if (nvar == 0) return out;
    std::vector<Mat<T>> rows;
    int nrows = 0;
    for (std::size_t i = 0; i < m.action.size(); ++i) {
        // locate the (b, a) block carrying the action
        for (std::size_t a = 0; a < G; ++a)
            for (std::size_t b = 0; b < G; ++b) {
                if (!m.dims[a] && !n.dims[a]) continue;
                if (!m.dims[b] && !n.dims[b]) continue;
                Mat<T> Am = m.action[i].block(m.offset(b), m.offset(a), m.dims[b], m.dims[a]);
                Mat<T> An = n.action[i].block(n.offset(b), n.offset(a), n.dims[b], n.dims[a]);
                bool zm = max_abs<T>(Am) == 0, zn = max_abs<T>(An) == 0;
                if (zm && zn) continue;
                // X_b Am - An X_a = 0 on vec(.) in column-major order
                Mat<T> eq = Mat<T>::Zero(n.dims[b] * m.dims[a], nvar);
                if (!zm && n.dims[b] * m.dims[b] > 0) {
                    Mat<T> I = Mat<T>::Identity(n.dims[b], n.dims[b]);
                    eq.block(0, var_off[b], eq.rows(), n.dims[b] * m.dims[b]) += kron<T>(Mat<T>(Am.transpose()), I);
                }
                if (!zn && n.dims[a] * m.dims[a] > 0) {
                    Mat<T> I = Mat<T>::Identity(m.dims[a], m.dims[a]);
                    eq.block(0, var_off[a], eq.rows(), n.dims[a] * m.dims[a]) -= kron<T>(I, An);
                }
                nrows += static_cast<int>(eq.rows());
                rows.push_back(std::move(eq));
            }
    }
    Mat<T> sys(nrows, nvar);
    int r = 0;
    for (auto& e : rows) {
        sys.block(r, 0, e.rows(), nvar) = e;
        r += static_cast<int>(e.rows());
    }
    Mat<T> ns = nullspace<T>(sys, pol);
    for (Eigen::Index k = 0; k < ns.cols(); ++k) {
        Mat<T> X = Mat<T>::Zero(n.total(), m.total());
        for (std::size_t g = 0; g < G; ++g)
            for (int q = 0; q < m.dims[g]; ++q)
                for (int p = 0; p < n.dims[g]; ++p)
                    X(n.offset(g) + p, m.offset(g) + q) = ns(var_off[g] + q * n.dims[g] + p, k);
        out.push_back(std::move(X));
    }
    return out;
}

template <class T>
Representation<T> restrict_to(const Representation<T>& m, const Mat<T>& q, const std::vector<int>& cols_per_grade,
                              const TolerancePolicy& pol) {
    Representation<T> r;
    r.dims = cols_per_grade;
    const Eigen::Index k = q.cols();
    if (k == 0) {
        for (std::size_t i = 0; i < m.action.size(); ++i) r.action.push_back(Mat<T>(0, 0));
        return r;
    }
    Mat<T> rhs(q.rows(), k * static_cast<Eigen::Index>(m.action.size()));
    for (std::size_t i = 0; i < m.action.size(); ++i) rhs.block(0, i * k, q.rows(), k) = m.action[i] * q;
    Real res;
    Mat<T> x = solve_full_column<T>(q, rhs, pol, &res);
    Real scale = 1 + max_abs<T>(rhs);
    if (res > (Real(pol.abs_tol) + Real(pol.rel_tol) * scale) * 1000)
        throw DecompositionError("subspace is not invariant within tolerance");
    for (std::size_t i = 0; i < m.action.size(); ++i) r.action.push_back(x.block(0, i * k, k, k));
    return r;
}

template <class T>
Vec<T> characters(const Representation<T>& m) {
    Vec<T> ch(static_cast<Eigen::Index>(m.action.size()));
    for (std::size_t i = 0; i < m.action.size(); ++i) ch(i) = m.action[i].trace();
    return ch;
}

template <class T>
T twist_scalar(const TubeAlgebra<T>& A, const Representation<T>& m, const TolerancePolicy& pol) {
    for (std::size_t g = 0; g < m.dims.size(); ++g) {
        if (!m.dims[g]) continue;
        Mat<T> t = act(m, A.twist(A.grades()[g]));
        const int o = m.offset(static_cast<int>(g)), d = m.dims[g];
        Mat<T> blk = t.block(o, o, d, d);
        T avg = blk.trace() / Field<T>::from_int(d);
        Mat<T> dev = blk - avg * Mat<T>::Identity(d, d);
        if (max_abs<T>(dev) > Real(pol.abs_tol) * 1000)
            throw DecompositionError("twist is not scalar on a module that should be simple");
        return avg;
    }
    throw DecompositionError("twist of the zero module");
}

namespace {

Real cluster_tol(const TolerancePolicy& pol, const Real& scale) {
    Real floor = pow(Real(2), -static_cast<int>(precision_bits()) / 2);
    Real t = Real(pol.abs_tol) > floor ? Real(pol.abs_tol) : floor;
    return t * (1 + scale);
}

// Continued-fraction snapping of a real number to a rational of bounded height.
bool snap_rational(const Real& x, const Real& tol, Rational& out) {
    using boost::multiprecision::mpz_int;
    Real r = x;
    mpz_int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 40; ++it) {
        Real fl = floor(r);
        mpz_int a = fl.convert_to<mpz_int>();
        mpz_int p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Rational cand(p1, q1);
        Real approx = Real(p1.str()) / Real(q1.str());
        if (abs(approx - x) <= tol) {
            out = cand;
            return true;
        }
        if (q1 > 1000000) return false;
        Real frac = r - fl;
        if (frac == 0) return false;
        r = 1 / frac;
    }
    return false;
}

template <class T>
struct Piece {
    Mat<T> q;
    std::vector<int> cols;
};

template <class T>
Mat<T> block_of(const Representation<T>& m, const Mat<T>& x, int g) {
    const int o = m.offset(g), d = m.dims[g];
    return x.block(o, o, d, d);
}

template <class T>
Piece<T> assemble(const Representation<T>& m, const std::vector<Mat<T>>& per_grade) {
    Piece<T> p;
    int cols = 0;
    for (const auto& b : per_grade) cols += static_cast<int>(b.cols());
    p.q = Mat<T>::Zero(m.total(), cols);
    int at = 0;
    for (std::size_t g = 0; g < per_grade.size(); ++g) {
        const auto& b = per_grade[g];
        p.q.block(m.offset(static_cast<int>(g)), at, b.rows(), b.cols()) = b;
        at += static_cast<int>(b.cols());
        p.cols.push_back(static_cast<int>(b.cols()));
    }
    return p;
}

// Eigenspace split of a random commutant element (floating point).
std::vector<Piece<Cplx>> split_float(const Representation<Cplx>& m, const Mat<Cplx>& C, const TolerancePolicy& pol) {
    const std::size_t G = m.dims.size();
    std::vector<Cplx> reps;
    Real tol = cluster_tol(pol, max_abs<Cplx>(C));
    for (std::size_t g = 0; g < G; ++g) {
        if (!m.dims[g]) continue;
        Eigen::ComplexEigenSolver<Mat<Cplx>> es(block_of(m, C, static_cast<int>(g)), false);
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            Cplx lam = es.eigenvalues()(k);
            bool seen = false;
            for (const auto& r : reps)
                if (abs(r - lam) <= tol) seen = true;
            if (!seen) reps.push_back(lam);
        }
    }
    std::vector<Piece<Cplx>> out;
    if (reps.size() < 2) return out;
    int covered = 0;
    TolerancePolicy ns_pol = pol;
    ns_pol.abs_tol = std::max(pol.abs_tol, static_cast<double>(tol));
    for (const auto& lam : reps) {
        std::vector<Mat<Cplx>> per;
        for (std::size_t g = 0; g < G; ++g) {
            if (!m.dims[g]) {
                per.push_back(Mat<Cplx>(0, 0));
                continue;
            }
            Mat<Cplx> b = block_of(m, C, static_cast<int>(g));
            b -= lam * Mat<Cplx>::Identity(b.rows(), b.cols());
            Mat<Cplx> k = nullspace<Cplx>(b, ns_pol);
            per.push_back(k);
            covered += static_cast<int>(k.cols());
        }
        out.push_back(assemble(m, per));
    }
    if (covered != m.total()) return {};
    return out;
}

// Exact split: kernel and image of C - lambda for a rational eigenvalue lambda
// at which C is semisimple.
std::vector<Piece<Cyclo>> split_exact(const Representation<Cyclo>& m, const Mat<Cyclo>& C,
                                      const TolerancePolicy& pol) {
    const std::size_t G = m.dims.size();
    const TolerancePolicy exact_pol{0, 0};
    for (std::size_t g0 = 0; g0 < G; ++g0) {
        if (!m.dims[g0]) continue;
        Mat<Cyclo> b = block_of(m, C, static_cast<int>(g0));
        Mat<Cplx> bz(b.rows(), b.cols());
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j) bz(i, j) = b(i, j).to_complex();
        Eigen::ComplexEigenSolver<Mat<Cplx>> es(bz, false);
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            Cplx lam = es.eigenvalues()(k);
            Real tol = cluster_tol(pol, max_abs<Cplx>(bz));
            if (abs(lam.imag()) > tol) continue;
            Rational q;
            if (!snap_rational(lam.real(), tol, q)) continue;
            Cyclo l(q);
            std::vector<Mat<Cyclo>> ker, img;
            int kdim = 0;
            bool ok = true;
            for (std::size_t g = 0; g < G && ok; ++g) {
                if (!m.dims[g]) {
                    ker.push_back(Mat<Cyclo>(0, 0));
                    img.push_back(Mat<Cyclo>(0, 0));
                    continue;
                }
                Mat<Cyclo> d = block_of(m, C, static_cast<int>(g));
                d -= l * Mat<Cyclo>::Identity(d.rows(), d.cols());
                Mat<Cyclo> kk = nullspace<Cyclo>(d, exact_pol);
                Mat<Cyclo> ii = column_basis<Cyclo>(d, exact_pol);
                if (rank<Cyclo>(Mat<Cyclo>(d * d), exact_pol) != ii.cols()) ok = false;
                kdim += static_cast<int>(kk.cols());
                ker.push_back(kk);
                img.push_back(ii);
            }
            if (!ok || kdim == 0 || kdim == m.total()) continue;
            return {assemble(m, ker), assemble(m, img)};
        }
    }
    return {};
}

template <class T>
void split_rec(const TubeAlgebra<T>& A, const Representation<T>& m, std::mt19937_64& rng, const TolerancePolicy& pol,
               std::vector<Representation<T>>& out) {
    if (m.total() == 0) return;
    auto E = hom(m, m, pol);
    if (E.size() == 1) {
        out.push_back(m);
        return;
    }
    if (E.empty()) throw DecompositionError("module has no endomorphisms (bad tolerance)");
    for (int attempt = 0; attempt < 12; ++attempt) {
        std::vector<Piece<T>> pieces;
        if constexpr (Field<T>::exact) {
            // basis elements first, then small random combinations
            if (attempt < static_cast<int>(E.size()) && attempt < 6) {
                pieces = split_exact(m, E[attempt], pol);
            } else {
                Mat<T> C = Mat<T>::Zero(m.total(), m.total());
                for (const auto& e : E) C += Field<T>::random(rng) * e;
                pieces = split_exact(m, C, pol);
            }
        } else {
            Mat<T> C = Mat<T>::Zero(m.total(), m.total());
            for (const auto& e : E) C += Field<T>::random(rng) * e;
            pieces = split_float(m, C, pol);
        }
        if (pieces.size() < 2) continue;
        for (const auto& p : pieces) split_rec(A, restrict_to(m, p.q, p.cols, pol), rng, pol, out);
        return;
    }
    throw DecompositionError("could not split a module with " + std::to_string(E.size()) +
                             "-dimensional endomorphism algebra");
}

template <class T>
int compare_scalar(const T& a, const T& b, const Real& tol) {
    Cplx x = Field<T>::to_complex(a), y = Field<T>::to_complex(b);
    if (abs(x.real() - y.real()) > tol) return x.real() > y.real() ? 1 : -1;
    if (abs(x.imag() - y.imag()) > tol) return x.imag() > y.imag() ? 1 : -1;
    return 0;
}

Real twist_arg(const Cplx& z, const Real& tol) {
    Real a = atan2(z.imag(), z.real());
    if (a < -tol) a += 2 * pi_real();
    if (abs(a) <= tol || abs(a - 2 * pi_real()) <= tol) a = 0;
    return a;
}

}  // namespace

template <class T>
std::vector<SimpleModule<T>> decompose(const TubeAlgebra<T>& A, const Representation<T>& m, std::uint64_t seed,
                                       const TolerancePolicy& pol) {
    std::mt19937_64 rng(seed);
    std::vector<Representation<T>> pieces;
    split_rec(A, m, rng, pol, pieces);
    std::vector<SimpleModule<T>> out;
    for (auto& p : pieces) {
        bool found = false;
        for (auto& s : out) {
            if (s.rep.dims != p.dims) continue;
            if (!hom(s.rep, p, pol).empty()) {
                ++s.multiplicity;
                found = true;
                break;
            }
        }
        if (!found) out.push_back(SimpleModule<T>{p, 1, twist_scalar(A, p, pol)});
    }
    const Real tol = cluster_tol(pol, Real(1)) * 1000;
    std::stable_sort(out.begin(), out.end(), [&](const SimpleModule<T>& x, const SimpleModule<T>& y) {
        if (x.rep.total() != y.rep.total()) return x.rep.total() < y.rep.total();
        Real ax = twist_arg(Field<T>::to_complex(x.twist), tol), ay = twist_arg(Field<T>::to_complex(y.twist), tol);
        if (abs(ax - ay) > tol) return ax < ay;
        if (x.rep.dims != y.rep.dims) return x.rep.dims > y.rep.dims;
        Vec<T> cx = characters(x.rep), cy = characters(y.rep);
        for (Eigen::Index i = 0; i < cx.size(); ++i) {
            int c = compare_scalar(cx(i), cy(i), tol);
            if (c) return c > 0;
        }
        return false;
    });
    return out;
}

template <class T>
std::vector<int> multiplicities(const std::vector<SimpleModule<T>>& simples, const Representation<T>& m,
                                const TolerancePolicy& pol) {
    std::vector<int> out;
    for (const auto& s : simples) out.push_back(static_cast<int>(hom(s.rep, m, pol).size()));
    return out;
}

#define TUBECALC_REP_INST(T)                                                                                       \
    template struct Representation<T>;                                                                             \
    template Mat<T> act(const Representation<T>&, const Vec<T>&);                                                 \
    template Representation<T> regular(const TubeAlgebra<T>&);                                                     \
    template Representation<T> trivial(const TubeAlgebra<T>&);                                                     \
    template Representation<T> dual(const TubeAlgebra<T>&, const Representation<T>&);                              \
    template Representation<T> direct_sum(const std::vector<Representation<T>>&);                                  \
    template Real module_residual(const TubeAlgebra<T>&, const Representation<T>&);                                \
    template std::vector<Mat<T>> hom(const Representation<T>&, const Representation<T>&, const TolerancePolicy&);  \
    template Representation<T> restrict_to(const Representation<T>&, const Mat<T>&, const std::vector<int>&,       \
                                           const TolerancePolicy&);                                                \
    template T twist_scalar(const TubeAlgebra<T>&, const Representation<T>&, const TolerancePolicy&);              \
    template std::vector<SimpleModule<T>> decompose(const TubeAlgebra<T>&, const Representation<T>&,               \
                                                    std::uint64_t, const TolerancePolicy&);                        \
    template std::vector<int> multiplicities(const std::vector<SimpleModule<T>>&, const Representation<T>&,        \
                                             const TolerancePolicy&);                                              \
    template Vec<T> characters(const Representation<T>&);

TUBECALC_REP_INST(Cplx)
TUBECALC_REP_INST(Cyclo)

}  // namespace tubecalc
