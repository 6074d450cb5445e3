#include "tubecalc/linalg.hpp"
#include "tubecalc/monoidal.hpp"

#include <doctest.h>

using namespace tubecalc;

namespace {
std::string fixture(const char* name) { return std::string(TUBECALC_FIXTURES) + "/" + name; }

template <class T>
TubeAlgebra<T> build(const char* name) {
    auto cat = std::make_shared<const Category<T>>(
        load_spec_file(fixture(name), Field<T>::exact ? Backend::Exact : Backend::Float));
    return TubeAlgebra<T>(std::make_shared<const HomCalc<T>>(cat));
}

const TolerancePolicy kPol{1e-20, 1e-20};
const Real kTight("1e-60");

template <class T>
Real dev(const Mat<T>& a, const Mat<T>& b) {
    return max_abs<T>(Mat<T>(a - b));
}

template <class T>
Mat<T> id(int n) {
    return Mat<T>::Identity(n, n);
}

template <class T>
Real intertwining(const Mat<T>& X, const Representation<T>& src, const Representation<T>& dst) {
    Real worst(0);
    for (std::size_t f = 0; f < src.action.size(); ++f)
        worst = std::max(worst, dev<T>(Mat<T>(X * src.action[f]), Mat<T>(dst.action[f] * X)));
    return worst;
}

// Pentagon for four modules.
template <class T>
Real pentagon(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N,
              const Representation<T>& L, const Representation<T>& K) {
    auto mn = mon.tensor(M, N), nl = mon.tensor(N, L), lk = mon.tensor(L, K);
    auto mn_l = mon.tensor(mn.rep, L), m_nl = mon.tensor(M, nl.rep), nl_k = mon.tensor(nl.rep, K);
    auto n_lk = mon.tensor(N, lk.rep), mn_lk = mon.tensor(mn.rep, lk.rep);
    auto mn_l_k = mon.tensor(mn_l.rep, K), m_nl_k = mon.tensor(m_nl.rep, K);
    auto m_nl_k2 = mon.tensor(M, nl_k.rep), m_n_lk = mon.tensor(M, n_lk.rep);

    Mat<T> lhs = mon.associator(mn, mn_lk, n_lk, m_n_lk) * mon.associator(mn_l, mn_l_k, lk, mn_lk);
    Mat<T> a_mnl = mon.associator(mn, mn_l, nl, m_nl);
    Mat<T> a_nlk = mon.associator(nl, nl_k, lk, n_lk);
    Mat<T> rhs = mon.tensor_maps(m_nl_k2, m_n_lk, id<T>(M.total()), a_nlk) *
                 mon.associator(m_nl, m_nl_k, nl_k, m_nl_k2) *
                 mon.tensor_maps(mn_l_k, m_nl_k, a_mnl, id<T>(K.total()));
    return dev<T>(lhs, rhs);
}

// Both hexagons for three modules.
template <class T>
std::pair<Real, Real> hexagons(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N,
                               const Representation<T>& L) {
    auto mn = mon.tensor(M, N), nm = mon.tensor(N, M), nl = mon.tensor(N, L), ml = mon.tensor(M, L);
    auto lm = mon.tensor(L, M), ln = mon.tensor(L, N);
    // first: (MN)L -> N(LM)
    auto mn_l = mon.tensor(mn.rep, L), m_nl = mon.tensor(M, nl.rep), nl_m = mon.tensor(nl.rep, M);
    auto n_lm = mon.tensor(N, lm.rep), nm_l = mon.tensor(nm.rep, L), n_ml = mon.tensor(N, ml.rep);
    Mat<T> h1l = mon.associator(nl, nl_m, lm, n_lm) * mon.braiding(m_nl, nl_m) * mon.associator(mn, mn_l, nl, m_nl);
    Mat<T> h1r = mon.tensor_maps(n_ml, n_lm, id<T>(N.total()), mon.braiding(ml, lm)) *
                 mon.associator(nm, nm_l, ml, n_ml) * mon.tensor_maps(mn_l, nm_l, mon.braiding(mn, nm), id<T>(L.total()));
    // second: M(NL) -> (LM)N, via inverse associators
    auto l_mn = mon.tensor(L, mn.rep), lm_n = mon.tensor(lm.rep, N), m_ln = mon.tensor(M, ln.rep);
    auto ml_n = mon.tensor(ml.rep, N);
    Mat<T> ainv_lmn = inverse<T>(mon.associator(lm, lm_n, mn, l_mn), kPol);
    Mat<T> ainv_mnl = inverse<T>(mon.associator(mn, mn_l, nl, m_nl), kPol);
    Mat<T> ainv_mln = inverse<T>(mon.associator(ml, ml_n, ln, m_ln), kPol);
    Mat<T> h2l = ainv_lmn * mon.braiding(mn_l, l_mn) * ainv_mnl;
    Mat<T> h2r = mon.tensor_maps(ml_n, lm_n, mon.braiding(ml, lm), id<T>(N.total())) * ainv_mln *
                 mon.tensor_maps(m_nl, m_ln, id<T>(M.total()), mon.braiding(nl, ln));
    return {dev<T>(h1l, h1r), dev<T>(h2l, h2r)};
}

// Zig-zag through the unitors: M -> I M -> (M Mbar) M -> M (Mbar M) -> M I -> M.
template <class T>
Real snake(const Monoidal<T>& mon, const Representation<T>& M) {
    const auto& A = mon.algebra();
    auto I = trivial(A);
    auto Mb = dual(A, M);
    auto im = mon.tensor(I, M), mi = mon.tensor(M, I), mmb = mon.tensor(M, Mb), mbm = mon.tensor(Mb, M);
    auto mmb_m = mon.tensor(mmb.rep, M), m_mbm = mon.tensor(M, mbm.rep);
    Mat<T> r = inverse<T>(mon.right_unitor(mi), kPol);
    Mat<T> z = r * mon.tensor_maps(m_mbm, mi, id<T>(M.total()), mon.ev(mbm)) *
               mon.associator(mmb, mmb_m, mbm, m_mbm) * mon.tensor_maps(im, mmb_m, mon.coev(mmb), id<T>(M.total())) *
               mon.left_unitor(im);
    return dev<T>(z, id<T>(M.total()));
}

template <class T>
int find_unit(const std::vector<SimpleModule<T>>& simples, const Representation<T>& I) {
    for (std::size_t i = 0; i < simples.size(); ++i)
        if (!hom(I, simples[i].rep, kPol).empty()) return static_cast<int>(i);
    return -1;
}
}  // namespace

TEST_CASE("products of Fibonacci center simples") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto simples = decompose(F, regular(F), 0, kPol);
    REQUIRE(simples.size() == 4);
    const int u = find_unit(simples, trivial(F));
    REQUIRE(u >= 0);
    auto fus = mon.fusion_table(simples, kPol);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            auto p = mon.tensor(simples[i].rep, simples[j].rep);
            CHECK(module_residual(F, p.rep) < kTight);
            CHECK(fus[i][j] == fus[j][i]);
            int total = 0;
            for (int k = 0; k < 4; ++k) total += fus[i][j][k];
            CHECK(total >= 1);
        }
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) CHECK(fus[u][j][k] == (j == k ? 1 : 0));
    // the largest simple squares to everything once
    CHECK(fus[3][3] == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("the relation span is exactly the kernel of the canonical form") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto simples = decompose(F, regular(F), 0, kPol);
    for (auto [i, j] : {std::pair{3, 3}, std::pair{1, 2}, std::pair{0, 3}}) {
        auto p = mon.tensor(simples[i].rep, simples[j].rep);
        auto q = mon.presentation(p);
        const int full = static_cast<int>(q.index.size());
        const int r = rank(q.relations, kPol);
        CHECK(r + p.rep.total() == full);
        CHECK(max_abs<Cplx>(Mat<Cplx>(q.to_quotient * q.relations)) < kTight);
        CHECK(dev<Cplx>(Mat<Cplx>(q.to_quotient * q.from_quotient), id<Cplx>(p.rep.total())) < kTight);
        // relations are stable under the action
        for (std::size_t f = 0; f < q.action.size(); ++f) {
            Mat<Cplx> both(full, 2 * q.relations.cols());
            both << q.relations, Mat<Cplx>(q.action[f] * q.relations);
            CHECK(rank(both, kPol) == r);
        }
    }
}

TEST_CASE("unit constraints") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto simples = decompose(F, regular(F), 0, kPol);
    auto I = trivial(F);
    for (auto& s : simples) {
        auto im = mon.tensor(I, s.rep), mi = mon.tensor(s.rep, I);
        auto l = mon.left_unitor(im), r = mon.right_unitor(mi);
        CHECK(intertwining(l, s.rep, im.rep) < kTight);
        CHECK(intertwining(r, s.rep, mi.rep) < kTight);
        CHECK(rank(l, kPol) == s.rep.total());
        CHECK(im.rep.total() == s.rep.total());
    }
    // triangle: (rho^-1 box id) then alpha equals id box lambda^-1
    auto& M = simples[3].rep;
    auto& N = simples[1].rep;
    auto mn = mon.tensor(M, N), mi = mon.tensor(M, I), in = mon.tensor(I, N);
    auto mi_n = mon.tensor(mi.rep, N), m_in = mon.tensor(M, in.rep);
    Mat<Cplx> lhs = mon.associator(mi, mi_n, in, m_in) *
                    mon.tensor_maps(mn, mi_n, mon.right_unitor(mi), id<Cplx>(N.total()));
    Mat<Cplx> rhs = mon.tensor_maps(mn, m_in, id<Cplx>(M.total()), mon.left_unitor(in));
    CHECK(dev<Cplx>(lhs, rhs) < kTight);
}

TEST_CASE("associator is an invertible intertwiner satisfying the pentagon") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto s = decompose(F, regular(F), 0, kPol);
    auto& M = s[3].rep;
    auto& N = s[1].rep;
    auto& L = s[2].rep;
    auto mn = mon.tensor(M, N), nl = mon.tensor(N, L);
    auto mn_l = mon.tensor(mn.rep, L), m_nl = mon.tensor(M, nl.rep);
    auto a = mon.associator(mn, mn_l, nl, m_nl);
    CHECK(intertwining(a, mn_l.rep, m_nl.rep) < kTight);
    REQUIRE(a.rows() == a.cols());
    CHECK(rank(a, kPol) == a.rows());
    CHECK(pentagon(mon, s[1].rep, s[3].rep, s[2].rep, s[1].rep) < kTight);
    CHECK(pentagon(mon, s[3].rep, s[3].rep, s[1].rep, s[2].rep) < kTight);
}

TEST_CASE("braiding, hexagons and the ribbon identity") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto s = decompose(F, regular(F), 0, kPol);
    for (auto [i, j] : {std::pair{3, 1}, std::pair{1, 2}, std::pair{3, 3}, std::pair{2, 2}}) {
        auto& M = s[i].rep;
        auto& N = s[j].rep;
        auto mn = mon.tensor(M, N), nm = mon.tensor(N, M);
        auto b = mon.braiding(mn, nm);
        CHECK(intertwining(b, mn.rep, nm.rep) < kTight);
        CHECK(rank(b, kPol) == mn.rep.total());
        Mat<Cplx> lhs = mon.tensor_maps(mn, mn, mon.twist(M), mon.twist(N)) * mon.braiding(nm, mn) * b;
        CHECK(dev<Cplx>(lhs, mon.twist(mn.rep)) < kTight);
    }
    auto [h1, h2] = hexagons(mon, s[3].rep, s[1].rep, s[2].rep);
    CHECK(h1 < kTight);
    CHECK(h2 < kTight);
    auto [g1, g2] = hexagons(mon, s[1].rep, s[1].rep, s[3].rep);
    CHECK(g1 < kTight);
    CHECK(g2 < kTight);
}

TEST_CASE("duality") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto s = decompose(F, regular(F), 0, kPol);
    auto I = trivial(F);
    for (auto& m : s) {
        auto mb = dual(F, m.rep);
        auto mbm = mon.tensor(mb, m.rep), mmb = mon.tensor(m.rep, mb);
        CHECK(intertwining(mon.ev(mbm), mbm.rep, I) < kTight);
        CHECK(intertwining(mon.coev(mmb), I, mmb.rep) < kTight);
        CHECK(snake(mon, m.rep) < kTight);
    }
}

TEST_CASE("naturality of the braiding") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto s = decompose(F, regular(F), 0, kPol);
    // M = s1 + s3 has a two-dimensional endomorphism algebra; use a random one
    auto M = direct_sum<Cplx>({s[1].rep, s[3].rep});
    auto& N = s[2].rep;
    auto ends = hom(M, M, kPol);
    REQUIRE(ends.size() == 2);
    std::mt19937_64 rng(7);
    Mat<Cplx> g = Field<Cplx>::random(rng) * ends[0] + Field<Cplx>::random(rng) * ends[1];
    auto mn = mon.tensor(M, N), nm = mon.tensor(N, M);
    auto b = mon.braiding(mn, nm);
    Mat<Cplx> lhs = b * mon.tensor_maps(mn, mn, g, id<Cplx>(N.total()));
    Mat<Cplx> rhs = mon.tensor_maps(nm, nm, id<Cplx>(N.total()), g) * b;
    CHECK(dev<Cplx>(lhs, rhs) < kTight);
}

TEST_CASE("Fibonacci modular data") {
    auto F = build<Cplx>("fib.json");
    Monoidal<Cplx> mon(F);
    auto s = decompose(F, regular(F), 0, kPol);
    auto md = mon.modular_data(s, kPol);
    const Real phi = (1 + boost::multiprecision::sqrt(Real(5))) / 2;
    std::vector<Real> want{1, phi, phi, phi * phi};
    for (int i = 0; i < 4; ++i) {
        CHECK(abs(md.dims[i].real() - want[i]) < kTight);
        CHECK(abs(md.dims[i].imag()) < kTight);
    }
    const int n = 4;
    Mat<Cplx> S = md.S;
    Mat<Cplx> T = Mat<Cplx>::Zero(n, n);
    for (int i = 0; i < n; ++i) T(i, i) = md.twists[i];
    CHECK(dev<Cplx>(S, Mat<Cplx>(S.transpose())) < kTight);
    CHECK(dev<Cplx>(Mat<Cplx>(S * S.adjoint()), id<Cplx>(n)) < kTight);
    // vanishing central charge
    Mat<Cplx> st = S * T;
    CHECK(dev<Cplx>(Mat<Cplx>(st * st * st), Mat<Cplx>(S * S)) < kTight);
    // Verlinde
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Cplx v(0);
                for (int l = 0; l < n; ++l) v += S(i, l) * S(j, l) * std::conj(S(k, l)) / S(md.unit, l);
                CHECK(abs(v - Cplx(md.fusion[i][j][k])) < kTight);
            }
}

TEST_CASE("toric code modular data is exact") {
    auto V = build<Cyclo>("vecz2.json");
    Monoidal<Cyclo> mon(V);
    auto s = decompose(V, regular(V), 0, kPol);
    REQUIRE(s.size() == 4);
    auto md = mon.modular_data(s, kPol);
    REQUIRE(md.unit == 0);
    int fermion = -1;
    for (int i = 0; i < 4; ++i) {
        CHECK(md.dims[i] == Cyclo(1));
        if (md.twists[i] == Cyclo(-1)) fermion = i;
        else CHECK(md.twists[i] == Cyclo(1));
    }
    REQUIRE(fermion == 3);
    // e box m is the fermion
    CHECK(md.fusion[1][2] == std::vector<int>{0, 0, 0, 1});
    for (int i = 0; i < 4; ++i) CHECK(md.fusion[i][i] == std::vector<int>{1, 0, 0, 0});
    const Cyclo h(Rational(1, 2));
    const int sign[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(md.S(i, j) == h * Cyclo(sign[i][j]));
}

TEST_CASE("Morita-trivial center of M2") {
    auto M = build<Cyclo>("m2.json");
    Monoidal<Cyclo> mon(M);
    auto s = decompose(M, regular(M), 0, kPol);
    REQUIRE(s.size() == 1);
    auto I = trivial(M);
    auto p = mon.tensor(I, I);
    CHECK(module_residual(M, p.rep) == Real(0));
    CHECK(p.rep.total() == I.total());
    auto md = mon.modular_data(s, kPol);
    CHECK(md.dims[0] == Cyclo(1));
    CHECK(md.S(0, 0) == Cyclo(1));
    CHECK(snake(mon, s[0].rep) == Real(0));
}
