#include "tubecalc/homspace.hpp"
#include "tubecalc/linalg.hpp"

#include <doctest.h>

using namespace tubecalc;

namespace {
std::string fixture(const char* name) { return std::string(TUBECALC_FIXTURES) + "/" + name; }

template <class T>
std::shared_ptr<const Category<T>> load(const char* name) {
    return std::make_shared<const Category<T>>(
        load_spec_file(fixture(name), Field<T>::exact ? Backend::Exact : Backend::Float));
}

const Real kTol("1e-40");

template <class T>
bool close(const HomVector<T>& a, const HomVector<T>& b) {
    if (!(a.word == b.word)) return false;
    if (Field<T>::exact) return a.c == b.c;
    return max_abs<T>(Mat<T>(a.c - b.c)) < kTol;
}

template <class T>
bool close(const T& a, const T& b) {
    if constexpr (Field<T>::exact) return a == b;
    else return abs(a - b) < kTol;
}

struct Fib {
    std::shared_ptr<const Category<Cplx>> cat = load<Cplx>("fib.json");
    HomCalc<Cplx> h{cat};
    int one = cat->find("1"), t = cat->find("t");
    Cplx phi = cat->d(t);
};
}  // namespace

TEST_CASE("dimensions of small Hom spaces") {
    Fib f;
    CHECK(f.h.dim(Word{0, {}}) == 1);
    CHECK(f.h.dim(f.h.word({f.t, f.t, f.t, f.t})) == 2);
    CHECK(f.h.dim(f.h.word({f.t, f.t, f.t})) == 1);
    CHECK(f.h.dim(f.h.word({f.t, f.one, f.t})) == 1);
    auto z2 = load<Cyclo>("vecz2.json");
    HomCalc<Cyclo> hz(z2);
    int g = z2->find("g");
    CHECK(hz.dim(hz.word({g, g, g})) == 0);
    CHECK(hz.dim(hz.word({g, g, g, g})) == 1);
}

TEST_CASE("rotation sends units to units and is periodic") {
    Fib f;
    auto e = f.h.unit({f.t});
    auto r = f.h.rotate(e);
    CHECK(close(r, f.h.unit({f.t})));
    for (auto w : {std::vector<int>{f.t, f.t, f.t}, std::vector<int>{f.t, f.t, f.t, f.t},
                   std::vector<int>{f.t, f.t}, std::vector<int>{f.t, f.one, f.t, f.one}}) {
        Word W = f.h.word(w);
        for (int i = 0; i < f.h.dim(W); ++i) {
            auto v = f.h.basis_vector(W, i);
            CHECK(close(f.h.rotate(v, static_cast<int>(w.size())), v));
        }
    }
    CHECK(close(f.h.rotate(f.h.zero(f.h.word({f.t, f.t, f.t}))), f.h.zero(f.h.word({f.t, f.t, f.t}))));
}

TEST_CASE("pairing and dual bases") {
    Fib f;
    auto e = f.h.unit({f.t});
    CHECK(close(f.h.pair(e, e), f.phi));
    CHECK(close(f.h.trace(e), f.phi));
    auto e1 = f.h.unit({f.one});
    CHECK(close(f.h.trace(e1), Field<Cplx>::one()));
    Word W = f.h.word({f.t, f.t, f.t, f.t});
    const auto& db = f.h.dual_basis(W);
    REQUIRE(db.basis.size() == 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(close(f.h.pair(db.dual[i], db.basis[j]), i == j ? Field<Cplx>::one() : Field<Cplx>::zero()));
    const auto& dt = f.h.dual_basis(f.h.word({f.t, f.t}));
    // the canonical generator is e / sqrt(d), so its dual is itself; with e as basis the dual is e / d
    CHECK(close(dt.dual[0], (Field<Cplx>::one() / f.h.cat().sqrtd(f.t)) * e));
    CHECK(close(f.h.pair((Field<Cplx>::one() / f.phi) * e, e), Field<Cplx>::one()));
    CHECK(f.h.dual_basis(f.h.word({f.t, f.t, f.one, f.t})).basis.empty() == false);
    // Gram matrices are invertible on all short fixture words
    for (int n = 1; n <= 4; ++n)
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<int> w;
            for (int k = 0; k < n; ++k) w.push_back((mask >> k) & 1 ? f.t : f.one);
            CHECK_NOTHROW(f.h.dual_basis(f.h.word(w)));
        }
}

TEST_CASE("composition laws") {
    Fib f;
    std::mt19937_64 rng(11);
    Word W = f.h.word({f.t, f.t, f.t, f.t});
    auto v = f.h.random(W, rng);
    // f o_x e_x = f
    auto e = f.h.unit({f.t});
    CHECK(close(f.h.glue(v, 3, e, 0, 1), v));
    // e_x o_1 e_y = e_xy
    auto exy = f.h.unit({f.t, f.t});
    auto ex = f.h.unit({f.t});
    auto viaglue = f.h.insert(ex, 1, ex);
    CHECK(close(viaglue, exy));
    // f o_y g = g o_ybar f
    Word A = f.h.word({f.t, f.t, f.t});
    auto a = f.h.random(A, rng);
    auto b = f.h.random(A, rng);
    auto ab = f.h.glue(a, 2, b, 0, 1);
    auto ba = f.h.glue(b, 0, a, 2, 1);
    CHECK(close(f.h.strip_units(ab), f.h.strip_units(f.h.rotate(ba, 2))));
    // d_y f o_a g = <f,g> e_y for y simple
    Word Fa = f.h.word({f.t, f.t, f.t});
    auto ff = f.h.random(Fa, rng);
    auto gg = f.h.random(Fa, rng);
    auto comp = f.h.glue(ff, 1, gg, 0, 2);  // H<t t>
    auto p = f.h.pair(ff, gg);
    auto lhs = f.phi * comp;
    CHECK(close(lhs, p * f.h.rotate(f.h.unit({f.t}), 0)));
}

TEST_CASE("dominance decomposition of the unit of a product") {
    Fib f;
    for (int a : {f.one, f.t})
        for (int b : {f.one, f.t}) {
            auto eab = f.h.unit({a, b});
            HomVector<Cplx> sum = f.h.zero(eab.word);
            for (int t : {f.one, f.t}) {
                Word bt = f.h.word({f.h.cat().dual(b), f.h.cat().dual(a), t});
                if (f.h.dim(bt) == 0) continue;
                // basis of H<bbar abar t> and its dual in H<tbar a b>
                const auto& db = f.h.dual_basis(bt);
                for (std::size_t i = 0; i < db.basis.size(); ++i)
                    sum += f.h.cat().d(t) * f.h.glue(db.basis[i], 2, db.dual[i], 0, 1);
            }
            CHECK(close(sum, eab));
        }
}

TEST_CASE("multiplicativity of the pairing") {
    Fib f;
    std::mt19937_64 rng(5);
    // f in H<x y>, g in H<ybar z>; f .y g in H<x z>
    Word W = f.h.word({f.t, f.t, f.t});
    auto ff = f.h.random(W, rng), gg = f.h.random(W, rng), hh = f.h.random(W, rng), kk = f.h.random(W, rng);
    auto fg = f.h.glue(ff, 2, gg, 0, 1, true);  // H<t t t t>
    auto hk = f.h.glue(hh, 2, kk, 0, 1, true);
    // pair(f .y g, h .y k) over H<t t t t>: <f.g, h.k> = <f,k><g,h>
    auto lhs = f.h.pair(fg, hk);
    auto rhs = f.h.pair(ff, kk) * f.h.pair(gg, hh);
    CHECK(close(lhs, rhs));
}

TEST_CASE("star resolution") {
    Fib f;
    std::mt19937_64 rng(3);
    // x simple: star_x(f)_x = f, other components vanish
    Word W = f.h.word({f.t, f.t, f.t, f.t});
    auto v = f.h.random(W, rng);
    auto s = f.h.star(v, 0, 3, 1);
    REQUIRE(s.count(f.t));
    CHECK(close(s.at(f.t), v));
    if (s.count(f.one)) CHECK(max_abs<Cplx>(Mat<Cplx>(s.at(f.one).c)) < kTol);
    // iterated resolution agrees with resolving the whole word at once
    Word W6 = f.h.word({f.t, f.t, f.t, f.t, f.t, f.t});
    auto u = f.h.random(W6, rng);
    auto whole = f.h.star(u, 0, 3, 3);
    std::map<int, HomVector<Cplx>> iter;
    for (auto& [s1, v1] : f.h.star(u, 1, 3, 2))  // resolves (t t) at 1 against (t t) at 3
        for (auto& [s2, v2] : f.h.star(v1, 0, 2, 2)) {
            auto it = iter.find(s2);
            if (it == iter.end()) iter.emplace(s2, v2);
            else it->second += v2;
        }
    for (auto& [t, v1] : whole) {
        REQUIRE(iter.count(t));
        CHECK(close(iter.at(t), v1));
    }
    // resolutions of disjoint pairs commute
    auto ab = f.h.star(u, 0, 5, 1);
    for (auto& [t1, v1] : ab) {
        for (auto& [t2, v2] : f.h.star(v1, 1, 4, 1)) {
            auto alt1 = f.h.star(u, 1, 4, 1);
            if (!alt1.count(t2)) continue;
            auto alt = f.h.star(alt1.at(t2), 0, 5, 1);
            CHECK(close(alt.at(t1), v2));
        }
    }
}

TEST_CASE("exact backend agrees on Vec_Z2") {
    auto z2 = load<Cyclo>("vecz2.json");
    HomCalc<Cyclo> h(z2);
    int g = z2->find("g");
    auto e = h.unit({g});
    CHECK(h.pair(e, e) == Cyclo(1));
    Word W = h.word({g, g, g, g});
    auto v = h.basis_vector(W, 0);
    CHECK(h.rotate(v, 4).c == v.c);
    CHECK(h.rotate(v, 1).c == v.c);
}
