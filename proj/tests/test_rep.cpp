#include "tubecalc/linalg.hpp"
#include "tubecalc/rep.hpp"

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

template <class T>
std::vector<int> dims_of(const std::vector<SimpleModule<T>>& s) {
    std::vector<int> out;
    for (const auto& m : s)
        for (int k = 0; k < m.multiplicity; ++k) out.push_back(m.rep.total());
    return out;
}

Cplx cis(double num, double den) {
    Real a = 2 * pi_real() * Real(num) / Real(den);
    return Cplx(cos(a), sin(a));
}
}  // namespace

TEST_CASE("regular representations") {
    auto F = build<Cplx>("fib.json");
    auto R = regular(F);
    CHECK(R.dims == std::vector<int>{3, 4});
    CHECK(module_residual(F, R) < Real("1e-40"));
    auto Z = build<Cyclo>("vecz2.json");
    auto RZ = regular(Z);
    CHECK(RZ.total() == 4);
    CHECK(module_residual(Z, RZ) == 0);
}

TEST_CASE("Wedderburn decomposition of the regular representation") {
    auto Z = build<Cyclo>("vecz2.json");
    auto sz = decompose(Z, regular(Z), 7, kPol);
    REQUIRE(sz.size() == 4);
    for (const auto& s : sz) {
        CHECK(s.rep.total() == 1);
        CHECK(s.multiplicity == 1);
    }
    CHECK(sz[0].twist == Cyclo(1));
    CHECK(sz[1].twist == Cyclo(1));
    CHECK(sz[2].twist == Cyclo(1));
    CHECK(sz[3].twist == Cyclo(-1));
    CHECK(sz[0].rep.dims == std::vector<int>{1, 0});
    CHECK(sz[1].rep.dims == std::vector<int>{1, 0});
    CHECK(sz[2].rep.dims == std::vector<int>{0, 1});

    auto F = build<Cplx>("fib.json");
    auto sf = decompose(F, regular(F), 0, kPol);
    CHECK(dims_of(sf) == std::vector<int>{1, 1, 1, 2, 2});
    REQUIRE(sf.size() == 4);
    CHECK(sf[3].multiplicity == 2);
    CHECK(abs(sf[0].twist - Cplx(1)) < Real("1e-40"));
    CHECK(abs(sf[1].twist - cis(2, 5)) < Real("1e-40"));
    CHECK(abs(sf[2].twist - cis(3, 5)) < Real("1e-40"));
    CHECK(abs(sf[3].twist - Cplx(1)) < Real("1e-40"));
    int sq = 0;
    for (const auto& s : sf) sq += s.rep.total() * s.rep.total();
    CHECK(sq == F.dim());

    auto M = build<Cyclo>("m2.json");
    auto sm = decompose(M, regular(M), 0, kPol);
    REQUIRE(sm.size() == 1);
    CHECK(sm[0].rep.total() == 2);
    CHECK(sm[0].multiplicity == 2);
}

TEST_CASE("decomposition is seed-deterministic") {
    auto F = build<Cplx>("fib.json");
    auto a = decompose(F, regular(F), 3, kPol);
    auto b = decompose(F, regular(F), 3, kPol);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].rep.action.size() == b[i].rep.action.size());
        for (std::size_t k = 0; k < a[i].rep.action.size(); ++k) CHECK(a[i].rep.action[k] == b[i].rep.action[k]);
    }
    auto c = decompose(F, regular(F), 99, kPol);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].rep.dims == c[i].rep.dims);
}

TEST_CASE("trivial representation") {
    auto Z = build<Cyclo>("vecz2.json");
    auto I = trivial(Z);
    CHECK(I.total() == 1);
    CHECK(module_residual(Z, I) == 0);
    auto sz = decompose(Z, regular(Z), 7, kPol);
    CHECK(hom(sz[0].rep, I, kPol).size() == 1);
    CHECK(hom(sz[1].rep, I, kPol).empty());

    auto F = build<Cplx>("fib.json");
    auto IF = trivial(F);
    CHECK(module_residual(F, IF) < Real("1e-40"));
    auto sf = decompose(F, regular(F), 0, kPol);
    CHECK(hom(sf[0].rep, IF, kPol).size() == 1);
    for (std::size_t i = 1; i < sf.size(); ++i) CHECK(hom(sf[i].rep, IF, kPol).empty());

    auto M = build<Cyclo>("m2.json");
    CHECK(module_residual(M, trivial(M)) == 0);
    CHECK(trivial(M).total() == 2);
}

TEST_CASE("intertwiner spaces") {
    auto Z = build<Cyclo>("vecz2.json");
    auto sz = decompose(Z, regular(Z), 7, kPol);
    for (std::size_t i = 0; i < sz.size(); ++i)
        for (std::size_t j = 0; j < sz.size(); ++j) CHECK(hom(sz[i].rep, sz[j].rep, kPol).size() == (i == j ? 1u : 0u));
    auto F = build<Cplx>("fib.json");
    auto R = regular(F);
    for (const auto& s : decompose(F, R, 0, kPol)) CHECK(static_cast<int>(hom(R, s.rep, kPol).size()) == s.rep.total());
}

TEST_CASE("dual representations") {
    auto F = build<Cplx>("fib.json");
    for (const auto& s : decompose(F, regular(F), 0, kPol)) {
        auto d = dual(F, s.rep);
        CHECK(module_residual(F, d) < Real("1e-40"));
        CHECK(d.dims == s.rep.dims);
    }
    auto M = build<Cyclo>("m2.json");
    auto I = trivial(M);
    auto dI = dual(M, I);
    CHECK(module_residual(M, dI) == 0);
    CHECK(hom(I, dI, kPol).size() == 1);
}
