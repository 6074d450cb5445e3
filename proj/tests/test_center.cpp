#include "tubecalc/center.hpp"
#include "tubecalc/linalg.hpp"

#include <doctest.h>

using namespace tubecalc;

namespace {
std::string fixture(const char* name) { return std::string(TUBECALC_FIXTURES) + "/" + name; }
const TolerancePolicy kPol{1e-20, 1e-20};
const Real kTight("1e-60");

template <class T>
struct Setup {
    CenterFixtureDocument doc;
    std::shared_ptr<const Category<T>> cat;
    std::unique_ptr<TubeAlgebra<T>> A;
    std::unique_ptr<Monoidal<T>> mon;
    std::vector<SimpleModule<T>> simples;

    explicit Setup(const char* name) {
        const Backend be = Field<T>::exact ? Backend::Exact : Backend::Float;
        doc = load_center_fixture(fixture(name), be);
        cat = std::make_shared<const Category<T>>(load_spec_file(doc.spec_path, be));
        A = std::make_unique<TubeAlgebra<T>>(std::make_shared<const HomCalc<T>>(cat));
        mon = std::make_unique<Monoidal<T>>(*A);
        simples = decompose(*A, regular(*A), 0, kPol);
    }
};

HalfBraidingDocument sign_sum(const std::string& s1, const std::string& s2) {
    HalfBraidingDocument d;
    d.name = "1+g";
    d.object = {{"1", 1}, {"g", 1}};
    // channel 1 comes from g g, channel g from g 1
    d.sigma = {{"g", {parse_scalar(s1, Backend::Exact), parse_scalar("0", Backend::Exact),
                      parse_scalar("0", Backend::Exact), parse_scalar(s2, Backend::Exact)}}};
    return d;
}
}  // namespace

TEST_CASE("fixture parsing") {
    auto doc = load_center_fixture(fixture("center_vecz2.json"), Backend::Exact);
    CHECK(doc.objects.size() == 4);
    CHECK(doc.complete);
    CHECK(doc.spec_path.ends_with("vecz2.json"));
    CHECK_THROWS_AS(parse_center_fixture("{\"objects\": []}", Backend::Exact), SpecError);
    CHECK_THROWS_AS(parse_center_fixture("{\"spec\": \"x\", \"objects\": [{\"object\": {\"g\": -1}}]}", Backend::Exact),
                    SpecError);
    Setup<Cyclo> s("center_vecz2.json");
    auto bad = doc.objects[3];
    bad.sigma[0].second.push_back(parse_scalar("1", Backend::Exact));
    CHECK_THROWS_AS(make_halfbraiding(*s.cat, bad, kPol), SpecError);
    bad.sigma.clear();
    CHECK_THROWS_AS(make_halfbraiding(*s.cat, bad, kPol), SpecError);
}

TEST_CASE("toric code half-braidings biject onto the simples") {
    Setup<Cyclo> s("center_vecz2.json");
    auto r = compare(*s.mon, s.simples, s.doc, kPol, Real(0));
    CHECK(r.ok());
    CHECK(r.bijection);
    REQUIRE(r.objects.size() == 4);
    // the sign data reproduces the canonical order: unit, charge, flux, fermion
    for (int i = 0; i < 4; ++i) {
        CHECK(r.objects[i].module_residual == Real(0));
        CHECK(r.objects[i].match == i);
    }
    CHECK(r.pairs.size() == 16);
    for (const auto& p : r.pairs) {
        CHECK(p.invertible);
        CHECK(p.intertwining == Real(0));
        CHECK(p.square == Real(0));
    }
}

TEST_CASE("toric code half-braidings on the float backend") {
    Setup<Cplx> s("center_vecz2.json");
    auto r = compare(*s.mon, s.simples, s.doc, kPol, kTight);
    CHECK(r.ok());
    CHECK(r.bijection);
}

TEST_CASE("sums of sign objects split into simples") {
    Setup<Cyclo> s("center_vecz2.json");
    std::set<int> seen;
    for (auto [s1, s2] : {std::pair{"1", "1"}, std::pair{"1", "-1"}, std::pair{"-1", "1"}, std::pair{"-1", "-1"}}) {
        auto hb = make_halfbraiding(*s.cat, sign_sum(s1, s2), kPol);
        auto E = from_halfbraiding(*s.A, std::vector<const HalfBraiding<Cyclo>*>{&hb});
        CHECK(module_residual(*s.A, E.rep) == Real(0));
        auto m = multiplicities(s.simples, E.rep, kPol);
        int total = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            total += m[i];
            if (m[i]) seen.insert(static_cast<int>(i));
        }
        CHECK(total == 2);
    }
    CHECK(seen.size() == 4);
}

TEST_CASE("E is monoidal on the fermion squared") {
    Setup<Cyclo> s("center_vecz2.json");
    auto f = make_halfbraiding(*s.cat, s.doc.objects[3], kPol);
    auto one = make_halfbraiding(*s.cat, s.doc.objects[0], kPol);
    auto Ef = from_halfbraiding(*s.A, std::vector<const HalfBraiding<Cyclo>*>{&f});
    auto Eff = from_halfbraiding(*s.A, std::vector<const HalfBraiding<Cyclo>*>{&f, &f});
    auto E1 = from_halfbraiding(*s.A, std::vector<const HalfBraiding<Cyclo>*>{&one});
    CHECK(module_residual(*s.A, Eff.rep) == Real(0));
    CHECK(hom(Eff.rep, E1.rep, kPol).size() == 1);
    auto p = s.mon->tensor(Ef.rep, Ef.rep);
    auto P = psi(*s.mon, p, Ef, Ef, Eff);
    CHECK(rank(P, kPol) == Eff.rep.total());
    CHECK(P.rows() == P.cols());
}

TEST_CASE("Fibonacci unit object") {
    Setup<Cplx> s("center_fib.json");
    auto r = compare(*s.mon, s.simples, s.doc, kPol, kTight);
    CHECK(r.ok());
    REQUIRE(r.objects.size() == 1);
    auto I = trivial(*s.A);
    CHECK(r.objects[0].match >= 0);
    CHECK(hom(I, s.simples[r.objects[0].match].rep, kPol).size() == 1);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].ok);
    // Psi for unit objects is the unitor composite up to the identification
    auto one = make_halfbraiding(*s.cat, s.doc.objects[0], kPol);
    auto E = from_halfbraiding(*s.A, std::vector<const HalfBraiding<Cplx>*>{&one});
    CHECK(hom(E.rep, I, kPol).size() == 1);
}

TEST_CASE("a corrupted half-braiding breaks the module law") {
    Setup<Cyclo> s("center_vecz2_bad.json");
    auto r = compare(*s.mon, s.simples, s.doc, kPol, Real(0));
    CHECK_FALSE(r.ok());
    REQUIRE(r.objects.size() == 1);
    CHECK_FALSE(r.objects[0].module_ok);
    CHECK(r.objects[0].module_residual > Real("0.1"));
}
