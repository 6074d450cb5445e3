#include "tubecalc/category.hpp"

#include <doctest.h>

using namespace tubecalc;

namespace {
std::string fixture(const char* name) { return std::string(TUBECALC_FIXTURES) + "/" + name; }

const TolerancePolicy kPol{1e-20, 1e-20};
}  // namespace

TEST_CASE("Vec_Z2 loads in both backends and validates exactly") {
    Category<Cyclo> ex(load_spec_file(fixture("vecz2.json"), Backend::Exact));
    CHECK(ex.size() == 2);
    CHECK(ex.zero_cells() == 1);
    int g = ex.find("g");
    CHECK(ex.d(g) == Cyclo(1));
    CHECK(ex.unit(0) == ex.find("1"));
    auto rep = validate(ex, kPol);
    for (const auto& c : rep.checks) {
        INFO(c.name);
        CHECK(c.residual == 0);
    }
    Category<Cplx> fl(load_spec_file(fixture("vecz2.json"), Backend::Float));
    CHECK(validate(fl, kPol).ok());
}

TEST_CASE("Fibonacci validates in the float backend") {
    Category<Cplx> c(load_spec_file(fixture("fib.json"), Backend::Float));
    int t = c.find("t");
    Real phi = (1 + sqrt(Real(5))) / 2;
    CHECK(abs(c.d(t) - Cplx(phi)) < Real("1e-70"));
    const auto* blk = c.F(t, t, t, t);
    REQUIRE(blk);
    CHECK(blk->m.rows() == 2);
    auto rep = validate(c, kPol);
    for (const auto& ch : rep.checks) {
        INFO(ch.name, " residual ", ch.residual.str(5));
        CHECK(ch.pass);
    }
    CHECK(abs(global_dimension(c, 0) - Cplx(2 + phi)) < Real("1e-60"));
}

TEST_CASE("Fibonacci pentagon detects a sign flip") {
    auto doc = load_spec_file(fixture("fib.json"), Backend::Float);
    for (auto& f : doc.F)
        if (f.d == "t" && f.e == "1" && f.f == "t") f.value = parse_scalar("-1/sqrt((1+sqrt(5))/2)", Backend::Float);
    Category<Cplx> c(doc);
    auto rep = validate(c, kPol);
    CHECK_FALSE(rep.ok());
    CHECK(rep.residual("pentagon") > Real("0.1"));
}

TEST_CASE("Fibonacci cannot be loaded exactly") {
    CHECK_THROWS_AS(load_spec_file(fixture("fib.json"), Backend::Exact), SpecError);
}

TEST_CASE("M2 multifusion fixture") {
    Category<Cyclo> c(load_spec_file(fixture("m2.json"), Backend::Exact));
    CHECK(c.zero_cells() == 2);
    CHECK(c.size() == 4);
    CHECK(c.unit(1) == c.find("x22"));
    CHECK(c.dual(c.find("x12")) == c.find("x21"));
    CHECK(validate(c, kPol).ok());
    CHECK(global_dimension(c, 0) == global_dimension(c, 1));
}

TEST_CASE("hom dimensions") {
    Category<Cplx> fib(load_spec_file(fixture("fib.json"), Backend::Float));
    int t = fib.find("t");
    CHECK(hom_dimension(fib, 0, {}) == 1);
    CHECK(hom_dimension(fib, 0, {t, t, t, t}) == 2);
    Category<Cplx> z2(load_spec_file(fixture("vecz2.json"), Backend::Float));
    int g = z2.find("g");
    CHECK(hom_dimension(z2, 0, {g, g, g}) == 0);
}

TEST_CASE("loader errors") {
    const std::string base = R"({"zero_cells":1,"simples":[{"name":"1","source":0,"target":0,"dual":"1","qdim":"1","sqrt_qdim":"1"}],)";
    CHECK_NOTHROW(Category<Cplx>(parse_spec_document(base + R"("fusion":[{"a":"1","b":"1","c":"1"}]})", Backend::Float)));
    CHECK_THROWS_AS(Category<Cplx>(parse_spec_document(base + R"("fusion":[{"a":"1","b":"x","c":"1"}]})", Backend::Float)),
                    SpecError);
    CHECK_THROWS_AS(parse_spec_document("{", Backend::Float), SpecError);
    CHECK_THROWS_AS(parse_spec_document(R"({"zero_cells":1})", Backend::Float), SpecError);
    // a non-identity unit block is rejected
    CHECK_THROWS_AS(Category<Cplx>(parse_spec_document(
                        base + R"("fusion":[{"a":"1","b":"1","c":"1"}],"F":[{"a":"1","b":"1","c":"1","d":"1","e":"1","f":"1","value":"2"}]})",
                        Backend::Float)),
                    SpecError);
    // a singular block is rejected
    auto doc = load_spec_file(fixture("vecz2.json"), Backend::Float);
    doc.F[0].value = parse_scalar("0", Backend::Float);
    CHECK_THROWS_AS(Category<Cplx>{doc}, SpecError);
}
