#include "tubecalc/scalars.hpp"

#include <doctest.h>

using namespace tubecalc;

TEST_CASE("golden ratio parses in both backends") {
    auto f = parse_scalar("(1+sqrt(5))/2", Backend::Float);
    CHECK(abs(f.value().real() - Real("1.6180339887498948482045868343656381177203")) < Real("1e-39"));
    auto e = parse_scalar("(1+sqrt(5))/2", Backend::Exact);
    auto phi = e.exact();
    CHECK(phi * phi == phi + Cyclo(1));
}

TEST_CASE("exact square roots") {
    for (long m : {2L, 3L, 5L, 6L, 7L, 12L, 15L}) {
        auto r = Cyclo::sqrt_int(m);
        CHECK(r * r == Cyclo(m));
    }
    auto h = parse_scalar("sqrt(1/2)", Backend::Exact).exact();
    CHECK(h * h == Cyclo(Rational(1, 2)));
}

TEST_CASE("roots of unity") {
    auto z = Cyclo::zeta(5, 1);
    CHECK(z * z.conj() == Cyclo(1));
    Cyclo p = Cyclo(1);
    for (int k = 0; k < 5; ++k) p *= z;
    CHECK(p == Cyclo(1));
    CHECK((z + z.conj()).normalized().order() == 5);
    CHECK((Cyclo::zeta(4, 1) * Cyclo::zeta(4, 1)).normalized().order() == 1);
    CHECK(Cyclo::zeta(7, 3).inverse() * Cyclo::zeta(7, 3) == Cyclo(1));
}

TEST_CASE("printing round-trips") {
    auto x = parse_scalar("cyclo(12,1) + 2/3*sqrt(3) - cyclo(4,1)", Backend::Exact);
    auto y = parse_scalar(x.to_string(), Backend::Exact);
    CHECK(x.exact() == y.exact());
    auto f = parse_scalar("1/3 + 2*cyclo(4,1)", Backend::Float);
    CHECK(f.to_string().rfind("0.3333333333", 0) == 0);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_scalar("1/0", Backend::Exact), ParseError);
    CHECK_THROWS_AS(parse_scalar("1/0", Backend::Float), ParseError);
    CHECK_THROWS_AS(parse_scalar("cyclo(0,1)", Backend::Exact), ParseError);
    CHECK_THROWS_AS(parse_scalar("2 +", Backend::Float), ParseError);
    CHECK_THROWS_AS(parse_scalar("sqrt(1+sqrt(5))", Backend::Exact), ParseError);
}

TEST_CASE("mixed backends are rejected") {
    auto a = parse_scalar("1", Backend::Exact);
    auto b = parse_scalar("1", Backend::Float);
    CHECK_THROWS(a + b);
}

TEST_CASE("conjugation of roots of unity") {
    for (int n = 2; n <= 24; ++n)
        for (int k = 1; k < n; ++k) CHECK(Cyclo::zeta(n, k).conj() == Cyclo::zeta(n, n - k));
}

TEST_CASE("normalization is idempotent") {
    for (const char* t : {"sqrt(2)*sqrt(3)", "cyclo(8,1)+cyclo(8,7)", "(1+sqrt(5))/2", "cyclo(6,1)*cyclo(6,1)"}) {
        auto x = parse_scalar(t, Backend::Exact).exact();
        CHECK(x.normalized() == x.normalized().normalized());
        CHECK(x.normalized().order() == x.normalized().normalized().order());
    }
    CHECK(parse_scalar("sqrt(2)*sqrt(2)", Backend::Exact).exact().order() == 1);
}

TEST_CASE("field axioms on random triples") {
    std::mt19937_64 rng(7);
    TolerancePolicy pol;
    for (int k = 0; k < 1000; ++k) {
        Cplx a = Field<Cplx>::random(rng), b = Field<Cplx>::random(rng), c = Field<Cplx>::random(rng);
        CHECK(approx_eq(Scalar((a * b) * c), Scalar(a * (b * c)), pol));
        CHECK(approx_eq(Scalar(a * (b + c)), Scalar(a * b + a * c), pol));
    }
    for (int k = 0; k < 200; ++k) {
        Cyclo a = Field<Cyclo>::random(rng) * Cyclo::zeta(5, 1) + Field<Cyclo>::random(rng);
        Cyclo b = Field<Cyclo>::random(rng) + Cyclo::sqrt_int(2);
        Cyclo c = Field<Cyclo>::random(rng) * Cyclo::zeta(3, 1);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("approx_eq examples") {
    CHECK(approx_eq(parse_scalar("1", Backend::Float), parse_scalar("1", Backend::Float)));
    CHECK(approx_eq(parse_scalar("sqrt(2)*sqrt(2)", Backend::Exact), parse_scalar("2", Backend::Exact)));
    auto phi = parse_scalar("(1+sqrt(5))/2", Backend::Float);
    CHECK(approx_eq(phi * phi, phi + parse_scalar("1", Backend::Float)));
    CHECK(parse_scalar("cyclo(1,0)", Backend::Exact).exact() == Cyclo(1));
    CHECK(parse_scalar("1/2", Backend::Exact).exact() == Cyclo(Rational(1, 2)));
}
