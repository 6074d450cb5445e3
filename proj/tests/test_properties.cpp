#include "tubecalc/properties.hpp"

#include <doctest.h>

#include <iostream>

using namespace tubecalc;

namespace {
std::string fixture(const char* name) { return std::string(TUBECALC_FIXTURES) + "/" + name; }

void expect_all(const std::vector<PropertyResult>& rs) {
    for (const auto& r : rs) {
        INFO(r.suite << ": " << r.name << " residual " << format_real(r.residual) << " samples " << r.samples);
        CHECK(r.pass);
    }
}

template <class T>
void run_all(const char* name) {
    PropertyOptions opt;
    auto cat = std::make_shared<const Category<T>>(
        load_spec_file(fixture(name), Field<T>::exact ? Backend::Exact : Backend::Float));
    auto h = std::make_shared<const HomCalc<T>>(cat);
    TubeAlgebra<T> A(h);
    expect_all(category_properties(*cat, opt));
    expect_all(homspace_properties(*h, opt));
    expect_all(tube_properties(A, opt));
    std::vector<SimpleModule<T>> simples;
    expect_all(rep_properties(A, opt, &simples));
    Monoidal<T> mon(A);
    expect_all(monoidal_properties(mon, simples, opt));
}
}  // namespace

TEST_CASE("scalar suite") { expect_all(scalar_properties(PropertyOptions{})); }
TEST_CASE("all suites: Fibonacci") { run_all<Cplx>("fib.json"); }
TEST_CASE("all suites: Vec_Z2 exact") { run_all<Cyclo>("vecz2.json"); }
TEST_CASE("all suites: Vec_Z2 float") { run_all<Cplx>("vecz2.json"); }
TEST_CASE("all suites: M2 exact") { run_all<Cyclo>("m2.json"); }
