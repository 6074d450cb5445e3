#include "tubecalc/linalg.hpp"
#include "tubecalc/tube.hpp"

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

const Real kTol("1e-40");

template <class T>
bool close(const Vec<T>& a, const Vec<T>& b) {
    if constexpr (Field<T>::exact) return a == b;
    else return max_abs<T>(Mat<T>(a - b)) < kTol;
}

template <class T>
bool close(const T& a, const T& b) {
    if constexpr (Field<T>::exact) return a == b;
    else return abs(a - b) < kTol;
}

template <class T>
Vec<T> random_in(const TubeAlgebra<T>& A, int a, int b, std::mt19937_64& rng) {
    Vec<T> f = A.zero();
    for (int i = 0; i < A.dim(); ++i)
        if (A.basis()[i].a == a && A.basis()[i].b == b) f(i) = Field<T>::random(rng);
    return f;
}

template <class T>
Vec<T> basis_elt(const TubeAlgebra<T>& A, int i) {
    Vec<T> f = A.zero();
    f(i) = Field<T>::one();
    return f;
}
}  // namespace

TEST_CASE("tube algebra dimensions") {
    CHECK(build<Cyclo>("vecz2.json").dim() == 4);
    CHECK(build<Cplx>("fib.json").dim() == 7);
    CHECK(build<Cyclo>("m2.json").dim() == 4);
}

TEST_CASE("Vec_Z2 welding is the group law on the around label") {
    auto A = build<Cyclo>("vecz2.json");
    const auto& c = A.cat();
    int e = c.find("1"), g = c.find("g");
    auto [i, n] = A.block(g, g, g);
    REQUIRE(n == 1);
    auto [j, m] = A.block(g, g, e);
    REQUIRE(m == 1);
    CHECK(A.product(i, i) == basis_elt(A, j));
    CHECK(A.twist(e) == A.unit(e));
    CHECK(A.twist(g) == basis_elt(A, i));
}

template <class T>
void check_axioms(const TubeAlgebra<T>& A) {
    const int n = A.dim();
    // associativity on all basis triples
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (A.basis()[i].b != A.basis()[j].a) continue;
            for (int k = 0; k < n; ++k) {
                if (A.basis()[j].b != A.basis()[k].a) continue;
                auto l = A.weld(A.product(i, j), basis_elt(A, k));
                auto r = A.weld(basis_elt(A, i), A.product(j, k));
                CHECK(close<T>(l, r));
            }
        }
    // units
    Vec<T> e = A.local_unit(A.grades());
    for (int i = 0; i < n; ++i) {
        auto f = basis_elt(A, i);
        CHECK(close<T>(A.weld(e, f), f));
        CHECK(close<T>(A.weld(f, e), f));
        CHECK(close<T>(A.weld(A.unit(A.basis()[i].a), f), f));
        CHECK(close<T>(A.weld(f, A.unit(A.basis()[i].b)), f));
        CHECK(close<T>(A.sharp(A.sharp(f)), f));
    }
    std::mt19937_64 rng(17);
    const auto& c = A.cat();
    for (int a : A.grades()) {
        CHECK(close<T>(A.epsilon(A.unit(a)), c.d(a)));
        CHECK(close<T>(A.sharp(A.unit(a)), A.unit(c.dual(a))));
        CHECK(close<T>(A.weld(A.twist(a), A.twist_inverse(a)), A.unit(a)));
        CHECK(close<T>(A.weld(A.twist_inverse(a), A.twist(a)), A.unit(a)));
        for (int b : A.grades()) {
            auto f = random_in(A, a, b, rng);
            CHECK(close<T>(A.weld(A.twist(a), f), A.weld(f, A.twist(b))));
            for (int d : A.grades()) {
                auto g = random_in(A, b, d, rng);
                CHECK(close<T>(A.sharp(A.weld(f, g)), A.weld(A.sharp(g), A.sharp(f))));
                auto h = random_in(A, d, a, rng);
                CHECK(close<T>(A.epsilon(A.weld(A.weld(f, g), h)), A.epsilon(A.weld(h, A.weld(f, g)))));
            }
        }
    }
    // x != 1 basis elements have vanishing epsilon
    for (int i = 0; i < n; ++i)
        if (!c.is_unit(A.basis()[i].x)) CHECK(close<T>(A.epsilon(basis_elt(A, i)), Field<T>::zero()));
    // the epsilon form is nondegenerate
    Mat<T> G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = A.epsilon(A.product(i, j));
    CHECK(rank<T>(G, A.hom().policy()) == n);
}

TEST_CASE("tube algebra axioms: Fibonacci") { check_axioms(build<Cplx>("fib.json")); }
TEST_CASE("tube algebra axioms: Vec_Z2 exact") { check_axioms(build<Cyclo>("vecz2.json")); }
TEST_CASE("tube algebra axioms: M2 exact") { check_axioms(build<Cyclo>("m2.json")); }
TEST_CASE("tube algebra axioms: Vec_Z2 float") { check_axioms(build<Cplx>("vecz2.json")); }
