#ifndef TUBECALC_REP_HPP
#define TUBECALC_REP_HPP

#include "tubecalc/tube.hpp"

#include <cstdint>

namespace tubecalc {

struct DecompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Right representation of a tube algebra. The underlying space is the direct
// sum of the graded pieces M_a in grade order; action[i] is the full matrix of
// the i-th tube basis element, nonzero only on the block M_a -> M_b.
// Matrices compose as A(f.g) = A(g) A(f).
template <class T>
struct Representation {
    std::vector<int> dims;
    std::vector<Mat<T>> action;

    int total() const;
    int offset(int g) const;
    std::vector<int> grade_of_row() const;
};

template <class T>
Mat<T> act(const Representation<T>& m, const Vec<T>& f);

template <class T>
Representation<T> regular(const TubeAlgebra<T>& A);
template <class T>
Representation<T> trivial(const TubeAlgebra<T>& A);
template <class T>
Representation<T> dual(const TubeAlgebra<T>& A, const Representation<T>& m);
template <class T>
Representation<T> direct_sum(const std::vector<Representation<T>>& parts);

/// Largest deviation from the module law and from locality.
template <class T>
Real module_residual(const TubeAlgebra<T>& A, const Representation<T>& m);

/// Basis of grade-preserving X: M -> N with X A^M(f) = A^N(f) X.
template <class T>
std::vector<Mat<T>> hom(const Representation<T>& m, const Representation<T>& n, const TolerancePolicy& pol);

/// Restriction to an invariant graded subspace spanned by the columns of q;
/// cols_per_grade gives how many columns of q lie in each grade.
template <class T>
Representation<T> restrict_to(const Representation<T>& m, const Mat<T>& q, const std::vector<int>& cols_per_grade,
                              const TolerancePolicy& pol);

template <class T>
struct SimpleModule {
    Representation<T> rep;
    int multiplicity = 1;
    T twist;
};

/// Scalar by which the twist acts on a simple module.
template <class T>
T twist_scalar(const TubeAlgebra<T>& A, const Representation<T>& m, const TolerancePolicy& pol);

// Splits a semisimple module into simple summands, grouped by isomorphism and
// sorted canonically: total dimension, twist argument in [0, 2pi), grade
// vector (larger first), then characters (larger first).
template <class T>
std::vector<SimpleModule<T>> decompose(const TubeAlgebra<T>& A, const Representation<T>& m, std::uint64_t seed,
                                       const TolerancePolicy& pol);

template <class T>
std::vector<int> multiplicities(const std::vector<SimpleModule<T>>& simples, const Representation<T>& m,
                                const TolerancePolicy& pol);

template <class T>
Vec<T> characters(const Representation<T>& m);

#define TUBECALC_REP_EXTERN(T)                                                                                 \
    extern template struct Representation<T>;                                                                  \
    extern template Mat<T> act(const Representation<T>&, const Vec<T>&);                                       \
    extern template Representation<T> regular(const TubeAlgebra<T>&);                                          \
    extern template Representation<T> trivial(const TubeAlgebra<T>&);                                          \
    extern template Representation<T> dual(const TubeAlgebra<T>&, const Representation<T>&);                  \
    extern template Representation<T> direct_sum(const std::vector<Representation<T>>&);                       \
    extern template Real module_residual(const TubeAlgebra<T>&, const Representation<T>&);                     \
    extern template std::vector<Mat<T>> hom(const Representation<T>&, const Representation<T>&,                \
                                            const TolerancePolicy&);                                           \
    extern template Representation<T> restrict_to(const Representation<T>&, const Mat<T>&,                    \
                                                  const std::vector<int>&, const TolerancePolicy&);            \
    extern template T twist_scalar(const TubeAlgebra<T>&, const Representation<T>&, const TolerancePolicy&);   \
    extern template std::vector<SimpleModule<T>> decompose(const TubeAlgebra<T>&, const Representation<T>&,    \
                                                           std::uint64_t, const TolerancePolicy&);             \
    extern template std::vector<int> multiplicities(const std::vector<SimpleModule<T>>&,                       \
                                                    const Representation<T>&, const TolerancePolicy&);         \
    extern template Vec<T> characters(const Representation<T>&);

TUBECALC_REP_EXTERN(Cplx)
TUBECALC_REP_EXTERN(Cyclo)
#undef TUBECALC_REP_EXTERN

}  // namespace tubecalc

#endif
