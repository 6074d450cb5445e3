#ifndef TUBECALC_PROPERTIES_HPP
#define TUBECALC_PROPERTIES_HPP

#include "tubecalc/center.hpp"

#include <cstdint>

namespace tubecalc {

/// Outcome of one randomized or exhaustive identity check.
struct PropertyResult {
    std::string suite, name;
    Real residual;
    long samples = 0;
    bool pass = false;
};

struct PropertyOptions {
    Real tol = Real("1e-15");
    std::uint64_t seed = 0;
    int draws = 100;   // random draws per identity
    int vectors = 20;  // random product vectors per monoidal identity
    TolerancePolicy pol{1e-20, 1e-20};
};

std::vector<PropertyResult> scalar_properties(const PropertyOptions& opt);

template <class T>
std::vector<PropertyResult> category_properties(const Category<T>& cat, const PropertyOptions& opt);

template <class T>
std::vector<PropertyResult> homspace_properties(const HomCalc<T>& h, const PropertyOptions& opt);

template <class T>
std::vector<PropertyResult> tube_properties(const TubeAlgebra<T>& A, const PropertyOptions& opt);

/// Also hands back the decomposition of the regular representation.
template <class T>
std::vector<PropertyResult> rep_properties(const TubeAlgebra<T>& A, const PropertyOptions& opt,
                                           std::vector<SimpleModule<T>>* simples = nullptr);

template <class T>
std::vector<PropertyResult> monoidal_properties(const Monoidal<T>& mon, const std::vector<SimpleModule<T>>& simples,
                                                const PropertyOptions& opt);

template <class T>
std::vector<PropertyResult> center_properties(const Monoidal<T>& mon, const std::vector<SimpleModule<T>>& simples,
                                              const CenterFixtureDocument& fixture, const PropertyOptions& opt);

// Difference of the two sides of each coherence diagram, as a map on the
// source product. Zero exactly when the diagram commutes.
template <class T>
Mat<T> pentagon_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N,
                    const Representation<T>& L, const Representation<T>& K);
template <class T>
Mat<T> triangle_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N);
/// Both hexagons stacked; the second is taken through inverse associators.
template <class T>
Mat<T> hexagon_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N,
                   const Representation<T>& L, const TolerancePolicy& pol);
template <class T>
Mat<T> ribbon_gap(const Monoidal<T>& mon, const Representation<T>& M, const Representation<T>& N);

#define TUBECALC_PROPERTIES_EXTERN(T)                                                                           \
    extern template std::vector<PropertyResult> category_properties(const Category<T>&, const PropertyOptions&); \
    extern template std::vector<PropertyResult> homspace_properties(const HomCalc<T>&, const PropertyOptions&);  \
    extern template std::vector<PropertyResult> tube_properties(const TubeAlgebra<T>&, const PropertyOptions&);  \
    extern template std::vector<PropertyResult> rep_properties(const TubeAlgebra<T>&, const PropertyOptions&,    \
                                                               std::vector<SimpleModule<T>>*);                   \
    extern template std::vector<PropertyResult> monoidal_properties(                                           \
        const Monoidal<T>&, const std::vector<SimpleModule<T>>&, const PropertyOptions&);                        \
    extern template std::vector<PropertyResult> center_properties(                                             \
        const Monoidal<T>&, const std::vector<SimpleModule<T>>&, const CenterFixtureDocument&,                   \
        const PropertyOptions&);                                                                                 \
    extern template Mat<T> pentagon_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&, \
                                        const Representation<T>&, const Representation<T>&);                    \
    extern template Mat<T> triangle_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&); \
    extern template Mat<T> hexagon_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&,  \
                                       const Representation<T>&, const TolerancePolicy&);                       \
    extern template Mat<T> ribbon_gap(const Monoidal<T>&, const Representation<T>&, const Representation<T>&);

TUBECALC_PROPERTIES_EXTERN(Cplx)
TUBECALC_PROPERTIES_EXTERN(Cyclo)
#undef TUBECALC_PROPERTIES_EXTERN

}  // namespace tubecalc

#endif
