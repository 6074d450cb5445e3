#ifndef TUBECALC_CENTER_HPP
#define TUBECALC_CENTER_HPP

#include "tubecalc/monoidal.hpp"

namespace tubecalc {

// Half-braiding data as read from a file. sigma matrices are row-major.
struct HalfBraidingDocument {
    std::string name;
    std::map<std::string, int> object;  // simple name -> multiplicity
    std::vector<std::pair<std::string, std::vector<Scalar>>> sigma;
};

struct CenterFixtureDocument {
    std::string spec_path;  // resolved against the fixture's directory
    std::vector<HalfBraidingDocument> objects;
    std::vector<std::pair<std::string, std::string>> pairs;  // empty means all pairs
    bool complete = false;                                   // objects should biject onto the simples
    bool negative = false;                                   // deliberately corrupted; expected to fail
};

CenterFixtureDocument parse_center_fixture(const std::string& json_text, Backend backend);
CenterFixtureDocument load_center_fixture(const std::string& path, Backend backend);

/// One vertex of x (x) X or X (x) x: channel e, simple a of X, copy v, vertex mu.
struct SigmaIndex {
    int e, a, v, mu;
    friend auto operator<=>(const SigmaIndex&, const SigmaIndex&) = default;
};

// Object X = sum_a V_a (x) a with sigma_x : x X -> X x for every simple x.
// Columns of sigma_x enumerate the vertices of x (x) X, rows those of X (x) x,
// both ordered by (e, a, v, mu); sigma o col = sum_row sigma(row, col) row.
template <class T>
struct HalfBraiding {
    std::string name;
    std::vector<int> mult;
    std::map<int, Mat<T>> sigma, sigma_inv;
    std::map<int, std::map<SigmaIndex, int>> cols, rows;
};

template <class T>
HalfBraiding<T> make_halfbraiding(const Category<T>& cat, const HalfBraidingDocument& doc,
                                  const TolerancePolicy& pol);

/// E of a tensor product of center objects, listed left to right.
template <class T>
struct CenterRep {
    struct Index {
        int c;
        std::vector<int> labels, copies;
        int k;
    };
    std::vector<const HalfBraiding<T>*> factors;
    Representation<T> rep;
    std::vector<Index> index;
    std::map<std::tuple<int, std::vector<int>, std::vector<int>, int>, int> lookup;

    int row(int c, const std::vector<int>& labels, const std::vector<int>& copies, int k) const;
};

template <class T>
CenterRep<T> from_halfbraiding(const TubeAlgebra<T>& A, const std::vector<const HalfBraiding<T>*>& factors);

/// E(X (x) Y) -> E(Y (x) X) through the inverse half-braiding of X, for single-factor X and Y.
template <class T>
Mat<T> center_braiding(const TubeAlgebra<T>& A, const CenterRep<T>& xy, const CenterRep<T>& yx);

/// E(X) box E(Y) -> E(X (x) Y).
template <class T>
Mat<T> psi(const Monoidal<T>& mon, const Product<T>& p, const CenterRep<T>& x, const CenterRep<T>& y,
           const CenterRep<T>& xy);

struct CenterObjectReport {
    std::string name;
    Real module_residual;
    bool module_ok = false;
    std::vector<int> multiplicities;  // against the decomposed simples
    int match = -1;                   // simple index when E(X) is simple
};

struct CenterPairReport {
    std::string x, y;
    Real intertwining, square;
    bool invertible = false;
    bool evaluated = false;  // false when either factor already fails the module law
    bool ok = false;
};

struct CenterReport {
    std::vector<CenterObjectReport> objects;
    std::vector<CenterPairReport> pairs;
    bool complete = false;
    bool bijection = false;
    bool ok() const;
};

template <class T>
CenterReport compare(const Monoidal<T>& mon, const std::vector<SimpleModule<T>>& simples,
                     const CenterFixtureDocument& fixture, const TolerancePolicy& pol, const Real& tol);

#define TUBECALC_CENTER_EXTERN(T)                                                                            \
    extern template struct CenterRep<T>;                                                                     \
    extern template HalfBraiding<T> make_halfbraiding(const Category<T>&, const HalfBraidingDocument&,       \
                                                      const TolerancePolicy&);                               \
    extern template CenterRep<T> from_halfbraiding(const TubeAlgebra<T>&,                                    \
                                                   const std::vector<const HalfBraiding<T>*>&);              \
    extern template Mat<T> center_braiding(const TubeAlgebra<T>&, const CenterRep<T>&, const CenterRep<T>&); \
    extern template Mat<T> psi(const Monoidal<T>&, const Product<T>&, const CenterRep<T>&,                   \
                               const CenterRep<T>&, const CenterRep<T>&);                                    \
    extern template CenterReport compare(const Monoidal<T>&, const std::vector<SimpleModule<T>>&,            \
                                         const CenterFixtureDocument&, const TolerancePolicy&, const Real&);

TUBECALC_CENTER_EXTERN(Cplx)
TUBECALC_CENTER_EXTERN(Cyclo)
#undef TUBECALC_CENTER_EXTERN

}  // namespace tubecalc

#endif
