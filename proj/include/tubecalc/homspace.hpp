#ifndef TUBECALC_HOMSPACE_HPP
#define TUBECALC_HOMSPACE_HPP

#include "tubecalc/category.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace tubecalc {

/// Cyclic boundary word x1...xn read from the 0-cell `anchor`.
struct Word {
    int anchor = 0;
    std::vector<int> labels;
    int size() const { return static_cast<int>(labels.size()); }
    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;
};

// Left-nested fusion tree: t[0] = t[n] = unit of the anchor and
// t[k+1] appears in t[k] (x) x_k through vertex mu[k].
struct Tree {
    std::vector<int> t;
    std::vector<int> mu;
    std::vector<int> key() const;
};

struct HomBasis {
    Word word;
    std::vector<Tree> trees;
    std::map<std::vector<int>, int> index;
    int size() const { return static_cast<int>(trees.size()); }
    int find(const Tree& tr) const;
};

template <class T>
struct HomVector {
    Word word;
    Vec<T> c;

    HomVector& operator+=(const HomVector& o);
    HomVector& operator-=(const HomVector& o);
    HomVector& operator*=(const T& s) {
        c *= s;
        return *this;
    }
    friend HomVector operator+(HomVector a, const HomVector& b) { return a += b; }
    friend HomVector operator-(HomVector a, const HomVector& b) { return a -= b; }
    friend HomVector operator*(const T& s, HomVector a) { return a *= s; }
};

template <class T>
struct DualBasis {
    Word word, dual_word;
    std::vector<HomVector<T>> basis, dual;  // pair(dual[i], basis[j]) = delta_ij
};

/// Hom-space calculus on top of a category presentation. Linear maps are
/// memoized per word; the caches are guarded so one instance can be shared.
template <class T>
class HomCalc {
public:
    explicit HomCalc(std::shared_ptr<const Category<T>> cat, TolerancePolicy pol = {});

    const Category<T>& cat() const { return *cat_; }
    std::shared_ptr<const Category<T>> cat_ptr() const { return cat_; }
    const TolerancePolicy& policy() const { return pol_; }

    Word word(const std::vector<int>& labels) const;
    Word word(int anchor, const std::vector<int>& labels) const;
    Word dual_word(const Word& w) const;
    std::string describe(const Word& w) const;

    const HomBasis& basis(const Word& w) const;
    int dim(const Word& w) const { return basis(w).size(); }

    HomVector<T> zero(const Word& w) const;
    HomVector<T> basis_vector(const Word& w, int i) const;
    HomVector<T> random(const Word& w, std::mt19937_64& rng) const;

    /// Cup on the pair (y, dual y): an element of H<y ybar>.
    HomVector<T> cup(int y) const;
    /// e_X in H<Xbar X> for a simple or composite X.
    HomVector<T> unit(const std::vector<int>& x) const;
    /// Generator of H<> at a 0-cell.
    HomVector<T> one(int cell) const;

    HomVector<T> concat(const HomVector<T>& u, const HomVector<T>& v) const;
    /// Places u between letters k-1 and k of v.
    HomVector<T> insert(const HomVector<T>& v, int k, const HomVector<T>& u) const;
    /// Caps the dual pair at letters k, k+1.
    HomVector<T> contract(const HomVector<T>& v, int k) const;
    /// H<y X> -> H<X y>, applied `times` times.
    HomVector<T> rotate(const HomVector<T>& v, int times = 1) const;
    /// Removes unit letters; coefficients are unchanged.
    HomVector<T> strip_units(const HomVector<T>& v) const;
    /// Reinterprets v on a word that differs only by unit letters.
    HomVector<T> reword(const HomVector<T>& v, const Word& w) const;

    // Glues the m letters of f starting at fpos to the m letters of g starting
    // at gpos (which must be their reversed duals). The result lives on
    // f[:fpos] g[gpos+m:] g[:gpos] f[fpos+m:]. The scaled form multiplies by the
    // square root of the product of the glued dimensions.
    HomVector<T> glue(const HomVector<T>& f, int fpos, const HomVector<T>& g, int gpos, int m,
                      bool scaled = false) const;

    /// Spherical pairing of u on the reversed dual word of v with v.
    T pair(const HomVector<T>& u, const HomVector<T>& v) const;
    /// Value of a vector on a word made only of unit letters.
    T scalar(const HomVector<T>& v) const;
    /// Partial trace over the dual pair at letters k, k+1.
    HomVector<T> ptrace(const HomVector<T>& v, int k) const { return contract(v, k); }
    T trace(const HomVector<T>& v) const;

    const DualBasis<T>& dual_basis(const Word& w) const;

    // Resolves the m letters X at p against their reversed duals at q. Returns
    // the component for each simple t, living on the word with X -> t and
    // Xbar -> tbar; zero components are omitted.
    std::map<int, HomVector<T>> star(const HomVector<T>& f, int p, int q, int m) const;

    const Mat<T>& rotation_matrix(const Word& w) const;
    const Mat<T>& contraction_matrix(const Word& w, int k) const;
    Word rotated(const Word& w) const;
    Word contracted(const Word& w, int k) const;

private:
    struct AbsorbTerm {
        std::vector<int> e;   // e[1..n], e[n] = t
        std::vector<int> nu;  // vertex indices for each letter
        T coef;
    };
    const std::vector<AbsorbTerm>& absorb(int t, const Word& u, int tree) const;

    std::shared_ptr<const Category<T>> cat_;
    TolerancePolicy pol_;
    mutable std::recursive_mutex mu_;
    mutable std::map<Word, std::unique_ptr<HomBasis>> bases_;
    mutable std::map<Word, std::unique_ptr<Mat<T>>> rot_;
    mutable std::map<std::pair<Word, int>, std::unique_ptr<Mat<T>>> con_;
    mutable std::map<std::tuple<int, Word, int>, std::unique_ptr<std::vector<AbsorbTerm>>> abs_;
    mutable std::map<Word, std::unique_ptr<DualBasis<T>>> duals_;
};

extern template class HomCalc<Cplx>;
extern template class HomCalc<Cyclo>;
extern template struct HomVector<Cplx>;
extern template struct HomVector<Cyclo>;

}  // namespace tubecalc

#endif
