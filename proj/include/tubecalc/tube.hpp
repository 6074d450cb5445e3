#ifndef TUBECALC_TUBE_HPP
#define TUBECALC_TUBE_HPP

#include "tubecalc/homspace.hpp"

namespace tubecalc {

/// Basis element of H<bbar xbar a x> inside T_{a;b}.
struct TubeIndex {
    int a, b, x, tree;
};

// Tube algebra over the diagonal simples. Elements are dense coefficient
// vectors on the basis sorted by (a, b, x, tree). The product f.g is defined
// for f in T_{a;b}, g in T_{b;c} and lands in T_{a;c}.
template <class T>
class TubeAlgebra {
public:
    explicit TubeAlgebra(std::shared_ptr<const HomCalc<T>> hom);

    const HomCalc<T>& hom() const { return *hom_; }
    std::shared_ptr<const HomCalc<T>> hom_ptr() const { return hom_; }
    const Category<T>& cat() const { return hom_->cat(); }

    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<TubeIndex>& basis() const { return basis_; }
    /// Diagonal simples indexing the grades, in label order.
    const std::vector<int>& grades() const { return grades_; }
    int grade_index(int a) const { return grade_pos_[a]; }

    Word word(int a, int b, int x) const;
    /// First basis index and count of the block (a, b, x); count 0 if empty.
    std::pair<int, int> block(int a, int b, int x) const;

    Vec<T> zero() const { return Vec<T>::Constant(dim(), Field<T>::zero()); }
    Vec<T> element(int a, int b, int x, const HomVector<T>& v) const;
    HomVector<T> component(const Vec<T>& f, int a, int b, int x) const;

    const Vec<T>& product(int i, int j) const;
    Vec<T> weld(const Vec<T>& f, const Vec<T>& g) const;

    // Welds pi in H<cbar xbar W x> (the first letter and the last letter frame
    // a top word W of length w) with g in T_{c;d}. Returns, per simple z, the
    // component on H<dbar zbar W z>.
    std::map<int, HomVector<T>> weld_word(const HomVector<T>& pi, int w, const HomVector<T>& g) const;

    Vec<T> unit(int a) const;
    Vec<T> local_unit(const std::vector<int>& grades) const;
    T epsilon(const Vec<T>& f) const;
    Vec<T> sharp(const Vec<T>& f) const;
    Vec<T> twist(int a) const;
    Vec<T> twist_inverse(int a) const;

    std::string describe(int i) const;

private:
    std::shared_ptr<const HomCalc<T>> hom_;
    std::vector<int> grades_, grade_pos_;
    std::vector<TubeIndex> basis_;
    std::map<std::array<int, 3>, std::pair<int, int>> blocks_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, std::unique_ptr<Vec<T>>> products_;
};

extern template class TubeAlgebra<Cplx>;
extern template class TubeAlgebra<Cyclo>;

}  // namespace tubecalc

#endif
