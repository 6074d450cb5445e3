#ifndef TUBECALC_MONOIDAL_HPP
#define TUBECALC_MONOIDAL_HPP

#include "tubecalc/rep.hpp"

#include <array>

namespace tubecalc {

/// Row label of a product: m_i in M_a, n_j in N_b, basis vector k of H<cbar a b>.
struct ProductIndex {
    int c, a, b, i, j, k;
};

// M box N realized on its x = unit representatives. Every vector of the
// auxiliary space is equivalent to a unique combination of these, so no
// further quotient is needed once canonical forms are available.
template <class T>
struct Product {
    Representation<T> left, right, rep;
    struct Block {
        int start, nm, nn, nh;
        int size() const { return nm * nn * nh; }
    };
    std::vector<ProductIndex> index;
    std::map<std::array<int, 3>, Block> blocks;  // keyed by (c, a, b)

    int row(int c, int a, int b, int i, int j, int k) const;
    bool has(int c, int a, int b) const { return blocks.count({c, a, b}) > 0; }
};

// Full auxiliary space over all x with the relation span, used to certify the
// quotient. Columns of `relations` span the kernel of `to_quotient`.
template <class T>
struct QuotientPresentation {
    struct Index {
        int c, a, b, x, i, j, k;
    };
    std::vector<Index> index;
    std::vector<Mat<T>> action;  // per tube basis element, on the full space
    Mat<T> relations;            // one generator per column
    Mat<T> to_quotient;          // canonical form: full -> product rows
    Mat<T> from_quotient;        // x = unit representatives inside the full space
};

template <class T>
struct ModularData {
    std::vector<SimpleModule<T>> simples;
    int unit = 0;                  // position of the trivial representation
    std::vector<T> twists, dims;  // dims are categorical traces of identities
    Mat<T> S_raw, S;              // raw double-braiding traces and S / sqrt(sum d^2)
    T global_dim_sqrt;
    std::vector<std::vector<std::vector<int>>> fusion;  // fusion[i][j][k]
};

template <class T>
class Monoidal {
public:
    explicit Monoidal(const TubeAlgebra<T>& A);

    const TubeAlgebra<T>& algebra() const { return *A_; }

    /// H<cbar xbar a b x>.
    Word pi_word(int c, int a, int b, int x) const;
    /// H<cbar a b>.
    Word rep_word(int c, int a, int b) const;

    Product<T> tensor(const Representation<T>& m, const Representation<T>& n) const;

    // Image in p of kron(U, V, W) where U: S1 -> M_a, V: S2 -> N_b and
    // W: S3 -> H<cbar xbar a b x>. Columns follow the kron order of the sources.
    Mat<T> canonical_form(const Product<T>& p, int c, int a, int b, int x, const Mat<T>& U, const Mat<T>& V,
                          const Mat<T>& W) const;

    QuotientPresentation<T> presentation(const Product<T>& p) const;

    /// F box G as a map src -> dst.
    Mat<T> tensor_maps(const Product<T>& src, const Product<T>& dst, const Mat<T>& F, const Mat<T>& G) const;

    /// (M box N) box L -> M box (N box L).
    Mat<T> associator(const Product<T>& mn, const Product<T>& mn_l, const Product<T>& nl,
                      const Product<T>& m_nl) const;

    Mat<T> left_unitor(const Product<T>& im) const;   // M -> I box M
    Mat<T> right_unitor(const Product<T>& mi) const;  // M -> M box I

    /// M box N -> N box M.
    Mat<T> braiding(const Product<T>& mn, const Product<T>& nm) const;
    Mat<T> twist(const Representation<T>& m) const;

    /// Evaluation Mbar box M -> I, for mbar = dual(M).
    Mat<T> ev(const Product<T>& mbar_m) const;
    /// Coevaluation I -> M box Mbar.
    Mat<T> coev(const Product<T>& m_mbar) const;

    /// Categorical trace of an endomorphism of X, as the scalar on I.
    T trace(const Representation<T>& x, const Mat<T>& g) const;

    std::vector<std::vector<std::vector<int>>> fusion_table(const std::vector<SimpleModule<T>>& simples,
                                                            const TolerancePolicy& pol) const;
    ModularData<T> modular_data(const std::vector<SimpleModule<T>>& simples, const TolerancePolicy& pol) const;

private:
    struct CfTerm {
        int t, s;
        Vec<T> mu_bar, nu_bar;
        Mat<T> K;  // H<cbar xbar a b x> -> H<cbar t s>, weights included
    };
    const std::vector<CfTerm>& cf_terms(int c, int a, int b, int x) const;
    /// Welding of H<cbar a b> with tube basis element f, per z.
    const std::map<int, Mat<T>>& weld_map(int f, int a, int b, int x) const;
    std::map<int, HomVector<T>> pair_weld(const HomVector<T>& pi, const HomVector<T>& A,
                                          const HomVector<T>& B) const;

    const TubeAlgebra<T>* A_;
    mutable std::recursive_mutex mu_;
    mutable std::map<std::array<int, 4>, std::unique_ptr<std::vector<CfTerm>>> cf_;
    mutable std::map<std::array<int, 4>, std::unique_ptr<std::map<int, Mat<T>>>> weld_;
};

/// Rows of a grade block of a full representation matrix.
template <class T>
Mat<T> grade_block(const Representation<T>& m, const Mat<T>& full, int g_row, int g_col);

extern template struct Product<Cplx>;
extern template struct Product<Cyclo>;
extern template class Monoidal<Cplx>;
extern template class Monoidal<Cyclo>;

}  // namespace tubecalc

#endif
