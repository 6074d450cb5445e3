#ifndef TUBECALC_LINALG_HPP
#define TUBECALC_LINALG_HPP

#include "tubecalc/scalars.hpp"

#include <vector>

namespace tubecalc {

// Gauss-Jordan elimination with partial pivoting. Works for the exact field
// (first nonzero pivot) and for floating point (largest pivot), with entries
// below tol treated as zero.
template <class T>
struct RowReduction {
    Mat<T> r;               // reduced row echelon form
    std::vector<int> pivots;  // pivot column of each nonzero row
    int rank() const { return static_cast<int>(pivots.size()); }
};

template <class T>
Real max_abs(const Mat<T>& a) {
    Real m(0);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            Real v = Field<T>::mag(a(i, j));
            if (v > m) m = v;
        }
    return m;
}

template <class T>
RowReduction<T> row_reduce(Mat<T> a, const Real& tol) {
    RowReduction<T> out;
    const Eigen::Index rows = a.rows(), cols = a.cols();
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index piv = -1;
        Real best(0);
        for (Eigen::Index i = r; i < rows; ++i) {
            if (Field<T>::is_zero(a(i, c), tol)) continue;
            Real m = Field<T>::mag(a(i, c));
            if (piv < 0 || (!Field<T>::exact && m > best)) {
                piv = i;
                best = m;
                if (Field<T>::exact) break;
            }
        }
        if (piv < 0) {
            for (Eigen::Index i = r; i < rows; ++i) a(i, c) = Field<T>::zero();
            continue;
        }
        if (piv != r) a.row(piv).swap(a.row(r));
        T inv = Field<T>::one() / a(r, c);
        for (Eigen::Index j = c; j < cols; ++j) a(r, j) = a(r, j) * inv;
        a(r, c) = Field<T>::one();
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (i == r) continue;
            if (Field<T>::is_zero(a(i, c), Real(0))) continue;
            T f = a(i, c);
            for (Eigen::Index j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
            a(i, c) = Field<T>::zero();
        }
        out.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    out.r = std::move(a);
    return out;
}

/// Absolute tolerance used for rank decisions on a matrix.
template <class T>
Real rank_tol(const Mat<T>& a, const TolerancePolicy& pol) {
    if (Field<T>::exact) return Real(0);
    Real scale = max_abs(a);
    Real t = Real(pol.abs_tol) + Real(pol.rel_tol) * scale;
    return t;
}

/// Columns form a basis of the null space of a.
template <class T>
Mat<T> nullspace(const Mat<T>& a, const TolerancePolicy& pol) {
    const Eigen::Index cols = a.cols();
    if (a.rows() == 0) return Mat<T>::Identity(cols, cols);
    auto rr = row_reduce<T>(a, rank_tol(a, pol));
    std::vector<char> is_pivot(cols, 0);
    for (int p : rr.pivots) is_pivot[p] = 1;
    std::vector<int> free_cols;
    for (Eigen::Index j = 0; j < cols; ++j)
        if (!is_pivot[j]) free_cols.push_back(static_cast<int>(j));
    Mat<T> n = Mat<T>::Zero(cols, static_cast<Eigen::Index>(free_cols.size()));
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        n(free_cols[k], k) = Field<T>::one();
        for (int i = 0; i < rr.rank(); ++i) n(rr.pivots[i], k) = -rr.r(i, free_cols[k]);
    }
    return n;
}

template <class T>
int rank(const Mat<T>& a, const TolerancePolicy& pol) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    return row_reduce<T>(a, rank_tol(a, pol)).rank();
}

/// Inverse of a square matrix; throws if singular at the tolerance.
template <class T>
Mat<T> inverse(const Mat<T>& a, const TolerancePolicy& pol) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("inverse of non-square matrix");
    Mat<T> aug(n, 2 * n);
    aug.leftCols(n) = a;
    aug.rightCols(n) = Mat<T>::Identity(n, n);
    Real tol = rank_tol(a, pol);
    auto rr = row_reduce<T>(aug, tol);
    if (rr.rank() < n || (n > 0 && rr.pivots[n - 1] != n - 1))
        throw std::runtime_error("singular matrix");
    return rr.r.rightCols(n);
}

/// Column basis of the column space of a (selected original columns).
template <class T>
Mat<T> column_basis(const Mat<T>& a, const TolerancePolicy& pol) {
    if (a.cols() == 0 || a.rows() == 0) return Mat<T>(a.rows(), 0);
    auto rr = row_reduce<T>(a, rank_tol(a, pol));
    Mat<T> out(a.rows(), rr.rank());
    for (int k = 0; k < rr.rank(); ++k) out.col(k) = a.col(rr.pivots[k]);
    return out;
}

/// Solves a x = b for a of full column rank; throws if inconsistent.
template <class T>
Mat<T> solve_full_column(const Mat<T>& a, const Mat<T>& b, const TolerancePolicy& pol,
                         Real* residual = nullptr) {
    const Eigen::Index n = a.cols();
    Mat<T> aug(a.rows(), n + b.cols());
    aug.leftCols(n) = a;
    aug.rightCols(b.cols()) = b;
    auto rr = row_reduce<T>(aug, rank_tol(a, pol));
    int piv_in_a = 0;
    for (int p : rr.pivots)
        if (p < n) ++piv_in_a;
    if (piv_in_a < n) throw std::runtime_error("matrix does not have full column rank");
    Mat<T> x = rr.r.block(0, n, n, b.cols());
    if (residual) *residual = max_abs<T>(Mat<T>(a * x - b));
    return x;
}

template <class T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

template <class T>
Vec<T> kron(const Vec<T>& a, const Vec<T>& b) {
    Vec<T> out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

}  // namespace tubecalc

#endif
