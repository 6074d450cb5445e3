#ifndef TUBECALC_CATEGORY_HPP
#define TUBECALC_CATEGORY_HPP

#include "tubecalc/scalars.hpp"

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tubecalc {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Category presentation as read from a file, before choosing the field.
struct SpecDocument {
    struct Simple {
        std::string name;
        int source = 0;
        int target = 0;
        std::string dual;
        Scalar qdim, sqrt_qdim, pivotal;
    };
    struct Fusion {
        std::string a, b, c;
        int mult = 1;
    };
    struct FEntry {
        std::string a, b, c, d, e, f;
        int mu = 0, nu = 0, rho = 0, sigma = 0;
        Scalar value;
    };
    std::string name;
    int zero_cells = 1;
    std::vector<Simple> simples;
    std::vector<Fusion> fusion;
    std::vector<FEntry> F;
    Backend backend = Backend::Float;
};

SpecDocument parse_spec_document(const std::string& json_text, Backend backend);
SpecDocument load_spec_file(const std::string& path, Backend backend);

/// Index triple of a row (e, mu, nu) or column (f, rho, sigma) of an F-block.
using TreeIndex = std::array<int, 3>;

// F^{abc}_d: left tree ((ab)_e c)_d with vertices mu: e->ab, nu: d->ec equals
// sum over columns of entry * right tree (a(bc)_f)_d with rho: f->bc, sigma: d->af.
template <class T>
struct FBlock {
    std::vector<TreeIndex> rows, cols;
    Mat<T> m, inv;
    std::vector<int> row_offset, col_offset;  // per intermediate label, -1 if absent
    int row(int e, int mu, int nu, int nu_count) const { return row_offset[e] + mu * nu_count + nu; }
    int col(int f, int rho, int sigma, int sigma_count) const {
        return col_offset[f] + rho * sigma_count + sigma;
    }
};

template <class T>
class Category {
public:
    Category(const SpecDocument& doc, const TolerancePolicy& pol = {});

    const std::string& name() const { return name_; }
    int zero_cells() const { return zero_cells_; }
    int size() const { return static_cast<int>(names_.size()); }
    const std::string& label(int a) const { return names_[a]; }
    int find(const std::string& name) const;

    int source(int a) const { return source_[a]; }
    int target(int a) const { return target_[a]; }
    int dual(int a) const { return dual_[a]; }
    int unit(int cell) const { return unit_[cell]; }
    bool is_unit(int a) const { return unit_[source_[a]] == a; }
    bool diagonal(int a) const { return source_[a] == target_[a]; }

    const T& d(int a) const { return d_[a]; }
    const T& sqrtd(int a) const { return sqrtd_[a]; }
    const T& pivotal(int a) const { return p_[a]; }
    const Scalar& qdim_scalar(int a) const { return qdim_s_[a]; }

    int N(int a, int b, int c) const { return N_[(a * size() + b) * size() + c]; }
    bool composable(int a, int b) const { return target_[a] == source_[b]; }

    /// nullptr when Hom(d, a b c) vanishes.
    const FBlock<T>* F(int a, int b, int c, int d) const;

    /// Cup on the adjacent pair (y, dual y) is cup_scale(y) times the tree vector.
    T cup_scale(int y) const { return sqrtd_[y] * p_[y]; }
    /// Cap on any adjacent dual pair (y, dual y) is cap_scale(y) times the fusion vertex.
    T cap_scale(int y) const { return sqrtd_[y]; }

    /// Diagonal simples (the tube algebra index set), in label order.
    const std::vector<int>& diagonal_simples() const { return diag_; }

    SpecDocument document() const { return doc_; }

private:
    void build_blocks(const SpecDocument& doc, const TolerancePolicy& pol);

    std::string name_;
    int zero_cells_ = 1;
    std::vector<std::string> names_;
    std::vector<int> source_, target_, dual_, unit_, diag_;
    std::vector<T> d_, sqrtd_, p_;
    std::vector<Scalar> qdim_s_;
    std::vector<int> N_;
    std::map<std::array<int, 4>, FBlock<T>> blocks_;
    SpecDocument doc_;
};

struct ValidationCheck {
    std::string name;
    Real residual;
    bool pass;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok() const;
    Real residual(const std::string& name) const;
};

template <class T>
ValidationReport validate(const Category<T>& cat, const TolerancePolicy& pol);

/// Dimension of Hom(1, x1 ... xn) obtained by contracting fusion multiplicities.
template <class T>
long hom_dimension(const Category<T>& cat, int anchor_cell, const std::vector<int>& word);

/// Sum of d_a^2 over simples with source and target in the given 0-cell.
template <class T>
T global_dimension(const Category<T>& cat, int cell);

extern template class Category<Cplx>;
extern template class Category<Cyclo>;

}  // namespace tubecalc

#endif
