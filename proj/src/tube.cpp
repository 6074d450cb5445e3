#include "tubecalc/tube.hpp"

namespace tubecalc {

template <class T>
TubeAlgebra<T>::TubeAlgebra(std::shared_ptr<const HomCalc<T>> hom) : hom_(std::move(hom)) {
    const auto& c = cat();
    grades_ = c.diagonal_simples();
    grade_pos_.assign(c.size(), -1);
    for (std::size_t i = 0; i < grades_.size(); ++i) grade_pos_[grades_[i]] = static_cast<int>(i);
    for (int a : grades_)
        for (int b : grades_)
            for (int x = 0; x < c.size(); ++x) {
                if (c.source(x) != c.source(a) || c.target(x) != c.source(b)) continue;
                Word w = word(a, b, x);
                int n = hom_->dim(w);
                if (!n) continue;
                blocks_[{a, b, x}] = {dim(), n};
                for (int k = 0; k < n; ++k) basis_.push_back({a, b, x, k});
            }
}

template <class T>
Word TubeAlgebra<T>::word(int a, int b, int x) const {
    const auto& c = cat();
    return hom_->word({c.dual(b), c.dual(x), a, x});
}

template <class T>
std::pair<int, int> TubeAlgebra<T>::block(int a, int b, int x) const {
    auto it = blocks_.find({a, b, x});
    return it == blocks_.end() ? std::pair<int, int>{0, 0} : it->second;
}

template <class T>
Vec<T> TubeAlgebra<T>::element(int a, int b, int x, const HomVector<T>& v) const {
    Vec<T> f = zero();
    auto [start, n] = block(a, b, x);
    HomVector<T> r = hom_->reword(v, word(a, b, x));
    for (int k = 0; k < n; ++k) f(start + k) = r.c(k);
    return f;
}

template <class T>
HomVector<T> TubeAlgebra<T>::component(const Vec<T>& f, int a, int b, int x) const {
    Word w = word(a, b, x);
    HomVector<T> v = hom_->zero(w);
    auto [start, n] = block(a, b, x);
    for (int k = 0; k < n; ++k) v.c(k) = f(start + k);
    return v;
}

template <class T>
std::map<int, HomVector<T>> TubeAlgebra<T>::weld_word(const HomVector<T>& pi, int w, const HomVector<T>& g) const {
    const auto& h = *hom_;
    // (cbar xbar W x) glued along c with (dbar ybar c y) gives (y dbar ybar xbar W x)
    HomVector<T> glued = h.glue(pi, 0, g, 2, 1);
    HomVector<T> rot = h.rotate(glued, 1);  // (dbar ybar xbar W x y)
    return h.star(rot, 3 + w, 1, 2);
}

template <class T>
const Vec<T>& TubeAlgebra<T>::product(int i, int j) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = products_.find({i, j});
        if (it != products_.end()) return *it->second;
    }
    auto out = std::make_unique<Vec<T>>(zero());
    const auto& bi = basis_[i];
    const auto& bj = basis_[j];
    if (bi.b == bj.a) {
        auto f = hom_->basis_vector(word(bi.a, bi.b, bi.x), bi.tree);
        auto g = hom_->basis_vector(word(bj.a, bj.b, bj.x), bj.tree);
        for (auto& [z, v] : weld_word(f, 1, g)) *out += element(bi.a, bj.b, z, v);
    }
    std::lock_guard<std::mutex> lock(mu_);
    return *products_.emplace(std::make_pair(i, j), std::move(out)).first->second;
}

template <class T>
Vec<T> TubeAlgebra<T>::weld(const Vec<T>& f, const Vec<T>& g) const {
    Vec<T> out = zero();
    for (int i = 0; i < dim(); ++i) {
        if (Field<T>::is_zero(f(i), Real(0))) continue;
        for (int j = 0; j < dim(); ++j) {
            if (Field<T>::is_zero(g(j), Real(0))) continue;
            if (basis_[i].b != basis_[j].a) continue;
            out += (f(i) * g(j)) * product(i, j);
        }
    }
    return out;
}

template <class T>
Vec<T> TubeAlgebra<T>::unit(int a) const {
    int u = cat().unit(cat().source(a));
    return element(a, a, u, hom_->unit({a}));
}

template <class T>
Vec<T> TubeAlgebra<T>::local_unit(const std::vector<int>& gr) const {
    Vec<T> e = zero();
    for (int a : gr) e += unit(a);
    return e;
}

template <class T>
T TubeAlgebra<T>::epsilon(const Vec<T>& f) const {
    T s = Field<T>::zero();
    for (int a : grades_) {
        int u = cat().unit(cat().source(a));
        auto [start, n] = block(a, a, u);
        if (!n) continue;
        s += hom_->trace(hom_->strip_units(component(f, a, a, u)));
    }
    return s;
}

template <class T>
Vec<T> TubeAlgebra<T>::sharp(const Vec<T>& f) const {
    const auto& c = cat();
    Vec<T> out = zero();
    for (const auto& [key, range] : blocks_) {
        auto [a, b, x] = key;
        auto v = component(f, a, b, x);
        bool nz = false;
        for (Eigen::Index k = 0; k < v.c.size(); ++k) nz = nz || !Field<T>::is_zero(v.c(k), Real(0));
        if (!nz) continue;
        out += element(c.dual(b), c.dual(a), c.dual(x), hom_->rotate(v, 2));
    }
    return out;
}

template <class T>
Vec<T> TubeAlgebra<T>::twist(int a) const {
    const auto& h = *hom_;
    const auto& c = cat();
    int ab = c.dual(a);
    auto v = h.rotate(h.concat(h.cup(a), h.cup(ab)), 1);  // H<abar abar a a>
    v *= Field<T>::one() / c.d(a);
    return element(a, a, a, v);
}

template <class T>
Vec<T> TubeAlgebra<T>::twist_inverse(int a) const {
    const auto& h = *hom_;
    const auto& c = cat();
    int ab = c.dual(a);
    auto v = h.concat(h.cup(ab), h.cup(a));  // H<abar a a abar>
    v *= Field<T>::one() / c.d(a);
    return element(a, a, ab, v);
}

template <class T>
std::string TubeAlgebra<T>::describe(int i) const {
    const auto& c = cat();
    const auto& b = basis_[i];
    return "T[" + c.label(b.a) + ";" + c.label(b.b) + "] x=" + c.label(b.x) + " #" + std::to_string(b.tree);
}

template class TubeAlgebra<Cplx>;
template class TubeAlgebra<Cyclo>;

}  // namespace tubecalc
