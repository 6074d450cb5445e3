#include "tubecalc/scalars.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace tubecalc {

namespace {

unsigned g_bits = 256;

unsigned digits_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

struct PrecisionInit {
    PrecisionInit() { Real::default_precision(digits_for_bits(g_bits)); }
} g_precision_init;

// Integer coefficients of the n-th cyclotomic polynomial, low degree first.
const std::vector<long>& cyclotomic_poly(int n) {
    static std::recursive_mutex mu;
    static std::map<int, std::vector<long>> cache;
    std::lock_guard<std::recursive_mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    // x^n - 1 divided by Phi_d for every proper divisor d
    std::vector<long> p(n + 1, 0);
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d) continue;
        const std::vector<long> q = cyclotomic_poly(d);
        const int dq = static_cast<int>(q.size()) - 1;
        std::vector<long> quot(p.size() - dq, 0);
        for (int k = static_cast<int>(p.size()) - 1; k >= dq; --k) {
            long coef = p[k];
            if (coef == 0) continue;
            int shift = k - dq;
            quot[shift] = coef;
            for (int j = 0; j <= dq; ++j) p[shift + j] -= coef * q[j];
        }
        p = quot;
    }
    return cache.emplace(n, p).first->second;
}

int euler_phi(int n) { return static_cast<int>(cyclotomic_poly(n).size()) - 1; }

void reduce_mod(std::vector<Rational>& p, int n) {
    const auto& phi = cyclotomic_poly(n);
    int deg = static_cast<int>(phi.size()) - 1;
    for (int k = static_cast<int>(p.size()) - 1; k >= deg; --k) {
        if (p[k] == 0) continue;
        Rational coef = p[k];
        int shift = k - deg;
        for (int j = 0; j <= deg; ++j) p[shift + j] -= coef * phi[j];
    }
    p.resize(deg);
    if (p.empty()) p.push_back(Rational(0));
}

long lcm_l(long a, long b) { return a / std::gcd(a, b) * b; }

// Solves A x = b over Q; returns false if inconsistent.
bool solve_rational(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                    std::vector<Rational>& x) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<int> pivcol;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        std::swap(b[piv], b[r]);
        Rational inv = 1 / a[r][c];
        for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivcol.push_back(static_cast<int>(c));
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return false;
    x.assign(cols, Rational(0));
    for (std::size_t i = 0; i < r; ++i) x[pivcol[i]] = b[i];
    return true;
}

}  // namespace

void set_precision_bits(unsigned bits) {
    g_bits = bits;
    Real::default_precision(digits_for_bits(bits));
}

unsigned precision_bits() { return g_bits; }

Real pi_real() { return boost::math::constants::pi<Real>(); }

Cyclo Cyclo::zeta(long n, long k) {
    if (n <= 0) throw std::invalid_argument("cyclo order must be positive");
    k %= n;
    if (k < 0) k += n;
    long g = std::gcd(n, k == 0 ? n : k);
    long m = n / g;
    k /= g;
    if (m == 1) return Cyclo(1);
    std::vector<Rational> p(k + 1, Rational(0));
    p[k] = 1;
    reduce_mod(p, static_cast<int>(m));
    return Cyclo(static_cast<int>(m), p);
}

Cyclo Cyclo::sqrt_int(long m) {
    if (m <= 0) throw std::invalid_argument("sqrt argument must be positive");
    Cyclo out(1);
    long rest = m;
    for (long p = 2; rest > 1; ++p) {
        if (p * p > rest) p = rest;
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) out *= Cyclo(p);
        if (e % 2 == 0) continue;
        Cyclo root;
        if (p == 2) {
            root = zeta(8, 1) + zeta(8, 7);
        } else {
            // the quadratic Gauss sum is sqrt(p) or i*sqrt(p)
            std::vector<bool> residue(p, false);
            for (long y = 1; y < p; ++y) residue[(y * y) % p] = true;
            Cyclo g(0);
            for (long k = 1; k < p; ++k) g += residue[k] ? zeta(p, k) : -zeta(p, k);
            root = (p % 4 == 1) ? g : -(zeta(4, 1) * g);
        }
        out *= root;
    }
    return out;
}

bool Cyclo::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return q == 0; });
}

bool Cyclo::is_rational() const {
    for (std::size_t k = 1; k < c_.size(); ++k)
        if (c_[k] != 0) return false;
    return true;
}

Cyclo Cyclo::lifted(int m) const {
    if (m == n_) return *this;
    int step = m / n_;
    std::vector<Rational> p((c_.size() - 1) * step + 1, Rational(0));
    for (std::size_t k = 0; k < c_.size(); ++k) p[k * step] = c_[k];
    reduce_mod(p, m);
    return Cyclo(m, p);
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
    if (o.n_ == 1 && n_ == 1) {
        c_[0] += o.c_[0];
        return *this;
    }
    int m = static_cast<int>(lcm_l(n_, o.n_));
    Cyclo a = lifted(m);
    Cyclo b = o.lifted(m);
    for (std::size_t k = 0; k < a.c_.size(); ++k) a.c_[k] += b.c_[k];
    *this = a;
    return *this;
}

Cyclo& Cyclo::operator-=(const Cyclo& o) { return *this += -o; }

Cyclo Cyclo::operator-() const {
    Cyclo r = *this;
    for (auto& q : r.c_) q = -q;
    return r;
}

Cyclo& Cyclo::operator*=(const Cyclo& o) {
    if (o.n_ == 1) {
        for (auto& q : c_) q *= o.c_[0];
        return *this;
    }
    if (n_ == 1) {
        Rational s = c_[0];
        *this = o;
        for (auto& q : c_) q *= s;
        return *this;
    }
    int m = static_cast<int>(lcm_l(n_, o.n_));
    Cyclo a = lifted(m);
    Cyclo b = o.lifted(m);
    std::vector<Rational> p(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j) p[i + j] += a.c_[i] * b.c_[j];
    }
    reduce_mod(p, m);
    n_ = m;
    c_ = std::move(p);
    return *this;
}

Cyclo Cyclo::conj() const {
    if (n_ == 1) return *this;
    std::vector<Rational> p(n_, Rational(0));
    for (std::size_t k = 0; k < c_.size(); ++k) p[(n_ - static_cast<int>(k)) % n_] += c_[k];
    reduce_mod(p, n_);
    return Cyclo(n_, p);
}

Cyclo Cyclo::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero");
    if (n_ == 1) return Cyclo(Rational(1) / c_[0]);
    const int d = static_cast<int>(c_.size());
    std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d, Rational(0)));
    for (int j = 0; j < d; ++j) {
        std::vector<Rational> p(d + j, Rational(0));
        for (int k = 0; k < d; ++k) p[k + j] = c_[k];
        reduce_mod(p, n_);
        for (int i = 0; i < d; ++i) a[i][j] = p[i];
    }
    std::vector<Rational> rhs(d, Rational(0)), x;
    rhs[0] = 1;
    solve_rational(a, rhs, x);
    return Cyclo(n_, x);
}

Cyclo Cyclo::normalized() const {
    if (n_ == 1) return *this;
    if (is_zero()) return Cyclo(0);
    for (int m = 1; m < n_; ++m) {
        if (n_ % m) continue;
        // try to express *this in the power basis of Q(zeta_m)
        int dm = euler_phi(m);
        std::vector<Cyclo> basis;
        for (int j = 0; j < dm; ++j) basis.push_back(zeta(m, j).lifted(n_));
        const int d = static_cast<int>(c_.size());
        std::vector<std::vector<Rational>> a(d, std::vector<Rational>(dm, Rational(0)));
        for (int j = 0; j < dm; ++j)
            for (int i = 0; i < d; ++i) a[i][j] = basis[j].c_[i];
        std::vector<Rational> x;
        if (solve_rational(a, c_, x)) {
            if (m == 1) return Cyclo(x[0]);
            return Cyclo(m, x);
        }
    }
    return *this;
}

bool operator==(const Cyclo& a, const Cyclo& b) {
    if (a.n_ == b.n_) return a.c_ == b.c_;
    int m = static_cast<int>(lcm_l(a.n_, b.n_));
    return a.lifted(m).c_ == b.lifted(m).c_;
}

Cplx Cyclo::to_complex() const {
    Cplx z(Real(0), Real(0));
    const Real two_pi = 2 * pi_real();
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0) continue;
        Real q = Real(numerator(c_[k]).str()) / Real(denominator(c_[k]).str());
        if (k == 0) {
            z += Cplx(q, Real(0));
            continue;
        }
        Real ang = two_pi * Real(static_cast<long>(k)) / Real(n_);
        z += Cplx(q * cos(ang), q * sin(ang));
    }
    return z;
}

std::string Cyclo::to_string() const {
    Cyclo v = normalized();
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < v.c_.size(); ++k) {
        const Rational& q = v.c_[k];
        if (q == 0) continue;
        std::string qs = q.str();
        if (k == 0) {
            os << qs;
        } else {
            if (!first) os << (q < 0 ? "-" : "+");
            else if (q < 0) os << "-";
            Rational aq = abs(q);
            if (aq != 1) os << aq.str() << "*";
            os << "cyclo(" << v.n_ << "," << k << ")";
            first = false;
            continue;
        }
        first = false;
    }
    if (first) return "0";
    std::string s = os.str();
    return s;
}

const Cyclo& Scalar::exact() const {
    if (v_.index() != 0) throw std::logic_error("scalar is not exact");
    return std::get<0>(v_);
}

const Cplx& Scalar::value() const {
    if (v_.index() != 1) throw std::logic_error("scalar is not floating");
    return std::get<1>(v_);
}

Cplx Scalar::to_complex() const {
    return v_.index() == 0 ? std::get<0>(v_).to_complex() : std::get<1>(v_);
}

std::string Scalar::to_string() const {
    return v_.index() == 0 ? std::get<0>(v_).to_string() : format_cplx(std::get<1>(v_));
}

namespace {
void require_same(const Scalar& a, const Scalar& b) {
    if (a.backend() != b.backend()) throw std::invalid_argument("backend mismatch");
}
}  // namespace

Scalar Scalar::operator+(const Scalar& o) const {
    require_same(*this, o);
    return backend() == Backend::Exact ? Scalar(exact() + o.exact()) : Scalar(value() + o.value());
}
Scalar Scalar::operator-(const Scalar& o) const {
    require_same(*this, o);
    return backend() == Backend::Exact ? Scalar(exact() - o.exact()) : Scalar(value() - o.value());
}
Scalar Scalar::operator*(const Scalar& o) const {
    require_same(*this, o);
    return backend() == Backend::Exact ? Scalar(exact() * o.exact()) : Scalar(value() * o.value());
}
Scalar Scalar::operator/(const Scalar& o) const {
    require_same(*this, o);
    if (backend() == Backend::Exact) return Scalar(exact() / o.exact());
    if (o.value() == Cplx(Real(0), Real(0))) throw std::domain_error("division by zero");
    return Scalar(value() / o.value());
}

// ---------------------------------------------------------------- parser

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;
    Backend backend;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", i);
    }
    bool peek_word(const char* w) {
        skip();
        return s.compare(i, std::char_traits<char>::length(w), w) == 0;
    }
    long integer() {
        skip();
        std::size_t start = i;
        if (i < s.size() && s[i] == '-') ++i;
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw ParseError("expected integer", start);
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        return std::stol(s.substr(start, i - start));
    }
    long posint() {
        std::size_t at = i;
        long v = integer();
        if (v <= 0) throw ParseError("expected positive integer", at);
        return v;
    }

    Scalar lift(const Cyclo& c) const {
        return backend == Backend::Exact ? Scalar(c) : Scalar(c.to_complex());
    }

    Scalar expr() {
        Scalar v = term();
        for (;;) {
            if (eat('+')) v = v + term();
            else if (eat('-')) v = v - term();
            else return v;
        }
    }
    Scalar term() {
        Scalar v = factor();
        for (;;) {
            std::size_t at = i;
            if (eat('*')) {
                v = v * factor();
            } else if (eat('/')) {
                Scalar d = factor();
                try {
                    v = v / d;
                } catch (const std::domain_error&) {
                    throw ParseError("division by zero", at);
                }
            } else {
                return v;
            }
        }
    }
    Scalar factor() {
        bool neg = eat('-');
        Scalar v = atom();
        if (neg) v = lift(Cyclo(0)) - v;
        return v;
    }
    Scalar atom() {
        skip();
        std::size_t at = i;
        if (eat('(')) {
            Scalar v = expr();
            expect(')');
            return v;
        }
        if (peek_word("sqrt")) {
            i += 4;
            expect('(');
            Scalar arg = expr();
            expect(')');
            return sqrt_of(arg, at);
        }
        if (peek_word("cyclo")) {
            i += 5;
            expect('(');
            std::size_t npos = i;
            long n = integer();
            if (n <= 0) throw ParseError("cyclo order must be positive", npos);
            expect(',');
            long k = integer();
            expect(')');
            return lift(Cyclo::zeta(n, k));
        }
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            long p = integer();
            return lift(Cyclo(p));
        }
        throw ParseError("unexpected input", at);
    }
    Scalar sqrt_of(const Scalar& arg, std::size_t at) {
        if (backend == Backend::Exact) {
            const Cyclo& a = arg.exact();
            if (!a.is_rational() || a.rational_part() <= 0)
                throw ParseError("sqrt argument is not a positive rational; not exactly representable", at);
            Rational q = a.rational_part();
            auto num = numerator(q), den = denominator(q);
            boost::multiprecision::mpz_int prod = num * den;
            if (prod > std::numeric_limits<long>::max())
                throw ParseError("sqrt argument too large", at);
            return Scalar(Cyclo::sqrt_int(prod.convert_to<long>()) * Cyclo(Rational(1) / Rational(den)));
        }
        Cplx z = arg.value();
        if (z.imag() != 0 || z.real() <= 0) throw ParseError("sqrt argument must be positive", at);
        return Scalar(Cplx(sqrt(z.real()), Real(0)));
    }
};

}  // namespace

Scalar parse_scalar(const std::string& text, Backend backend) {
    Parser p{text, 0, backend};
    Scalar v = p.expr();
    p.skip();
    if (p.i != text.size()) throw ParseError("trailing input", p.i);
    if (backend == Backend::Exact) return Scalar(v.exact().normalized());
    return v;
}

bool approx_eq(const Scalar& a, const Scalar& b, const TolerancePolicy& pol) {
    if (a.backend() != b.backend()) throw std::invalid_argument("backend mismatch");
    if (a.backend() == Backend::Exact) return a.exact() == b.exact();
    const Cplx& x = a.value();
    const Cplx& y = b.value();
    Real diff = abs(x - y);
    Real scale = std::max(abs(x), abs(y));
    return diff <= Real(pol.abs_tol) + Real(pol.rel_tol) * scale;
}

std::string format_real(const Real& r) {
    std::ostringstream os;
    os.precision(static_cast<std::streamsize>(Real::default_precision()));
    os << r;
    return os.str();
}

std::string format_cplx(const Cplx& z) {
    std::string re = format_real(z.real());
    std::string im = format_real(z.imag());
    if (!im.empty() && im[0] == '-') return re + im + "i";
    return re + "+" + im + "i";
}

Cplx Field<Cplx>::random(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(-1000000, 1000000);
    return Cplx(Real(dist(rng)) / Real(1000000), Real(dist(rng)) / Real(1000000));
}

Real Field<Cyclo>::mag(const Cyclo& z) {
    if (z.is_zero()) return Real(0);
    return Real(1);
}

Cyclo Field<Cyclo>::random(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> dist(-5, 5);
    return Cyclo(dist(rng));
}

}  // namespace tubecalc
