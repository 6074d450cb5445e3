#ifndef TUBECALC_SCALARS_HPP
#define TUBECALC_SCALARS_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tubecalc {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Cplx = std::complex<Real>;
using Rational = boost::multiprecision::mpq_rational;

/// Sets the working mantissa (in bits) for every Real created afterwards.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

Real pi_real();

// Element of a cyclotomic field Q(zeta_n), stored in the power basis
// reduced modulo the n-th cyclotomic polynomial.
class Cyclo {
public:
    Cyclo() : n_(1), c_{Rational(0)} {}
    Cyclo(int v) : n_(1), c_{Rational(v)} {}  // NOLINT(implicit)
    Cyclo(long v) : n_(1), c_{Rational(v)} {}  // NOLINT(implicit)
    Cyclo(const Rational& q) : n_(1), c_{q} {}  // NOLINT(implicit)

    static Cyclo zeta(long n, long k);
    static Cyclo sqrt_int(long m);

    int order() const { return n_; }
    const std::vector<Rational>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_rational() const;
    Rational rational_part() const { return c_[0]; }

    Cyclo conj() const;
    Cyclo inverse() const;
    Cyclo normalized() const;
    Cplx to_complex() const;
    std::string to_string() const;

    Cyclo& operator+=(const Cyclo& o);
    Cyclo& operator-=(const Cyclo& o);
    Cyclo& operator*=(const Cyclo& o);
    Cyclo& operator/=(const Cyclo& o) { return *this *= o.inverse(); }

    friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
    friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }
    friend Cyclo operator*(Cyclo a, const Cyclo& b) { return a *= b; }
    friend Cyclo operator/(Cyclo a, const Cyclo& b) { return a /= b; }
    Cyclo operator-() const;
    Cyclo operator+() const { return *this; }

    friend bool operator==(const Cyclo& a, const Cyclo& b);
    friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

private:
    Cyclo(int n, std::vector<Rational> c) : n_(n), c_(std::move(c)) {}
    Cyclo lifted(int m) const;

    int n_;
    std::vector<Rational> c_;
};

inline std::ostream& operator<<(std::ostream& os, const Cyclo& c) { return os << c.to_string(); }

enum class Backend { Exact, Float };

struct TolerancePolicy {
    double abs_tol = 1e-20;
    double rel_tol = 1e-20;
};

/// Backend-tagged scalar as it appears in files and reports.
class Scalar {
public:
    Scalar() : v_(Cyclo()) {}
    explicit Scalar(Cyclo c) : v_(std::move(c)) {}
    explicit Scalar(Cplx z) : v_(std::move(z)) {}

    Backend backend() const { return v_.index() == 0 ? Backend::Exact : Backend::Float; }
    const Cyclo& exact() const;
    const Cplx& value() const;
    Cplx to_complex() const;
    std::string to_string() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;

private:
    std::variant<Cyclo, Cplx> v_;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

// Parses the scalar-expression grammar. sqrt() of a non-integer argument is
// accepted by the float backend only.
Scalar parse_scalar(const std::string& text, Backend backend);

bool approx_eq(const Scalar& a, const Scalar& b, const TolerancePolicy& pol = {});

std::string format_real(const Real& r);
std::string format_cplx(const Cplx& z);

// Per-field operations used by the templated core.
template <class T>
struct Field;

template <>
struct Field<Cplx> {
    static constexpr bool exact = false;
    static Cplx zero() { return Cplx(Real(0), Real(0)); }
    static Cplx one() { return Cplx(Real(1), Real(0)); }
    static Cplx from_int(long v) { return Cplx(Real(v), Real(0)); }
    static Cplx from_rational(long p, long q) { return Cplx(Real(p) / Real(q), Real(0)); }
    static Cplx from_scalar(const Scalar& s) { return s.to_complex(); }
    static Cplx conj(const Cplx& z) { return std::conj(z); }
    static Real mag(const Cplx& z) { return abs(z.real()) + abs(z.imag()); }
    static bool is_zero(const Cplx& z, const Real& tol) { return mag(z) <= tol; }
    static Cplx to_complex(const Cplx& z) { return z; }
    static Cplx random(std::mt19937_64& rng);
    static std::string str(const Cplx& z) { return format_cplx(z); }
    static Scalar to_scalar(const Cplx& z) { return Scalar(z); }
};

template <>
struct Field<Cyclo> {
    static constexpr bool exact = true;
    static Cyclo zero() { return Cyclo(0); }
    static Cyclo one() { return Cyclo(1); }
    static Cyclo from_int(long v) { return Cyclo(v); }
    static Cyclo from_rational(long p, long q) { return Cyclo(Rational(p, q)); }
    static Cyclo from_scalar(const Scalar& s) { return s.exact(); }
    static Cyclo conj(const Cyclo& z) { return z.conj(); }
    static Real mag(const Cyclo& z);
    static bool is_zero(const Cyclo& z, const Real&) { return z.is_zero(); }
    static Cplx to_complex(const Cyclo& z) { return z.to_complex(); }
    static Cyclo random(std::mt19937_64& rng);
    static std::string str(const Cyclo& z) { return z.normalized().to_string(); }
    static Scalar to_scalar(const Cyclo& z) { return Scalar(z.normalized()); }
};

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

}  // namespace tubecalc

namespace Eigen {
template <>
struct NumTraits<tubecalc::Cyclo> : GenericNumTraits<tubecalc::Cyclo> {
    using Real = tubecalc::Cyclo;
    using NonInteger = tubecalc::Cyclo;
    using Literal = tubecalc::Cyclo;
    using Nested = tubecalc::Cyclo;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 20,
        AddCost = 40,
        MulCost = 80
    };
    static int digits10() { return 0; }
};
}  // namespace Eigen

#endif
