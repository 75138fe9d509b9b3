#pragma once

#include <gmpxx.h>

#include <compare>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace qkdv {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Rat rat_pow(const Rat& base, int exp);
Rat factorial(int n);
Rat binomial(int n, int k);
Rat double_factorial(int n);  // n!! with (-1)!! = 1

/// Gaussian rational a + b*i.
struct GaussRat {
    Rat re, im;

    GaussRat() : re(0), im(0) {}
    GaussRat(Rat r) : re(std::move(r)), im(0) {}
    GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    GaussRat operator-() const { return {-re, -im}; }
    GaussRat operator+(const GaussRat& o) const { return {re + o.re, im + o.im}; }
    GaussRat operator-(const GaussRat& o) const { return {re - o.re, im - o.im}; }
    GaussRat operator*(const GaussRat& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussRat operator/(const GaussRat& o) const {
        Rat n = o.re * o.re + o.im * o.im;
        if (sgn(n) == 0) throw std::domain_error("GaussRat: division by zero");
        return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
    }
    GaussRat& operator+=(const GaussRat& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussRat& operator-=(const GaussRat& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
    bool operator==(const GaussRat& o) const { return re == o.re && im == o.im; }

    /// Multiply by i^k.
    GaussRat times_i_pow(int k) const {
        switch (((k % 4) + 4) % 4) {
            case 0: return *this;
            case 1: return {-im, re};
            case 2: return {-re, -im};
            default: return {im, -re};
        }
    }
};

/// Exponents of the coefficient parameters c, eps, mu.
struct ParamKey {
    int c = 0, eps = 0, mu = 0;
    auto operator<=>(const ParamKey&) const = default;

    // grading: c has weight +1, eps and mu weight -1
    int weight() const { return c - eps - mu; }
    int eps_mu_degree() const { return eps + mu; }

    ParamKey operator+(const ParamKey& o) const { return {c + o.c, eps + o.eps, mu + o.mu}; }
};

/// Element of Q(i)[c, eps, mu], optionally reduced modulo the ideal (eps*mu)^G.
///
/// Stored sparsely; zero coefficients are never kept. When a truncation degree
/// G > 0 is set, every key satisfies min(eps, mu) < G and all arithmetic
/// results inherit the tightest truncation of the operands.
class Scalar {
public:
    Scalar() = default;
    Scalar(Rat r) { set_term({}, GaussRat(std::move(r))); }
    Scalar(long n) : Scalar(Rat(n)) {}
    Scalar(GaussRat g) { set_term({}, std::move(g)); }

    static Scalar term(ParamKey key, GaussRat value, int trunc = 0);
    static Scalar c_var() { return term({1, 0, 0}, GaussRat(Rat(1))); }
    static Scalar eps_var() { return term({0, 1, 0}, GaussRat(Rat(1))); }
    static Scalar mu_var() { return term({0, 0, 1}, GaussRat(Rat(1))); }

    const std::map<ParamKey, GaussRat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_real() const;
    bool is_rational() const;  // single key {0,0,0} with real value, or zero
    Rat rational_value() const;  // requires is_rational()
    GaussRat coeff(const ParamKey& key) const;

    int truncation() const { return trunc_; }
    Scalar with_truncation(int g) const;

    void add_term(const ParamKey& key, const GaussRat& value);

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    bool operator==(const Scalar& o) const { return terms_ == o.terms_; }

    Scalar times(const GaussRat& g) const;
    Scalar times(const Rat& r) const { return times(GaussRat(r)); }
    Scalar div(const Rat& r) const;

    /// Apply f to every (key, value); f may return a zero value to drop a term.
    Scalar map_terms(const std::function<GaussRat(const ParamKey&, const GaussRat&)>& f) const;

    Scalar subst_c(const Rat& value) const;
    Scalar subst_eps(const Rat& value) const;
    Scalar subst_mu(const Rat& value) const;
    Scalar d2_dc2() const;

    /// Total (eps,mu)-degree derivation: each term scaled by eps+mu exponent.
    Scalar eps_mu_scaled() const;

    /// Split by the parameter weight c - eps - mu.
    std::map<int, Scalar> split_by_weight() const;

    std::string str() const;

private:
    void set_term(ParamKey key, GaussRat value);
    void normalize();
    bool truncated_away(const ParamKey& key) const {
        return trunc_ > 0 && key.eps >= trunc_ && key.mu >= trunc_;
    }

    std::map<ParamKey, GaussRat> terms_;
    int trunc_ = 0;
};

std::string rat_str(const Rat& r);
std::string gauss_str(const GaussRat& g);

}  // namespace qkdv
