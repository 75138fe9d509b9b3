#include "qkdv/scalar.hpp"

#include <sstream>

namespace qkdv {

Rat rat_pow(const Rat& base, int exp) {
    if (exp < 0) {
        if (sgn(base) == 0) throw std::domain_error("rat_pow: 0^negative");
        return rat(1) / rat_pow(base, -exp);
    }
    Rat acc(1), b = base;
    int e = exp;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

Rat factorial(int n) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rat(f);
}

Rat binomial(int n, int k) {
    if (k < 0 || k > n || n < 0) return rat(0);
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rat(b);
}

Rat double_factorial(int n) {
    if (n <= 0) return rat(1);
    Rat acc(1);
    for (int m = n; m >= 2; m -= 2) acc *= m;
    return acc;
}

Scalar Scalar::term(ParamKey key, GaussRat value, int trunc) {
    Scalar s;
    s.trunc_ = trunc;
    s.set_term(key, std::move(value));
    return s;
}

void Scalar::set_term(ParamKey key, GaussRat value) {
    if (!value.is_zero() && !truncated_away(key)) terms_.emplace(key, std::move(value));
}

void Scalar::add_term(const ParamKey& key, const GaussRat& value) {
    if (value.is_zero() || truncated_away(key)) return;
    auto [it, inserted] = terms_.try_emplace(key, value);
    if (!inserted) {
        it->second += value;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void Scalar::normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.is_zero() || truncated_away(it->first))
            it = terms_.erase(it);
        else
            ++it;
    }
}

bool Scalar::is_real() const {
    for (const auto& [k, v] : terms_)
        if (!v.is_real()) return false;
    return true;
}

bool Scalar::is_rational() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == ParamKey{} &&
           terms_.begin()->second.is_real();
}

Rat Scalar::rational_value() const {
    if (terms_.empty()) return rat(0);
    if (!is_rational()) throw std::logic_error("Scalar: not a plain rational: " + str());
    return terms_.begin()->second.re;
}

GaussRat Scalar::coeff(const ParamKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? GaussRat() : it->second;
}

Scalar Scalar::with_truncation(int g) const {
    Scalar s = *this;
    if (g > 0 && (s.trunc_ == 0 || g < s.trunc_)) s.trunc_ = g;
    s.normalize();
    return s;
}

static int combine_trunc(int a, int b) {
    if (a == 0) return b;
    if (b == 0) return a;
    return std::min(a, b);
}

Scalar Scalar::operator-() const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_) s.terms_.emplace(k, -v);
    return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
    Scalar s = *this;
    s += o;
    return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
    Scalar s = *this;
    s -= o;
    return s;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    trunc_ = combine_trunc(trunc_, o.trunc_);
    for (const auto& [k, v] : o.terms_) add_term(k, v);
    normalize();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    trunc_ = combine_trunc(trunc_, o.trunc_);
    for (const auto& [k, v] : o.terms_) add_term(k, -v);
    normalize();
    return *this;
}

Scalar Scalar::operator*(const Scalar& o) const {
    Scalar s;
    s.trunc_ = combine_trunc(trunc_, o.trunc_);
    for (const auto& [ka, va] : terms_)
        for (const auto& [kb, vb] : o.terms_) s.add_term(ka + kb, va * vb);
    return s;
}

Scalar Scalar::times(const GaussRat& g) const {
    Scalar s;
    s.trunc_ = trunc_;
    if (g.is_zero()) return s;
    for (const auto& [k, v] : terms_) s.terms_.emplace(k, v * g);
    return s;
}

Scalar Scalar::div(const Rat& r) const {
    if (sgn(r) == 0) throw std::domain_error("Scalar: division by zero");
    return times(GaussRat(rat(1) / r));
}

Scalar Scalar::map_terms(
    const std::function<GaussRat(const ParamKey&, const GaussRat&)>& f) const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_) s.add_term(k, f(k, v));
    return s;
}

Scalar Scalar::subst_c(const Rat& value) const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_)
        s.add_term({0, k.eps, k.mu}, v * GaussRat(rat_pow(value, k.c)));
    return s;
}

Scalar Scalar::subst_eps(const Rat& value) const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_)
        s.add_term({k.c, 0, k.mu}, v * GaussRat(rat_pow(value, k.eps)));
    return s;
}

Scalar Scalar::subst_mu(const Rat& value) const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_)
        s.add_term({k.c, k.eps, 0}, v * GaussRat(rat_pow(value, k.mu)));
    return s;
}

Scalar Scalar::d2_dc2() const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_) {
        if (k.c < 2) continue;
        s.add_term({k.c - 2, k.eps, k.mu}, v * GaussRat(rat(k.c) * rat(k.c - 1)));
    }
    return s;
}

Scalar Scalar::eps_mu_scaled() const {
    Scalar s;
    s.trunc_ = trunc_;
    for (const auto& [k, v] : terms_) s.add_term(k, v * GaussRat(rat(k.eps_mu_degree())));
    return s;
}

std::map<int, Scalar> Scalar::split_by_weight() const {
    std::map<int, Scalar> out;
    for (const auto& [k, v] : terms_) {
        auto [it, ins] = out.try_emplace(k.weight(), Scalar());
        if (ins) it->second.trunc_ = trunc_;
        it->second.add_term(k, v);
    }
    return out;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

std::string gauss_str(const GaussRat& g) {
    if (g.is_real()) return rat_str(g.re);
    std::ostringstream os;
    if (sgn(g.re) != 0) os << rat_str(g.re) << (sgn(g.im) > 0 ? "+" : "");
    os << rat_str(g.im) << "*i";
    return os.str();
}

std::string Scalar::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : terms_) {
        std::string coef = gauss_str(v);
        if (!first) os << (coef[0] == '-' ? " - " : " + ");
        if (!first && coef[0] == '-') coef = coef.substr(1);
        first = false;
        bool has_param = k.c || k.eps || k.mu;
        bool unit = (coef == "1") && has_param;
        bool neg_unit = (coef == "-1") && has_param;
        if (neg_unit) os << "-";
        if (!unit && !neg_unit) {
            os << coef;
            if (has_param) os << "*";
        }
        bool star = false;
        auto put = [&](const char* name, int e) {
            if (e == 0) return;
            if (star) os << "*";
            os << name;
            if (e > 1) os << "^" << e;
            star = true;
        };
        put("c", k.c);
        put("eps", k.eps);
        put("mu", k.mu);
    }
    return os.str();
}

}  // namespace qkdv
