#pragma once

#include <map>

#include "qkdv/errors.hpp"
#include "qkdv/qseries.hpp"
#include "qkdv/scalar.hpp"

namespace qkdv {

/// Exponents of the free generators G2, G4, G6 of the ring of quasimodular
/// forms on SL_2(Z).
struct QMKey {
    int g2 = 0, g4 = 0, g6 = 0;
    auto operator<=>(const QMKey&) const = default;
    int weight() const { return 2 * g2 + 4 * g4 + 6 * g6; }
    QMKey operator+(const QMKey& o) const { return {g2 + o.g2, g4 + o.g4, g6 + o.g6}; }
};

/// Polynomial in G2, G4, G6 with Scalar coefficients.
class QMPoly {
public:
    QMPoly() = default;
    QMPoly(Scalar s) { add_term({}, std::move(s)); }
    QMPoly(Rat r) : QMPoly(Scalar(std::move(r))) {}

    static QMPoly generator(int k);  // k in {2,4,6}
    static QMPoly term_of(QMKey key, Scalar coeff);

    const std::map<QMKey, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Scalar coeff(const QMKey& key) const;

    void add_term(const QMKey& key, const Scalar& coeff);

    QMPoly operator-() const;
    QMPoly operator+(const QMPoly& o) const;
    QMPoly operator-(const QMPoly& o) const;
    QMPoly operator*(const QMPoly& o) const;
    QMPoly& operator+=(const QMPoly& o);
    bool operator==(const QMPoly& o) const { return terms_ == o.terms_; }

    QMPoly scaled(const Scalar& s) const;
    QMPoly scaled(const Rat& r) const { return scaled(Scalar(r)); }
    QMPoly subst_c(const Rat& value) const;
    QMPoly d2_dc2() const;

    std::string str() const;

private:
    std::map<QMKey, Scalar> terms_;
};

/// Eisenstein series G_k = -B_k/2k + sum sigma_{k-1}(n) q^n, k even >= 2.
QSeries eisenstein(int k, int order);

/// G_k expressed in the generators G2, G4, G6 (k even >= 2); exact, cached.
const QMPoly& eisenstein_qmpoly(int k);

/// Substitute Eisenstein expansions and multiply out to the given order.
QSeries qm_to_series(const QMPoly& f, int order);

/// The unique QMPoly of weight <= max_weight whose expansion matches s,
/// found per parameter multidegree by exact linear solve. Throws
/// NotRecognized / InsufficientOrder.
QMPoly recognize(const QSeries& s, int max_weight);

/// Number of monomials in G2, G4, G6 of total weight <= max_weight.
int qm_monomial_count(int max_weight);

/// Split by total weight (G_k: k, c: +1, eps/mu: -1).
std::map<int, QMPoly> weight_split(const QMPoly& f);
bool is_homogeneous(const QMPoly& f, int w);

/// The derivation with d(G2) = -1/2 and d(G4) = d(G6) = 0.
QMPoly frak_d(const QMPoly& f);

/// Verifies, for a symmetric triple specialization H(x,y), both the
/// Eisenstein series identity and its Bernoulli constant-term consequence.
/// Requires a1 + a2 + a3 even.
bool skoruppa_check(int a1, int a2, int a3, int order);

}  // namespace qkdv
