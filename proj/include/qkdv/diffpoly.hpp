#pragma once

#include <map>
#include <vector>

#include "qkdv/errors.hpp"
#include "qkdv/scalar.hpp"

namespace qkdv {

/// Monomial in the u_i: sorted (ascending) multiset of u-indices.
using DiffMon = std::vector<int>;

/// u-weight of a monomial: each factor u_i counts i+1.
int mon_u_weight(const DiffMon& m);
/// weight-operator parity: sum of the indices themselves, mod 2.
int mon_parity(const DiffMon& m);

/// Sparse differential polynomial over the Scalar coefficient ring.
///
/// The total weight of a term combines the u-weight with the parameter
/// grading of its coefficient (c: +1, eps: -1, mu: -1).
class DiffPoly {
public:
    DiffPoly() = default;
    DiffPoly(Scalar s) { add_term({}, std::move(s)); }
    DiffPoly(Rat r) : DiffPoly(Scalar(std::move(r))) {}
    DiffPoly(long n) : DiffPoly(Scalar(n)) {}

    static DiffPoly u(int index, Scalar coeff = Scalar(1));
    static DiffPoly monomial(DiffMon m, Scalar coeff = Scalar(1));

    const std::map<DiffMon, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Scalar coeff(const DiffMon& m) const;
    Scalar constant_term() const { return coeff({}); }
    int u_degree() const;  // max number of factors

    void add_term(const DiffMon& m, const Scalar& coeff);

    DiffPoly operator-() const;
    DiffPoly operator+(const DiffPoly& o) const;
    DiffPoly operator-(const DiffPoly& o) const;
    DiffPoly operator*(const DiffPoly& o) const;
    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    bool operator==(const DiffPoly& o) const { return terms_ == o.terms_; }

    DiffPoly scaled(const Scalar& s) const;
    DiffPoly scaled(const Rat& r) const { return scaled(Scalar(r)); }

    /// partial derivative with respect to u_i
    DiffPoly derivative(int i) const;

    DiffPoly subst_eps(const Rat& value) const;
    DiffPoly subst_mu(const Rat& value) const;
    DiffPoly with_truncation(int g) const;

    /// coefficient of eps^e, as a polynomial with the eps-exponent removed
    DiffPoly eps_coefficient(int e) const;

    std::string str() const;

private:
    std::map<DiffMon, Scalar> terms_;
};

/// dx = sum u_{i+1} d/du_i
DiffPoly dx(const DiffPoly& p);
DiffPoly dx_pow(const DiffPoly& p, int n);

/// The unique q with dx(q) = p and zero constant term, via exact linear
/// algebra on each (u-degree, u-weight, parameter key) component.
/// Throws NotInImage when no antiderivative exists.
DiffPoly dx_invert(const DiffPoly& p);

/// Split by total weight (u_i: i+1, c: +1, eps: -1, mu: -1).
std::map<int, DiffPoly> weight_decompose(const DiffPoly& p);
bool is_weight_homogeneous(const DiffPoly& p, int w);

/// (even, odd) with respect to the weight-operator parity.
std::pair<DiffPoly, DiffPoly> parity_split(const DiffPoly& p);

/// Bernoulli number B_k, with B_1 = -1/2. Memoized recurrence.
Rat bernoulli(int k);

/// nu_{i,j} = (-1)^{(i-j)/2} B_{i+j+2} / (i+j+2), zero for i != j mod 2.
Rat nu_coeff(int i, int j);

/// B = exp(-1/2 sum nu_{i,j} d^2/du_i du_j); inverse flips the sign.
DiffPoly b_operator(const DiffPoly& p, bool inverse = false);

/// D = eps d/deps + mu d/dmu
DiffPoly d_operator(const DiffPoly& p);

/// antiderivative in u_0 with no u_0-free term added
DiffPoly u0_integrate(const DiffPoly& p);

/// Density p of level k rewritten over the (i*hbar)^{1/2} grading:
/// map from the half-power exponent to the corresponding part.
struct HbarPoly {
    std::map<int, DiffPoly> parts;  // key: exponent of (i*hbar)^{1/2}
    bool operator==(const HbarPoly& o) const { return parts == o.parts; }
};
HbarPoly hbar_normalize(const DiffPoly& p, int level);

}  // namespace qkdv
