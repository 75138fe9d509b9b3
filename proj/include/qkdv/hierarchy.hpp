#pragma once

#include <map>
#include <vector>

#include "qkdv/diffpoly.hpp"
#include "qkdv/quantize.hpp"

namespace qkdv {

/// Polynomial P_{l_1,...,l_n}(xi) of the commutator formula.
struct PPolynomial {
    std::vector<int> index;
    std::vector<Rat> coef;  // coef[j] of xi^j

    int degree() const;
    bool operator==(const PPolynomial& o) const { return index == o.index && coef == o.coef; }
    std::string str() const;
};

/// P via exact Lagrange interpolation of the composition-sum values of
/// tilde-P at xi = 1..deg+1, followed by the parity filter and phase.
PPolynomial p_polynomial(const std::vector<int>& ell);

/// Closed two-index form (leading term plus the Bernoulli tail); oracle for
/// p_polynomial.
PPolynomial p_polynomial_closed(int ell, int m);

/// Density-level commutator [f, g-bar] via the order-n sum of P(d/dx)
/// operators; exact, terminating at n = min(udeg f, udeg g).
DiffPoly commutator_bracket(const DiffPoly& f, const DiffPoly& g);

enum class Hierarchy { kdv, ilw };

struct DensityTable {
    Hierarchy mode = Hierarchy::kdv;
    int genus = 0;  // (eps*mu)^G truncation for ilw; 0 = exact (kdv)
    int k_max = -2;
    bool reduced = false;
    std::map<int, DiffPoly> densities;  // k = -2 .. k_max

    const DiffPoly& at(int k) const;
};

/// The G_1 recursion source: u0^3/6 - u0/24 + (eps-mu)-genus tail up to the
/// cutoff. For kdv, mu = 0 and only the genus-1 term survives.
DiffPoly ilw_g1(Hierarchy mode, int genus);

/// First-order part of the commutator-with-G1 operator; closed form.
DiffPoly r1_ilw(const DiffPoly& g, Hierarchy mode, int genus);
/// Second-order Bernoulli tail of the same operator.
DiffPoly r2_ilw(const DiffPoly& g);

/// Reduced densities by the simplified recursion: invert (k+2+D) termwise,
/// then dx; the additive constant is zero by weight homogeneity. Throws
/// RecursionInconsistent on any internal disagreement.
DensityTable reduced_densities(Hierarchy mode, int k_max, int genus);

/// Full densities: B applied to the reduced table.
DensityTable densities(Hierarchy mode, int k_max, int genus);

/// Rebuild at genus+1 and compare modulo (eps*mu)^genus.
bool ilw_stabilization_check(int k_max, int genus);

/// Dispersionless generating-function densities at eps = 0 (exp(y S u0),
/// divided by S(y) in the non-reduced version), k = -2 .. k_max.
std::map<int, DiffPoly> eliashberg_densities(int k_max, bool reduced);

/// d(j,k) by the convolution recurrence, d(0,0) = 1/2.
Rat d_coeff(int j, int k);
/// Expand the algebraic generating function and compare with d_coeff.
bool d_genfun_check(int j_max, int k_max);

/// Leading [eps^{k+1}] and subleading [eps^k] closed forms of the KdV
/// density g_k (subleading defined for k >= 0).
std::pair<DiffPoly, DiffPoly> epsilon_extremes(int k);

/// (c^2/2) delta_{k,0} + L_{2k+2} / ((-4)^k (2k+1)!!)
QuantizedOperator g_infinity_operator(int k);

/// Eigenvalues of the quantum KdV operator G_k on Lambda_n as truncated
/// eps-power series (coefficients polynomial in c), labelled by the
/// Schur-basis partition at eps = 0. Throws DegenerateSpectrum when the
/// commuting family does not separate the spectrum.
std::map<Partition, std::vector<Scalar>> perturbative_eigenvalues(int k, int n, int order);

}  // namespace qkdv
