#pragma once

#include <map>

#include "qkdv/partition.hpp"
#include "qkdv/scalar.hpp"

namespace qkdv {

/// Element of Lambda = Q[p_1, p_2, ...] in the power-sum monomial basis:
/// a sparse map partition -> coefficient of p_lambda.
class LambdaElement {
public:
    LambdaElement() = default;
    static LambdaElement monomial(const Partition& lambda, Scalar coeff = Scalar(1));
    static LambdaElement one() { return monomial(Partition{}); }

    const std::map<Partition, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Scalar coeff(const Partition& lambda) const;

    void add_term(const Partition& lambda, const Scalar& coeff);

    LambdaElement operator-() const;
    LambdaElement operator+(const LambdaElement& o) const;
    LambdaElement operator-(const LambdaElement& o) const;
    LambdaElement operator*(const LambdaElement& o) const;
    LambdaElement& operator+=(const LambdaElement& o);
    bool operator==(const LambdaElement& o) const { return terms_ == o.terms_; }

    LambdaElement scaled(const Scalar& s) const;

    /// Split by the Lambda_n grading (|lambda|); parts sum back to the element.
    std::map<int, LambdaElement> weight_decompose() const;

    std::string str() const;

private:
    std::map<Partition, Scalar> terms_;
};

/// Bilinear extension of (p_lambda, p_mu) = z_lambda delta_{lambda,mu}.
Scalar inner_product(const LambdaElement& f, const LambdaElement& g);

/// h_k: coefficient of y^k in exp(sum p_k y^k / k); zero for k < 0.
LambdaElement complete_homogeneous(int k);

/// Schur function via the Jacobi-Trudi determinant det[h_{lambda_i - i + j}].
LambdaElement schur(const Partition& lambda);

}  // namespace qkdv
