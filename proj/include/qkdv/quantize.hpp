#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qkdv/diffpoly.hpp"
#include "qkdv/lambda_ring.hpp"
#include "qkdv/qseries.hpp"
#include "qkdv/quasimodular.hpp"

namespace qkdv {

/// A function on partitions together with a descriptive name.
struct PartitionFunction {
    std::string name;
    std::function<Scalar(const Partition&)> eval;
    Scalar operator()(const Partition& lambda) const { return eval(lambda); }
};

/// Matrix of an operator on Lambda_n in the canonical p_lambda basis.
class OperatorMatrix {
public:
    explicit OperatorMatrix(int n);

    int n() const { return n_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<Partition>& basis() const { return basis_; }
    const std::map<std::pair<int, int>, Scalar>& entries() const { return entries_; }

    Scalar entry(int row, int col) const;
    void add_entry(int row, int col, const Scalar& s);

    OperatorMatrix operator*(const OperatorMatrix& o) const;
    OperatorMatrix operator-(const OperatorMatrix& o) const;
    bool is_zero() const { return entries_.empty(); }
    bool operator==(const OperatorMatrix& o) const { return entries_ == o.entries_; }

    /// M[l,m] z_m = M[m,l] z_l
    bool is_symmetric_z_twisted() const;
    bool is_real() const;
    bool is_imaginary() const;

private:
    int n_;
    std::vector<Partition> basis_;
    std::map<std::pair<int, int>, Scalar> entries_;
};

/// Normal-ordered quantization of a differential polynomial, as an operator
/// on Lambda, plus an optional sum of explicitly diagonal parts.
///
/// The operator is never materialized as an infinite series: apply()
/// enumerates exactly the Fourier-mode assignments compatible with the
/// input's parts and with weight conservation. Matrices and weight-traces
/// are cached per weight (write-once, mutex-guarded).
class QuantizedOperator {
public:
    QuantizedOperator() : cache_(std::make_shared<Cache>()) {}

    static QuantizedOperator from_density(DiffPoly g);
    static QuantizedOperator from_diagonal(PartitionFunction f, Scalar coeff = Scalar(1));

    QuantizedOperator operator+(const QuantizedOperator& o) const;
    QuantizedOperator scaled(const Scalar& s) const;

    const DiffPoly& source() const { return source_; }

    LambdaElement apply(const LambdaElement& f) const;
    OperatorMatrix matrix_on(int n) const;
    Scalar trace_on(int n) const;
    QSeries q_series(int order) const;

private:
    DiffPoly source_;
    std::vector<std::pair<Scalar, PartitionFunction>> diagonal_;
    struct Cache {
        std::mutex mtx;
        std::map<int, OperatorMatrix> matrices;
        std::map<int, Scalar> traces;
    };
    std::shared_ptr<Cache> cache_;
};

QuantizedOperator quantize(const DiffPoly& g);

/// Trace of the quantization of a single u-monomial on Lambda_n, as a
/// polynomial in c. Cached globally.
Scalar monomial_trace(const DiffMon& mon, int n);

/// q-bracket <f>_q to the given order.
QSeries q_bracket(const PartitionFunction& f, int order);

/// Q_k of the shifted symmetric algebra; Q_0 = 1.
PartitionFunction qk_function(int k);

/// Moment function S_k (k >= 1).
PartitionFunction moment_sk(int k);

/// Hook-length moment T_k (k >= 2).
PartitionFunction hook_tk(int k);

/// Diagonal operator with L_k p_lambda = S_k(lambda) p_lambda.
QuantizedOperator l_operator(int k);

enum class DiagBasis { monomial, schur };

/// lambda -> (b_lambda, G b_lambda) / (b_lambda, b_lambda)
PartitionFunction diagonal_function(const QuantizedOperator& op, DiagBasis basis);

/// Closed pairing-sum formula for the q-series of a quantized monomial, as a
/// quasimodular polynomial; in reduced mode the Bernoulli constants are
/// dropped (the q-series of the B-reduced monomial).
QMPoly pairing_qseries(const std::vector<int>& a, bool reduced);

/// Hopf hierarchy eigenvalue E_k^[0] (k >= -2).
PartitionFunction hopf_eigenvalue(int k);

/// Large-dispersion eigenvalue E_k^[inf] (k >= 0).
PartitionFunction infinite_eigenvalue(int k);

const std::vector<Partition>& partitions_cached(int n);

}  // namespace qkdv
