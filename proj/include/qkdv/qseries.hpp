#pragma once

#include <vector>

#include "qkdv/scalar.hpp"

namespace qkdv {

/// Truncated q-expansion with Scalar coefficients for q^0 ... q^N.
/// Binary operations never extend past the data: they truncate to the
/// smaller of the two orders.
class QSeries {
public:
    QSeries() = default;
    explicit QSeries(int order) : coef_(order + 1) {}
    QSeries(int order, Scalar constant) : coef_(order + 1) { coef_[0] = std::move(constant); }

    int order() const { return static_cast<int>(coef_.size()) - 1; }
    const Scalar& operator[](int n) const { return coef_[n]; }
    Scalar& operator[](int n) { return coef_[n]; }
    bool is_zero() const;

    QSeries truncated(int order) const;

    QSeries operator-() const;
    QSeries operator+(const QSeries& o) const;
    QSeries operator-(const QSeries& o) const;
    QSeries operator*(const QSeries& o) const;
    bool operator==(const QSeries& o) const;  // compares on the common order

    QSeries scaled(const Scalar& s) const;
    QSeries scaled(const Rat& r) const { return scaled(Scalar(r)); }

    /// Division by a series with constant term 1.
    QSeries divided_by_unit(const QSeries& d) const;

    /// q d/dq
    QSeries q_ddq() const;

    QSeries subst_c(const Rat& value) const;

    std::string str() const;

private:
    std::vector<Scalar> coef_;
};

/// sum_{n <= N} p(n) q^n
QSeries partition_series(int order);

}  // namespace qkdv
