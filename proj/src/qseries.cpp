#include "qkdv/qseries.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "qkdv/partition.hpp"

namespace qkdv {

bool QSeries::is_zero() const {
    return std::all_of(coef_.begin(), coef_.end(), [](const Scalar& s) { return s.is_zero(); });
}

QSeries QSeries::truncated(int order) const {
    QSeries out(std::min(order, this->order()));
    for (int n = 0; n <= out.order(); ++n) out.coef_[n] = coef_[n];
    return out;
}

QSeries QSeries::operator-() const {
    QSeries out(order());
    for (int n = 0; n <= order(); ++n) out.coef_[n] = -coef_[n];
    return out;
}

QSeries QSeries::operator+(const QSeries& o) const {
    QSeries out(std::min(order(), o.order()));
    for (int n = 0; n <= out.order(); ++n) out.coef_[n] = coef_[n] + o.coef_[n];
    return out;
}

QSeries QSeries::operator-(const QSeries& o) const {
    QSeries out(std::min(order(), o.order()));
    for (int n = 0; n <= out.order(); ++n) out.coef_[n] = coef_[n] - o.coef_[n];
    return out;
}

QSeries QSeries::operator*(const QSeries& o) const {
    QSeries out(std::min(order(), o.order()));
    for (int i = 0; i <= out.order(); ++i) {
        if (coef_[i].is_zero()) continue;
        for (int j = 0; i + j <= out.order(); ++j) {
            if (o.coef_[j].is_zero()) continue;
            out.coef_[i + j] += coef_[i] * o.coef_[j];
        }
    }
    return out;
}

bool QSeries::operator==(const QSeries& o) const {
    int n = std::min(order(), o.order());
    for (int i = 0; i <= n; ++i)
        if (!(coef_[i] == o.coef_[i])) return false;
    return true;
}

QSeries QSeries::scaled(const Scalar& s) const {
    QSeries out(order());
    for (int n = 0; n <= order(); ++n) out.coef_[n] = coef_[n] * s;
    return out;
}

QSeries QSeries::divided_by_unit(const QSeries& d) const {
    if (!(d[0] == Scalar(1)))
        throw std::invalid_argument("QSeries: divisor must have constant term 1");
    QSeries out(std::min(order(), d.order()));
    for (int n = 0; n <= out.order(); ++n) {
        Scalar acc = coef_[n];
        for (int k = 1; k <= n; ++k) acc -= d[k] * out.coef_[n - k];
        out.coef_[n] = acc;
    }
    return out;
}

QSeries QSeries::q_ddq() const {
    QSeries out(order());
    for (int n = 1; n <= order(); ++n) out.coef_[n] = coef_[n].times(rat(n));
    return out;
}

QSeries QSeries::subst_c(const Rat& value) const {
    QSeries out(order());
    for (int n = 0; n <= order(); ++n) out.coef_[n] = coef_[n].subst_c(value);
    return out;
}

std::string QSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (int n = 0; n <= order(); ++n) {
        if (coef_[n].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << coef_[n].str() << ")";
        if (n == 1) os << "*q";
        if (n > 1) os << "*q^" << n;
    }
    if (first) os << "0";
    os << " + O(q^" << order() + 1 << ")";
    return os.str();
}

QSeries partition_series(int order) {
    QSeries out(order);
    auto counts = partition_counts(order);
    for (int n = 0; n <= order; ++n) out[n] = Scalar(rat(counts[n]));
    return out;
}

}  // namespace qkdv
