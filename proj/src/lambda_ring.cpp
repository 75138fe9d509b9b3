#include "qkdv/lambda_ring.hpp"

#include <sstream>

namespace qkdv {

LambdaElement LambdaElement::monomial(const Partition& lambda, Scalar coeff) {
    LambdaElement e;
    e.add_term(lambda, coeff);
    return e;
}

Scalar LambdaElement::coeff(const Partition& lambda) const {
    auto it = terms_.find(lambda);
    return it == terms_.end() ? Scalar() : it->second;
}

void LambdaElement::add_term(const Partition& lambda, const Scalar& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(lambda, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

LambdaElement LambdaElement::operator-() const {
    LambdaElement e;
    for (const auto& [l, s] : terms_) e.terms_.emplace(l, -s);
    return e;
}

LambdaElement LambdaElement::operator+(const LambdaElement& o) const {
    LambdaElement e = *this;
    e += o;
    return e;
}

LambdaElement& LambdaElement::operator+=(const LambdaElement& o) {
    for (const auto& [l, s] : o.terms_) add_term(l, s);
    return *this;
}

LambdaElement LambdaElement::operator-(const LambdaElement& o) const {
    LambdaElement e = *this;
    for (const auto& [l, s] : o.terms_) e.add_term(l, -s);
    return e;
}

LambdaElement LambdaElement::operator*(const LambdaElement& o) const {
    LambdaElement e;
    for (const auto& [la, sa] : terms_)
        for (const auto& [lb, sb] : o.terms_) {
            std::vector<int> parts = la.parts();
            parts.insert(parts.end(), lb.parts().begin(), lb.parts().end());
            e.add_term(Partition(std::move(parts)), sa * sb);
        }
    return e;
}

LambdaElement LambdaElement::scaled(const Scalar& s) const {
    LambdaElement e;
    for (const auto& [l, sc] : terms_) e.add_term(l, sc * s);
    return e;
}

std::map<int, LambdaElement> LambdaElement::weight_decompose() const {
    std::map<int, LambdaElement> out;
    for (const auto& [l, s] : terms_) out[l.size()].add_term(l, s);
    return out;
}

std::string LambdaElement::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [l, s] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << s.str() << ")";
        if (l.length() > 0) {
            os << "*p_(";
            for (size_t i = 0; i < l.parts().size(); ++i)
                os << (i ? "," : "") << l.parts()[i];
            os << ")";
        }
    }
    return os.str();
}

Scalar inner_product(const LambdaElement& f, const LambdaElement& g) {
    Scalar s;
    for (const auto& [l, a] : f.terms()) {
        auto it = g.terms().find(l);
        if (it == g.terms().end()) continue;
        s += (a * it->second).times(z_factor(l));
    }
    return s;
}

LambdaElement complete_homogeneous(int k) {
    LambdaElement h;
    if (k < 0) return h;
    for (const auto& lambda : partitions_of(k))
        h.add_term(lambda, Scalar(rat(1) / z_factor(lambda)));
    return h;
}

LambdaElement schur(const Partition& lambda) {
    const int l = lambda.length();
    if (l == 0) return LambdaElement::one();
    // det[h_{lambda_i - i + j}] by subset dynamic programming over columns
    std::vector<std::vector<LambdaElement>> m(l, std::vector<LambdaElement>(l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) m[i][j] = complete_homogeneous(lambda.parts()[i] - i + j);
    std::map<unsigned, LambdaElement> dp;
    dp[0] = LambdaElement::one();
    for (int i = 0; i < l; ++i) {
        std::map<unsigned, LambdaElement> next;
        for (const auto& [used, val] : dp) {
            for (int j = 0; j < l; ++j) {
                if (used & (1u << j)) continue;
                if (m[i][j].is_zero()) continue;
                int inv = 0;  // sign: inversions added by assigning column j to row i
                for (int t = j + 1; t < l; ++t)
                    if (used & (1u << t)) ++inv;
                LambdaElement contrib = val * m[i][j];
                next[used | (1u << j)] += (inv % 2 == 0) ? contrib : -contrib;
            }
        }
        dp = std::move(next);
    }
    auto it = dp.find((1u << l) - 1);
    return it == dp.end() ? LambdaElement() : it->second;
}

}  // namespace qkdv
