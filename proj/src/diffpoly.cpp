#include "qkdv/diffpoly.hpp"

#include <algorithm>
#include <sstream>

#include "qkdv/linalg.hpp"

namespace qkdv {

int mon_u_weight(const DiffMon& m) {
    int w = 0;
    for (int i : m) w += i + 1;
    return w;
}

int mon_parity(const DiffMon& m) {
    int s = 0;
    for (int i : m) s += i;
    return s & 1;
}

DiffPoly DiffPoly::u(int index, Scalar coeff) { return monomial({index}, std::move(coeff)); }

DiffPoly DiffPoly::monomial(DiffMon m, Scalar coeff) {
    std::sort(m.begin(), m.end());
    DiffPoly p;
    p.add_term(m, coeff);
    return p;
}

Scalar DiffPoly::coeff(const DiffMon& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar() : it->second;
}

int DiffPoly::u_degree() const {
    size_t d = 0;
    for (const auto& [m, s] : terms_) d = std::max(d, m.size());
    return static_cast<int>(d);
}

void DiffPoly::add_term(const DiffMon& m, const Scalar& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

DiffPoly DiffPoly::operator-() const {
    DiffPoly p;
    for (const auto& [m, s] : terms_) p.terms_.emplace(m, -s);
    return p;
}

DiffPoly DiffPoly::operator+(const DiffPoly& o) const {
    DiffPoly p = *this;
    p += o;
    return p;
}

DiffPoly DiffPoly::operator-(const DiffPoly& o) const {
    DiffPoly p = *this;
    p -= o;
    return p;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
    for (const auto& [m, s] : o.terms_) add_term(m, s);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
    for (const auto& [m, s] : o.terms_) add_term(m, -s);
    return *this;
}

DiffPoly DiffPoly::operator*(const DiffPoly& o) const {
    DiffPoly p;
    for (const auto& [ma, sa] : terms_)
        for (const auto& [mb, sb] : o.terms_) {
            DiffMon m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            std::inplace_merge(m.begin(), m.begin() + ma.size(), m.end());
            p.add_term(m, sa * sb);
        }
    return p;
}

DiffPoly DiffPoly::scaled(const Scalar& s) const {
    DiffPoly p;
    for (const auto& [m, c] : terms_) p.add_term(m, c * s);
    return p;
}

DiffPoly DiffPoly::derivative(int i) const {
    DiffPoly p;
    for (const auto& [m, s] : terms_) {
        auto lo = std::lower_bound(m.begin(), m.end(), i);
        if (lo == m.end() || *lo != i) continue;
        int mult = 0;
        for (auto it = lo; it != m.end() && *it == i; ++it) ++mult;
        DiffMon reduced = m;
        reduced.erase(std::lower_bound(reduced.begin(), reduced.end(), i));
        p.add_term(reduced, s.times(rat(mult)));
    }
    return p;
}

DiffPoly DiffPoly::subst_eps(const Rat& value) const {
    DiffPoly p;
    for (const auto& [m, s] : terms_) p.add_term(m, s.subst_eps(value));
    return p;
}

DiffPoly DiffPoly::subst_mu(const Rat& value) const {
    DiffPoly p;
    for (const auto& [m, s] : terms_) p.add_term(m, s.subst_mu(value));
    return p;
}

DiffPoly DiffPoly::with_truncation(int g) const {
    DiffPoly p;
    for (const auto& [m, s] : terms_) p.add_term(m, s.with_truncation(g));
    return p;
}

DiffPoly DiffPoly::eps_coefficient(int e) const {
    DiffPoly p;
    for (const auto& [m, s] : terms_) {
        Scalar filtered;
        for (const auto& [k, v] : s.terms())
            if (k.eps == e) filtered.add_term({k.c, 0, k.mu}, v);
        p.add_term(m, filtered);
    }
    return p;
}

std::string DiffPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, s] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (m.empty()) {
            os << "(" << s.str() << ")";
            continue;
        }
        os << "(" << s.str() << ")";
        int i = 0;
        while (i < static_cast<int>(m.size())) {
            int j = i;
            while (j < static_cast<int>(m.size()) && m[j] == m[i]) ++j;
            os << "*u" << m[i];
            if (j - i > 1) os << "^" << (j - i);
            i = j;
        }
    }
    return os.str();
}

DiffPoly dx(const DiffPoly& p) {
    DiffPoly out;
    for (const auto& [m, s] : p.terms()) {
        for (size_t pos = 0; pos < m.size(); ++pos) {
            if (pos > 0 && m[pos] == m[pos - 1]) continue;  // group equal indices
            int mult = 1;
            for (size_t t = pos + 1; t < m.size() && m[t] == m[pos]; ++t) ++mult;
            DiffMon raised = m;
            raised[pos + mult - 1] += 1;  // keep sorted: bump the last copy
            std::sort(raised.begin(), raised.end());
            out.add_term(raised, s.times(rat(mult)));
        }
    }
    return out;
}

DiffPoly dx_pow(const DiffPoly& p, int n) {
    DiffPoly out = p;
    for (int i = 0; i < n; ++i) out = dx(out);
    return out;
}

namespace {

/// Monomials with `deg` factors and u-weight `uw` (i.e. index sum uw - deg).
void monomials_of(int deg, int index_sum, int max_index, DiffMon& stack,
                  std::vector<DiffMon>& out) {
    if (deg == 0) {
        if (index_sum == 0) out.push_back(stack);
        return;
    }
    for (int i = std::min(index_sum, max_index); i >= 0; --i) {
        if (index_sum - i > (deg - 1) * i) continue;  // remaining slots have index <= i
        stack.push_back(i);
        monomials_of(deg - 1, index_sum - i, i, stack, out);
        stack.pop_back();
    }
}

std::vector<DiffMon> monomials_with(int deg, int u_weight) {
    std::vector<DiffMon> out;
    if (deg < 0 || u_weight < deg) return out;
    DiffMon stack;
    monomials_of(deg, u_weight - deg, u_weight - deg, stack, out);
    for (auto& m : out) std::sort(m.begin(), m.end());
    return out;
}

}  // namespace

DiffPoly dx_invert(const DiffPoly& p) {
    if (p.is_zero()) return DiffPoly();
    // Group the target terms by (parameter key, degree, u-weight); each group
    // is solved independently since dx preserves the key and the degree and
    // raises the u-weight by exactly 1.
    struct Component {
        std::map<DiffMon, GaussRat> rhs;
    };
    std::map<std::tuple<ParamKey, int, int>, Component> comps;
    int trunc = 0;
    for (const auto& [m, s] : p.terms()) {
        if (s.truncation() > 0) trunc = s.truncation();
        for (const auto& [key, val] : s.terms()) {
            if (m.empty()) throw NotInImage("dx_invert: nonzero constant term");
            comps[{key, static_cast<int>(m.size()), mon_u_weight(m)}].rhs[m] = val;
        }
    }
    DiffPoly result;
    for (const auto& [tag, comp] : comps) {
        const auto& [key, deg, uw] = tag;
        std::vector<DiffMon> candidates = monomials_with(deg, uw - 1);
        if (candidates.empty()) throw NotInImage("dx_invert: empty candidate component");
        // rows: all monomials reachable from candidates plus the targets
        std::map<DiffMon, int> row_of;
        auto row_index = [&row_of](const DiffMon& m) {
            return row_of.try_emplace(m, static_cast<int>(row_of.size())).first->second;
        };
        std::vector<std::map<int, Rat>> col_entries(candidates.size());
        for (size_t c = 0; c < candidates.size(); ++c) {
            DiffPoly img = dx(DiffPoly::monomial(candidates[c]));
            for (const auto& [m, s] : img.terms())
                col_entries[c][row_index(m)] = s.rational_value();
        }
        for (const auto& [m, v] : comp.rhs) row_index(m);
        const int rows = static_cast<int>(row_of.size());
        const int cols = static_cast<int>(candidates.size());
        std::vector<std::vector<GaussRat>> a(rows, std::vector<GaussRat>(cols, GaussRat()));
        std::vector<GaussRat> b(rows, GaussRat());
        for (int c = 0; c < cols; ++c)
            for (const auto& [r, val] : col_entries[c]) a[r][c] = GaussRat(val);
        for (const auto& [m, v] : comp.rhs) b[row_of[m]] = v;
        auto sol = solve_linear(std::move(a), std::move(b), cols);
        if (!sol.consistent) throw NotInImage("dx_invert: no antiderivative exists");
        for (int c = 0; c < cols; ++c) {
            if (sol.solution[c].is_zero()) continue;
            result.add_term(candidates[c], Scalar::term(key, sol.solution[c], trunc));
        }
    }
    return result;
}

std::map<int, DiffPoly> weight_decompose(const DiffPoly& p) {
    std::map<int, DiffPoly> out;
    for (const auto& [m, s] : p.terms()) {
        int uw = mon_u_weight(m);
        for (auto& [pw, part] : s.split_by_weight()) out[uw + pw].add_term(m, part);
    }
    return out;
}

bool is_weight_homogeneous(const DiffPoly& p, int w) {
    auto parts = weight_decompose(p);
    if (parts.empty()) return true;
    return parts.size() == 1 && parts.begin()->first == w;
}

std::pair<DiffPoly, DiffPoly> parity_split(const DiffPoly& p) {
    DiffPoly even, odd;
    for (const auto& [m, s] : p.terms()) (mon_parity(m) == 0 ? even : odd).add_term(m, s);
    return {even, odd};
}

Rat bernoulli(int k) {
    static std::vector<Rat> table = {rat(1), rat(-1, 2)};
    for (int m = static_cast<int>(table.size()); m <= k; ++m) {
        // sum_{j=0}^{m} C(m+1,j) B_j = 0  for m >= 1
        Rat acc(0);
        for (int j = 0; j < m; ++j) acc += binomial(m + 1, j) * table[j];
        table.push_back(-acc / binomial(m + 1, m));
    }
    return table[k];
}

Rat nu_coeff(int i, int j) {
    if ((i - j) % 2 != 0) return rat(0);
    Rat v = bernoulli(i + j + 2) / rat(i + j + 2);
    return (((i - j) / 2) % 2 != 0) ? -v : v;
}

namespace {

/// -1/2 sum_{i,j >= 0} nu_{i,j} d^2/du_i du_j (ordered index pairs), sign s.
DiffPoly b_quadratic(const DiffPoly& p, int sign) {
    DiffPoly out;
    for (const auto& [m, s] : p.terms()) {
        if (m.size() < 2) continue;
        std::vector<std::pair<int, int>> idx;  // distinct index, multiplicity
        for (int v : m) {
            if (!idx.empty() && idx.back().first == v)
                ++idx.back().second;
            else
                idx.emplace_back(v, 1);
        }
        for (size_t a = 0; a < idx.size(); ++a) {
            for (size_t b = a; b < idx.size(); ++b) {
                int i = idx[a].first, j = idx[b].first;
                Rat nu = nu_coeff(i, j);
                if (sgn(nu) == 0) continue;
                Rat count;  // d^2/du_i du_j coefficient, counting both orders for i != j
                DiffMon reduced = m;
                if (a == b) {
                    if (idx[a].second < 2) continue;
                    count = rat(idx[a].second) * rat(idx[a].second - 1);
                    auto it = std::lower_bound(reduced.begin(), reduced.end(), i);
                    reduced.erase(it, it + 2);
                } else {
                    count = rat(2) * rat(idx[a].second) * rat(idx[b].second);
                    reduced.erase(std::lower_bound(reduced.begin(), reduced.end(), j));
                    reduced.erase(std::lower_bound(reduced.begin(), reduced.end(), i));
                }
                out.add_term(reduced, s.times(rat(-sign, 2) * nu * count));
            }
        }
    }
    return out;
}

}  // namespace

DiffPoly b_operator(const DiffPoly& p, bool inverse) {
    const int sign = inverse ? -1 : 1;
    DiffPoly acc = p, cur = p;
    long s = 0;
    while (true) {
        cur = b_quadratic(cur, sign);
        if (cur.is_zero()) break;
        ++s;
        cur = cur.scaled(rat(1, s));
        acc += cur;
    }
    return acc;
}

DiffPoly d_operator(const DiffPoly& p) {
    DiffPoly out;
    for (const auto& [m, s] : p.terms()) out.add_term(m, s.eps_mu_scaled());
    return out;
}

DiffPoly u0_integrate(const DiffPoly& p) {
    DiffPoly out;
    for (const auto& [m, s] : p.terms()) {
        int zeros = 0;
        for (int v : m) {
            if (v != 0) break;
            ++zeros;
        }
        DiffMon lifted = m;
        lifted.insert(lifted.begin(), 0);
        out.add_term(lifted, s.div(rat(zeros + 1)));
    }
    return out;
}

HbarPoly hbar_normalize(const DiffPoly& p, int level) {
    HbarPoly out;
    for (const auto& [m, s] : p.terms()) {
        const int deg = static_cast<int>(m.size());
        for (const auto& [key, val] : s.terms()) {
            int half_exp = (level + 2) - deg - key.eps + key.mu;
            out.parts[half_exp].add_term(m, Scalar::term(key, val, s.truncation()));
        }
    }
    for (auto it = out.parts.begin(); it != out.parts.end();)
        it = it->second.is_zero() ? out.parts.erase(it) : std::next(it);
    return out;
}

}  // namespace qkdv
