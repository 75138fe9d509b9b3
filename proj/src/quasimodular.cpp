#include "qkdv/quasimodular.hpp"

#include <mutex>
#include <sstream>

#include "qkdv/diffpoly.hpp"
#include "qkdv/linalg.hpp"

namespace qkdv {

QMPoly QMPoly::generator(int k) {
    switch (k) {
        case 2: return term_of({1, 0, 0}, Scalar(1));
        case 4: return term_of({0, 1, 0}, Scalar(1));
        case 6: return term_of({0, 0, 1}, Scalar(1));
        default: throw std::invalid_argument("QMPoly::generator: k must be 2, 4 or 6");
    }
}

QMPoly QMPoly::term_of(QMKey key, Scalar coeff) {
    QMPoly f;
    f.add_term(key, coeff);
    return f;
}

Scalar QMPoly::coeff(const QMKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Scalar() : it->second;
}

void QMPoly::add_term(const QMKey& key, const Scalar& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

QMPoly QMPoly::operator-() const {
    QMPoly f;
    for (const auto& [k, s] : terms_) f.terms_.emplace(k, -s);
    return f;
}

QMPoly QMPoly::operator+(const QMPoly& o) const {
    QMPoly f = *this;
    f += o;
    return f;
}

QMPoly& QMPoly::operator+=(const QMPoly& o) {
    for (const auto& [k, s] : o.terms_) add_term(k, s);
    return *this;
}

QMPoly QMPoly::operator-(const QMPoly& o) const {
    QMPoly f = *this;
    for (const auto& [k, s] : o.terms_) f.add_term(k, -s);
    return f;
}

QMPoly QMPoly::operator*(const QMPoly& o) const {
    QMPoly f;
    for (const auto& [ka, sa] : terms_)
        for (const auto& [kb, sb] : o.terms_) f.add_term(ka + kb, sa * sb);
    return f;
}

QMPoly QMPoly::scaled(const Scalar& s) const {
    QMPoly f;
    for (const auto& [k, c] : terms_) f.add_term(k, c * s);
    return f;
}

QMPoly QMPoly::subst_c(const Rat& value) const {
    QMPoly f;
    for (const auto& [k, s] : terms_) f.add_term(k, s.subst_c(value));
    return f;
}

QMPoly QMPoly::d2_dc2() const {
    QMPoly f;
    for (const auto& [k, s] : terms_) f.add_term(k, s.d2_dc2());
    return f;
}

std::string QMPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, s] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << s.str() << ")";
        auto put = [&](const char* name, int e) {
            if (e == 0) return;
            os << "*" << name;
            if (e > 1) os << "^" << e;
        };
        put("G2", k.g2);
        put("G4", k.g4);
        put("G6", k.g6);
    }
    return os.str();
}

QSeries eisenstein(int k, int order) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("eisenstein: k must be even >= 2");
    QSeries g(order);
    g[0] = Scalar(-bernoulli(k) / rat(2 * k));
    for (int n = 1; n <= order; ++n) {
        Rat sigma(0);
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) sigma += rat_pow(rat(d), k - 1);
        g[n] = Scalar(sigma);
    }
    return g;
}

QSeries qm_to_series(const QMPoly& f, int order) {
    int max2 = 0, max4 = 0, max6 = 0;
    for (const auto& [k, s] : f.terms()) {
        max2 = std::max(max2, k.g2);
        max4 = std::max(max4, k.g4);
        max6 = std::max(max6, k.g6);
    }
    auto powers = [order](int k, int maxexp) {
        std::vector<QSeries> p{QSeries(order, Scalar(1))};
        if (maxexp > 0) {
            QSeries g = eisenstein(k, order);
            for (int e = 1; e <= maxexp; ++e) p.push_back(p.back() * g);
        }
        return p;
    };
    auto p2 = powers(2, max2), p4 = powers(4, max4), p6 = powers(6, max6);
    QSeries out(order);
    for (const auto& [k, s] : f.terms()) out = out + (p2[k.g2] * p4[k.g4] * p6[k.g6]).scaled(s);
    return out;
}

static std::vector<QMKey> qm_monomials(int max_weight) {
    std::vector<QMKey> keys;
    for (int a = 0; 2 * a <= max_weight; ++a)
        for (int b = 0; 2 * a + 4 * b <= max_weight; ++b)
            for (int c = 0; 2 * a + 4 * b + 6 * c <= max_weight; ++c) keys.push_back({a, b, c});
    return keys;
}

int qm_monomial_count(int max_weight) { return static_cast<int>(qm_monomials(max_weight).size()); }

QMPoly recognize(const QSeries& s, int max_weight) {
    const int order = s.order();
    const auto keys = qm_monomials(std::max(max_weight, 0));
    const int cols = static_cast<int>(keys.size());
    if (order < cols + 5)
        throw InsufficientOrder("recognize: need q-order >= " + std::to_string(cols + 5) +
                                ", have " + std::to_string(order));
    std::vector<QSeries> expansions;
    expansions.reserve(cols);
    for (const auto& k : keys)
        expansions.push_back(qm_to_series(QMPoly::term_of(k, Scalar(1)), order));

    // The coefficient ring splits over the parameter multidegrees; solve one
    // exact linear system per key appearing in the series.
    std::map<ParamKey, std::vector<GaussRat>> rhs;
    int trunc = 0;
    for (int n = 0; n <= order; ++n) {
        if (s[n].truncation() > 0) trunc = s[n].truncation();
        for (const auto& [pk, v] : s[n].terms()) {
            auto [it, ins] = rhs.try_emplace(pk, std::vector<GaussRat>(order + 1));
            it->second[n] = v;
        }
    }
    QMPoly result;
    for (auto& [pk, b] : rhs) {
        std::vector<std::vector<GaussRat>> a(order + 1, std::vector<GaussRat>(cols));
        for (int c = 0; c < cols; ++c)
            for (int n = 0; n <= order; ++n) a[n][c] = expansions[c][n].coeff({});
        auto sol = solve_linear(std::move(a), std::move(b), cols);
        if (sol.consistent && sol.rank < cols)
            throw InsufficientOrder("recognize: rank-deficient system, raise the q-order");
        if (!sol.consistent)
            throw NotRecognized("recognize: not quasimodular of weight <= " +
                                std::to_string(max_weight) + " at parameter degree (c,eps,mu)=(" +
                                std::to_string(pk.c) + "," + std::to_string(pk.eps) + "," +
                                std::to_string(pk.mu) + ")");
        for (int c = 0; c < cols; ++c)
            if (!sol.solution[c].is_zero())
                result.add_term(keys[c], Scalar::term(pk, sol.solution[c], trunc));
    }
    return result;
}

const QMPoly& eisenstein_qmpoly(int k) {
    static std::map<int, QMPoly> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    QMPoly f;
    if (k == 2 || k == 4 || k == 6)
        f = QMPoly::generator(k);
    else
        f = recognize(eisenstein(k, qm_monomial_count(k) + 6), k);
    return cache.emplace(k, std::move(f)).first->second;
}

std::map<int, QMPoly> weight_split(const QMPoly& f) {
    std::map<int, QMPoly> out;
    for (const auto& [k, s] : f.terms())
        for (const auto& [w, part] : s.split_by_weight()) out[k.weight() + w].add_term(k, part);
    return out;
}

bool is_homogeneous(const QMPoly& f, int w) {
    auto parts = weight_split(f);
    if (parts.empty()) return true;
    return parts.size() == 1 && parts.begin()->first == w;
}

QMPoly frak_d(const QMPoly& f) {
    QMPoly out;
    for (const auto& [k, s] : f.terms()) {
        if (k.g2 == 0) continue;
        out.add_term({k.g2 - 1, k.g4, k.g6}, s.times(rat(-k.g2, 2)));
    }
    return out;
}

namespace {

/// Coefficients h_nu of the homogeneous bivariate polynomial
/// H(x,y) = sum_{pi in S3} x^{a1'} (-y)^{a2'} (y-x)^{a3'}.
std::vector<Rat> triple_polynomial(int a1, int a2, int a3) {
    const int n = a1 + a2 + a3;
    std::vector<Rat> h(n + 1, rat(0));  // h[nu]: coefficient of x^nu y^{n-nu}
    int a[3] = {a1, a2, a3};
    int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& p : perms) {
        int A = a[p[0]], B = a[p[1]], C = a[p[2]];
        for (int k = 0; k <= C; ++k) {
            // x^A (-y)^B (y-x)^C: term C(C,k) y^k (-x)^{C-k}
            Rat coef = binomial(C, k) * rat_pow(rat(-1), B + C - k);
            h[A + C - k] += coef;
        }
    }
    return h;
}

}  // namespace

bool skoruppa_check(int a1, int a2, int a3, int order) {
    if (a1 <= 0 || a2 <= 0 || a3 <= 0 || (a1 + a2 + a3) % 2 != 0)
        throw std::invalid_argument("skoruppa_check: need positive a_i with even sum");
    const int n = a1 + a2 + a3;
    const auto h = triple_polynomial(a1, a2, a3);

    // precondition of the theorem: H(x,y) = H(y, y-x)
    std::vector<Rat> h2(n + 1, rat(0));
    for (int nu = 0; nu <= n; ++nu) {
        if (sgn(h[nu]) == 0) continue;
        // x^nu y^{n-nu} evaluated at (y, y-x): y^nu (y-x)^{n-nu}
        for (int k = 0; k <= n - nu; ++k)
            h2[n - nu - k] += h[nu] * binomial(n - nu, k) * rat_pow(rat(-1), n - nu - k);
    }
    if (h2 != h) return false;

    // h = -1/2 int_0^1 H(1,y) dy
    Rat hconst(0);
    for (int nu = 0; nu <= n; ++nu) hconst += h[nu] / rat(n - nu + 1);
    hconst = -hconst / rat(2);

    // series identity
    QSeries lhs(order);
    for (int nu = 1; nu < n; nu += 2) {
        if (sgn(h[nu]) == 0) continue;
        lhs = lhs + (eisenstein(nu + 1, order) * eisenstein(n + 1 - nu, order)).scaled(h[nu]);
    }
    QSeries rhs = eisenstein(n + 2, order).scaled(hconst) -
                  eisenstein(n, order).q_ddq().scaled(h[1] / rat(n));
    if (!(lhs == rhs)) return false;

    // Bernoulli constant-term consequence, with b_k = B_k / k
    auto b = [](int k) { return bernoulli(k) / rat(k); };
    Rat lhs_b(0);
    for (int nu = 1; nu < n; nu += 2) lhs_b += h[nu] * b(nu + 1) * b(n + 1 - nu);
    return lhs_b == rat(-2) * hconst * b(n + 2);
}

}  // namespace qkdv
