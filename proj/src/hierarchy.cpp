#include "qkdv/hierarchy.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>

namespace qkdv {

int PPolynomial::degree() const {
    for (int j = static_cast<int>(coef.size()) - 1; j >= 0; --j)
        if (sgn(coef[j]) != 0) return j;
    return -1;
}

std::string PPolynomial::str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t j = 0; j < coef.size(); ++j) {
        if (sgn(coef[j]) == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << rat_str(coef[j]) << ")";
        if (j == 1) os << "*xi";
        if (j > 1) os << "*xi^" << j;
    }
    if (first) os << "0";
    return os.str();
}

namespace {

/// Values of tilde-P at xi = 0..top: convolution of the sequences a^{l_i}.
std::vector<Rat> ptilde_values(const std::vector<int>& ell, int top) {
    std::vector<Rat> conv(top + 1, rat(0));
    conv[0] = rat(1);  // empty product: only the all-zero composition
    for (int l : ell) {
        std::vector<Rat> next(top + 1, rat(0));
        for (int x = 0; x <= top; ++x) {
            if (sgn(conv[x]) == 0) continue;
            for (int a = 0; x + a <= top; ++a) {
                Rat f = (a == 0 && l > 0) ? rat(0) : rat_pow(rat(a), l);  // 0^0 = 1
                if (sgn(f) != 0) next[x + a] += conv[x] * f;
            }
        }
        conv = std::move(next);
    }
    return conv;
}

/// Exact polynomial interpolation through (x_t, v_t), t = 0..deg.
std::vector<Rat> lagrange(const std::vector<Rat>& xs, const std::vector<Rat>& vs) {
    const int m = static_cast<int>(xs.size());
    // master polynomial prod (xi - x_t)
    std::vector<Rat> master(m + 1, rat(0));
    master[0] = rat(1);
    for (int t = 0; t < m; ++t) {
        for (int j = t + 1; j >= 1; --j) master[j] = master[j - 1] - xs[t] * master[j];
        master[0] = -xs[t] * master[0];
    }
    std::vector<Rat> out(m, rat(0));
    for (int t = 0; t < m; ++t) {
        // synthetic division by (xi - x_t)
        std::vector<Rat> qpoly(m, rat(0));
        Rat carry(0);
        for (int j = m; j >= 1; --j) {
            qpoly[j - 1] = master[j] + carry;
            carry = qpoly[j - 1] * xs[t];
        }
        Rat denom(1);
        for (int s = 0; s < m; ++s)
            if (s != t) denom *= xs[t] - xs[s];
        Rat w = vs[t] / denom;
        for (int j = 0; j < m; ++j) out[j] += w * qpoly[j];
    }
    return out;
}

}  // namespace

PPolynomial p_polynomial(const std::vector<int>& ell) {
    const int n = static_cast<int>(ell.size());
    int lsum = 0;
    for (int l : ell) lsum += l;
    const int deg = lsum + n - 1;
    PPolynomial p;
    p.index = ell;
    if (n == 0) {
        p.coef = {};
        return p;
    }
    auto values = ptilde_values(ell, deg + 1);
    std::vector<Rat> xs, vs;
    for (int x = 1; x <= deg + 1; ++x) {
        xs.push_back(rat(x));
        vs.push_back(values[x]);
    }
    std::vector<Rat> tilde = lagrange(xs, vs);
    p.coef.assign(deg + 1, rat(0));
    for (int j = 0; j <= deg; ++j) {
        int par = n - 1 - j + lsum;
        if (par % 2 != 0) continue;
        p.coef[j] = ((par / 2) % 2 != 0) ? -tilde[j] : tilde[j];
    }
    return p;
}

PPolynomial p_polynomial_closed(int ell, int m) {
    PPolynomial p;
    p.index = {ell, m};
    p.coef.assign(ell + m + 2, rat(0));
    p.coef[ell + m + 1] = factorial(ell) * factorial(m) / factorial(ell + m + 1);
    for (int i = 0; 2 * i + 1 <= ell + m; ++i) {
        Rat b = bernoulli(2 * i + 2) / rat(2 * i + 2);
        Rat s1 = binomial(ell, 2 * i + 1 - m) * rat_pow(rat(-1), ell + i);
        Rat s2 = binomial(m, 2 * i + 1 - ell) * rat_pow(rat(-1), m + i);
        p.coef[ell + m - 2 * i - 1] += b * (s1 + s2);
    }
    return p;
}

namespace {

const PPolynomial& p_poly_cached(std::vector<int> ell) {
    static std::map<std::vector<int>, PPolynomial> cache;
    static std::mutex mtx;
    std::sort(ell.begin(), ell.end());  // tilde-P is symmetric in the indices
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(ell);
    if (it == cache.end()) it = cache.emplace(ell, p_polynomial(ell)).first;
    return it->second;
}

std::vector<int> present_indices(const DiffPoly& p) {
    std::vector<int> idx;
    for (const auto& [m, s] : p.terms())
        for (int i : m)
            if (!std::binary_search(idx.begin(), idx.end(), i))
                idx.insert(std::upper_bound(idx.begin(), idx.end(), i), i);
    return idx;
}

/// All ordered derivative tuples of length n with nonzero iterated derivative.
void derivative_tuples(const DiffPoly& p, int n, std::vector<int>& tuple,
                       std::vector<std::pair<std::vector<int>, DiffPoly>>& out) {
    if (n == 0) {
        out.emplace_back(tuple, p);
        return;
    }
    for (int i : present_indices(p)) {
        DiffPoly d = p.derivative(i);
        if (d.is_zero()) continue;
        tuple.push_back(i);
        derivative_tuples(d, n - 1, tuple, out);
        tuple.pop_back();
    }
}

}  // namespace

DiffPoly commutator_bracket(const DiffPoly& f, const DiffPoly& g) {
    DiffPoly out;
    const int nmax = std::min(f.u_degree(), g.u_degree());
    for (int n = 1; n <= nmax; ++n) {
        std::vector<std::pair<std::vector<int>, DiffPoly>> fparts, gparts;
        std::vector<int> tuple;
        derivative_tuples(f, n, tuple, fparts);
        derivative_tuples(g, n, tuple, gparts);
        if (fparts.empty() || gparts.empty()) continue;
        Rat pref = rat((n % 2) ? 1 : -1) / factorial(n);
        for (const auto& [r, dg] : gparts) {
            int rsum = 0;
            for (int x : r) rsum += x;
            Rat sign_r = (rsum % 2) ? rat(-1) : rat(1);
            std::vector<DiffPoly> dx_powers{dg};
            for (const auto& [s, df] : fparts) {
                std::vector<int> ell(n);
                for (int i = 0; i < n; ++i) ell[i] = r[i] + s[i] + 1;
                const PPolynomial& p = p_poly_cached(ell);
                while (static_cast<int>(dx_powers.size()) <= p.degree())
                    dx_powers.push_back(dx(dx_powers.back()));
                DiffPoly pdx;
                for (int j = 0; j <= p.degree(); ++j) {
                    if (sgn(p.coef[j]) == 0) continue;
                    pdx += dx_powers[j].scaled(p.coef[j]);
                }
                out += (df * pdx).scaled(pref * sign_r);
            }
        }
    }
    return out;
}

const DiffPoly& DensityTable::at(int k) const {
    auto it = densities.find(k);
    if (it == densities.end())
        throw std::out_of_range("DensityTable: no density " + std::to_string(k));
    return it->second;
}

namespace {

Scalar eps_minus_mu(Hierarchy mode, int trunc) {
    Scalar s = Scalar::eps_var();
    if (mode == Hierarchy::ilw) s -= Scalar::mu_var();
    return s.with_truncation(trunc);
}

Scalar eps_mu_power(Hierarchy mode, int g, int trunc) {
    // (eps*mu)^{g-1}; zero for g >= 2 in kdv mode (mu = 0)
    if (mode == Hierarchy::kdv) return g == 1 ? Scalar(1) : Scalar();
    return Scalar::term({0, g - 1, g - 1}, GaussRat(Rat(1)), trunc);
}

/// u0^2/2 + (eps-mu) sum_g (eps mu)^{g-1} |B_2g|/(2g)! u_{2g}
DiffPoly r1_kernel(Hierarchy mode, int genus) {
    const int trunc = mode == Hierarchy::ilw ? genus : 0;
    DiffPoly k = DiffPoly::monomial({0, 0}, Scalar(rat(1, 2)).with_truncation(trunc));
    for (int g = 1; g <= (mode == Hierarchy::kdv ? 1 : genus); ++g) {
        Scalar coef = eps_minus_mu(mode, trunc) * eps_mu_power(mode, g, trunc);
        Rat bn = abs(bernoulli(2 * g)) / factorial(2 * g);
        k += DiffPoly::u(2 * g, coef.times(bn));
    }
    return k;
}

}  // namespace

DiffPoly ilw_g1(Hierarchy mode, int genus) {
    if (mode == Hierarchy::ilw && genus < 1)
        throw std::invalid_argument("ilw_g1: genus cutoff must be >= 1");
    const int trunc = mode == Hierarchy::ilw ? genus : 0;
    Scalar one = Scalar(1).with_truncation(trunc);
    DiffPoly g1 = DiffPoly::monomial({0, 0, 0}, one.times(rat(1, 6)));
    g1 += DiffPoly::u(0, one.times(rat(-1, 24)));
    for (int g = 1; g <= (mode == Hierarchy::kdv ? 1 : genus); ++g) {
        Scalar coef = eps_minus_mu(mode, trunc) * eps_mu_power(mode, g, trunc);
        coef = coef.times(abs(bernoulli(2 * g)) / (rat(2) * factorial(2 * g)));
        DiffPoly block = DiffPoly::monomial({0, 2 * g});
        block -= DiffPoly(Scalar(abs(bernoulli(2 * g + 2)) / rat(2 * g + 2)));
        g1 += block.scaled(coef);
    }
    return g1;
}

DiffPoly r1_ilw(const DiffPoly& g, Hierarchy mode, int genus) {
    DiffPoly kernel = r1_kernel(mode, genus);
    DiffPoly out;
    for (int i : present_indices(g)) {
        DiffPoly dgi = g.derivative(i);
        if (dgi.is_zero()) continue;
        out += dx_pow(kernel, i + 1) * dgi;
    }
    // -1/2 sum (i+1)!(j+1)!/(i+j+3)! u_{i+j+3} d^2/du_i du_j over ordered pairs
    auto idx = present_indices(g);
    for (int i : idx)
        for (int j : idx) {
            DiffPoly d2 = g.derivative(i).derivative(j);
            if (d2.is_zero()) continue;
            Rat coef = rat(-1, 2) * factorial(i + 1) * factorial(j + 1) / factorial(i + j + 3);
            out += DiffPoly::u(i + j + 3, Scalar(coef)) * d2;
        }
    return out;
}

DiffPoly r2_ilw(const DiffPoly& g) {
    DiffPoly out;
    auto idx = present_indices(g);
    for (int i : idx)
        for (int j : idx) {
            DiffPoly d2 = g.derivative(i).derivative(j);
            if (d2.is_zero()) continue;
            for (int l = 0; 2 * l <= i + j + 1; ++l) {
                Rat b = bernoulli(2 * l + 2) / rat(2 * l + 2);
                Rat s1 = binomial(i + 1, 2 * l - j) * rat_pow(rat(-1), i + l);
                Rat s2 = binomial(j + 1, 2 * l - i) * rat_pow(rat(-1), j + l);
                Rat coef = b * (s1 + s2);
                if (sgn(coef) == 0) continue;
                out += DiffPoly::u(i + j + 1 - 2 * l, Scalar(coef)) * d2;
            }
        }
    return out;
}

DensityTable reduced_densities(Hierarchy mode, int k_max, int genus) {
    if (k_max < -1) throw std::invalid_argument("reduced_densities: k_max >= -1");
    if (mode == Hierarchy::ilw && genus < 1)
        throw std::invalid_argument("reduced_densities: ilw needs genus >= 1");
    const int trunc = mode == Hierarchy::ilw ? genus : 0;
    DensityTable t;
    t.mode = mode;
    t.genus = trunc;
    t.k_max = k_max;
    t.reduced = true;
    t.densities[-2] = DiffPoly(Scalar(1).with_truncation(trunc));
    t.densities[-1] = DiffPoly::u(0, Scalar(1).with_truncation(trunc));
    for (int k = -1; k < k_max; ++k) {
        DiffPoly rhs = r1_ilw(t.at(k), mode, genus);
        // invert (k+2+D) termwise: the grading is diagonal on parameter keys
        DiffPoly scaled;
        for (const auto& [m, s] : rhs.terms())
            scaled.add_term(m, s.map_terms([k](const ParamKey& key, const GaussRat& v) {
                return v * GaussRat(rat(1) / rat(k + 2 + key.eps_mu_degree()));
            }));
        DiffPoly next;
        try {
            next = dx_invert(scaled);
        } catch (const NotInImage& e) {
            throw RecursionInconsistent(std::string("density recursion at k=") +
                                        std::to_string(k + 1) + ": " + e.what());
        }
        if (!(next.derivative(0) == t.at(k)))
            throw RecursionInconsistent("density recursion: u0-derivative mismatch at k=" +
                                        std::to_string(k + 1));
        t.densities[k + 1] = std::move(next);
    }
    return t;
}

DensityTable densities(Hierarchy mode, int k_max, int genus) {
    if (k_max < -2) throw std::invalid_argument("densities: k_max >= -2");
    DensityTable t = reduced_densities(mode, std::max(k_max, -1), genus);
    t.reduced = false;
    t.k_max = k_max;
    for (auto& [k, g] : t.densities) g = b_operator(g);
    while (!t.densities.empty() && t.densities.rbegin()->first > k_max)
        t.densities.erase(std::prev(t.densities.end()));
    return t;
}

bool ilw_stabilization_check(int k_max, int genus) {
    DensityTable a = densities(Hierarchy::ilw, k_max, genus);
    DensityTable b = densities(Hierarchy::ilw, k_max, genus + 1);
    for (int k = -2; k <= k_max; ++k)
        if (!(b.at(k).with_truncation(genus) == a.at(k))) return false;
    return true;
}

namespace {

std::vector<DiffPoly> series_mult(const std::vector<DiffPoly>& a, const std::vector<DiffPoly>& b) {
    std::vector<DiffPoly> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; i + j < out.size(); ++j) {
            if (b[j].is_zero()) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

}  // namespace

std::map<int, DiffPoly> eliashberg_densities(int k_max, bool reduced) {
    const int top = k_max + 2;
    if (top < 0) return {};
    // A(y) = y S(i y d/dx) u0 = sum_t (-1)^t / (4^t (2t+1)!) u_{2t} y^{2t+1}
    std::vector<DiffPoly> a(top + 1);
    for (int t = 0; 2 * t + 1 <= top; ++t) {
        Rat coef = rat_pow(rat(-1), t) / (rat_pow(rat(4), t) * factorial(2 * t + 1));
        a[2 * t + 1] = DiffPoly::u(2 * t, Scalar(coef));
    }
    std::vector<DiffPoly> expo(top + 1);
    expo[0] = DiffPoly(1);
    std::vector<DiffPoly> cur = expo;
    for (int s = 1; s <= top; ++s) {
        cur = series_mult(cur, a);
        bool zero = true;
        for (size_t i = 0; i < cur.size(); ++i) {
            cur[i] = cur[i].scaled(rat(1, s));
            if (!cur[i].is_zero()) zero = false;
            expo[i] += cur[i];
        }
        if (zero) break;
    }
    if (!reduced) {
        // divide by S(y): multiply by the reciprocal series
        std::vector<Rat> s_series(top + 1, rat(0));
        for (int t = 0; 2 * t <= top; ++t)
            s_series[2 * t] = rat(1) / (rat_pow(rat(4), t) * factorial(2 * t + 1));
        std::vector<Rat> inv(top + 1, rat(0));
        inv[0] = rat(1);
        for (int m = 1; m <= top; ++m) {
            Rat acc(0);
            for (int j = 1; j <= m; ++j) acc += s_series[j] * inv[m - j];
            inv[m] = -acc;
        }
        std::vector<DiffPoly> invp(top + 1);
        for (int m = 0; m <= top; ++m) invp[m] = DiffPoly(Scalar(inv[m]));
        expo = series_mult(expo, invp);
    }
    std::map<int, DiffPoly> out;
    for (int k = -2; k <= k_max; ++k) out[k] = expo[k + 2];
    return out;
}

Rat d_coeff(int j, int k) {
    if (k < 0 || j < 0 || j > 2 * k) return rat(0);
    static std::vector<std::vector<Rat>> rows = {{rat(1, 2)}};
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    while (static_cast<int>(rows.size()) <= k) {
        int kk = static_cast<int>(rows.size());  // build row kk from row kk-1
        const auto& prev = rows.back();
        auto prev_at = [&](int jj) {
            return (jj < 0 || jj > 2 * (kk - 1)) ? rat(0) : prev[jj];
        };
        std::vector<Rat> row(2 * kk + 1, rat(0));
        for (int jj = 0; jj <= 2 * kk; ++jj) {
            Rat rhs = binomial(2 * kk + 1, jj) / (rat(2) * factorial(kk)) +
                      rat(2) * (prev_at(jj - 3) + prev_at(jj));
            Rat left = (jj > 0) ? row[jj - 1] : rat(0);
            row[jj] = rhs / rat(2 * kk + 1) - left;
        }
        rows.push_back(std::move(row));
    }
    return rows[k][j];
}

bool d_genfun_check(int j_max, int k_max) {
    // F(x,y) = 1 / (2 sqrt(1-2x(1+y)^2) (1-2x(1-y+y^2)));
    // [x^k y^j] F = (2k+1)!! d(j,k)
    const int top_j = std::max(j_max, 2 * k_max);
    using YPoly = std::vector<Rat>;
    auto ymul = [&](const YPoly& p, const YPoly& q) {
        YPoly out(top_j + 1, rat(0));
        for (int i = 0; i <= top_j; ++i) {
            if (sgn(p[i]) == 0) continue;
            for (int j = 0; i + j <= top_j; ++j) out[i + j] += p[i] * q[j];
        }
        return out;
    };
    YPoly one_plus_y(top_j + 1, rat(0)), quad(top_j + 1, rat(0));
    one_plus_y[0] = rat(1);
    if (top_j >= 1) one_plus_y[1] = rat(1);
    quad[0] = rat(1);
    if (top_j >= 1) quad[1] = rat(-1);
    if (top_j >= 2) quad[2] = rat(1);
    // (1-z)^{-1/2} with z = 2x(1+y)^2: x^t coefficient C(2t,t)/2^t (1+y)^{2t}
    std::vector<YPoly> sq(k_max + 1), geo(k_max + 1);
    for (int t = 0; t <= k_max; ++t) {
        YPoly p(top_j + 1, rat(0));
        p[0] = binomial(2 * t, t) / rat_pow(rat(2), t);
        for (int s = 0; s < 2 * t; ++s) p = ymul(p, one_plus_y);
        sq[t] = p;
        YPoly q(top_j + 1, rat(0));
        q[0] = rat_pow(rat(2), t);
        for (int s = 0; s < t; ++s) q = ymul(q, quad);
        geo[t] = q;
    }
    for (int k = 0; k <= k_max; ++k) {
        YPoly fk(top_j + 1, rat(0));
        for (int t = 0; t <= k; ++t) {
            YPoly prod = ymul(sq[t], geo[k - t]);
            for (int j = 0; j <= top_j; ++j) fk[j] += prod[j];
        }
        Rat dfact = double_factorial(2 * k + 1);
        for (int j = 0; j <= top_j; ++j) {
            Rat expected = fk[j] / rat(2);
            if (!(expected == dfact * d_coeff(j, k))) return false;
        }
    }
    return true;
}

std::pair<DiffPoly, DiffPoly> epsilon_extremes(int k) {
    if (k < -1) throw std::invalid_argument("epsilon_extremes: k >= -1");
    DiffPoly leading =
        DiffPoly::u(2 * k + 2, Scalar(rat(1) / (rat_pow(rat(24), k + 1) * factorial(k + 1))));
    DiffPoly subleading;
    if (k >= 0) {
        Rat denom = rat_pow(rat(-4), k) * double_factorial(2 * k + 1);
        subleading = DiffPoly(Scalar(-bernoulli(2 * k + 2) / (denom * rat(4 * k + 4))));
        for (int j = 0; j <= 2 * k; ++j) {
            Rat c = d_coeff(j, k) / rat_pow(rat(24), k);
            if (sgn(c) == 0) continue;
            subleading += DiffPoly::monomial({j, 2 * k - j}, Scalar(c));
        }
    }
    return {leading, subleading};
}

QuantizedOperator g_infinity_operator(int k) {
    if (k < 0) throw std::invalid_argument("g_infinity_operator: k >= 0");
    Rat denom = rat_pow(rat(-4), k) * double_factorial(2 * k + 1);
    QuantizedOperator op = l_operator(2 * k + 2).scaled(Scalar(rat(1) / denom));
    if (k == 0) {
        PartitionFunction half_c2{
            "c^2/2", [](const Partition&) { return Scalar::term({2, 0, 0}, GaussRat(rat(1, 2))); }};
        op = op + QuantizedOperator::from_diagonal(half_c2);
    }
    return op;
}

namespace {

using EPoly = std::vector<Rat>;  // truncated eps-power series over Q

EPoly ep_mul(const EPoly& a, const EPoly& b) {
    EPoly out(a.size(), rat(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) == 0) continue;
        for (size_t j = 0; i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

EPoly ep_inv(const EPoly& a) {
    EPoly out(a.size(), rat(0));
    if (sgn(a[0]) == 0) throw std::domain_error("ep_inv: zero constant term");
    out[0] = rat(1) / a[0];
    for (size_t m = 1; m < a.size(); ++m) {
        Rat acc(0);
        for (size_t j = 1; j <= m; ++j) acc += a[j] * out[m - j];
        out[m] = -acc / a[0];
    }
    return out;
}

using EMatrix = std::vector<std::vector<EPoly>>;

/// Matrix of quantize(g) at c = 0 on Lambda_n in the Schur basis, as
/// eps-power series truncated at `order`.
EMatrix schur_matrix(const DiffPoly& g, const std::vector<LambdaElement>& schur_basis,
                     int order) {
    const int dim = static_cast<int>(schur_basis.size());
    QuantizedOperator op = quantize(g);
    EMatrix m(dim, std::vector<EPoly>(dim, EPoly(order + 1, rat(0))));
    for (int col = 0; col < dim; ++col) {
        LambdaElement image = op.apply(schur_basis[col]);
        for (int row = 0; row < dim; ++row) {
            Scalar coord = inner_product(schur_basis[row], image).subst_c(0);
            for (const auto& [key, v] : coord.terms()) {
                if (key.mu != 0 || key.c != 0)
                    throw std::logic_error("schur_matrix: unexpected parameter");
                if (!v.is_real()) throw std::logic_error("schur_matrix: complex entry");
                if (key.eps <= order) m[row][col][key.eps] = v.re;
            }
        }
    }
    return m;
}

}  // namespace

std::map<Partition, std::vector<Scalar>> perturbative_eigenvalues(int k, int n, int order) {
    if (n < 1 || order < 0 || k < -2)
        throw std::invalid_argument("perturbative_eigenvalues: need n >= 1, order >= 0, k >= -2");
    const int jmax = n;
    DensityTable table = densities(Hierarchy::kdv, std::max(k, jmax), 0);
    const auto& basis = partitions_cached(n);
    const int dim = static_cast<int>(basis.size());
    std::vector<LambdaElement> schur_basis;
    schur_basis.reserve(dim);
    for (const auto& lambda : basis) schur_basis.push_back(schur(lambda));

    std::vector<EMatrix> mats;  // G_0(0) .. G_jmax(0)
    for (int j = 0; j <= jmax; ++j) mats.push_back(schur_matrix(table.at(j), schur_basis, order));

    // eps^0 spectrum of the family; the Schur basis diagonalizes it
    std::vector<std::vector<Rat>> tuples(dim, std::vector<Rat>(jmax + 1));
    for (int j = 0; j <= jmax; ++j)
        for (int r = 0; r < dim; ++r)
            for (int col = 0; col < dim; ++col) {
                if (r != col && sgn(mats[j][r][col][0]) != 0)
                    throw std::logic_error("perturbative_eigenvalues: eps^0 not diagonal");
                if (r == col) tuples[r][j] = mats[j][r][col][0];
            }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (tuples[i] == tuples[j])
                throw DegenerateSpectrum(
                    "joint eps^0 spectrum fails to separate two partitions of " +
                    std::to_string(n));

    // separating rational combination A = sum_j t^j G_j(0)
    long tsep = 0;
    const long t_limit = static_cast<long>(dim) * dim * (jmax + 1) + 2;
    for (long t = 1; t <= t_limit && tsep == 0; ++t) {
        std::vector<Rat> a0(dim, rat(0));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= jmax; ++j) a0[i] += rat_pow(rat(t), j) * tuples[i][j];
        bool ok = true;
        for (int i = 0; ok && i < dim; ++i)
            for (int j = i + 1; ok && j < dim; ++j)
                if (a0[i] == a0[j]) ok = false;
        if (ok) tsep = t;
    }
    if (tsep == 0)
        throw DegenerateSpectrum("no separating combination found for Lambda_" +
                                 std::to_string(n));

    EMatrix amat(dim, std::vector<EPoly>(dim, EPoly(order + 1, rat(0))));
    for (int j = 0; j <= jmax; ++j) {
        Rat w = rat_pow(rat(tsep), j);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c)
                for (int s = 0; s <= order; ++s) amat[r][c][s] += w * mats[j][r][c][s];
    }
    std::vector<Rat> a0(dim);
    for (int i = 0; i < dim; ++i) a0[i] = amat[i][i][0];

    // Rayleigh-Schroedinger recursion with gauge diag(V_t) = 0
    // V[t][r][c]: order-t eigenvector correction matrix
    std::vector<std::vector<std::vector<Rat>>> v(
        order + 1, std::vector<std::vector<Rat>>(dim, std::vector<Rat>(dim, rat(0))));
    std::vector<std::vector<Rat>> evals(order + 1, std::vector<Rat>(dim, rat(0)));
    for (int i = 0; i < dim; ++i) {
        v[0][i][i] = rat(1);
        evals[0][i] = a0[i];
    }
    for (int t = 1; t <= order; ++t) {
        // R = sum_{s=1}^{t} A_s V_{t-s} - sum_{s=1}^{t-1} V_{t-s} E_s
        std::vector<std::vector<Rat>> r(dim, std::vector<Rat>(dim, rat(0)));
        for (int s = 1; s <= t; ++s)
            for (int i = 0; i < dim; ++i)
                for (int j2 = 0; j2 < dim; ++j2) {
                    Rat acc(0);
                    for (int m = 0; m < dim; ++m) acc += amat[i][m][s] * v[t - s][m][j2];
                    r[i][j2] += acc;
                }
        for (int s = 1; s <= t - 1; ++s)
            for (int i = 0; i < dim; ++i)
                for (int j2 = 0; j2 < dim; ++j2) r[i][j2] -= v[t - s][i][j2] * evals[s][j2];
        for (int j2 = 0; j2 < dim; ++j2) evals[t][j2] = r[j2][j2];
        for (int i = 0; i < dim; ++i)
            for (int j2 = 0; j2 < dim; ++j2) {
                if (i == j2) continue;
                v[t][i][j2] = -r[i][j2] / (a0[i] - a0[j2]);
            }
    }

    // eigenvalues of each needed G_j(0) by exact Rayleigh quotient
    auto rayleigh = [&](const EMatrix& m, int col) {
        EPoly num(order + 1, rat(0)), den(order + 1, rat(0));
        for (int i = 0; i < dim; ++i) {
            EPoly vi(order + 1, rat(0));
            for (int t = 0; t <= order; ++t) vi[t] = v[t][i][col];
            EPoly mv(order + 1, rat(0));
            for (int j2 = 0; j2 < dim; ++j2) {
                EPoly vj(order + 1, rat(0));
                for (int t = 0; t <= order; ++t) vj[t] = v[t][j2][col];
                EPoly prod = ep_mul(m[i][j2], vj);
                for (int t = 0; t <= order; ++t) mv[t] += prod[t];
            }
            EPoly contrib = ep_mul(vi, mv), norm = ep_mul(vi, vi);
            for (int t = 0; t <= order; ++t) {
                num[t] += contrib[t];
                den[t] += norm[t];
            }
        }
        return ep_mul(num, ep_inv(den));
    };

    std::map<Partition, std::vector<Scalar>> out;
    for (int col = 0; col < dim; ++col) {
        std::vector<EPoly> e_at_zero(std::max(k, 0) + 1, EPoly(order + 1, rat(0)));
        for (int j = 0; j <= k; ++j) e_at_zero[j] = rayleigh(mats[j], col);
        // reassemble the c-dependence: E_k(c) = sum_s c^s/s! E_{k-s}(0),
        // with E_{-1}(0) = 0 and E_{-2}(0) = 1
        std::vector<Scalar> coeffs(order + 1);
        for (int s = 0; s <= k + 2; ++s) {
            int j = k - s;
            EPoly part(order + 1, rat(0));
            if (j >= 0)
                part = e_at_zero[j];
            else if (j == -2)
                part[0] = rat(1);
            for (int t = 0; t <= order; ++t) {
                if (sgn(part[t]) == 0) continue;
                coeffs[t] += Scalar::term({s, 0, 0}, GaussRat(part[t] / factorial(s)));
            }
        }
        out.emplace(basis[col], std::move(coeffs));
    }
    return out;
}

}  // namespace qkdv
