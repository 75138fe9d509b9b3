#include "qkdv/quantize.hpp"

#include <algorithm>
#include <cassert>

namespace qkdv {

const std::vector<Partition>& partitions_cached(int n) {
    static std::map<int, std::vector<Partition>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, partitions_of(n)).first;
    return it->second;
}

OperatorMatrix::OperatorMatrix(int n) : n_(n), basis_(partitions_cached(n)) {}

Scalar OperatorMatrix::entry(int row, int col) const {
    auto it = entries_.find({row, col});
    return it == entries_.end() ? Scalar() : it->second;
}

void OperatorMatrix::add_entry(int row, int col, const Scalar& s) {
    if (s.is_zero()) return;
    auto [it, inserted] = entries_.try_emplace({row, col}, s);
    if (!inserted) {
        it->second += s;
        if (it->second.is_zero()) entries_.erase(it);
    }
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& o) const {
    OperatorMatrix out(n_);
    for (const auto& [rc, a] : entries_)
        for (int k = 0; k < o.dim(); ++k) {
            auto it = o.entries_.find({rc.second, k});
            if (it != o.entries_.end()) out.add_entry(rc.first, k, a * it->second);
        }
    return out;
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& o) const {
    OperatorMatrix out = *this;
    for (const auto& [rc, s] : o.entries_) out.add_entry(rc.first, rc.second, -s);
    return out;
}

bool OperatorMatrix::is_symmetric_z_twisted() const {
    for (const auto& [rc, s] : entries_) {
        Rat zr = z_factor(basis_[rc.first]), zc = z_factor(basis_[rc.second]);
        if (!(s.times(zc) == entry(rc.second, rc.first).times(zr))) return false;
    }
    return true;
}

bool OperatorMatrix::is_real() const {
    for (const auto& [rc, s] : entries_)
        if (!s.is_real()) return false;
    return true;
}

bool OperatorMatrix::is_imaginary() const {
    for (const auto& [rc, s] : entries_)
        for (const auto& [k, v] : s.terms())
            if (sgn(v.re) != 0) return false;
    return true;
}

namespace {

long long ipow64(long long v, int e) {
    long long r = 1;
    while (e-- > 0) r *= v;
    return r;
}

/// Normal-ordered application of the quantized monomial with slot exponents
/// `a` to p_lambda: enumerate ordered Fourier-mode tuples k with sum zero.
/// Annihilators consume parts of lambda (with the derivative multiplicity
/// factors), the zero mode contributes a factor c (only where a_j = 0),
/// creators multiply new parts in.
struct ApplyEngine {
    const std::vector<int>& a;
    std::vector<std::pair<int, int>> avail;  // part value -> remaining count
    int avail_sum = 0;
    int ann_total = 0, cre_total = 0, zero_count = 0;
    Rat coeff;
    int phase = 0;  // power of i
    std::vector<int> created;
    LambdaElement* out = nullptr;
    const Scalar* term_scale = nullptr;

    void run(size_t slot) {
        if (slot == a.size()) {
            if (ann_total != cre_total) return;
            std::vector<int> parts = created;
            for (const auto& [v, c] : avail)
                for (int t = 0; t < c; ++t) parts.push_back(v);
            Scalar s = term_scale->times(GaussRat(coeff).times_i_pow(phase));
            if (zero_count > 0) s = s * Scalar::term({zero_count, 0, 0}, GaussRat(Rat(1)));
            out->add_term(Partition(std::move(parts)), s);
            return;
        }
        const int e = a[slot];
        // zero mode: (i*0)^e kills everything unless e = 0 (0^0 = 1)
        if (e == 0) {
            ++zero_count;
            run(slot + 1);
            --zero_count;
        }
        // annihilator, value -v for each available part v
        for (auto& [v, cnt] : avail) {
            if (cnt == 0) continue;
            Rat old = coeff;
            coeff *= rat(ipow64(v, e) * ((e % 2) ? -1 : 1));  // (-1)^e from (-v)^e
            coeff *= rat(static_cast<long>(v) * cnt);         // -k d/dp_{-k} on p_v^cnt
            phase += e;
            --cnt;
            avail_sum -= v;
            ann_total += v;
            run(slot + 1);
            ann_total -= v;
            avail_sum += v;
            ++cnt;
            phase -= e;
            coeff = old;
        }
        // creator, value +w; weight conservation bounds w
        int w_max = ann_total + avail_sum - cre_total;
        for (int w = 1; w <= w_max; ++w) {
            Rat old = coeff;
            coeff *= rat(ipow64(w, e));
            phase += e;
            created.push_back(w);
            cre_total += w;
            run(slot + 1);
            cre_total -= w;
            created.pop_back();
            phase -= e;
            coeff = old;
        }
    }
};

void apply_monomial(const DiffMon& mon, const Scalar& scale, const Partition& lambda,
                    LambdaElement& out) {
    ApplyEngine eng{mon, {}, 0, 0, 0, 0, rat(1), 0, {}, &out, &scale};
    for (const auto& [v, r] : lambda.multiplicities()) {
        eng.avail.emplace_back(v, r);
        eng.avail_sum += v * r;
    }
    eng.run(0);
}

using i128 = __int128;

Rat i128_to_rat(i128 x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(x) : x;
    Int hi = static_cast<unsigned long long>(u >> 64);
    Int lo = static_cast<unsigned long long>(u & ~0ULL);
    Int v = (hi << 64) + lo;
    if (neg) v = -v;
    return Rat(v);
}

/// Diagonal coefficient [p_lambda] g-bar p_lambda of a quantized monomial,
/// grouped by distinct part values: per value v, t slots annihilate and t
/// slots recreate it, with falling-factorial derivative factors. Pure
/// integer arithmetic; the i^{|a|} phase is applied by the caller.
/// Result: index z (power of c) -> integer sum.
struct DiagEngine {
    std::vector<std::pair<int, int>> groups;  // (exponent e, slot count)
    std::vector<std::pair<int, int>> values;  // (part value v, multiplicity r)
    std::vector<int> rem;                     // remaining slots per group
    std::vector<i128> result;                 // by c-exponent
    int zero_group = -1;                      // index of the e = 0 group, if any

    void run_value(size_t vi, i128 acc) {
        if (vi == values.size()) {
            int z = 0;
            for (size_t g = 0; g < groups.size(); ++g) {
                if (rem[g] == 0) continue;
                if (static_cast<int>(g) != zero_group) return;  // unfilled slot, no zero mode
                z = rem[g];
            }
            result[z] += acc;
            return;
        }
        alloc_group(vi, 0, 0, 0, acc);
    }

    // distribute annihilator/creator counts for value v across the groups
    void alloc_group(size_t vi, size_t g, int t_ann, int t_cre, i128 acc) {
        const auto [v, r] = values[vi];
        if (g == groups.size()) {
            if (t_ann != t_cre || t_ann > r) return;
            i128 f = acc;
            for (int t = 0; t < t_ann; ++t) f *= (r - t);         // falling factorial
            for (int t = 0; t < t_ann; ++t) f *= v;               // -k d/dp factors
            run_value(vi + 1, f);
            return;
        }
        const int e = groups[g].first;
        const long long ve = ipow64(v, e);
        for (int alpha = 0; alpha <= rem[g]; ++alpha) {
            if (t_ann + alpha > r) break;
            for (int gamma = 0; alpha + gamma <= rem[g]; ++gamma) {
                i128 f = acc;
                // binomial chain: choose which of the remaining slots act
                f *= binom64(rem[g], alpha);
                f *= binom64(rem[g] - alpha, gamma);
                for (int t = 0; t < alpha + gamma; ++t) f *= ve;
                if ((e & 1) && (alpha & 1)) f = -f;  // (-1)^{e*alpha}
                rem[g] -= alpha + gamma;
                alloc_group(vi, g + 1, t_ann + alpha, t_cre + gamma, f);
                rem[g] += alpha + gamma;
            }
        }
    }

    static long long binom64(int n, int k) {
        long long r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    }
};

std::vector<i128> diag_coefficients(const DiffMon& mon, const Partition& lambda) {
    DiagEngine eng;
    for (int idx : mon) {
        if (!eng.groups.empty() && eng.groups.back().first == idx)
            ++eng.groups.back().second;
        else
            eng.groups.emplace_back(idx, 1);
    }
    for (size_t g = 0; g < eng.groups.size(); ++g)
        if (eng.groups[g].first == 0) eng.zero_group = static_cast<int>(g);
    for (const auto& [v, r] : lambda.multiplicities()) eng.values.emplace_back(v, r);
    eng.rem.reserve(eng.groups.size());
    for (const auto& [e, cnt] : eng.groups) eng.rem.push_back(cnt);
    eng.result.assign(mon.size() + 1, 0);
    eng.run_value(0, 1);
    return eng.result;
}

}  // namespace

Scalar monomial_trace(const DiffMon& mon, int n) {
    static std::map<std::pair<DiffMon, int>, Scalar> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find({mon, n});
        if (it != cache.end()) return it->second;
    }
    int abs_a = 0;
    for (int idx : mon) abs_a += idx;
    std::vector<i128> sums(mon.size() + 1, 0);
    for (const auto& lambda : partitions_cached(n)) {
        auto d = diag_coefficients(mon, lambda);
        for (size_t z = 0; z < d.size(); ++z) sums[z] += d[z];
    }
    Scalar total;
    for (size_t z = 0; z < sums.size(); ++z) {
        if (sums[z] == 0) continue;
        total.add_term({static_cast<int>(z), 0, 0},
                       GaussRat(i128_to_rat(sums[z])).times_i_pow(abs_a));
    }
    std::lock_guard<std::mutex> lock(mtx);
    cache.try_emplace({mon, n}, total);
    return total;
}

QuantizedOperator QuantizedOperator::from_density(DiffPoly g) {
    QuantizedOperator op;
    op.source_ = std::move(g);
    return op;
}

QuantizedOperator QuantizedOperator::from_diagonal(PartitionFunction f, Scalar coeff) {
    QuantizedOperator op;
    op.diagonal_.emplace_back(std::move(coeff), std::move(f));
    return op;
}

QuantizedOperator QuantizedOperator::operator+(const QuantizedOperator& o) const {
    QuantizedOperator op;
    op.source_ = source_ + o.source_;
    op.diagonal_ = diagonal_;
    op.diagonal_.insert(op.diagonal_.end(), o.diagonal_.begin(), o.diagonal_.end());
    return op;
}

QuantizedOperator QuantizedOperator::scaled(const Scalar& s) const {
    QuantizedOperator op;
    op.source_ = source_.scaled(s);
    for (const auto& [c, f] : diagonal_) op.diagonal_.emplace_back(c * s, f);
    return op;
}

QuantizedOperator quantize(const DiffPoly& g) { return QuantizedOperator::from_density(g); }

LambdaElement QuantizedOperator::apply(const LambdaElement& f) const {
    LambdaElement out;
    for (const auto& [lambda, fc] : f.terms()) {
        for (const auto& [mon, s] : source_.terms()) apply_monomial(mon, s * fc, lambda, out);
        for (const auto& [c, fn] : diagonal_) out.add_term(lambda, c * fn(lambda) * fc);
    }
    return out;
}

OperatorMatrix QuantizedOperator::matrix_on(int n) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mtx);
        auto it = cache_->matrices.find(n);
        if (it != cache_->matrices.end()) return it->second;
    }
    OperatorMatrix m(n);
    const auto& basis = m.basis();
    std::map<Partition, int> index;
    for (int i = 0; i < m.dim(); ++i) index.emplace(basis[i], i);
    for (int col = 0; col < m.dim(); ++col) {
        LambdaElement image = apply(LambdaElement::monomial(basis[col]));
        for (const auto& [mu, s] : image.terms()) {
            auto it = index.find(mu);
            if (it == index.end())
                throw std::logic_error("matrix_on: image escaped Lambda_n");
            m.add_entry(it->second, col, s);
        }
    }
    std::lock_guard<std::mutex> lock(cache_->mtx);
    return cache_->matrices.try_emplace(n, std::move(m)).first->second;
}

Scalar QuantizedOperator::trace_on(int n) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mtx);
        auto it = cache_->traces.find(n);
        if (it != cache_->traces.end()) return it->second;
    }
    Scalar tr;
    for (const auto& [mon, s] : source_.terms()) tr += s * monomial_trace(mon, n);
    for (const auto& [c, fn] : diagonal_) {
        Scalar acc;
        for (const auto& lambda : partitions_cached(n)) acc += fn(lambda);
        tr += c * acc;
    }
    std::lock_guard<std::mutex> lock(cache_->mtx);
    return cache_->traces.try_emplace(n, std::move(tr)).first->second;
}

QSeries QuantizedOperator::q_series(int order) const {
    QSeries numerator(order);
    for (int n = 0; n <= order; ++n) numerator[n] = trace_on(n);
    return numerator.divided_by_unit(partition_series(order));
}

QSeries q_bracket(const PartitionFunction& f, int order) {
    QSeries numerator(order);
    for (int n = 0; n <= order; ++n) {
        Scalar acc;
        for (const auto& lambda : partitions_cached(n)) acc += f(lambda);
        numerator[n] = acc;
    }
    return numerator.divided_by_unit(partition_series(order));
}

PartitionFunction qk_function(int k) {
    if (k < 0) throw std::invalid_argument("qk_function: k >= 0");
    if (k == 0) return {"Q0", [](const Partition&) { return Scalar(1); }};
    Rat beta = (rat_pow(rat(1, 2), k - 1) - 1) * bernoulli(k) / factorial(k);
    return {"Q" + std::to_string(k), [k, beta](const Partition& lambda) {
                Rat acc(0);
                for (int i = 1; i <= lambda.length(); ++i) {
                    Rat shifted = rat(lambda.parts()[i - 1]) - rat(i) + rat(1, 2);
                    Rat base = rat(1, 2) - rat(i);
                    acc += rat_pow(shifted, k - 1) - rat_pow(base, k - 1);
                }
                return Scalar(acc / factorial(k - 1) + beta);
            }};
}

PartitionFunction moment_sk(int k) {
    if (k < 1) throw std::invalid_argument("moment_sk: k >= 1");
    Rat constant = -bernoulli(k) / rat(2 * k);
    return {"S" + std::to_string(k), [k, constant](const Partition& lambda) {
                Rat acc = constant;
                for (int p : lambda.parts()) acc += rat_pow(rat(p), k - 1);
                return Scalar(acc);
            }};
}

PartitionFunction hook_tk(int k) {
    if (k < 2) throw std::invalid_argument("hook_tk: k >= 2");
    std::vector<PartitionFunction> q;
    for (int i = 0; i <= k; ++i) q.push_back(qk_function(i));
    Rat pref = factorial(k - 2) / rat(2);
    return {"T" + std::to_string(k), [k, pref, q](const Partition& lambda) {
                Scalar acc;
                for (int i = 0; i <= k; ++i) {
                    Scalar term = q[i](lambda) * q[k - i](lambda);
                    acc += (i % 2 == 0) ? term : -term;
                }
                return acc.times(pref);
            }};
}

QuantizedOperator l_operator(int k) { return QuantizedOperator::from_diagonal(moment_sk(k)); }

PartitionFunction diagonal_function(const QuantizedOperator& op, DiagBasis basis) {
    if (basis == DiagBasis::monomial) {
        return {"diag_p", [op](const Partition& lambda) {
                    LambdaElement p = LambdaElement::monomial(lambda);
                    return inner_product(p, op.apply(p)).div(z_factor(lambda));
                }};
    }
    return {"diag_s", [op](const Partition& lambda) {
                LambdaElement s = schur(lambda);
                Scalar denom = inner_product(s, s);
                Scalar num = inner_product(s, op.apply(s));
                // Schur functions are orthonormal, but keep the quotient honest
                if (!(denom == Scalar(1))) {
                    if (!denom.is_rational())
                        throw std::logic_error("diagonal_function: non-rational norm");
                    return num.div(denom.rational_value());
                }
                return num;
            }};
}

QMPoly pairing_qseries(const std::vector<int>& a, bool reduced) {
    const int n = static_cast<int>(a.size());
    QMPoly total;
    // enumerate partial pairings of the slot set; unpaired slots need a_i = 0
    std::vector<int> partner(n, -1);
    std::function<void(int, int, QMPoly)> rec = [&](int i, int unpaired, QMPoly acc) {
        while (i < n && partner[i] >= 0) ++i;
        if (i == n) {
            if (unpaired > 0)
                acc = acc * QMPoly(Scalar::term({unpaired, 0, 0}, GaussRat(Rat(1))));
            total += acc;
            return;
        }
        partner[i] = i;
        if (a[i] == 0) rec(i + 1, unpaired + 1, acc);
        for (int j = i + 1; j < n; ++j) {
            if (partner[j] >= 0) continue;
            int k = a[i] + a[j] + 2;
            if (k % 2 != 0) continue;  // s(a,{i,j}) vanishes
            // s = i^{a_i+a_j} ((-1)^{a_i} + (-1)^{a_j}) = 2 (-1)^{(a_i-a_j)/2}
            Rat s = rat(2) * rat_pow(rat(-1), (a[i] + a[j]) / 2) * rat_pow(rat(-1), a[j]);
            QMPoly factor = eisenstein_qmpoly(k);
            if (!reduced) factor += QMPoly(Scalar(bernoulli(k) / rat(2 * k)));
            partner[j] = i;
            rec(i + 1, unpaired, acc * factor.scaled(s));
            partner[j] = -1;
        }
        partner[i] = -1;
    };
    rec(0, 0, QMPoly(Scalar(1)));
    return total;
}

PartitionFunction hopf_eigenvalue(int k) {
    if (k < -2) throw std::invalid_argument("hopf_eigenvalue: k >= -2");
    std::vector<PartitionFunction> q;
    for (int j = 0; j <= k + 2; ++j) q.push_back(qk_function(j));
    return {"E" + std::to_string(k) + "_hopf", [k, q](const Partition& lambda) {
                Scalar acc;
                for (int j = 0; j <= k + 2; ++j) {
                    Scalar qv = q[j](lambda);
                    int cexp = k + 2 - j;
                    acc += Scalar::term({cexp, 0, 0}, GaussRat(rat(1) / factorial(cexp))) * qv;
                }
                return acc;
            }};
}

PartitionFunction infinite_eigenvalue(int k) {
    if (k < 0) throw std::invalid_argument("infinite_eigenvalue: k >= 0");
    PartitionFunction s = moment_sk(2 * k + 2);
    Rat denom = rat_pow(rat(-4), k) * double_factorial(2 * k + 1);
    return {"E" + std::to_string(k) + "_inf", [k, s, denom](const Partition& lambda) {
                Scalar acc = s(lambda).div(denom);
                if (k == 0) acc += Scalar::term({2, 0, 0}, GaussRat(rat(1, 2)));
                return acc;
            }};
}

}  // namespace qkdv
