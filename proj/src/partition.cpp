#include "qkdv/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qkdv {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    std::sort(parts_.rbegin(), parts_.rend());
    if (!parts_.empty() && parts_.back() <= 0)
        throw std::invalid_argument("Partition: parts must be positive");
    size_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

std::map<int, int> Partition::multiplicities() const {
    std::map<int, int> r;
    for (int p : parts_) ++r[p];
    return r;
}

bool Partition::operator<(const Partition& o) const {
    if (size_ != o.size_) return size_ < o.size_;
    // reverse lexicographic: larger leading parts first
    return std::lexicographical_compare(o.parts_.begin(), o.parts_.end(), parts_.begin(),
                                        parts_.end());
}

namespace {

void enumerate(int n, int max_part, std::vector<int>& stack, std::vector<Partition>& out) {
    if (n == 0) {
        out.emplace_back(stack);
        return;
    }
    for (int m = std::min(n, max_part); m >= 1; --m) {
        stack.push_back(m);
        enumerate(n - m, m, stack, out);
        stack.pop_back();
    }
}

}  // namespace

std::vector<Partition> partitions_of(int n) {
    if (n < 0) throw std::invalid_argument("partitions_of: n must be >= 0");
    std::vector<Partition> out;
    std::vector<int> stack;
    enumerate(n, n, stack, out);
    return out;
}

Rat z_factor(const Partition& lambda) {
    Rat z(1);
    for (const auto& [m, r] : lambda.multiplicities()) z *= factorial(r) * rat_pow(rat(m), r);
    return z;
}

std::vector<long> partition_counts(int n_max) {
    std::vector<long> p(n_max + 1, 0);
    p[0] = 1;
    for (int n = 1; n <= n_max; ++n) {
        long acc = 0;
        for (int k = 1;; ++k) {
            int g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
            if (g1 > n && g2 > n) break;
            long sign = (k % 2 == 1) ? 1 : -1;
            if (g1 <= n) acc += sign * p[n - g1];
            if (g2 <= n) acc += sign * p[n - g2];
        }
        p[n] = acc;
    }
    return p;
}

}  // namespace qkdv
