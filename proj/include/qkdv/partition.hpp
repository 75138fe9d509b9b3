#pragma once

#include <map>
#include <vector>

#include "qkdv/scalar.hpp"

namespace qkdv {

/// Integer partition: weakly decreasing sequence of positive parts.
///
/// The canonical order on partitions of equal size is reverse lexicographic,
/// (4) < (3,1) < (2,2) < (2,1,1) < (1,1,1,1); partitions of smaller size come
/// first. This is the order produced by partitions_of and used for every
/// matrix basis and JSON output.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts);

    int size() const { return size_; }
    int length() const { return static_cast<int>(parts_.size()); }
    const std::vector<int>& parts() const { return parts_; }

    /// part value -> multiplicity r_m
    std::map<int, int> multiplicities() const;

    bool operator==(const Partition& o) const { return parts_ == o.parts_; }
    bool operator<(const Partition& o) const;

private:
    std::vector<int> parts_;
    int size_ = 0;
};

/// All partitions of n in canonical (reverse lexicographic) order.
std::vector<Partition> partitions_of(int n);

/// z_lambda = prod_m r_m! * m^{r_m}
Rat z_factor(const Partition& lambda);

/// p(0), ..., p(N) via the pentagonal number recurrence.
std::vector<long> partition_counts(int n_max);

}  // namespace qkdv
