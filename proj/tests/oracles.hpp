// oracles.hpp: independent reference implementations for the acceptance suite

#pragma once

#include <random>
#include <set>
#include <vector>

#include "cqf/cumulant.hpp"

namespace oracles {

/// All set partitions of {0..n-1} obtained by collapsing every map
/// {0..n-1} -> {0..n-1}; blocks sorted, partitions sorted.
std::set<std::vector<std::vector<int>>> partitions_by_maps(int n);

/// Repeated application of the closure rule on a canonical string, written
/// directly from the partition sum: no memo, every sub-block re-expanded.
/// `order_of` gives the truncation order for a string.
cqf::ScalarExpr brute_expand(const cqf::ProductSpace& space, const cqf::OpString& ops,
                             const std::function<int(const cqf::OpString&)>& order_of,
                             const std::function<bool(const cqf::OpString&)>& keep);

/// Phase of a string: a' = +1, a = -1, s(i,j) = i - j (1-based).
int net_phase(const cqf::OpString& ops);

/// Random canonical string of length 1..max_len built factor by factor.
cqf::OpString random_canonical(const cqf::ProductSpace& space, std::mt19937& rng, int max_len);

} // namespace oracles
