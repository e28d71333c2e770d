// cumulant.hpp: joint cumulants and moment closure by cumulant expansion

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cqf/scalar.hpp"
#include "cqf/space.hpp"

namespace cqf {

/// Truncation order: one uniform order, or one order per factor of the
/// model's product space combined by a reducer over the touched factors.
class OrderSpec {
public:
    enum class Reducer { Max, Min };

    OrderSpec() = default;
    static OrderSpec uniform(int n);
    static OrderSpec per_subspace(std::vector<int> orders, Reducer r = Reducer::Max);

    bool is_uniform() const noexcept { return orders_.size() == 1 && !per_subspace_; }
    const std::vector<int>& orders() const noexcept { return orders_; }
    Reducer reducer() const noexcept { return reducer_; }
    int max_order() const;

    /// Checks the vector length against a product space (frozen copies excluded).
    void validate(const ProductSpace& space) const;
    /// Order applying to an average; frozen copies count as their original factor.
    int resolve(const ProductSpace& space, const OpString& ops) const;

    std::string str() const;

    friend bool operator==(const OrderSpec&, const OrderSpec&) = default;

private:
    std::vector<int> orders_{2};
    bool per_subspace_ = false;
    Reducer reducer_ = Reducer::Max;
};

/// Predicate deciding whether an average is kept (true) or set to zero.
struct FilterFunction {
    std::string id = "none";
    std::function<bool(const ProductSpace&, const OpString&)> keep;

    static FilterFunction none();
    /// Keeps averages with zero total phase: a† = +1, a = -1, σ^{ij} = i - j.
    static FilterFunction phase_invariant();
    static FilterFunction by_id(const std::string& id);

    bool operator()(const ProductSpace& space, const OpString& ops) const { return !keep || keep(space, ops); }
};

/// Net phase of an operator string (1-based level indices).
int phase(const OpString& ops);

using SetPartition = std::vector<std::vector<int>>;

/// Largest n accepted by set_partitions.
inline constexpr int kMaxPartitionSize = 12;

/// All partitions of {0..n-1}; blocks and elements ascending, partitions in
/// restricted-growth order (the single-block partition first).
std::vector<SetPartition> set_partitions(int n);

/// Joint cumulant of the factors of a canonical string.
ScalarExpr joint_cumulant(const ProductSpace& space, const OpString& factors);

/// Memoizing expander for one space, order spec and filter. Safe to share
/// between threads.
class Expander {
public:
    Expander(SpacePtr space, OrderSpec spec, FilterFunction filter);

    /// Expands one average until every surviving average is within order;
    /// filtered averages become 0.
    ScalarExpr expand(const AverageSymbol& avg);
    /// Expands every average in x.
    ScalarExpr expand(const ScalarExpr& x);

    const SpacePtr& space() const noexcept { return space_; }
    const OrderSpec& spec() const noexcept { return spec_; }
    const FilterFunction& filter() const noexcept { return filter_; }

private:
    ScalarExpr expand_rep(const OpString& rep);
    ScalarExpr block_average(const OpString& ops);

    SpacePtr space_;
    OrderSpec spec_;
    FilterFunction filter_;
    std::mutex mutex_;
    std::map<OpString, ScalarExpr> memo_;
};

ScalarExpr expand_average(const SpacePtr& space, const AverageSymbol& avg, const OrderSpec& spec,
                          const FilterFunction& filter);

/// Number of units an average is split into by the expansion: every
/// operator on the live space counts once, all time-t operators together
/// count as a single unit.
int expansion_units(const OpString& ops);

} // namespace cqf
