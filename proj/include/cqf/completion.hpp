// completion.hpp: closing an equation set by deriving missing averages

#pragma once

#include <cstddef>
#include <functional>
#include <set>

#include "cqf/meanfield.hpp"

namespace cqf {

/// Representatives used on some rhs that have no equation and are not
/// filtered out.
std::set<AverageSymbol> missing_averages(const EquationSet& eqs);

struct CompletionOptions {
    std::size_t max_equations = 100000;
    /// Called with the running equation count after each round.
    std::function<void(std::size_t)> progress;
    /// Averages treated as known inputs instead of unknowns.
    std::function<bool(const AverageSymbol&)> external;
    /// Number of worker threads deriving one round (0 = hardware concurrency).
    unsigned threads = 0;
};

/// Adds equations for missing averages until the set is closed. New
/// equations use the set's own order spec and filter.
EquationSet complete(EquationSet eqs, const CompletionOptions& opts = {});
/// Same, after replacing the set's order spec and filter.
EquationSet complete(EquationSet eqs, const OrderSpec& order, const FilterFunction& filter,
                     const CompletionOptions& opts = {});

} // namespace cqf
