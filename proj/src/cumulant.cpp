// cumulant.cpp: partitions, joint cumulants, recursive expansion

#include "cqf/cumulant.hpp"

#include <algorithm>
#include <set>

#include "cqf/error.hpp"
#include "cqf/qexpr.hpp"

namespace cqf {

OrderSpec OrderSpec::uniform(int n)
{
    if (n < 1) throw DomainError("cumulant order must be at least 1");
    OrderSpec s;
    s.orders_ = {n};
    s.per_subspace_ = false;
    return s;
}

OrderSpec OrderSpec::per_subspace(std::vector<int> orders, Reducer r)
{
    if (orders.empty()) throw DomainError("per-subspace order needs at least one entry");
    for (int n : orders) {
        if (n < 1) throw DomainError("cumulant order must be at least 1");
    }
    OrderSpec s;
    s.orders_ = std::move(orders);
    s.per_subspace_ = true;
    s.reducer_ = r;
    return s;
}

int OrderSpec::max_order() const
{
    return *std::max_element(orders_.begin(), orders_.end());
}

void OrderSpec::validate(const ProductSpace& space) const
{
    if (!per_subspace_) return;
    std::size_t live = 0;
    for (const auto& f : space.factors()) live += f.copy_of < 0 ? 1 : 0;
    if (orders_.size() != live) {
        throw DomainError("order vector has " + std::to_string(orders_.size()) + " entries but the space has " +
                          std::to_string(live) + " factors");
    }
}

int OrderSpec::resolve(const ProductSpace& space, const OpString& ops) const
{
    if (!per_subspace_) return orders_.front();
    std::optional<int> acc;
    for (const auto& o : ops) {
        std::size_t s = space.origin(o.subspace);
        if (s >= orders_.size()) throw DomainError("order vector does not cover subspace " + std::to_string(s));
        int n = orders_[s];
        if (!acc) acc = n;
        else acc = reducer_ == Reducer::Max ? std::max(*acc, n) : std::min(*acc, n);
    }
    return acc ? *acc : max_order();
}

std::string OrderSpec::str() const
{
    if (!per_subspace_) return std::to_string(orders_.front());
    std::string s;
    for (std::size_t k = 0; k < orders_.size(); ++k) s += (k ? "," : "") + std::to_string(orders_[k]);
    if (reducer_ == Reducer::Min) s += " min";
    return s;
}

int phase(const OpString& ops)
{
    int p = 0;
    for (const auto& o : ops) {
        switch (o.kind) {
        case OpKind::Create:
            ++p;
            break;
        case OpKind::Destroy:
            --p;
            break;
        case OpKind::Transition:
            p += static_cast<int>(o.i) - static_cast<int>(o.j);
            break;
        }
    }
    return p;
}

FilterFunction FilterFunction::none()
{
    return FilterFunction{"none", {}};
}

FilterFunction FilterFunction::phase_invariant()
{
    return FilterFunction{"phase", [](const ProductSpace&, const OpString& ops) { return phase(ops) == 0; }};
}

FilterFunction FilterFunction::by_id(const std::string& id)
{
    if (id == "none") return none();
    if (id == "phase") return phase_invariant();
    throw DomainError("unknown filter '" + id + "' (expected none or phase)");
}

std::vector<SetPartition> set_partitions(int n)
{
    if (n < 1) throw DomainError("set partitions need n >= 1");
    if (n > kMaxPartitionSize) {
        throw CapacityError("set partitions of " + std::to_string(n) + " elements exceed the limit of " +
                            std::to_string(kMaxPartitionSize));
    }
    std::vector<SetPartition> out;
    // Restricted growth strings in lexicographic order.
    std::vector<int> rgs(n, 0);
    std::vector<int> maxprefix(n, 0);
    while (true) {
        int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        SetPartition p(blocks);
        for (int k = 0; k < n; ++k) p[rgs[k]].push_back(k);
        out.push_back(std::move(p));
        int k = n - 1;
        while (k > 0 && rgs[k] > maxprefix[k - 1]) --k;
        if (k == 0) break;
        ++rgs[k];
        int m = std::max(maxprefix[k - 1], rgs[k]);
        maxprefix[k] = m;
        for (int j = k + 1; j < n; ++j) {
            rgs[j] = 0;
            maxprefix[j] = m;
        }
    }
    return out;
}

namespace {

std::int64_t factorial(int n)
{
    std::int64_t r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

ScalarExpr raw_average(const ProductSpace& space, const OpString& ops)
{
    ScalarExpr out;
    for (auto& [c, str] : normalize_string(space, ops)) out += c * ScalarExpr::average(AverageSymbol::of(std::move(str)));
    return out;
}

} // namespace

ScalarExpr joint_cumulant(const ProductSpace& space, const OpString& factors)
{
    if (factors.empty()) throw DomainError("joint cumulant of an empty operator sequence");
    const int n = static_cast<int>(factors.size());
    ScalarExpr total;
    for (const auto& p : set_partitions(n)) {
        const int len = static_cast<int>(p.size());
        Coeff c(factorial(len - 1) * (len % 2 == 1 ? 1 : -1));
        ScalarExpr prod(c);
        for (const auto& block : p) {
            OpString ops;
            for (int k : block) ops.push_back(factors[k]);
            prod *= raw_average(space, ops);
        }
        total += prod;
    }
    return total;
}

int expansion_units(const OpString& ops)
{
    int live = 0;
    bool frozen = false;
    for (const auto& o : ops) {
        if (o.frozen) frozen = true;
        else ++live;
    }
    return live + (frozen ? 1 : 0);
}

Expander::Expander(SpacePtr space, OrderSpec spec, FilterFunction filter)
    : space_(std::move(space)), spec_(std::move(spec)), filter_(std::move(filter))
{
    if (!space_) throw DomainError("expander without a Hilbert space");
    spec_.validate(*space_);
}

ScalarExpr Expander::expand(const AverageSymbol& avg)
{
    if (avg.order() == 0) return ScalarExpr(1);
    ScalarExpr r = expand_rep(avg.ops());
    return avg.conj() ? r.conj() : r;
}

ScalarExpr Expander::expand(const ScalarExpr& x)
{
    return x.substitute([this](const AverageSymbol& rep) -> std::optional<ScalarExpr> { return expand_rep(rep.ops()); });
}

ScalarExpr Expander::block_average(const OpString& ops)
{
    ScalarExpr out;
    for (auto& [c, str] : normalize_string(*space_, ops)) {
        if (str.empty()) {
            out += ScalarExpr(c);
            continue;
        }
        out += c * expand(AverageSymbol::of(std::move(str)));
    }
    return out;
}

ScalarExpr Expander::expand_rep(const OpString& rep)
{
    {
        std::lock_guard lock(mutex_);
        auto it = memo_.find(rep);
        if (it != memo_.end()) return it->second;
    }
    ScalarExpr result;
    if (filter_(*space_, rep)) {
        const int units = expansion_units(rep);
        if (units <= spec_.resolve(*space_, rep)) {
            result = ScalarExpr::average(AverageSymbol::from_representative(rep, false));
        } else {
            std::vector<OpString> unit_ops;
            OpString frozen;
            for (const auto& o : rep) {
                if (o.frozen) frozen.push_back(o);
                else unit_ops.push_back(OpString{o});
            }
            if (!frozen.empty()) unit_ops.push_back(std::move(frozen));
            const auto partitions = set_partitions(units);
            for (std::size_t k = 1; k < partitions.size(); ++k) {
                const auto& p = partitions[k];
                const int len = static_cast<int>(p.size());
                ScalarExpr prod(Coeff(factorial(len - 1) * (len % 2 == 0 ? 1 : -1)));
                for (const auto& block : p) {
                    OpString ops;
                    for (int u : block) ops.insert(ops.end(), unit_ops[u].begin(), unit_ops[u].end());
                    prod *= block_average(ops);
                    if (prod.is_zero()) break;
                }
                result += prod;
            }
        }
    }
    std::lock_guard lock(mutex_);
    return memo_.emplace(rep, std::move(result)).first->second;
}

ScalarExpr expand_average(const SpacePtr& space, const AverageSymbol& avg, const OrderSpec& spec,
                          const FilterFunction& filter)
{
    Expander e(space, spec, filter);
    return e.expand(avg);
}

} // namespace cqf
