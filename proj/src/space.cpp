// space.cpp: Hilbert space bookkeeping

#include "cqf/space.hpp"

#include <algorithm>
#include <set>

#include "cqf/error.hpp"

namespace cqf {

HilbertSpace HilbertSpace::fock(std::string name, std::string op_name)
{
    HilbertSpace h;
    h.kind = SpaceKind::Fock;
    h.name = std::move(name);
    h.op_name = std::move(op_name);
    return h;
}

HilbertSpace HilbertSpace::nlevel(std::string name, std::vector<std::string> levels,
                                  std::optional<std::string> ground, std::string op_name)
{
    if (levels.size() < 2) throw DomainError("NLevel space '" + name + "' needs at least two levels");
    if (levels.size() > 255) throw CapacityError("NLevel space '" + name + "' has too many levels");
    std::set<std::string> unique(levels.begin(), levels.end());
    if (unique.size() != levels.size()) throw DomainError("NLevel space '" + name + "' has duplicate level labels");
    HilbertSpace h;
    h.kind = SpaceKind::NLevel;
    h.name = std::move(name);
    h.levels = std::move(levels);
    h.op_name = std::move(op_name);
    h.ground = ground ? h.level_index(*ground) : 0;
    return h;
}

std::size_t HilbertSpace::level_index(const std::string& label) const
{
    auto it = std::find(levels.begin(), levels.end(), label);
    if (it == levels.end()) throw DomainError("level '" + label + "' not declared in space '" + name + "'");
    return static_cast<std::size_t>(it - levels.begin());
}

ProductSpace::ProductSpace(std::vector<HilbertSpace> factors) : factors_(std::move(factors))
{
    if (factors_.empty()) throw DomainError("product space needs at least one factor");
    if (factors_.size() > 65535) throw CapacityError("too many Hilbert space factors");
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        const auto& f = factors_[k];
        if (f.kind == SpaceKind::Fock && !f.levels.empty()) {
            throw DomainError("Fock space '" + f.name + "' cannot carry level labels");
        }
        if (f.kind == SpaceKind::NLevel && (f.levels.size() < 2 || f.ground >= f.levels.size())) {
            throw DomainError("NLevel space '" + f.name + "' is malformed");
        }
        if (f.copy_of >= static_cast<int>(k)) throw DomainError("frozen copy must follow its original factor");
    }
}

std::optional<std::size_t> ProductSpace::find(const std::string& name) const
{
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        if (factors_[k].name == name) return k;
    }
    return std::nullopt;
}

std::size_t ProductSpace::origin(std::size_t subspace) const
{
    const auto& f = factors_.at(subspace);
    return f.copy_of >= 0 ? static_cast<std::size_t>(f.copy_of) : subspace;
}

bool same_space(const SpacePtr& a, const SpacePtr& b)
{
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

void check_op(const ProductSpace& space, const FundamentalOp& op)
{
    if (op.subspace >= space.size()) throw DomainError("operator acts on a subspace outside the product space");
    const auto& f = space[op.subspace];
    if (op.frozen != (f.copy_of >= 0)) throw DomainError("operator time tag does not match its subspace");
    switch (op.kind) {
    case OpKind::Create:
    case OpKind::Destroy:
        if (f.kind != SpaceKind::Fock) throw DomainError("ladder operator on non-Fock space '" + f.name + "'");
        break;
    case OpKind::Transition:
        if (f.kind != SpaceKind::NLevel) throw DomainError("transition operator on non-NLevel space '" + f.name + "'");
        if (op.i >= f.levels.size() || op.j >= f.levels.size()) {
            throw DomainError("transition level out of range on space '" + f.name + "'");
        }
        break;
    }
}

} // namespace cqf
