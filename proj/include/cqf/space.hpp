// space.hpp: Hilbert spaces, product spaces and fundamental operators

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cqf {

enum class SpaceKind : std::uint8_t { Fock, NLevel };

struct HilbertSpace {
    SpaceKind kind = SpaceKind::Fock;
    std::string name;
    std::vector<std::string> levels; // NLevel only
    std::size_t ground = 0;          // index into levels, NLevel only
    std::string op_name;             // display name of operators acting here
    int copy_of = -1;                // >= 0: frozen time-t copy of that factor

    static HilbertSpace fock(std::string name, std::string op_name = "a");
    /// Ground defaults to the first listed level.
    static HilbertSpace nlevel(std::string name, std::vector<std::string> levels,
                               std::optional<std::string> ground = std::nullopt,
                               std::string op_name = "s");

    std::size_t level_index(const std::string& label) const;
    std::size_t dimension_levels() const { return levels.size(); }

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;
};

class ProductSpace {
public:
    explicit ProductSpace(std::vector<HilbertSpace> factors);

    std::size_t size() const noexcept { return factors_.size(); }
    const HilbertSpace& operator[](std::size_t i) const { return factors_.at(i); }
    const std::vector<HilbertSpace>& factors() const noexcept { return factors_; }

    std::optional<std::size_t> find(const std::string& name) const;

    /// Original factor index for a frozen copy, identity otherwise.
    std::size_t origin(std::size_t subspace) const;
    bool is_frozen(std::size_t subspace) const { return factors_.at(subspace).copy_of >= 0; }

    friend bool operator==(const ProductSpace&, const ProductSpace&) = default;

private:
    std::vector<HilbertSpace> factors_;
};

using SpacePtr = std::shared_ptr<const ProductSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

enum class OpKind : std::uint8_t { Create = 0, Transition = 1, Destroy = 2 };

/// One of a, a† (Fock) or σ^{ij} (NLevel) acting on a single factor. The
/// ordering is the canonical factor order: subspace, then kind, then levels
/// by declaration index.
struct FundamentalOp {
    std::uint16_t subspace = 0;
    OpKind kind = OpKind::Destroy;
    std::uint8_t i = 0;
    std::uint8_t j = 0;
    bool frozen = false;

    static FundamentalOp destroy(std::size_t s) { return {static_cast<std::uint16_t>(s), OpKind::Destroy, 0, 0, false}; }
    static FundamentalOp create(std::size_t s) { return {static_cast<std::uint16_t>(s), OpKind::Create, 0, 0, false}; }
    static FundamentalOp transition(std::size_t s, std::size_t i, std::size_t j)
    {
        return {static_cast<std::uint16_t>(s), OpKind::Transition, static_cast<std::uint8_t>(i),
                static_cast<std::uint8_t>(j), false};
    }

    FundamentalOp adjoint() const
    {
        FundamentalOp r = *this;
        if (kind == OpKind::Create) r.kind = OpKind::Destroy;
        else if (kind == OpKind::Destroy) r.kind = OpKind::Create;
        else std::swap(r.i, r.j);
        return r;
    }

    friend bool operator==(const FundamentalOp&, const FundamentalOp&) = default;
    friend std::strong_ordering operator<=>(const FundamentalOp& a, const FundamentalOp& b)
    {
        if (auto c = a.subspace <=> b.subspace; c != 0) return c;
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        if (auto c = a.i <=> b.i; c != 0) return c;
        return a.j <=> b.j;
    }
};

using OpString = std::vector<FundamentalOp>;

/// Validates an operator against the space (kind matches factor, levels valid).
void check_op(const ProductSpace& space, const FundamentalOp& op);

} // namespace cqf
