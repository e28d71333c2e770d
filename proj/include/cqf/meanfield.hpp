// meanfield.hpp: Heisenberg-Langevin right-hand sides and moment equations

#pragma once

#include <string>
#include <vector>

#include "cqf/cumulant.hpp"
#include "cqf/qexpr.hpp"
#include "cqf/scalar.hpp"

namespace cqf {

struct NamedOp {
    std::string name;
    FundamentalOp op;

    friend bool operator==(const NamedOp&, const NamedOp&) = default;
};

struct ModelDefinition {
    SpacePtr space;
    std::vector<NamedOp> ops;
    std::vector<Parameter> parameters;
    QExpr hamiltonian;
    std::vector<QExpr> jumps;
    std::vector<ScalarExpr> rates;

    explicit ModelDefinition(SpacePtr s) : space(s), hamiltonian(s) {}

    /// Throws DomainError unless all expressions live on `space` and jumps
    /// and rates match up.
    void validate() const;
    /// The same model on a larger space whose leading factors equal `space`.
    ModelDefinition lifted(SpacePtr target) const;

    friend bool operator==(const ModelDefinition& a, const ModelDefinition& b);
};

/// Precomputed Hamiltonian terms and dissipators of a model, used to
/// evaluate i[H,O] + Σ γ/2 (2c†Oc − c†cO − Oc†c) with ħ = 1. Terms acting on
/// subspaces disjoint from O are skipped.
class LangevinGenerator {
public:
    explicit LangevinGenerator(const ModelDefinition& model);

    QExpr rhs(const QExpr& o) const;
    const SpacePtr& space() const noexcept { return space_; }

private:
    struct HTerm {
        ScalarExpr coeff;
        OpString ops;
        std::vector<std::size_t> touched;
    };
    struct Channel {
        QExpr c, cdag, cdagc;
        ScalarExpr half_rate;
        std::vector<std::size_t> touched;
    };

    SpacePtr space_;
    std::vector<HTerm> hamiltonian_;
    std::vector<Channel> channels_;
};

QExpr qle_rhs(const QExpr& o, const ModelDefinition& model);

/// Linear average of a canonical operator expression.
ScalarExpr average(const QExpr& x);

struct MeanfieldEquation {
    AverageSymbol lhs;
    ScalarExpr rhs;

    friend bool operator==(const MeanfieldEquation&, const MeanfieldEquation&) = default;
};

struct EquationSet {
    ModelDefinition model;
    std::vector<MeanfieldEquation> equations;
    OrderSpec order;
    FilterFunction filter;

    explicit EquationSet(ModelDefinition m) : model(std::move(m)) {}

    std::size_t size() const noexcept { return equations.size(); }
    /// Index of the equation whose lhs has this representative.
    std::optional<std::size_t> find(const AverageSymbol& a) const;
};

/// Derives d<op>/dt for each monomial in `ops`, expanded to `order` with
/// filtered averages set to zero. The result is not necessarily closed.
EquationSet meanfield_derive(const std::vector<QExpr>& ops, const ModelDefinition& model, const OrderSpec& order,
                             const FilterFunction& filter);

/// Single equation for one canonical operator string on `model`'s space.
ScalarExpr derive_rhs(const OpString& ops, const LangevinGenerator& gen, Expander& expander);

} // namespace cqf
