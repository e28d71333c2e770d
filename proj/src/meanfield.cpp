// meanfield.cpp: operator equations of motion and their averages

#include "cqf/meanfield.hpp"

#include <algorithm>
#include <set>

#include "cqf/error.hpp"
#include "cqf/render.hpp"

namespace cqf {

namespace {

std::vector<std::size_t> touched_by(const QExpr& x)
{
    std::set<std::size_t> s;
    for (const auto& t : x.terms()) {
        for (const auto& o : t.ops) s.insert(o.subspace);
    }
    return {s.begin(), s.end()};
}

bool intersects(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

} // namespace

void ModelDefinition::validate() const
{
    if (!space) throw DomainError("model without a Hilbert space");
    if (!same_space(hamiltonian.space(), space)) throw DomainError("hamiltonian lives on a different space");
    if (jumps.size() != rates.size()) throw DomainError("number of jump operators and rates differ");
    for (const auto& j : jumps) {
        if (!same_space(j.space(), space)) throw DomainError("jump operator lives on a different space");
    }
    for (const auto& n : ops) check_op(*space, n.op);
    std::set<std::string> names;
    for (const auto& p : parameters) {
        if (!names.insert(p.name).second) throw DomainError("parameter '" + p.name + "' declared twice");
    }
}

ModelDefinition ModelDefinition::lifted(SpacePtr target) const
{
    ModelDefinition m(target);
    m.ops = ops;
    m.parameters = parameters;
    m.hamiltonian = lift(hamiltonian, target);
    for (const auto& j : jumps) m.jumps.push_back(lift(j, target));
    m.rates = rates;
    return m;
}

bool operator==(const ModelDefinition& a, const ModelDefinition& b)
{
    return same_space(a.space, b.space) && a.ops == b.ops && a.parameters == b.parameters &&
           a.hamiltonian == b.hamiltonian && a.jumps == b.jumps && a.rates == b.rates;
}

LangevinGenerator::LangevinGenerator(const ModelDefinition& model) : space_(model.space)
{
    model.validate();
    for (const auto& t : model.hamiltonian.terms()) {
        if (t.ops.empty()) continue; // scalars commute with everything
        hamiltonian_.push_back(HTerm{t.coeff, t.ops, touched_subspaces(t.ops)});
    }
    for (std::size_t k = 0; k < model.jumps.size(); ++k) {
        const QExpr& c = model.jumps[k];
        if (c.is_zero() || model.rates[k].is_zero()) continue;
        QExpr cdag = adjoint(c);
        QExpr cdagc = qmul(cdag, c);
        channels_.push_back(Channel{c, cdag, cdagc, Coeff(Rational(1, 2)) * model.rates[k], touched_by(c)});
    }
}

QExpr LangevinGenerator::rhs(const QExpr& o) const
{
    if (!same_space(o.space(), space_)) throw DomainError("operator and model live on different spaces");
    std::vector<QTerm> acc;
    QExpr dissipative(space_);
    const ScalarExpr i_unit(Coeff::i());
    for (const auto& ot : o.terms()) {
        if (ot.ops.empty()) continue;
        auto touched = touched_subspaces(ot.ops);
        for (const auto& h : hamiltonian_) {
            if (!intersects(h.touched, touched)) continue;
            ScalarExpr c = i_unit * h.coeff * ot.coeff;
            for (auto& [k, str] : multiply_strings(*space_, h.ops, ot.ops)) acc.push_back(QTerm{k * c, std::move(str)});
            for (auto& [k, str] : multiply_strings(*space_, ot.ops, h.ops)) acc.push_back(QTerm{-(k * c), std::move(str)});
        }
        QExpr single = QExpr::from_terms(space_, {QTerm{ot.coeff, ot.ops}});
        for (const auto& ch : channels_) {
            if (!intersects(ch.touched, touched)) continue;
            QExpr term = ScalarExpr(2) * qmul(qmul(ch.cdag, single), ch.c) - qmul(ch.cdagc, single) - qmul(single, ch.cdagc);
            dissipative += ch.half_rate * term;
        }
    }
    QExpr out = QExpr::from_terms(space_, std::move(acc));
    out += dissipative;
    return out;
}

QExpr qle_rhs(const QExpr& o, const ModelDefinition& model)
{
    return LangevinGenerator(model).rhs(o);
}

ScalarExpr average(const QExpr& x)
{
    ScalarExpr out;
    for (const auto& t : x.terms()) out += t.coeff * ScalarExpr::average(AverageSymbol::of(t.ops));
    return out;
}

std::optional<std::size_t> EquationSet::find(const AverageSymbol& a) const
{
    for (std::size_t k = 0; k < equations.size(); ++k) {
        if (equations[k].lhs.ops() == a.ops()) return k;
    }
    return std::nullopt;
}

ScalarExpr derive_rhs(const OpString& ops, const LangevinGenerator& gen, Expander& expander)
{
    QExpr o = QExpr::from_terms(gen.space(), {QTerm{ScalarExpr(1), ops}});
    return expander.expand(average(gen.rhs(o)));
}

EquationSet meanfield_derive(const std::vector<QExpr>& ops, const ModelDefinition& model, const OrderSpec& order,
                             const FilterFunction& filter)
{
    EquationSet eqs(model);
    eqs.order = order;
    eqs.filter = filter;
    LangevinGenerator gen(model);
    Expander expander(model.space, order, filter);
    std::set<OpString> seen;
    for (const auto& op : ops) {
        if (!same_space(op.space(), model.space)) throw DomainError("operator and model live on different spaces");
        if (!op.is_monomial() || !op.terms().front().coeff.is_constant()) {
            throw DomainError("cannot derive an equation for '" + render(op) +
                              "': derive each operator product separately");
        }
        const OpString& str = op.terms().front().ops;
        if (str.empty()) throw DomainError("the identity has no equation of motion");
        AverageSymbol lhs = AverageSymbol::of(str);
        if (!seen.insert(lhs.ops()).second) continue;
        eqs.equations.push_back(MeanfieldEquation{lhs, derive_rhs(str, gen, expander)});
    }
    return eqs;
}

} // namespace cqf
