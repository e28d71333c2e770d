// observables.cpp: Mandel-Q, mode temperature and expression observables

#include "cqf/observables.hpp"

#include "cqf/error.hpp"
#include "cqf/render.hpp"

namespace cqf {

double mandel_q(double n, double n2_normal)
{
    // <n^2> = <a'a'aa> + <n>, so (Δn² - <n>)/<n> = (<a'a'aa> - <n>²)/<n>
    return (n2_normal - n * n) / n;
}

double mode_temperature(double n, double omega)
{
    return n * kHbar * omega / kBoltzmann;
}

std::vector<AverageSymbol> observable_averages(const ObservableDef& def)
{
    const auto s = def.subspace;
    const auto a = FundamentalOp::destroy(s);
    const auto ad = FundamentalOp::create(s);
    switch (def.kind) {
    case ObservableDef::Kind::MandelQ:
        return {AverageSymbol::of({ad, a}), AverageSymbol::of({ad, ad, a, a})};
    case ObservableDef::Kind::Temperature:
        return {AverageSymbol::of({ad, a})};
    case ObservableDef::Kind::Expr:
        break;
    }
    auto set = def.expr.averages();
    return {set.begin(), set.end()};
}

std::vector<Series> evaluate_observables(const std::vector<ObservableDef>& defs, const RHSProgram& prog,
                                         const Trajectory& tr, const ParamValues& params)
{
    const auto& space = *prog.space();
    std::vector<Series> out;
    for (const auto& d : defs) {
        std::vector<std::pair<AverageSymbol, std::size_t>> idx;
        for (const auto& a : observable_averages(d)) {
            auto k = prog.index_of(a.representative());
            if (!k) {
                throw DomainError("observable '" + d.name + "' needs " + render_average(space, a) +
                                  ", which requires cumulant order >= " + std::to_string(a.order()));
            }
            idx.emplace_back(a.representative(), *k);
        }
        Series s{d.name, {}};
        s.values.reserve(tr.u.size());
        Bindings b;
        for (const auto& [k, v] : params) b.params[k] = v;
        for (const auto& u : tr.u) {
            switch (d.kind) {
            case ObservableDef::Kind::MandelQ:
                s.values.emplace_back(mandel_q(u[idx[0].second].real(), u[idx[1].second].real()));
                break;
            case ObservableDef::Kind::Temperature:
                s.values.emplace_back(mode_temperature(u[idx[0].second].real(), d.omega));
                break;
            case ObservableDef::Kind::Expr:
                for (const auto& [a, k] : idx) b.set_average(a, u[k]);
                s.values.push_back(scalar_evaluate(d.expr, b));
                break;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace cqf
