// correlation.cpp: regression-theorem τ-equations, linear form, spectra

#include "cqf/correlation.hpp"

#include <cmath>
#include <map>

#include "cqf/completion.hpp"
#include "cqf/error.hpp"
#include "cqf/render.hpp"

namespace cqf {

namespace {

const OpString& monomial_ops(const QExpr& x, const char* role)
{
    if (x.is_zero()) throw DomainError(std::string("correlation operator ") + role + " is zero");
    if (!x.is_monomial() || !x.terms().front().coeff.is_constant()) {
        throw DomainError(std::string("correlation operator ") + role + " must be a single operator product, got '" +
                          render(x) + "'");
    }
    return x.terms().front().ops;
}

bool has_live(const OpString& ops)
{
    for (const auto& o : ops) {
        if (!o.frozen) return true;
    }
    return false;
}

} // namespace

OpString CorrelationSystem::to_base(const OpString& ops) const
{
    OpString out;
    out.reserve(ops.size());
    for (auto o : ops) {
        if (o.frozen) {
            o.subspace = static_cast<std::uint16_t>((*space)[o.subspace].copy_of);
            o.frozen = false;
        }
        out.push_back(o);
    }
    return out;
}

CorrelationSystem build_correlation_system(const QExpr& A, const QExpr& B, const EquationSet& eqs, bool steady)
{
    const SpacePtr& base = eqs.model.space;
    if (!same_space(A.space(), base) || !same_space(B.space(), base)) {
        throw DomainError("correlation operators live on a different space than the equations");
    }
    const OpString& a_ops = monomial_ops(A, "A");
    const OpString& b_ops = monomial_ops(B, "B");
    if (!missing_averages(eqs).empty()) throw DomainError("correlation functions need a closed equation set");

    std::vector<HilbertSpace> factors = base->factors();
    std::map<std::size_t, std::size_t> copy_of;
    for (std::size_t s : touched_subspaces(b_ops)) {
        HilbertSpace c = (*base)[s];
        c.name += "(t)";
        c.op_name += "_0";
        c.copy_of = static_cast<int>(s);
        copy_of[s] = factors.size();
        factors.push_back(std::move(c));
    }
    auto ext = std::make_shared<const ProductSpace>(std::move(factors));
    CorrelationSystem cs(ext, eqs.model.lifted(ext), A, B);
    cs.steady = steady;
    cs.base_order = eqs.order;
    cs.base_filter = eqs.filter;
    cs.tau.order = eqs.order;
    cs.tau.filter = eqs.filter;

    OpString primary = a_ops;
    for (auto o : b_ops) {
        o.subspace = static_cast<std::uint16_t>(copy_of.at(o.subspace));
        o.frozen = true;
        primary.push_back(o);
    }
    cs.primary = AverageSymbol::of(primary);

    Expander expander(ext, cs.tau.order, cs.tau.filter);
    LangevinGenerator gen(cs.tau.model);
    ScalarExpr rhs = has_live(primary) ? derive_rhs(primary, gen, expander) : ScalarExpr();
    cs.tau.equations.push_back(MeanfieldEquation{cs.primary, rhs});

    CompletionOptions opts;
    opts.external = [steady](const AverageSymbol& a) {
        if (!a.has_frozen()) return steady;
        return !has_live(a.ops());
    };
    cs.tau = complete(std::move(cs.tau), opts);

    std::set<OpString> lhs;
    for (const auto& e : cs.tau.equations) lhs.insert(e.lhs.ops());
    std::set<AverageSymbol> ext_set;
    for (const auto& e : cs.tau.equations) {
        for (const auto& a : e.rhs.averages()) {
            if (!lhs.count(a.ops())) ext_set.insert(a);
        }
    }
    cs.externals.assign(ext_set.begin(), ext_set.end());
    return cs;
}

RHSProgram lower(const CorrelationSystem& cs)
{
    return lower(cs.tau.equations, cs.space, cs.externals);
}

CorrelationInputs initial_values(const CorrelationSystem& cs, const RHSProgram& tau_prog, const RHSProgram& base,
                                 const std::vector<cplx>& u)
{
    if (u.size() != base.size()) throw DomainError("state does not match the equation layout");
    Expander expander(cs.base_space, cs.base_order, cs.base_filter);
    Bindings bind;
    for (std::size_t k = 0; k < base.size(); ++k) bind.set_average(base.layout()[k], u[k]);
    auto value_at_t = [&](const AverageSymbol& sym) -> cplx {
        // τ-operators stand to the left of the time-t operators.
        OpString live;
        OpString frozen;
        for (const auto& o : sym.operator_string()) (o.frozen ? frozen : live).push_back(o);
        OpString seq = live;
        OpString fb = cs.to_base(frozen);
        seq.insert(seq.end(), fb.begin(), fb.end());
        ScalarExpr x;
        for (auto& [c, str] : normalize_string(*cs.base_space, seq)) {
            x += c * ScalarExpr::average(AverageSymbol::of(std::move(str)));
        }
        x = expander.expand(x);
        for (const auto& a : x.averages()) {
            if (!base.index_of(a)) {
                throw ClosureError("the value of " + render_average(*cs.base_space, a) +
                                   " at time t is not available from the equation set");
            }
        }
        return scalar_evaluate(x, bind);
    };
    CorrelationInputs in;
    for (const auto& sym : tau_prog.layout()) in.y0.push_back(sym.order() == 0 ? cplx(1.0) : value_at_t(sym));
    for (const auto& sym : tau_prog.externals()) in.externals.push_back(value_at_t(sym));
    return in;
}

LinearSystem linearize_steady(const CorrelationSystem& cs, const RHSProgram& tau_prog, const CorrelationInputs& in,
                              const ParamValues& params)
{
    if (!cs.steady) throw DomainError("linear form requires a steady-state correlation system");
    const std::size_t n = tau_prog.size();
    LinearSystem ls;
    ls.M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    ls.d = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    ls.y0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) ls.y0(static_cast<Eigen::Index>(k)) = in.y0.at(k);
    ls.primary = *tau_prog.index_of(cs.primary);

    Bindings bind;
    for (const auto& [k, v] : params) bind.params[k] = v;
    for (std::size_t k = 0; k < tau_prog.externals().size(); ++k) bind.set_average(tau_prog.externals()[k], in.externals.at(k));

    for (const auto& e : cs.tau.equations) {
        const auto row = static_cast<Eigen::Index>(*tau_prog.index_of(e.lhs));
        for (const auto& t : e.rhs.terms()) {
            std::optional<std::size_t> var;
            Term rest{t.coeff, {}};
            for (const auto& p : t.factors) {
                auto idx = p.atom.is_average() ? tau_prog.index_of(p.atom.avg) : std::nullopt;
                if (!idx) {
                    rest.factors.push_back(p);
                    continue;
                }
                if (var || p.exp != 1 || p.atom.avg.conj()) {
                    throw InternalError("τ-equation for " + render_average(*cs.space, e.lhs) +
                                        " is not affine in the correlation variables");
                }
                var = *idx;
            }
            cplx v = scalar_evaluate(ScalarExpr::from_terms({rest}), bind);
            if (var) ls.M(row, static_cast<Eigen::Index>(*var)) += v;
            else ls.d(row) += v;
        }
    }
    return ls;
}

SpectrumResult spectrum_laplace(const LinearSystem& ls, const std::vector<double>& omega)
{
    const auto n = ls.M.rows();
    const bool driven = ls.d.size() > 0 && ls.d.cwiseAbs().maxCoeff() > 0.0;
    SpectrumResult out;
    for (double w : omega) {
        if (driven && w == 0.0) {
            throw DomainError("spectrum at ω = 0 is undefined for a correlation system with a constant drive");
        }
        const cplx s(0.0, w);
        Eigen::MatrixXcd A = s * Eigen::MatrixXcd::Identity(n, n) - ls.M;
        Eigen::VectorXcd b = ls.y0;
        if (driven) b += ls.d / s;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
        if (!lu.isInvertible()) {
            out.skipped.push_back(w);
            continue;
        }
        Eigen::VectorXcd x = lu.solve(b);
        out.omega.push_back(w);
        out.S.push_back(2.0 * x(static_cast<Eigen::Index>(ls.primary)).real());
    }
    return out;
}

SpectrumResult spectrum_fourier(const std::vector<double>& tau, const std::vector<cplx>& c,
                                const std::vector<double>& omega)
{
    if (tau.size() != c.size() || tau.size() < 2) throw DomainError("correlation samples are inconsistent");
    SpectrumResult out;
    const cplx I(0.0, 1.0);
    for (double w : omega) {
        cplx total = 0.0;
        for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
            const double h = tau[k + 1] - tau[k];
            const cplx m = (c[k + 1] - c[k]) / h;
            const double x = w * h;
            cplx i0, i1;
            if (std::abs(x) < 1e-3) {
                i0 = h * (1.0 - I * x / 2.0 - x * x / 6.0);
                i1 = h * h * (0.5 - I * x / 3.0 - x * x / 8.0);
            } else {
                const cplx e = std::exp(-I * x);
                i0 = (1.0 - e) / (I * w);
                i1 = (e * (1.0 + I * x) - 1.0) / (w * w);
            }
            total += std::exp(-I * (w * tau[k])) * (c[k] * i0 + m * i1);
        }
        out.omega.push_back(w);
        out.S.push_back(2.0 * total.real());
    }
    return out;
}

Trajectory correlation_trajectory(const CorrelationSystem& cs, const RHSProgram& tau_prog,
                                  const CorrelationInputs& in, double tau_max, const ParamValues& params,
                                  const StepperConfig& cfg)
{
    (void)cs;
    return integrate(tau_prog, in.y0, 0.0, tau_max, params, cfg, in.externals);
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

} // namespace cqf
