// driver.cpp: command pipelines shared by the CLI and the C API

#include "cqf/driver.hpp"

#include <charconv>
#include <cmath>

#include "cqf/completion.hpp"
#include "cqf/correlation.hpp"
#include "cqf/error.hpp"
#include "cqf/render.hpp"

namespace cqf {

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string num(double x)
{
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

QExpr string_expr(const SpacePtr& space, const OpString& ops)
{
    return QExpr::from_terms(space, {QTerm{ScalarExpr(1), ops}});
}

StepperConfig grid_config(StepperConfig cfg, const std::vector<double>& t)
{
    cfg.save_interval.reset();
    cfg.saveat = t;
    return cfg;
}

double default_tau(const ModelFile& m)
{
    return m.run.tau_max.value_or(50.0);
}

} // namespace

void Table::write_csv(std::ostream& out) const
{
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << csv_field(columns[k]);
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << num(r[k]);
        out << '\n';
    }
    for (const auto& n : notes) out << "# " << n << '\n';
}

std::size_t Table::column(const std::string& name) const
{
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] == name) return k;
    }
    throw DomainError("no column '" + name + "'");
}

void RunSettings::apply(ModelFile& m) const
{
    if (order) {
        order->validate(*m.model.space);
        m.order = order;
    }
    if (filter) m.filter = FilterFunction::by_id(*filter).id;
    if (method) m.run.method = method;
    if (dt) m.run.dt = dt;
    if (rtol) m.run.rtol = rtol;
    if (atol) m.run.atol = atol;
    if (omega) m.run.omega = omega;
}

EquationSet derive_equations(const ModelFile& m, const CompletionOptions& opts)
{
    if (m.derive.empty()) throw DomainError("the model file has no derive line");
    const OrderSpec order = m.order.value_or(OrderSpec::uniform(2));
    const FilterFunction filter = FilterFunction::by_id(m.filter);
    return complete(meanfield_derive(m.derive, m.model, order, filter), opts);
}

std::string dump_equations(const EquationSet& eqs, bool latex_form)
{
    const auto& space = *eqs.model.space;
    std::string out;
    if (latex_form) {
        out += "\\begin{align}\n";
        for (std::size_t k = 0; k < eqs.size(); ++k) {
            const auto& e = eqs.equations[k];
            out += "\\frac{d}{dt} " + latex_average(space, e.lhs) + " &= " + latex(space, e.rhs);
            out += k + 1 < eqs.size() ? " \\\\\n" : "\n";
        }
        return out + "\\end{align}\n";
    }
    out += "# " + std::to_string(eqs.size()) + " equations, order " + eqs.order.str() + ", filter " + eqs.filter.id + "\n";
    for (const auto& e : eqs.equations) out += "d/dt " + render_average(space, e.lhs) + " = " + render(space, e.rhs) + "\n";
    return out;
}

TruncationSpec oracle_truncation(const ModelFile& m)
{
    TruncationSpec t;
    for (const auto& [s, c] : m.run.cutoffs) t.cutoffs[s] = c;
    const auto& space = *m.model.space;
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (space[s].kind == SpaceKind::Fock && !t.cutoffs.count(s)) {
            throw DomainError("the oracle needs a cutoff line for Fock space '" + space[s].name + "'");
        }
    }
    return t;
}

DenseMatrix oracle_initial_state(const ModelFile& m, const TruncationSpec& trunc)
{
    const auto& space = *m.model.space;
    const auto dims = trunc.dims(space);
    std::vector<std::vector<double>> pops(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) {
        pops[s].assign(dims[s], 0.0);
        pops[s][space[s].kind == SpaceKind::Fock ? 0 : space[s].ground] = 1.0;
    }
    const auto params = m.run.params();
    Bindings b;
    for (const auto& [k, v] : params) b.params[k] = v;
    for (const auto& [a, v] : m.initial) {
        const OpString ops = a.operator_string();
        const double x = scalar_evaluate(v, b).real();
        const auto s = ops.front().subspace;
        const auto& h = space[s];
        if (h.kind == SpaceKind::Fock && ops.size() == 2 && ops[0] == FundamentalOp::create(s) &&
            ops[1] == FundamentalOp::destroy(s)) {
            pops[s] = thermal_populations(x, dims[s] - 1);
        } else if (h.kind == SpaceKind::NLevel && ops.size() == 1 && ops[0].i == ops[0].j) {
            pops[s][ops[0].i] = x;
            double rest = 0.0;
            for (std::size_t k = 0; k < pops[s].size(); ++k) {
                if (k != h.ground) rest += pops[s][k];
            }
            pops[s][h.ground] = 1.0 - rest;
            if (pops[s][h.ground] < -1e-12) throw DomainError("initial populations of '" + h.name + "' exceed 1");
        } else {
            throw DomainError("the oracle cannot represent the initial value of " + render_average(space, a));
        }
    }
    return diagonal_product_state(space, trunc, pops);
}

std::vector<cplx> reference_state(const ModelFile& m, const RHSProgram& prog)
{
    const auto params = m.run.params();
    const auto cfg = m.run.stepper();
    std::vector<cplx> u = initial_state(m, prog);
    if (m.run.tspan) {
        StepperConfig c = cfg;
        c.saveat = {m.run.tspan->second};
        c.save_interval.reset();
        u = integrate(prog, u, m.run.tspan->first, m.run.tspan->second, params, c).u.back();
    }
    if (!m.run.correlation || m.run.steady) u = steady_state(prog, u, params, cfg);
    return u;
}

Table solve_table(const ModelFile& m, const EquationSet& eqs, bool oracle)
{
    if (!m.run.tspan) throw DomainError("solve needs a tspan line");
    const auto params = m.run.params();
    const auto cfg = m.run.stepper();
    RHSProgram prog = lower(eqs);
    Trajectory tr = integrate(prog, initial_state(m, prog), m.run.tspan->first, m.run.tspan->second, params, cfg);
    auto obs = evaluate_observables(m.observables, prog, tr, params);

    Table t;
    const auto& space = *prog.space();
    t.columns.push_back("t");
    for (const auto& a : prog.layout()) {
        t.columns.push_back("re:" + render_average(space, a));
        t.columns.push_back("im:" + render_average(space, a));
    }
    for (std::size_t k = 0; k < obs.size(); ++k) {
        if (m.observables[k].kind == ObservableDef::Kind::Expr) {
            t.columns.push_back("re:" + obs[k].name);
            t.columns.push_back("im:" + obs[k].name);
        } else {
            t.columns.push_back(obs[k].name);
        }
    }
    for (std::size_t n = 0; n < tr.t.size(); ++n) {
        std::vector<double> r{tr.t[n]};
        for (const auto& x : tr.u[n]) {
            r.push_back(x.real());
            r.push_back(x.imag());
        }
        for (std::size_t k = 0; k < obs.size(); ++k) {
            r.push_back(obs[k].values[n].real());
            if (m.observables[k].kind == ObservableDef::Kind::Expr) r.push_back(obs[k].values[n].imag());
        }
        t.rows.push_back(std::move(r));
    }
    if (!oracle) return t;

    const auto trunc = oracle_truncation(m);
    std::vector<QExpr> ops;
    for (const auto& a : prog.layout()) ops.push_back(string_expr(m.model.space, a.ops()));
    auto me = me_evolve(m.model, trunc, oracle_initial_state(m, trunc), m.run.tspan->first, m.run.tspan->second,
                        params, grid_config(cfg, tr.t), ops);
    if (me.t.size() != tr.t.size()) throw InternalError("oracle grid does not match the trajectory");
    double worst = 0.0;
    std::string worst_name;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const std::string name = render_average(space, prog.layout()[k]);
        t.columns.push_back("oracle:re:" + name);
        t.columns.push_back("oracle:im:" + name);
        double dev = 0.0;
        for (std::size_t n = 0; n < tr.t.size(); ++n) {
            t.rows[n].push_back(me.expectations[k][n].real());
            t.rows[n].push_back(me.expectations[k][n].imag());
            dev = std::max(dev, std::abs(me.expectations[k][n] - tr.u[n][k]));
        }
        t.notes.push_back("oracle max deviation " + name + " " + sci(dev));
        if (dev >= worst) {
            worst = dev;
            worst_name = name;
        }
    }
    t.notes.push_back("oracle max deviation overall " + sci(worst) + " (" + worst_name + ")");
    t.notes.push_back("oracle trace error " + sci(me.max_trace_error));
    for (const auto& w : me.warnings) t.notes.push_back("oracle warning: " + w);
    return t;
}

namespace {

struct CorrelationRun {
    RHSProgram base;
    CorrelationSystem cs;
    RHSProgram tau_prog;
    CorrelationInputs in;
};

CorrelationRun correlation_run(const ModelFile& m, const EquationSet& eqs)
{
    if (!m.run.correlation) throw DomainError("the model file has no correlation line");
    RHSProgram base = lower(eqs);
    auto u = reference_state(m, base);
    CorrelationSystem cs =
        build_correlation_system(m.run.correlation->first, m.run.correlation->second, eqs, m.run.steady);
    RHSProgram tp = lower(cs);
    CorrelationInputs in = initial_values(cs, tp, base, u);
    return {std::move(base), std::move(cs), std::move(tp), std::move(in)};
}

std::size_t primary_index(const CorrelationRun& r)
{
    auto k = r.tau_prog.index_of(r.cs.primary);
    if (!k) throw InternalError("correlation variable missing from the τ layout");
    return *k;
}

} // namespace

Table correlate_table(const ModelFile& m, const EquationSet& eqs, bool oracle)
{
    const auto params = m.run.params();
    const auto cfg = m.run.stepper();
    auto run = correlation_run(m, eqs);
    Trajectory tr = correlation_trajectory(run.cs, run.tau_prog, run.in, default_tau(m), params, cfg);
    const std::size_t p = primary_index(run);
    Table t;
    t.columns = {"tau", "re:C", "im:C"};
    for (std::size_t n = 0; n < tr.t.size(); ++n) t.rows.push_back({tr.t[n], tr.u[n][p].real(), tr.u[n][p].imag()});
    if (!oracle) return t;
    if (!m.run.steady) throw DomainError("the oracle computes stationary correlations only");
    const auto trunc = oracle_truncation(m);
    auto me = me_spectrum(m.model, trunc, m.run.correlation->first, m.run.correlation->second, {}, params,
                          default_tau(m), grid_config(cfg, tr.t));
    t.columns.push_back("oracle:re:C");
    t.columns.push_back("oracle:im:C");
    double dev = 0.0;
    for (std::size_t n = 0; n < tr.t.size(); ++n) {
        t.rows[n].push_back(me.correlation[n].real());
        t.rows[n].push_back(me.correlation[n].imag());
        dev = std::max(dev, std::abs(me.correlation[n] - tr.u[n][p]));
    }
    t.notes.push_back("oracle max deviation C " + sci(dev));
    for (const auto& w : me.warnings) t.notes.push_back("oracle warning: " + w);
    return t;
}

Table spectrum_table(const ModelFile& m, const EquationSet& eqs, bool oracle)
{
    const auto params = m.run.params();
    const auto cfg = m.run.stepper();
    const OmegaGrid grid = m.run.omega.value_or(OmegaGrid{});
    const auto omega = linspace(grid.min, grid.max, static_cast<std::size_t>(grid.count));
    auto run = correlation_run(m, eqs);
    SpectrumResult s;
    if (m.run.steady) {
        s = spectrum_laplace(linearize_steady(run.cs, run.tau_prog, run.in, params), omega);
    } else {
        Trajectory tr = correlation_trajectory(run.cs, run.tau_prog, run.in, default_tau(m), params, cfg);
        const std::size_t p = primary_index(run);
        std::vector<cplx> c;
        for (const auto& u : tr.u) c.push_back(u[p]);
        s = spectrum_fourier(tr.t, c, omega);
    }
    Table t;
    t.columns = {"omega", "S"};
    for (std::size_t k = 0; k < s.omega.size(); ++k) t.rows.push_back({s.omega[k], s.S[k]});
    for (double w : s.skipped) t.notes.push_back("skipped singular point omega=" + num(w));
    if (!oracle) return t;
    if (!m.run.steady) throw DomainError("the oracle computes stationary spectra only");
    const auto trunc = oracle_truncation(m);
    StepperConfig c = cfg;
    if (!c.save_interval && c.saveat.empty()) c.save_interval = 0.01;
    auto me = me_spectrum(m.model, trunc, m.run.correlation->first, m.run.correlation->second, s.omega, params,
                          default_tau(m), c);
    t.columns.push_back("oracle:S");
    double dev = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < s.omega.size(); ++k) {
        t.rows[k].push_back(me.spectrum.S[k]);
        dev = std::max(dev, std::abs(me.spectrum.S[k] - s.S[k]));
        peak = std::max(peak, std::abs(me.spectrum.S[k]));
    }
    t.notes.push_back("oracle max deviation S " + sci(dev) + " (relative to oracle peak " + sci(peak > 0 ? dev / peak : dev) + ")");
    for (const auto& w : me.warnings) t.notes.push_back("oracle warning: " + w);
    return t;
}

} // namespace cqf
