// numerics.cpp: lowering to register programs, RK4 / Dormand-Prince stepping

#include "cqf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "cqf/completion.hpp"
#include "cqf/error.hpp"
#include "cqf/render.hpp"

namespace cqf {

namespace {

class Builder {
public:
    explicit Builder(std::vector<RHSProgram::Instr>& code) : code_(code) {}

    std::uint32_t emit(RHSProgram::Op op, std::uint32_t a, std::uint32_t b, cplx v = {})
    {
        if (op == RHSProgram::Op::Mul || op == RHSProgram::Op::Add) {
            if (a > b) std::swap(a, b);
        }
        Key key{op, a, b, v.real(), v.imag()};
        auto it = regs_.find(key);
        if (it != regs_.end()) return it->second;
        auto r = static_cast<std::uint32_t>(code_.size());
        code_.push_back(RHSProgram::Instr{op, a, b, v});
        regs_.emplace(key, r);
        return r;
    }

private:
    using Key = std::tuple<RHSProgram::Op, std::uint32_t, std::uint32_t, double, double>;
    std::vector<RHSProgram::Instr>& code_;
    std::map<Key, std::uint32_t> regs_;
};

double max_norm(const std::vector<cplx>& v)
{
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(const std::vector<cplx>& v)
{
    return std::all_of(v.begin(), v.end(), [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

} // namespace

std::optional<std::size_t> RHSProgram::index_of(const AverageSymbol& a) const
{
    for (std::size_t k = 0; k < layout_.size(); ++k) {
        if (layout_[k].ops() == a.ops()) return k;
    }
    return std::nullopt;
}

std::vector<cplx> RHSProgram::bind(const ParamValues& values) const
{
    std::vector<cplx> out;
    out.reserve(params_.size());
    for (const auto& name : params_) {
        auto it = values.find(name);
        if (it == values.end()) throw EvaluationError("no value given for parameter '" + name + "'");
        out.push_back(it->second);
    }
    return out;
}

void RHSProgram::eval(const cplx* u, const cplx* params, const cplx* ext, cplx* du, std::vector<cplx>& r) const
{
    r.resize(code_.size());
    for (std::size_t k = 0; k < code_.size(); ++k) {
        const Instr& in = code_[k];
        switch (in.op) {
        case Op::Const: r[k] = in.value; break;
        case Op::State: r[k] = u[in.a]; break;
        case Op::StateConj: r[k] = std::conj(u[in.a]); break;
        case Op::Param: r[k] = params[in.a]; break;
        case Op::ParamConj: r[k] = std::conj(params[in.a]); break;
        case Op::Ext: r[k] = ext[in.a]; break;
        case Op::ExtConj: r[k] = std::conj(ext[in.a]); break;
        case Op::Mul: r[k] = r[in.a] * r[in.b]; break;
        case Op::Add: r[k] = r[in.a] + r[in.b]; break;
        }
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) du[k] = outputs_[k] < 0 ? cplx{} : r[outputs_[k]];
}

RHSProgram lower(const std::vector<MeanfieldEquation>& eqs, const SpacePtr& space,
                 const std::vector<AverageSymbol>& externals)
{
    RHSProgram prog;
    prog.space_ = space;
    std::map<OpString, std::size_t> state_index;
    for (const auto& e : eqs) {
        if (!state_index.emplace(e.lhs.ops(), prog.layout_.size()).second) {
            throw DomainError("two equations for " + render_average(*space, e.lhs));
        }
        prog.layout_.push_back(e.lhs.representative());
    }
    std::map<OpString, std::size_t> ext_index;
    for (const auto& x : externals) {
        if (ext_index.count(x.ops()) || state_index.count(x.ops())) continue;
        ext_index.emplace(x.ops(), prog.externals_.size());
        prog.externals_.push_back(x.representative());
    }
    std::set<std::string> unknown;
    std::set<std::string> param_names;
    for (const auto& e : eqs) {
        for (const auto& a : e.rhs.averages()) {
            if (!state_index.count(a.ops()) && !ext_index.count(a.ops())) unknown.insert(render_average(*space, a));
        }
        for (const auto& p : e.rhs.parameters()) param_names.insert(p);
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& s : unknown) list += (list.empty() ? "" : ", ") + s;
        throw DomainError("equation set is not closed; missing: " + list);
    }
    prog.params_.assign(param_names.begin(), param_names.end());
    std::map<std::string, std::uint32_t> param_index;
    for (std::size_t k = 0; k < prog.params_.size(); ++k) param_index[prog.params_[k]] = static_cast<std::uint32_t>(k);

    Builder b(prog.code_);
    using Op = RHSProgram::Op;
    auto atom_reg = [&](const Atom& a) -> std::uint32_t {
        if (a.is_param()) return b.emit(a.conj ? Op::ParamConj : Op::Param, param_index.at(a.name), 0);
        auto s = state_index.find(a.avg.ops());
        if (s != state_index.end()) {
            return b.emit(a.avg.conj() ? Op::StateConj : Op::State, static_cast<std::uint32_t>(s->second), 0);
        }
        auto x = ext_index.at(a.avg.ops());
        return b.emit(a.avg.conj() ? Op::ExtConj : Op::Ext, static_cast<std::uint32_t>(x), 0);
    };
    prog.outputs_.assign(eqs.size(), -1);
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        const auto& e = eqs[k];
        ScalarExpr rhs = e.lhs.conj() ? e.rhs.conj() : e.rhs;
        std::optional<std::uint32_t> sum;
        for (const auto& t : rhs.terms()) {
            std::optional<std::uint32_t> prod;
            for (const auto& p : t.factors) {
                std::uint32_t r = atom_reg(p.atom);
                for (std::uint32_t n = 0; n < p.exp; ++n) prod = prod ? b.emit(Op::Mul, *prod, r) : r;
            }
            std::uint32_t term;
            if (!prod) term = b.emit(Op::Const, 0, 0, t.coeff.to_complex());
            else if (t.coeff.is_one()) term = *prod;
            else term = b.emit(Op::Mul, b.emit(Op::Const, 0, 0, t.coeff.to_complex()), *prod);
            sum = sum ? b.emit(Op::Add, *sum, term) : term;
        }
        if (sum) prog.outputs_[k] = *sum;
    }
    return prog;
}

RHSProgram lower(const EquationSet& eqs)
{
    return lower(eqs.equations, eqs.model.space);
}

void StepperConfig::validate() const
{
    if (method == Method::RK4 && !(dt > 0)) throw DomainError("step size must be positive");
    if (method == Method::RK45 && (!(rtol > 0) || !(atol > 0))) throw DomainError("tolerances must be positive");
    if (max_steps == 0) throw DomainError("max_steps must be positive");
    if (save_interval && !(*save_interval > 0)) throw DomainError("save interval must be positive");
}

namespace {

std::vector<double> output_times(const StepperConfig& cfg, double t0, double t1)
{
    std::vector<double> out;
    if (!cfg.saveat.empty()) {
        for (double t : cfg.saveat) {
            if (t >= t0 && t <= t1) out.push_back(t);
        }
    } else if (cfg.save_interval) {
        const double h = *cfg.save_interval;
        const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / h + 1e-9));
        for (std::size_t k = 0; k <= n; ++k) out.push_back(t0 + static_cast<double>(k) * h);
        if (out.back() < t1 - 1e-12 * std::max(1.0, std::abs(t1))) out.push_back(t1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Stepper {
    const OdeRhs& f;
    std::size_t n;
    std::vector<cplx> k1, k2, k3, k4, k5, k6, k7, tmp;

    Stepper(const OdeRhs& fn, std::size_t size)
        : f(fn), n(size), k1(size), k2(size), k3(size), k4(size), k5(size), k6(size), k7(size), tmp(size)
    {
    }

    void rk4(double t, const std::vector<cplx>& u, double h, std::vector<cplx>& out)
    {
        f(t, u.data(), k1.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, tmp.data(), k2.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        f(t + 0.5 * h, tmp.data(), k3.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        f(t + h, tmp.data(), k4.data());
        for (std::size_t i = 0; i < n; ++i) out[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    /// Dormand-Prince 5(4) step; k1 must hold f(t, u). Returns the scaled
    /// error norm; k7 holds f(t + h, out) afterwards.
    double dp45(double t, const std::vector<cplx>& u, double h, std::vector<cplx>& out, double rtol, double atol)
    {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * a21 * k1[i];
        f(t + c2 * h, tmp.data(), k2.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, tmp.data(), k3.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, tmp.data(), k4.data());
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, tmp.data(), k5.data());
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = u[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        }
        f(t + h, tmp.data(), k6.data());
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = u[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        }
        f(t + h, out.data(), k7.data());
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double scale = atol + rtol * std::max(std::abs(u[i]), std::abs(out[i]));
            double r = std::abs(err) / scale;
            acc += r * r;
        }
        return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
    }
};

} // namespace

Trajectory integrate_ode(const OdeRhs& f, std::vector<cplx> u0, double t0, double t1, const StepperConfig& cfg)
{
    cfg.validate();
    if (!(t1 > t0)) throw DomainError("integration interval must satisfy t0 < t1");
    if (!all_finite(u0)) throw DomainError("initial state contains non-finite values");
    const std::size_t n = u0.size();
    const auto saves = output_times(cfg, t0, t1);
    const bool every_step = saves.empty();
    Trajectory tr;
    auto record = [&](double t, const std::vector<cplx>& u) {
        tr.t.push_back(t);
        tr.u.push_back(u);
    };
    std::size_t next_save = 0;
    if (every_step) {
        record(t0, u0);
    } else {
        while (next_save < saves.size() && saves[next_save] <= t0) {
            record(saves[next_save], u0);
            ++next_save;
        }
    }
    Stepper st(f, n);
    std::vector<cplx> u = std::move(u0);
    std::vector<cplx> un(n);
    double t = t0;
    const double span_eps = 1e-12 * std::max(1.0, std::abs(t1));
    std::size_t steps = 0;
    double h = cfg.method == Method::RK4 ? cfg.dt : 0.0;
    if (cfg.method == Method::RK45) {
        f(t, u.data(), st.k1.data());
        double d0 = max_norm(u);
        double d1 = max_norm(st.k1);
        h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
        h = std::min(h, t1 - t0);
    }
    while (t < t1 - span_eps) {
        if (++steps > cfg.max_steps) {
            throw IntegrationError("step limit of " + std::to_string(cfg.max_steps) + " reached", t);
        }
        double target = t1;
        if (!every_step && next_save < saves.size()) target = saves[next_save];
        double step = std::min(h, t1 - t);
        bool clipped = false;
        if (t + step > target - span_eps) {
            step = target - t;
            clipped = true;
        }
        if (cfg.method == Method::RK4) {
            st.rk4(t, u, step, un);
        } else {
            double err = st.dp45(t, u, step, un, cfg.rtol, cfg.atol);
            if (!std::isfinite(err) || err > 1.0) {
                double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
                h = step * factor;
                if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow", t);
                continue;
            }
            double factor = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            if (!clipped || step * factor > h) h = step * factor;
        }
        if (!all_finite(un)) throw IntegrationError("state became non-finite", t);
        t = clipped ? target : t + step;
        std::swap(u, un);
        if (cfg.method == Method::RK45) std::swap(st.k1, st.k7);
        if (every_step) {
            record(t, u);
        } else {
            while (next_save < saves.size() && saves[next_save] <= t + span_eps) {
                record(saves[next_save], u);
                ++next_save;
            }
        }
    }
    if (every_step && tr.t.back() != t1) tr.t.back() = t1;
    return tr;
}

Trajectory integrate(const RHSProgram& prog, std::vector<cplx> u0, double t0, double t1, const ParamValues& params,
                     const StepperConfig& cfg, const std::vector<cplx>& externals)
{
    if (u0.size() != prog.size()) {
        throw DomainError("initial state has " + std::to_string(u0.size()) + " entries, expected " +
                          std::to_string(prog.size()));
    }
    if (externals.size() != prog.externals().size()) throw DomainError("external input vector has the wrong size");
    const auto p = prog.bind(params);
    std::vector<cplx> scratch;
    OdeRhs f = [&](double, const cplx* u, cplx* du) { prog.eval(u, p.data(), externals.data(), du, scratch); };
    Trajectory tr = integrate_ode(f, std::move(u0), t0, t1, cfg);
    tr.layout = prog.layout();
    return tr;
}

std::vector<cplx> steady_state_ode(const OdeRhs& f, std::vector<cplx> u0, const StepperConfig& cfg,
                                   const SteadyConfig& sc)
{
    if (!(sc.tol > 0) || !(sc.chunk > 0) || !(sc.t_max > 0)) throw DomainError("invalid steady-state settings");
    std::vector<cplx> u = std::move(u0);
    std::vector<cplx> du(u.size());
    StepperConfig chunk_cfg = cfg;
    chunk_cfg.saveat.clear();
    chunk_cfg.save_interval.reset();
    double t = 0.0;
    double residual = 0.0;
    while (true) {
        f(t, u.data(), du.data());
        residual = max_norm(du);
        if (residual < sc.tol * std::max(1.0, max_norm(u))) return u;
        if (t >= sc.t_max) break;
        chunk_cfg.saveat = {t + sc.chunk};
        auto tr = integrate_ode(f, u, t, t + sc.chunk, chunk_cfg);
        u = tr.u.back();
        t += sc.chunk;
    }
    throw NonStationaryError("no steady state reached by t = " + std::to_string(t) + " (residual " +
                                 std::to_string(residual) + ")",
                             residual);
}

std::vector<cplx> steady_state(const RHSProgram& prog, std::vector<cplx> u0, const ParamValues& params,
                               const StepperConfig& cfg, const SteadyConfig& sc, const std::vector<cplx>& externals)
{
    if (u0.size() != prog.size()) throw DomainError("initial state has the wrong size");
    if (externals.size() != prog.externals().size()) throw DomainError("external input vector has the wrong size");
    const auto p = prog.bind(params);
    std::vector<cplx> scratch;
    OdeRhs f = [&](double, const cplx* u, cplx* du) { prog.eval(u, p.data(), externals.data(), du, scratch); };
    return steady_state_ode(f, std::move(u0), cfg, sc);
}

std::optional<cplx> lookup(const RHSProgram& prog, const std::vector<cplx>& u, const AverageSymbol& a)
{
    if (a.order() == 0) return cplx(1.0);
    auto idx = prog.index_of(a);
    if (!idx) return std::nullopt;
    return a.conj() ? std::conj(u[*idx]) : u[*idx];
}

} // namespace cqf
