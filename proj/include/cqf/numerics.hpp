// numerics.hpp: lowering closed equation sets to evaluation programs and integrating them

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cqf/meanfield.hpp"

namespace cqf {

using cplx = std::complex<double>;
using ParamValues = std::map<std::string, cplx>;

/// Flattened arithmetic plan evaluating every derivative of a closed set.
/// Registers are written once, in order; equal subexpressions share a
/// register.
class RHSProgram {
public:
    enum class Op : std::uint8_t { Const, State, StateConj, Param, ParamConj, Ext, ExtConj, Mul, Add };

    struct Instr {
        Op op;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        cplx value{};
    };

    const std::vector<AverageSymbol>& layout() const noexcept { return layout_; }
    const std::vector<std::string>& params() const noexcept { return params_; }
    const std::vector<AverageSymbol>& externals() const noexcept { return externals_; }
    const std::vector<Instr>& code() const noexcept { return code_; }
    std::size_t size() const noexcept { return layout_.size(); }
    SpacePtr space() const noexcept { return space_; }

    std::optional<std::size_t> index_of(const AverageSymbol& a) const;

    /// Parameter vector in program order; throws EvaluationError naming a
    /// missing parameter.
    std::vector<cplx> bind(const ParamValues& values) const;

    void eval(const cplx* u, const cplx* params, const cplx* ext, cplx* du, std::vector<cplx>& scratch) const;

private:
    friend RHSProgram lower(const std::vector<MeanfieldEquation>&, const SpacePtr&, const std::vector<AverageSymbol>&);

    SpacePtr space_;
    std::vector<AverageSymbol> layout_;
    std::vector<std::string> params_;
    std::vector<AverageSymbol> externals_;
    std::vector<Instr> code_;
    std::vector<std::int64_t> outputs_; // register per equation, -1 = zero
};

/// Lowers a closed set. Averages listed in `externals` are read from an
/// input vector instead of the state. Throws DomainError listing unknown
/// averages when the set is not closed.
RHSProgram lower(const std::vector<MeanfieldEquation>& eqs, const SpacePtr& space,
                 const std::vector<AverageSymbol>& externals = {});
RHSProgram lower(const EquationSet& eqs);

enum class Method { RK4, RK45 };

struct StepperConfig {
    Method method = Method::RK4;
    double dt = 0.01;
    double rtol = 1e-8;
    double atol = 1e-10;
    std::size_t max_steps = 50'000'000;
    /// Explicit output times; when empty and save_interval is unset every
    /// solver step is recorded.
    std::vector<double> saveat;
    std::optional<double> save_interval;

    void validate() const;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<cplx>> u;
    std::vector<AverageSymbol> layout;
};

using OdeRhs = std::function<void(double t, const cplx* u, cplx* du)>;

/// Generic explicit integrator over a complex state.
Trajectory integrate_ode(const OdeRhs& f, std::vector<cplx> u0, double t0, double t1, const StepperConfig& cfg);

Trajectory integrate(const RHSProgram& prog, std::vector<cplx> u0, double t0, double t1, const ParamValues& params,
                     const StepperConfig& cfg, const std::vector<cplx>& externals = {});

struct SteadyConfig {
    double tol = 1e-8;
    double chunk = 10.0;
    double t_max = 1e5;
};

/// Integrates until the derivative's max-norm drops below
/// tol * max(1, max-norm of state). Throws NonStationaryError at t_max.
std::vector<cplx> steady_state_ode(const OdeRhs& f, std::vector<cplx> u0, const StepperConfig& cfg,
                                   const SteadyConfig& sc = {});
std::vector<cplx> steady_state(const RHSProgram& prog, std::vector<cplx> u0, const ParamValues& params,
                               const StepperConfig& cfg, const SteadyConfig& sc = {},
                               const std::vector<cplx>& externals = {});

/// Value of any average (or its conjugate) from a state in `prog`'s layout.
std::optional<cplx> lookup(const RHSProgram& prog, const std::vector<cplx>& u, const AverageSymbol& a);

} // namespace cqf
