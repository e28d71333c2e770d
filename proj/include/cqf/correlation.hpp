// correlation.hpp: two-time correlation functions and power spectra

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cqf/numerics.hpp"

namespace cqf {

/// Equations in the delay τ for ⟨A(t+τ)B(t)⟩. B's operators live on frozen
/// copies of their factors appended to the product space, so the lifted
/// model never acts on them.
struct CorrelationSystem {
    SpacePtr space;                      // extended space
    EquationSet tau;                     // τ-equations over `space`
    AverageSymbol primary;               // ⟨A B⟩ with B frozen
    std::vector<AverageSymbol> externals; // inputs taken from the state at t
    bool steady = true;
    QExpr a, b;                          // on the original space
    SpacePtr base_space;
    OrderSpec base_order;
    FilterFunction base_filter;

    CorrelationSystem(SpacePtr ext, ModelDefinition lifted_model, const QExpr& A, const QExpr& B)
        : space(std::move(ext)), tau(std::move(lifted_model)), a(A), b(B), base_space(A.space())
    {
    }

    /// Maps operators on frozen copies back to their original factors.
    OpString to_base(const OpString& ops) const;
};

/// Builds and completes the τ-system. With `steady`, single-time averages at
/// t+τ are constants taken from the state at t; otherwise they co-evolve.
CorrelationSystem build_correlation_system(const QExpr& A, const QExpr& B, const EquationSet& eqs, bool steady);

struct CorrelationInputs {
    std::vector<cplx> y0;        // τ = 0 values in the τ layout
    std::vector<cplx> externals; // constants in RHSProgram::externals order
};

/// Initial values and constants from the state `u` of the original system.
/// Throws ClosureError when a needed average is not in `base`.
CorrelationInputs initial_values(const CorrelationSystem& cs, const RHSProgram& tau_prog, const RHSProgram& base,
                                 const std::vector<cplx>& u);

RHSProgram lower(const CorrelationSystem& cs);

struct LinearSystem {
    Eigen::MatrixXcd M;
    Eigen::VectorXcd d;
    Eigen::VectorXcd y0;
    std::size_t primary = 0;
};

/// dy/dτ = M y + d by coefficient collection over the lowered τ layout.
LinearSystem linearize_steady(const CorrelationSystem& cs, const RHSProgram& tau_prog, const CorrelationInputs& in,
                              const ParamValues& params);

struct SpectrumResult {
    std::vector<double> omega;
    std::vector<double> S;
    /// Grid points dropped because iω − M was singular.
    std::vector<double> skipped;
};

/// S(ω) = 2 Re x₁ with (iω − M) x = y(0) + d/(iω).
SpectrumResult spectrum_laplace(const LinearSystem& ls, const std::vector<double>& omega);

/// S(ω) = 2 Re ∫ e^{−iωτ} C(τ) dτ over the sampled window, C interpolated
/// linearly between samples and integrated exactly.
SpectrumResult spectrum_fourier(const std::vector<double>& tau, const std::vector<cplx>& c,
                                const std::vector<double>& omega);

/// τ-trajectory of the system; column `primary` of the result is C(τ).
Trajectory correlation_trajectory(const CorrelationSystem& cs, const RHSProgram& tau_prog,
                                  const CorrelationInputs& in, double tau_max, const ParamValues& params,
                                  const StepperConfig& cfg);

std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace cqf
