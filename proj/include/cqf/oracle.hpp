// oracle.hpp: brute-force Lindblad master equation in truncated Hilbert spaces

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <string>
#include <vector>

#include "cqf/correlation.hpp"
#include "cqf/meanfield.hpp"
#include "cqf/numerics.hpp"

namespace cqf {

/// Photon cutoff per Fock factor (dimension = cutoff + 1).
struct TruncationSpec {
    std::map<std::size_t, int> cutoffs;

    static TruncationSpec uniform(const ProductSpace& space, int cutoff);
    std::vector<int> dims(const ProductSpace& space) const;
};

using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Basis: tensor product in factor order, first factor most significant.
SparseMatrix to_sparse(const QExpr& x, const TruncationSpec& trunc, const ParamValues& params = {});
DenseMatrix to_matrix(const QExpr& x, const TruncationSpec& trunc, const ParamValues& params = {});

/// Product of per-factor diagonal states (populations in basis order).
DenseMatrix diagonal_product_state(const ProductSpace& space, const TruncationSpec& trunc,
                                   const std::vector<std::vector<double>>& populations);
/// Thermal populations with mean n on a truncated mode, renormalized.
std::vector<double> thermal_populations(double mean, int cutoff);

/// ρ̇ = −i[H,ρ] + Σ γ (cρc† − ½{c†c, ρ}) assembled from the model.
class Liouvillian {
public:
    Liouvillian(const ModelDefinition& model, const TruncationSpec& trunc, const ParamValues& params);

    std::size_t dim() const noexcept { return dim_; }
    void apply(const cplx* rho, cplx* out) const;
    /// Steady state by a sparse LU solve with the trace condition.
    DenseMatrix steady_state() const;

private:
    std::size_t dim_;
    SparseMatrix heff_;
    SparseMatrix heff_dag_;
    std::vector<std::pair<cplx, SparseMatrix>> jumps_;
    std::vector<SparseMatrix> jumps_dag_;
};

struct MeResult {
    std::vector<double> t;
    /// One series per requested observable.
    std::vector<std::vector<cplx>> expectations;
    DenseMatrix final_rho;
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    std::vector<std::string> warnings;
};

inline constexpr double kTruncationLeakThreshold = 1e-4;

MeResult me_evolve(const ModelDefinition& model, const TruncationSpec& trunc, const DenseMatrix& rho0, double t0,
                   double t1, const ParamValues& params, const StepperConfig& cfg,
                   const std::vector<QExpr>& observables);

cplx expectation(const DenseMatrix& rho, const SparseMatrix& op);

/// Population above `threshold` in the top level of any Fock factor.
std::vector<std::string> truncation_warnings(const ProductSpace& space, const TruncationSpec& trunc,
                                             const DenseMatrix& rho, double threshold = kTruncationLeakThreshold);

struct MeSpectrum {
    SpectrumResult spectrum;
    std::vector<double> tau;
    std::vector<cplx> correlation;
    std::vector<std::string> warnings;
};

/// Evolves B ρss in the delay, takes C(τ) = tr(A ρ(τ)) and its Fourier transform.
MeSpectrum me_spectrum(const ModelDefinition& model, const TruncationSpec& trunc, const QExpr& A, const QExpr& B,
                       const std::vector<double>& omega, const ParamValues& params, double tau_max,
                       const StepperConfig& cfg);

} // namespace cqf
