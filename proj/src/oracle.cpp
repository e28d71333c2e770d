// oracle.cpp: matrix representations and master-equation evolution

#include "cqf/oracle.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

#include "cqf/error.hpp"

namespace cqf {

namespace {

SparseMatrix identity(int d)
{
    SparseMatrix m(d, d);
    m.setIdentity();
    return m;
}

SparseMatrix factor_op(const HilbertSpace& h, const FundamentalOp& op, int d)
{
    std::vector<Eigen::Triplet<cplx>> trip;
    switch (op.kind) {
    case OpKind::Destroy:
        for (int n = 1; n < d; ++n) trip.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
        break;
    case OpKind::Create:
        for (int n = 1; n < d; ++n) trip.emplace_back(n, n - 1, std::sqrt(static_cast<double>(n)));
        break;
    case OpKind::Transition:
        if (op.i >= h.levels.size() || op.j >= h.levels.size()) throw DomainError("transition level out of range");
        trip.emplace_back(op.i, op.j, 1.0);
        break;
    }
    SparseMatrix m(d, d);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseMatrix kron_all(const std::vector<SparseMatrix>& parts)
{
    SparseMatrix acc = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        SparseMatrix next = Eigen::kroneckerProduct(acc, parts[k]);
        acc = std::move(next);
    }
    return acc;
}

Bindings param_bindings(const ParamValues& params)
{
    Bindings b;
    for (const auto& [k, v] : params) b.params[k] = v;
    return b;
}

} // namespace

TruncationSpec TruncationSpec::uniform(const ProductSpace& space, int cutoff)
{
    TruncationSpec t;
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (space[s].kind == SpaceKind::Fock) t.cutoffs[s] = cutoff;
    }
    return t;
}

std::vector<int> TruncationSpec::dims(const ProductSpace& space) const
{
    std::vector<int> d;
    for (std::size_t s = 0; s < space.size(); ++s) {
        const auto& h = space[s];
        if (h.copy_of >= 0) throw DomainError("the master-equation oracle does not represent time-t copies");
        if (h.kind == SpaceKind::NLevel) {
            d.push_back(static_cast<int>(h.levels.size()));
            continue;
        }
        auto it = cutoffs.find(s);
        if (it == cutoffs.end()) throw DomainError("no photon cutoff given for Fock space '" + h.name + "'");
        if (it->second < 1) throw DomainError("photon cutoff for '" + h.name + "' must be at least 1");
        d.push_back(it->second + 1);
    }
    return d;
}

SparseMatrix to_sparse(const QExpr& x, const TruncationSpec& trunc, const ParamValues& params)
{
    const auto& space = *x.space();
    const auto dims = trunc.dims(space);
    long total = 1;
    for (int d : dims) total *= d;
    SparseMatrix out(total, total);
    const Bindings b = param_bindings(params);
    for (const auto& t : x.terms()) {
        std::vector<SparseMatrix> parts;
        for (int d : dims) parts.push_back(identity(d));
        for (const auto& o : t.ops) {
            SparseMatrix next = parts[o.subspace] * factor_op(space[o.subspace], o, dims[o.subspace]);
            parts[o.subspace] = std::move(next);
        }
        out += scalar_evaluate(t.coeff, b) * kron_all(parts);
    }
    out.makeCompressed();
    return out;
}

DenseMatrix to_matrix(const QExpr& x, const TruncationSpec& trunc, const ParamValues& params)
{
    return DenseMatrix(to_sparse(x, trunc, params));
}

DenseMatrix diagonal_product_state(const ProductSpace& space, const TruncationSpec& trunc,
                                   const std::vector<std::vector<double>>& populations)
{
    const auto dims = trunc.dims(space);
    if (populations.size() != dims.size()) throw DomainError("one population vector per factor is required");
    Eigen::VectorXcd diag = Eigen::VectorXcd::Ones(1);
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (static_cast<int>(populations[s].size()) != dims[s]) {
            throw DomainError("population vector for factor '" + space[s].name + "' has the wrong length");
        }
        Eigen::VectorXcd f(dims[s]);
        for (int k = 0; k < dims[s]; ++k) f(k) = populations[s][k];
        Eigen::VectorXcd next(diag.size() * f.size());
        for (Eigen::Index i = 0; i < diag.size(); ++i) next.segment(i * f.size(), f.size()) = diag(i) * f;
        diag = std::move(next);
    }
    return diag.asDiagonal();
}

std::vector<double> thermal_populations(double mean, int cutoff)
{
    if (mean < 0) throw DomainError("thermal occupation must be non-negative");
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
    const double r = mean / (1.0 + mean);
    double sum = 0.0;
    for (int k = 0; k <= cutoff; ++k) {
        p[k] = std::pow(r, k) / (1.0 + mean);
        sum += p[k];
    }
    for (auto& x : p) x /= sum;
    return p;
}

Liouvillian::Liouvillian(const ModelDefinition& model, const TruncationSpec& trunc, const ParamValues& params)
{
    model.validate();
    SparseMatrix h = to_sparse(model.hamiltonian, trunc, params);
    dim_ = static_cast<std::size_t>(h.rows());
    SparseMatrix loss(h.rows(), h.cols());
    const Bindings b = param_bindings(params);
    for (std::size_t k = 0; k < model.jumps.size(); ++k) {
        cplx rate = scalar_evaluate(model.rates[k], b);
        SparseMatrix c = to_sparse(model.jumps[k], trunc, params);
        SparseMatrix cd = c.adjoint();
        SparseMatrix cdc = cd * c;
        loss += rate * cdc;
        jumps_.emplace_back(rate, c);
        jumps_dag_.push_back(cd);
    }
    heff_ = h - cplx(0.0, 0.5) * loss;
    heff_dag_ = heff_.adjoint();
}

void Liouvillian::apply(const cplx* rho, cplx* out) const
{
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::Map<const DenseMatrix> r(rho, n, n);
    Eigen::Map<DenseMatrix> o(out, n, n);
    const cplx I(0.0, 1.0);
    o.noalias() = -I * (heff_ * r);
    o.noalias() += I * (r * heff_dag_);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        DenseMatrix cr = jumps_[k].second * r;
        o.noalias() += jumps_[k].first * (cr * jumps_dag_[k]);
    }
}

DenseMatrix Liouvillian::steady_state() const
{
    const auto n = static_cast<Eigen::Index>(dim_);
    const cplx I(0.0, 1.0);
    SparseMatrix id = identity(static_cast<int>(n));
    SparseMatrix heff_conj = heff_.conjugate();
    SparseMatrix L = -I * SparseMatrix(Eigen::kroneckerProduct(id, heff_));
    L += I * SparseMatrix(Eigen::kroneckerProduct(heff_conj, id));
    for (const auto& [rate, c] : jumps_) {
        SparseMatrix cc = c.conjugate();
        L += rate * SparseMatrix(Eigen::kroneckerProduct(cc, c));
    }
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index col = 0; col < L.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) trip.emplace_back(0, k * n + k, 1.0);
    SparseMatrix A(n * n, n * n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw EvaluationError("Liouvillian steady-state factorization failed");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw EvaluationError("Liouvillian steady-state solve failed");
    DenseMatrix rho = Eigen::Map<DenseMatrix>(x.data(), n, n);
    return 0.5 * (rho + rho.adjoint());
}

cplx expectation(const DenseMatrix& rho, const SparseMatrix& op)
{
    return (op * rho).trace();
}

std::vector<std::string> truncation_warnings(const ProductSpace& space, const TruncationSpec& trunc,
                                             const DenseMatrix& rho, double threshold)
{
    const auto dims = trunc.dims(space);
    std::vector<std::string> out;
    long stride = 1;
    std::vector<long> strides(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
        strides[s] = stride;
        stride *= dims[s];
    }
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (space[s].kind != SpaceKind::Fock) continue;
        double top = 0.0;
        for (Eigen::Index k = 0; k < rho.rows(); ++k) {
            if ((k / strides[s]) % dims[s] == dims[s] - 1) top += rho(k, k).real();
        }
        if (top > threshold) {
            out.push_back("population " + std::to_string(top) + " at the cutoff of Fock space '" + space[s].name +
                          "' exceeds " + std::to_string(threshold));
        }
    }
    return out;
}

MeResult me_evolve(const ModelDefinition& model, const TruncationSpec& trunc, const DenseMatrix& rho0, double t0,
                   double t1, const ParamValues& params, const StepperConfig& cfg,
                   const std::vector<QExpr>& observables)
{
    Liouvillian L(model, trunc, params);
    const auto n = static_cast<Eigen::Index>(L.dim());
    if (rho0.rows() != n || rho0.cols() != n) throw DomainError("initial density matrix has the wrong dimension");
    std::vector<SparseMatrix> obs;
    for (const auto& o : observables) obs.push_back(to_sparse(o, trunc, params));
    std::vector<cplx> u(rho0.data(), rho0.data() + rho0.size());
    OdeRhs f = [&](double, const cplx* x, cplx* dx) { L.apply(x, dx); };
    Trajectory tr = integrate_ode(f, std::move(u), t0, t1, cfg);
    MeResult res;
    res.t = tr.t;
    res.expectations.assign(obs.size(), {});
    std::set<std::string> warnings;
    for (const auto& snap : tr.u) {
        Eigen::Map<const DenseMatrix> rho(snap.data(), n, n);
        res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - 1.0));
        res.max_hermiticity_error = std::max(res.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        for (std::size_t k = 0; k < obs.size(); ++k) res.expectations[k].push_back(expectation(rho, obs[k]));
        for (auto& w : truncation_warnings(*model.space, trunc, rho)) warnings.insert(w);
    }
    res.final_rho = Eigen::Map<const DenseMatrix>(tr.u.back().data(), n, n);
    res.warnings.assign(warnings.begin(), warnings.end());
    return res;
}

MeSpectrum me_spectrum(const ModelDefinition& model, const TruncationSpec& trunc, const QExpr& A, const QExpr& B,
                       const std::vector<double>& omega, const ParamValues& params, double tau_max,
                       const StepperConfig& cfg)
{
    Liouvillian L(model, trunc, params);
    const auto n = static_cast<Eigen::Index>(L.dim());
    DenseMatrix rho_ss = L.steady_state();
    MeSpectrum out;
    out.warnings = truncation_warnings(*model.space, trunc, rho_ss);
    SparseMatrix a = to_sparse(A, trunc, params);
    DenseMatrix x0 = to_sparse(B, trunc, params) * rho_ss;
    std::vector<cplx> u(x0.data(), x0.data() + x0.size());
    OdeRhs f = [&](double, const cplx* x, cplx* dx) { L.apply(x, dx); };
    Trajectory tr = integrate_ode(f, std::move(u), 0.0, tau_max, cfg);
    out.tau = tr.t;
    for (const auto& snap : tr.u) out.correlation.push_back(expectation(Eigen::Map<const DenseMatrix>(snap.data(), n, n), a));
    out.spectrum = spectrum_fourier(out.tau, out.correlation, omega);
    return out;
}

} // namespace cqf
