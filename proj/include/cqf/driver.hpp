// driver.hpp: the derive / solve / correlate / spectrum pipelines

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cqf/completion.hpp"
#include "cqf/model_file.hpp"
#include "cqf/oracle.hpp"

namespace cqf {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// Warnings and summaries; written as '# ' lines after the data.
    std::vector<std::string> notes;

    void write_csv(std::ostream& out) const;
    std::size_t column(const std::string& name) const;
};

/// Command-line overrides of the model file.
struct RunSettings {
    std::optional<OrderSpec> order;
    std::optional<std::string> filter;
    std::optional<Method> method;
    std::optional<double> dt, rtol, atol;
    std::optional<OmegaGrid> omega;
    bool oracle = false;
    /// Load equations from this archive instead of deriving them.
    std::optional<std::string> archive_in;

    void apply(ModelFile& m) const;
};

/// Derives and completes the file's equations. Throws DomainError without
/// derive lines.
EquationSet derive_equations(const ModelFile& m, const CompletionOptions& opts = {});

std::string dump_equations(const EquationSet& eqs, bool latex);

/// Photon cutoffs from the file; DomainError if a Fock factor has none.
TruncationSpec oracle_truncation(const ModelFile& m);
/// Product state matching the file's initial values: factors start in the
/// ground level or vacuum, NLevel populations and Fock occupations (thermal)
/// may be overridden. Other initial values cannot be represented.
DenseMatrix oracle_initial_state(const ModelFile& m, const TruncationSpec& trunc);

/// Columns: t, re:<avg>, im:<avg> per state variable, then observables.
Table solve_table(const ModelFile& m, const EquationSet& eqs, bool oracle);
/// Columns: tau, re:C, im:C.
Table correlate_table(const ModelFile& m, const EquationSet& eqs, bool oracle);
/// Columns: omega, S.
Table spectrum_table(const ModelFile& m, const EquationSet& eqs, bool oracle);

/// State at the end of tspan; with a steady correlation it is relaxed to
/// the stationary point.
std::vector<cplx> reference_state(const ModelFile& m, const RHSProgram& prog);

} // namespace cqf
