// model_file.hpp: the line-oriented model description language

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqf/meanfield.hpp"
#include "cqf/numerics.hpp"
#include "cqf/observables.hpp"

namespace cqf {

struct OmegaGrid {
    double min = -3.141592653589793;
    double max = 3.141592653589793;
    int count = 301;

    friend bool operator==(const OmegaGrid&, const OmegaGrid&) = default;
};

struct RunOptions {
    std::optional<std::pair<double, double>> tspan;
    std::optional<Method> method;
    std::optional<double> dt, rtol, atol, save_every;
    std::optional<std::size_t> max_steps;
    /// Parameter values in declaration order.
    std::vector<std::pair<std::string, double>> values;
    /// Oracle photon cutoffs by Fock factor.
    std::vector<std::pair<std::size_t, int>> cutoffs;
    std::optional<std::pair<QExpr, QExpr>> correlation;
    bool steady = true;
    std::optional<double> tau_max;
    std::optional<OmegaGrid> omega;

    ParamValues params() const;
    /// Solver settings with file overrides applied on top of defaults.
    StepperConfig stepper() const;

    friend bool operator==(const RunOptions&, const RunOptions&) = default;
};

struct ModelFile {
    ModelDefinition model;
    std::vector<QExpr> derive;
    std::optional<OrderSpec> order;
    std::string filter = "none";
    std::vector<ObservableDef> observables;
    std::vector<std::pair<AverageSymbol, ScalarExpr>> initial;
    RunOptions run;

    explicit ModelFile(ModelDefinition m) : model(std::move(m)) {}

    friend bool operator==(const ModelFile& a, const ModelFile& b);
};

/// Parses a model file. Errors are ParseError with line and column.
ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::string& path);

/// Canonical text form; parse_model(print_model(m)) == m.
std::string print_model(const ModelFile& m);

/// Initial state in a program's layout: zeros with the file's overrides.
std::vector<cplx> initial_state(const ModelFile& m, const RHSProgram& prog);

} // namespace cqf
