// observables.hpp: derived quantities evaluated along trajectories

#pragma once

#include <string>
#include <vector>

#include "cqf/numerics.hpp"

namespace cqf {

struct ObservableDef {
    enum class Kind { Expr, MandelQ, Temperature };

    std::string name;
    Kind kind = Kind::Expr;
    ScalarExpr expr;          // Expr
    std::size_t subspace = 0; // MandelQ, Temperature: the Fock factor
    double omega = 0.0;       // Temperature: mode frequency in s^-1

    friend bool operator==(const ObservableDef&, const ObservableDef&) = default;
};

struct Series {
    std::string name;
    std::vector<cplx> values;
};

inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;

/// (Δn² − <n>)/<n> from <n> = <a†a> and <a†a†aa>.
double mandel_q(double n, double n2_normal);
/// Temperature in kelvin of a mode with occupation n at angular frequency omega.
double mode_temperature(double n, double omega);

/// Averages an observable reads.
std::vector<AverageSymbol> observable_averages(const ObservableDef& def);

/// Throws DomainError naming the missing average and the order it needs.
std::vector<Series> evaluate_observables(const std::vector<ObservableDef>& defs, const RHSProgram& prog,
                                         const Trajectory& tr, const ParamValues& params);

} // namespace cqf
