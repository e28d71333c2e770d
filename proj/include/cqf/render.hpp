// render.hpp: deterministic text and LaTeX renderings
//
// The text form is the expression syntax accepted by the model-file parser:
// a' is a creation operator, s(g,e) a transition, <...> an average, im the
// imaginary unit.

#pragma once

#include <string>

#include "cqf/qexpr.hpp"
#include "cqf/scalar.hpp"

namespace cqf {

std::string render_coeff(const Coeff& c);
std::string render_op(const ProductSpace& space, const FundamentalOp& op);
std::string render_ops(const ProductSpace& space, const OpString& ops);
std::string render_average(const ProductSpace& space, const AverageSymbol& a);
std::string render(const ProductSpace& space, const ScalarExpr& x);
std::string render(const QExpr& x);

std::string latex_average(const ProductSpace& space, const AverageSymbol& a);
std::string latex(const ProductSpace& space, const ScalarExpr& x);
std::string latex(const QExpr& x);

} // namespace cqf
