// render.cpp: text and LaTeX printers

#include "cqf/render.hpp"

#include <utility>
#include <vector>

namespace cqf {

namespace {


template <class AtomFn>
std::string render_term(const Term& t, AtomFn atom, const std::string& mul, const std::string& suffix_ops)
{
    std::string factors;
    for (const auto& p : t.factors) {
        if (!factors.empty()) factors += mul;
        factors += atom(p.atom);
        if (p.exp != 1) factors += "^" + std::to_string(p.exp);
    }
    if (!suffix_ops.empty()) {
        if (!factors.empty()) factors += mul;
        factors += suffix_ops;
    }
    if (factors.empty()) return render_coeff(t.coeff);
    if (t.coeff.is_one()) return factors;
    if (t.coeff == Coeff(-1)) return "-" + factors;
    return render_coeff(t.coeff) + mul + factors;
}

std::string join_terms(const std::vector<std::string>& parts)
{
    if (parts.empty()) return "0";
    std::string out = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const auto& p = parts[k];
        if (!p.empty() && p[0] == '-') out += " - " + p.substr(1);
        else out += " + " + p;
    }
    return out;
}

std::string text_atom(const ProductSpace& space, const Atom& a)
{
    if (a.is_param()) return a.conj ? "conj(" + a.name + ")" : a.name;
    return render_average(space, a.avg);
}

std::string latex_coeff_part(const Rational& r)
{
    if (r.is_integer()) return std::to_string(r.num());
    std::string sign = r.num() < 0 ? "-" : "";
    return sign + "\\frac{" + std::to_string(r.num() < 0 ? -r.num() : r.num()) + "}{" + std::to_string(r.den()) + "}";
}

std::string latex_coeff(const Coeff& c)
{
    if (c.is_real()) return latex_coeff_part(c.re());
    std::string im;
    if (c.im() == Rational(1)) im = "i";
    else if (c.im() == Rational(-1)) im = "-i";
    else im = latex_coeff_part(c.im()) + "i";
    if (c.re().is_zero()) return im;
    return "\\left(" + latex_coeff_part(c.re()) + (im[0] == '-' ? " " : " + ") + im + "\\right)";
}

std::string latex_op(const ProductSpace& space, const FundamentalOp& op)
{
    const auto& h = space[op.subspace];
    std::string name = h.op_name == "s" ? "\\sigma" : h.op_name;
    if (op.kind == OpKind::Destroy) return name;
    if (op.kind == OpKind::Create) return name + "^\\dagger";
    return name + "^{" + h.levels[op.i] + h.levels[op.j] + "}";
}

// Greek letters become commands; a trailing tail is subscripted (Δ3 -> \Delta_{3}).
std::string latex_name(const std::string& name)
{
    static const std::vector<std::pair<std::string, std::string>> greek{
        {"α", "\\alpha"}, {"β", "\\beta"},   {"γ", "\\gamma"}, {"δ", "\\delta"},   {"ε", "\\epsilon"},
        {"η", "\\eta"},   {"θ", "\\theta"}, {"κ", "\\kappa"}, {"λ", "\\lambda"}, {"μ", "\\mu"},
        {"ν", "\\nu"},    {"ξ", "\\xi"},    {"π", "\\pi"},    {"ρ", "\\rho"},    {"σ", "\\sigma"},
        {"τ", "\\tau"},   {"φ", "\\phi"},   {"χ", "\\chi"},   {"ψ", "\\psi"},    {"ω", "\\omega"},
        {"Γ", "\\Gamma"}, {"Δ", "\\Delta"}, {"Θ", "\\Theta"}, {"Λ", "\\Lambda"}, {"Ξ", "\\Xi"},
        {"Π", "\\Pi"},    {"Σ", "\\Sigma"}, {"Φ", "\\Phi"},   {"Ψ", "\\Psi"},    {"Ω", "\\Omega"}};
    for (const auto& [u, cmd] : greek) {
        if (name.compare(0, u.size(), u) != 0) continue;
        std::string rest = name.substr(u.size());
        return rest.empty() ? cmd : cmd + "_{" + rest + "}";
    }
    return name.size() > 1 ? "\\mathrm{" + name + "}" : name;
}

std::string latex_term(const ProductSpace& space, const Term& t, const std::string& ops)
{
    std::string factors;
    for (const auto& p : t.factors) {
        if (!factors.empty()) factors += " ";
        if (p.atom.is_param()) factors += latex_name(p.atom.name) + (p.atom.conj ? "^{*}" : "");
        else factors += latex_average(space, p.atom.avg);
        if (p.exp != 1) factors += "^{" + std::to_string(p.exp) + "}";
    }
    if (!ops.empty()) factors += (factors.empty() ? "" : " ") + ops;
    if (factors.empty()) return latex_coeff(t.coeff);
    if (t.coeff.is_one()) return factors;
    if (t.coeff == Coeff(-1)) return "-" + factors;
    return latex_coeff(t.coeff) + " " + factors;
}

} // namespace

std::string render_coeff(const Coeff& c)
{
    const Rational& re = c.re();
    const Rational& im = c.im();
    if (im.is_zero()) return re.str();
    std::string imag;
    if (im == Rational(1)) imag = "im";
    else if (im == Rational(-1)) imag = "-im";
    else imag = im.str() + "*im";
    if (re.is_zero()) return imag;
    return "(" + re.str() + (imag[0] == '-' ? " - " + imag.substr(1) : " + " + imag) + ")";
}

std::string render_op(const ProductSpace& space, const FundamentalOp& op)
{
    const auto& h = space[op.subspace];
    switch (op.kind) {
    case OpKind::Destroy:
        return h.op_name;
    case OpKind::Create:
        return h.op_name + "'";
    case OpKind::Transition:
        break;
    }
    return h.op_name + "(" + h.levels[op.i] + "," + h.levels[op.j] + ")";
}

std::string render_ops(const ProductSpace& space, const OpString& ops)
{
    std::string out;
    for (const auto& o : ops) {
        if (!out.empty()) out += "*";
        out += render_op(space, o);
    }
    return out;
}

std::string render_average(const ProductSpace& space, const AverageSymbol& a)
{
    if (a.order() == 0) return "1";
    return "<" + render_ops(space, a.operator_string()) + ">";
}

std::string render(const ProductSpace& space, const ScalarExpr& x)
{
    std::vector<std::string> parts;
    for (const auto& t : x.terms()) {
        parts.push_back(render_term(t, [&](const Atom& a) { return text_atom(space, a); }, "*", ""));
    }
    return join_terms(parts);
}

std::string render(const QExpr& x)
{
    const auto& space = *x.space();
    std::vector<std::string> parts;
    for (const auto& qt : x.terms()) {
        std::string ops = render_ops(space, qt.ops);
        if (qt.coeff.terms().size() == 1) {
            parts.push_back(render_term(qt.coeff.terms().front(), [&](const Atom& a) { return text_atom(space, a); },
                                        "*", ops));
        } else {
            std::string c = "(" + render(space, qt.coeff) + ")";
            parts.push_back(ops.empty() ? c : c + "*" + ops);
        }
    }
    return join_terms(parts);
}

std::string latex_average(const ProductSpace& space, const AverageSymbol& a)
{
    if (a.order() == 0) return "1";
    std::string s = "\\langle ";
    bool first = true;
    for (const auto& o : a.operator_string()) {
        if (!first) s += " ";
        s += latex_op(space, o);
        first = false;
    }
    return s + " \\rangle";
}

std::string latex(const ProductSpace& space, const ScalarExpr& x)
{
    std::vector<std::string> parts;
    for (const auto& t : x.terms()) parts.push_back(latex_term(space, t, ""));
    return join_terms(parts);
}

std::string latex(const QExpr& x)
{
    const auto& space = *x.space();
    std::vector<std::string> parts;
    for (const auto& qt : x.terms()) {
        std::string ops;
        for (const auto& o : qt.ops) ops += (ops.empty() ? "" : " ") + latex_op(space, o);
        if (qt.coeff.terms().size() == 1) {
            parts.push_back(latex_term(space, qt.coeff.terms().front(), ops));
        } else {
            parts.push_back("\\left(" + latex(space, qt.coeff) + "\\right)" + (ops.empty() ? "" : " " + ops));
        }
    }
    return join_terms(parts);
}

} // namespace cqf
