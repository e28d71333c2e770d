// scalar.hpp: commutative c-number expressions over parameters and averages

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqf/rational.hpp"
#include "cqf/space.hpp"

namespace cqf {

struct Parameter {
    std::string name;
    bool real = true;

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

/// Expectation value of a canonical operator string. Only one of the pair
/// {<O>, <O†>} is stored (the lexicographically smaller string); the other
/// is expressed through the conjugation flag.
class AverageSymbol {
public:
    /// The empty string, i.e. the average of the identity.
    AverageSymbol();

    /// Symbol for a canonical (normal-ordered, sorted) operator string.
    static AverageSymbol of(OpString ops);
    /// Symbol from an already chosen representative and flag.
    static AverageSymbol from_representative(OpString rep, bool conj);

    const OpString& ops() const noexcept { return *rep_; }
    bool conj() const noexcept { return conj_; }
    std::size_t order() const noexcept { return rep_->size(); }
    bool has_frozen() const noexcept;

    /// The string this symbol denotes (adjoint of the representative if conj).
    OpString operator_string() const;
    AverageSymbol conjugate() const;
    /// Representative with the flag cleared.
    AverageSymbol representative() const { return from_representative(*rep_, false); }

    friend bool operator==(const AverageSymbol& a, const AverageSymbol& b)
    {
        return a.conj_ == b.conj_ && (a.rep_ == b.rep_ || *a.rep_ == *b.rep_);
    }
    friend std::strong_ordering operator<=>(const AverageSymbol& a, const AverageSymbol& b);

private:
    std::shared_ptr<const OpString> rep_;
    bool conj_ = false;
};

/// Adjoint of a canonical operator string (reversed, daggered, re-sorted).
OpString adjoint_string(const OpString& ops);

/// A factor of a monomial: either a parameter or an average.
struct Atom {
    enum class Kind : std::uint8_t { Param, Average };
    Kind kind = Kind::Param;
    std::string name; // Param
    bool real = true; // Param
    bool conj = false; // Param (complex only)
    AverageSymbol avg; // Average

    static Atom param(const Parameter& p) { return Atom{Kind::Param, p.name, p.real, false, {}}; }
    static Atom average(AverageSymbol a) { return Atom{Kind::Average, {}, true, false, std::move(a)}; }

    bool is_param() const noexcept { return kind == Kind::Param; }
    bool is_average() const noexcept { return kind == Kind::Average; }
    Atom conjugate() const;

    friend bool operator==(const Atom& a, const Atom& b);
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

struct Power {
    Atom atom;
    std::uint32_t exp = 1;

    friend bool operator==(const Power&, const Power&) = default;
    friend std::strong_ordering operator<=>(const Power& a, const Power& b)
    {
        if (auto c = a.atom <=> b.atom; c != 0) return c;
        return a.exp <=> b.exp;
    }
};

using Monomial = std::vector<Power>;

struct Term {
    Coeff coeff;
    Monomial factors;

    friend bool operator==(const Term&, const Term&) = default;
};

struct Bindings;

/// Sum of coefficient * monomial terms. Always kept canonical: like terms
/// merged, zero terms dropped, terms sorted by monomial.
class ScalarExpr {
public:
    ScalarExpr() = default;
    ScalarExpr(Coeff c);
    ScalarExpr(std::int64_t c) : ScalarExpr(Coeff(c)) {}

    static ScalarExpr param(const Parameter& p);
    static ScalarExpr param(const std::string& name) { return param(Parameter{name, true}); }
    static ScalarExpr average(const AverageSymbol& a);
    static ScalarExpr from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const noexcept;
    /// Value of a constant expression; nullopt if it contains symbols.
    std::optional<Coeff> constant_value() const;

    ScalarExpr conj() const;
    ScalarExpr pow(std::uint32_t n) const;

    /// Representatives of every average occurring in the expression.
    std::set<AverageSymbol> averages() const;
    std::set<std::string> parameters() const;

    /// Replace averages via the callback (nullopt keeps the average). The
    /// callback receives representatives; conjugates are handled here.
    ScalarExpr substitute(const std::function<std::optional<ScalarExpr>(const AverageSymbol&)>& f) const;

    ScalarExpr& operator+=(const ScalarExpr& o);
    ScalarExpr& operator-=(const ScalarExpr& o);
    ScalarExpr& operator*=(const ScalarExpr& o);

    friend ScalarExpr operator+(ScalarExpr a, const ScalarExpr& b) { return a += b; }
    friend ScalarExpr operator-(ScalarExpr a, const ScalarExpr& b) { return a -= b; }
    friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator*(const Coeff& c, const ScalarExpr& a);
    ScalarExpr operator-() const;

    friend bool operator==(const ScalarExpr&, const ScalarExpr&) = default;

private:
    void normalize();
    std::vector<Term> terms_;
};

/// Sums terms, merging equal monomials, into canonical order.
std::vector<Term> combine_terms(std::vector<Term> terms);

struct Bindings {
    std::map<std::string, std::complex<double>> params;
    /// Values keyed by representative operator string.
    std::map<OpString, std::complex<double>> averages;

    void set_average(const AverageSymbol& a, std::complex<double> v);
};

/// Numeric value of x. Throws EvaluationError naming the first unbound symbol.
std::complex<double> scalar_evaluate(const ScalarExpr& x, const Bindings& b);

} // namespace cqf
