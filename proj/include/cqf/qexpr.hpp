// qexpr.hpp: normal-ordered operator polynomials and the rewrite rules

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cqf/scalar.hpp"
#include "cqf/space.hpp"

namespace cqf {

struct QTerm {
    ScalarExpr coeff;
    OpString ops; // canonical; empty = identity

    friend bool operator==(const QTerm&, const QTerm&) = default;
};

/// Operator expression in canonical form:
///  - factors sorted by subspace,
///  - a† before a within each Fock factor,
///  - at most one transition per NLevel factor,
///  - no ground-state projector.
class QExpr {
public:
    explicit QExpr(SpacePtr space);

    static QExpr scalar(SpacePtr space, ScalarExpr c);
    static QExpr identity(SpacePtr space) { return scalar(std::move(space), ScalarExpr(1)); }
    static QExpr op(SpacePtr space, const FundamentalOp& op);
    static QExpr destroy(SpacePtr space, std::size_t subspace);
    static QExpr create(SpacePtr space, std::size_t subspace);
    static QExpr transition(SpacePtr space, std::size_t subspace, const std::string& i, const std::string& j);
    /// Builds from arbitrary (not necessarily ordered) operator sequences.
    static QExpr from_terms(SpacePtr space, std::vector<QTerm> terms);

    const SpacePtr& space() const noexcept { return space_; }
    const std::vector<QTerm>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Single term (possibly the identity).
    bool is_monomial() const noexcept { return terms_.size() == 1; }

    QExpr& operator+=(const QExpr& o);
    QExpr& operator-=(const QExpr& o);
    QExpr& operator*=(const ScalarExpr& c);

    friend QExpr operator+(QExpr a, const QExpr& b) { return a += b; }
    friend QExpr operator-(QExpr a, const QExpr& b) { return a -= b; }
    friend QExpr operator*(QExpr a, const ScalarExpr& c) { return a *= c; }
    friend QExpr operator*(const ScalarExpr& c, QExpr a) { return a *= c; }
    QExpr operator-() const;

    friend bool operator==(const QExpr& a, const QExpr& b);

private:
    void normalize();

    SpacePtr space_;
    std::vector<QTerm> terms_;
};

/// Product u*v of two canonical strings as a sum of canonical strings with
/// exact integer coefficients. Empty result means the product vanishes.
std::vector<std::pair<Coeff, OpString>> multiply_strings(const ProductSpace& space, const OpString& u,
                                                         const OpString& v);

/// Canonical form of an arbitrary operator sequence.
std::vector<std::pair<Coeff, OpString>> normalize_string(const ProductSpace& space, const OpString& seq);

QExpr qmul(const QExpr& lhs, const QExpr& rhs);
QExpr adjoint(const QExpr& x);
QExpr commutator(const QExpr& x, const QExpr& y);

inline QExpr operator*(const QExpr& a, const QExpr& b) { return qmul(a, b); }

/// Re-homes an expression onto a space whose leading factors equal x's space.
QExpr lift(const QExpr& x, SpacePtr target);

/// Subspaces touched by a string, ascending and unique.
std::vector<std::size_t> touched_subspaces(const OpString& ops);

} // namespace cqf
