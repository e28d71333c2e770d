// scalar.cpp: canonical c-number expressions

#include "cqf/scalar.hpp"

#include <algorithm>

#include "cqf/error.hpp"

namespace cqf {

namespace {

const std::shared_ptr<const OpString>& empty_string()
{
    static const auto empty = std::make_shared<const OpString>();
    return empty;
}

std::strong_ordering compare_strings(const OpString& a, const OpString& b)
{
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (auto c = a[k] <=> b[k]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

Monomial multiply_monomials(const Monomial& a, const Monomial& b)
{
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        auto c = a[i].atom <=> b[j].atom;
        if (c < 0) {
            out.push_back(a[i++]);
        } else if (c > 0) {
            out.push_back(b[j++]);
        } else {
            Power p = a[i++];
            p.exp += b[j++].exp;
            out.push_back(std::move(p));
        }
    }
    for (; i < a.size(); ++i) out.push_back(a[i]);
    for (; j < b.size(); ++j) out.push_back(b[j]);
    return out;
}

std::strong_ordering compare_monomials(const Monomial& a, const Monomial& b)
{
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (auto c = a[k] <=> b[k]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

} // namespace

OpString adjoint_string(const OpString& ops)
{
    OpString out;
    out.reserve(ops.size());
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) out.push_back(it->adjoint());
    // Factors on distinct subspaces commute and a Fock block a†^p a^q maps to
    // a†^q a^p, so sorting restores canonical order without rewriting.
    std::stable_sort(out.begin(), out.end());
    return out;
}

AverageSymbol::AverageSymbol() : rep_(empty_string()) {}

AverageSymbol AverageSymbol::of(OpString ops)
{
    AverageSymbol s;
    bool frozen = std::any_of(ops.begin(), ops.end(), [](const FundamentalOp& o) { return o.frozen; });
    if (!frozen) {
        OpString adj = adjoint_string(ops);
        if (adj < ops) {
            s.rep_ = std::make_shared<const OpString>(std::move(adj));
            s.conj_ = true;
            return s;
        }
    }
    s.rep_ = ops.empty() ? empty_string() : std::make_shared<const OpString>(std::move(ops));
    return s;
}

AverageSymbol AverageSymbol::from_representative(OpString rep, bool conj)
{
    AverageSymbol s;
    s.rep_ = rep.empty() ? empty_string() : std::make_shared<const OpString>(std::move(rep));
    s.conj_ = conj;
    return s;
}

bool AverageSymbol::has_frozen() const noexcept
{
    return std::any_of(rep_->begin(), rep_->end(), [](const FundamentalOp& o) { return o.frozen; });
}

OpString AverageSymbol::operator_string() const
{
    return conj_ ? adjoint_string(*rep_) : *rep_;
}

AverageSymbol AverageSymbol::conjugate() const
{
    if (has_frozen()) throw DomainError("two-time correlation averages have no conjugate in this representation");
    AverageSymbol s = *this;
    if (adjoint_string(*rep_) != *rep_) s.conj_ = !conj_;
    return s;
}

std::strong_ordering operator<=>(const AverageSymbol& a, const AverageSymbol& b)
{
    if (a.rep_ != b.rep_) {
        if (auto c = compare_strings(*a.rep_, *b.rep_); c != 0) return c;
    }
    return a.conj_ <=> b.conj_;
}

Atom Atom::conjugate() const
{
    Atom r = *this;
    if (kind == Kind::Param) {
        if (!real) r.conj = !conj;
    } else {
        r.avg = avg.conjugate();
    }
    return r;
}

bool operator==(const Atom& a, const Atom& b)
{
    if (a.kind != b.kind) return false;
    if (a.kind == Atom::Kind::Param) return a.name == b.name && a.conj == b.conj;
    return a.avg == b.avg;
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b)
{
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (a.kind == Atom::Kind::Param) {
        if (auto c = a.name.compare(b.name); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.conj <=> b.conj;
    }
    return a.avg <=> b.avg;
}

std::vector<Term> combine_terms(std::vector<Term> terms)
{
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
        return compare_monomials(x.factors, y.factors) < 0;
    });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (auto& t : terms) {
        if (!out.empty() && compare_monomials(out.back().factors, t.factors) == 0) {
            out.back().coeff += t.coeff;
        } else {
            if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
    return out;
}

ScalarExpr::ScalarExpr(Coeff c)
{
    if (!c.is_zero()) terms_.push_back(Term{c, {}});
}

ScalarExpr ScalarExpr::param(const Parameter& p)
{
    ScalarExpr e;
    e.terms_.push_back(Term{Coeff(1), {Power{Atom::param(p), 1}}});
    return e;
}

ScalarExpr ScalarExpr::average(const AverageSymbol& a)
{
    ScalarExpr e;
    if (a.order() == 0) return ScalarExpr(1);
    e.terms_.push_back(Term{Coeff(1), {Power{Atom::average(a), 1}}});
    return e;
}

ScalarExpr ScalarExpr::from_terms(std::vector<Term> terms)
{
    ScalarExpr e;
    e.terms_ = std::move(terms);
    e.normalize();
    return e;
}

void ScalarExpr::normalize()
{
    for (auto& t : terms_) {
        std::sort(t.factors.begin(), t.factors.end());
        Monomial merged;
        for (auto& p : t.factors) {
            if (p.exp == 0) continue;
            if (!merged.empty() && merged.back().atom == p.atom) merged.back().exp += p.exp;
            else merged.push_back(p);
        }
        t.factors = std::move(merged);
    }
    terms_ = combine_terms(std::move(terms_));
}

bool ScalarExpr::is_constant() const noexcept
{
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.factors.empty(); });
}

std::optional<Coeff> ScalarExpr::constant_value() const
{
    if (terms_.empty()) return Coeff(0);
    if (terms_.size() == 1 && terms_[0].factors.empty()) return terms_[0].coeff;
    return std::nullopt;
}

ScalarExpr ScalarExpr::conj() const
{
    ScalarExpr e;
    e.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        Term c{t.coeff.conj(), {}};
        c.factors.reserve(t.factors.size());
        for (const auto& p : t.factors) c.factors.push_back(Power{p.atom.conjugate(), p.exp});
        e.terms_.push_back(std::move(c));
    }
    e.normalize();
    return e;
}

ScalarExpr ScalarExpr::pow(std::uint32_t n) const
{
    ScalarExpr r(1);
    for (std::uint32_t k = 0; k < n; ++k) r *= *this;
    return r;
}

std::set<AverageSymbol> ScalarExpr::averages() const
{
    std::set<AverageSymbol> out;
    for (const auto& t : terms_) {
        for (const auto& p : t.factors) {
            if (p.atom.is_average()) out.insert(p.atom.avg.representative());
        }
    }
    return out;
}

std::set<std::string> ScalarExpr::parameters() const
{
    std::set<std::string> out;
    for (const auto& t : terms_) {
        for (const auto& p : t.factors) {
            if (p.atom.is_param()) out.insert(p.atom.name);
        }
    }
    return out;
}

ScalarExpr ScalarExpr::substitute(const std::function<std::optional<ScalarExpr>(const AverageSymbol&)>& f) const
{
    std::vector<Term> kept;
    ScalarExpr replaced;
    std::map<AverageSymbol, std::optional<ScalarExpr>> cache;
    for (const auto& t : terms_) {
        bool touched = false;
        ScalarExpr product(t.coeff);
        Monomial rest;
        for (const auto& p : t.factors) {
            if (!p.atom.is_average()) {
                rest.push_back(p);
                continue;
            }
            AverageSymbol rep = p.atom.avg.representative();
            auto it = cache.find(rep);
            if (it == cache.end()) it = cache.emplace(rep, f(rep)).first;
            if (!it->second) {
                rest.push_back(p);
                continue;
            }
            touched = true;
            ScalarExpr value = p.atom.avg.conj() ? it->second->conj() : *it->second;
            product *= value.pow(p.exp);
            if (product.is_zero()) break;
        }
        if (!touched) {
            kept.push_back(t);
            continue;
        }
        if (product.is_zero()) continue;
        product *= ScalarExpr::from_terms({Term{Coeff(1), std::move(rest)}});
        replaced += product;
    }
    ScalarExpr out = ScalarExpr::from_terms(std::move(kept));
    out += replaced;
    return out;
}

ScalarExpr& ScalarExpr::operator+=(const ScalarExpr& o)
{
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) return *this = o;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < terms_.size() && j < o.terms_.size()) {
        auto c = compare_monomials(terms_[i].factors, o.terms_[j].factors);
        if (c < 0) {
            merged.push_back(std::move(terms_[i++]));
        } else if (c > 0) {
            merged.push_back(o.terms_[j++]);
        } else {
            Term t = std::move(terms_[i++]);
            t.coeff += o.terms_[j++].coeff;
            if (!t.coeff.is_zero()) merged.push_back(std::move(t));
        }
    }
    for (; i < terms_.size(); ++i) merged.push_back(std::move(terms_[i]));
    for (; j < o.terms_.size(); ++j) merged.push_back(o.terms_[j]);
    terms_ = std::move(merged);
    return *this;
}

ScalarExpr& ScalarExpr::operator-=(const ScalarExpr& o)
{
    return *this += -o;
}

ScalarExpr& ScalarExpr::operator*=(const ScalarExpr& o)
{
    return *this = *this * o;
}

ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b)
{
    if (a.terms_.empty() || b.terms_.empty()) return {};
    if (b.terms_.size() == 1 && b.terms_[0].factors.empty()) return b.terms_[0].coeff * a;
    if (a.terms_.size() == 1 && a.terms_[0].factors.empty()) return a.terms_[0].coeff * b;
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_) {
        for (const auto& y : b.terms_) {
            out.push_back(Term{x.coeff * y.coeff, multiply_monomials(x.factors, y.factors)});
        }
    }
    ScalarExpr r;
    r.terms_ = combine_terms(std::move(out));
    return r;
}

ScalarExpr operator*(const Coeff& c, const ScalarExpr& a)
{
    if (c.is_zero()) return {};
    ScalarExpr r = a;
    if (c.is_one()) return r;
    for (auto& t : r.terms_) t.coeff = c * t.coeff;
    return r;
}

ScalarExpr ScalarExpr::operator-() const
{
    ScalarExpr r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

void Bindings::set_average(const AverageSymbol& a, std::complex<double> v)
{
    averages[a.ops()] = a.conj() ? std::conj(v) : v;
}

namespace {

std::string describe_average(const AverageSymbol& a)
{
    std::string s = "<";
    OpString ops = a.operator_string();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (k) s += " ";
        const auto& o = ops[k];
        s += "#" + std::to_string(o.subspace);
        if (o.kind == OpKind::Create) s += "'";
        if (o.kind == OpKind::Transition) s += "(" + std::to_string(o.i) + "," + std::to_string(o.j) + ")";
    }
    return s + ">";
}

} // namespace

std::complex<double> scalar_evaluate(const ScalarExpr& x, const Bindings& b)
{
    std::complex<double> total = 0.0;
    for (const auto& t : x.terms()) {
        std::complex<double> v = t.coeff.to_complex();
        for (const auto& p : t.factors) {
            std::complex<double> f;
            if (p.atom.is_param()) {
                auto it = b.params.find(p.atom.name);
                if (it == b.params.end()) throw EvaluationError("unbound parameter '" + p.atom.name + "'");
                f = p.atom.conj ? std::conj(it->second) : it->second;
            } else {
                auto it = b.averages.find(p.atom.avg.ops());
                if (it == b.averages.end()) {
                    throw EvaluationError("unbound average " + describe_average(p.atom.avg));
                }
                f = p.atom.avg.conj() ? std::conj(it->second) : it->second;
            }
            for (std::uint32_t k = 0; k < p.exp; ++k) v *= f;
        }
        total += v;
    }
    return total;
}

} // namespace cqf
