// qexpr.cpp: rewrite rules: [a,a†]=1, σ^{ij}σ^{kl}=δ_jk σ^{il}, projector elimination

#include "cqf/qexpr.hpp"

#include <algorithm>
#include <optional>
#include <span>

#include "cqf/error.hpp"

namespace cqf {

namespace {

using Alternatives = std::vector<std::pair<Coeff, OpString>>;

std::int64_t binomial(std::int64_t n, std::int64_t k)
{
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (std::int64_t m = 1; m <= k; ++m) r = r * (n - k + m) / m;
    return r;
}

std::strong_ordering compare_strings(const OpString& a, const OpString& b)
{
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (auto c = a[k] <=> b[k]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

/// a†^p1 a^q1 · a†^p2 a^q2 = Σ_k k! C(q1,k) C(p2,k) a†^{p1+p2-k} a^{q1+q2-k}
Alternatives fock_product(std::span<const FundamentalOp> u, std::span<const FundamentalOp> v,
                          const FundamentalOp& proto)
{
    auto count = [](std::span<const FundamentalOp> s, OpKind k) {
        return static_cast<std::int64_t>(std::count_if(s.begin(), s.end(), [k](const auto& o) { return o.kind == k; }));
    };
    const std::int64_t p1 = count(u, OpKind::Create), q1 = count(u, OpKind::Destroy);
    const std::int64_t p2 = count(v, OpKind::Create), q2 = count(v, OpKind::Destroy);
    FundamentalOp cr = proto;
    cr.kind = OpKind::Create;
    cr.i = cr.j = 0;
    FundamentalOp de = cr;
    de.kind = OpKind::Destroy;
    Alternatives out;
    std::int64_t fact = 1;
    for (std::int64_t k = 0; k <= std::min(q1, p2); ++k) {
        if (k > 0) fact *= k;
        Rational c = Rational(fact) * Rational(binomial(q1, k)) * Rational(binomial(p2, k));
        OpString seg;
        seg.insert(seg.end(), static_cast<std::size_t>(p1 + p2 - k), cr);
        seg.insert(seg.end(), static_cast<std::size_t>(q1 + q2 - k), de);
        out.emplace_back(Coeff(c), std::move(seg));
    }
    return out;
}

/// σ^{ij} alone, with σ^{gg} replaced by 1 - Σ_{m≠g} σ^{mm}.
Alternatives projector_expansion(const HilbertSpace& h, FundamentalOp op)
{
    Alternatives out;
    if (op.i == op.j && op.i == h.ground) {
        out.emplace_back(Coeff(1), OpString{});
        for (std::size_t m = 0; m < h.levels.size(); ++m) {
            if (m == h.ground) continue;
            FundamentalOp p = op;
            p.i = p.j = static_cast<std::uint8_t>(m);
            out.emplace_back(Coeff(-1), OpString{p});
        }
    } else {
        out.emplace_back(Coeff(1), OpString{op});
    }
    return out;
}

Alternatives nlevel_product(const HilbertSpace& h, std::span<const FundamentalOp> u, std::span<const FundamentalOp> v)
{
    // Each side holds at most one transition in canonical form; general
    // sequences are folded left to right.
    std::optional<FundamentalOp> acc;
    for (auto seg : {u, v}) {
        for (const auto& op : seg) {
            if (!acc) {
                acc = op;
                continue;
            }
            if (acc->j != op.i) return {};
            acc->j = op.j;
        }
    }
    if (!acc) return {{Coeff(1), {}}};
    return projector_expansion(h, *acc);
}

std::span<const FundamentalOp> segment(const OpString& s, std::size_t& pos, std::size_t subspace)
{
    std::size_t start = pos;
    while (pos < s.size() && s[pos].subspace == subspace) ++pos;
    return std::span<const FundamentalOp>(s.data() + start, pos - start);
}

} // namespace

std::vector<std::size_t> touched_subspaces(const OpString& ops)
{
    std::vector<std::size_t> out;
    for (const auto& o : ops) {
        if (out.empty() || out.back() != o.subspace) out.push_back(o.subspace);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::pair<Coeff, OpString>> multiply_strings(const ProductSpace& space, const OpString& u,
                                                         const OpString& v)
{
    Alternatives acc{{Coeff(1), {}}};
    acc.front().second.reserve(u.size() + v.size());
    std::size_t iu = 0;
    std::size_t iv = 0;
    while (iu < u.size() || iv < v.size()) {
        std::size_t s = std::min(iu < u.size() ? u[iu].subspace : 0xffffu, iv < v.size() ? v[iv].subspace : 0xffffu);
        auto su = segment(u, iu, s);
        auto sv = segment(v, iv, s);
        if (su.empty() || sv.empty()) {
            auto only = su.empty() ? sv : su;
            for (auto& [c, str] : acc) str.insert(str.end(), only.begin(), only.end());
            continue;
        }
        const HilbertSpace& h = space[s];
        Alternatives alt = h.kind == SpaceKind::Fock ? fock_product(su, sv, su.front()) : nlevel_product(h, su, sv);
        if (alt.empty()) return {};
        if (alt.size() == 1 && alt.front().first.is_one()) {
            for (auto& [c, str] : acc) str.insert(str.end(), alt.front().second.begin(), alt.front().second.end());
            continue;
        }
        Alternatives next;
        next.reserve(acc.size() * alt.size());
        for (const auto& [c, str] : acc) {
            for (const auto& [c2, seg] : alt) {
                OpString joined = str;
                joined.insert(joined.end(), seg.begin(), seg.end());
                next.emplace_back(c * c2, std::move(joined));
            }
        }
        acc = std::move(next);
    }
    return acc;
}

namespace {

bool is_canonical(const ProductSpace& space, const OpString& seq)
{
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const auto& op = seq[k];
        if (k > 0 && seq[k - 1] > op) return false;
        if (op.kind == OpKind::Transition) {
            if (k > 0 && seq[k - 1].subspace == op.subspace) return false;
            if (op.i == op.j && op.i == space[op.subspace].ground) return false;
        }
    }
    return true;
}

} // namespace

std::vector<std::pair<Coeff, OpString>> normalize_string(const ProductSpace& space, const OpString& seq)
{
    for (const auto& op : seq) check_op(space, op);
    if (is_canonical(space, seq)) return {{Coeff(1), seq}};
    Alternatives acc{{Coeff(1), {}}};
    for (const auto& op : seq) {
        Alternatives single = op.kind == OpKind::Transition ? projector_expansion(space[op.subspace], op)
                                                            : Alternatives{{Coeff(1), OpString{op}}};
        Alternatives next;
        for (const auto& [c, str] : acc) {
            for (const auto& [c2, s2] : single) {
                for (auto& [c3, prod] : multiply_strings(space, str, s2)) {
                    next.emplace_back(c * c2 * c3, std::move(prod));
                }
            }
        }
        acc = std::move(next);
        if (acc.empty()) break;
    }
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return compare_strings(a.second, b.second) < 0; });
    Alternatives merged;
    for (auto& e : acc) {
        if (!merged.empty() && merged.back().second == e.second) merged.back().first += e.first;
        else merged.push_back(std::move(e));
    }
    std::erase_if(merged, [](const auto& e) { return e.first.is_zero(); });
    return merged;
}

QExpr::QExpr(SpacePtr space) : space_(std::move(space))
{
    if (!space_) throw DomainError("operator expression without a Hilbert space");
}

QExpr QExpr::scalar(SpacePtr space, ScalarExpr c)
{
    QExpr e(std::move(space));
    if (!c.is_zero()) e.terms_.push_back(QTerm{std::move(c), {}});
    return e;
}

QExpr QExpr::op(SpacePtr space, const FundamentalOp& op)
{
    QExpr e(std::move(space));
    check_op(*e.space_, op);
    for (auto& [c, str] : normalize_string(*e.space_, OpString{op})) e.terms_.push_back(QTerm{ScalarExpr(c), std::move(str)});
    return e;
}

QExpr QExpr::destroy(SpacePtr space, std::size_t subspace)
{
    FundamentalOp o = FundamentalOp::destroy(subspace);
    o.frozen = space && subspace < space->size() && space->is_frozen(subspace);
    return op(std::move(space), o);
}

QExpr QExpr::create(SpacePtr space, std::size_t subspace)
{
    FundamentalOp o = FundamentalOp::create(subspace);
    o.frozen = space && subspace < space->size() && space->is_frozen(subspace);
    return op(std::move(space), o);
}

QExpr QExpr::transition(SpacePtr space, std::size_t subspace, const std::string& i, const std::string& j)
{
    if (!space || subspace >= space->size()) throw DomainError("transition on unknown subspace");
    const auto& h = (*space)[subspace];
    if (h.kind != SpaceKind::NLevel) throw DomainError("transition operator on non-NLevel space '" + h.name + "'");
    FundamentalOp o = FundamentalOp::transition(subspace, h.level_index(i), h.level_index(j));
    o.frozen = space->is_frozen(subspace);
    return op(std::move(space), o);
}

QExpr QExpr::from_terms(SpacePtr space, std::vector<QTerm> terms)
{
    QExpr e(std::move(space));
    for (auto& t : terms) {
        for (auto& [c, str] : normalize_string(*e.space_, t.ops)) {
            e.terms_.push_back(QTerm{c * t.coeff, std::move(str)});
        }
    }
    e.normalize();
    return e;
}

void QExpr::normalize()
{
    std::sort(terms_.begin(), terms_.end(), [](const QTerm& a, const QTerm& b) { return compare_strings(a.ops, b.ops) < 0; });
    std::vector<QTerm> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().ops == t.ops) merged.back().coeff += t.coeff;
        else merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const QTerm& t) { return t.coeff.is_zero(); });
    terms_ = std::move(merged);
}

QExpr& QExpr::operator+=(const QExpr& o)
{
    if (!same_space(space_, o.space_)) throw DomainError("adding operators on different Hilbert spaces");
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
}

QExpr& QExpr::operator-=(const QExpr& o)
{
    return *this += -o;
}

QExpr& QExpr::operator*=(const ScalarExpr& c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff = t.coeff * c;
    std::erase_if(terms_, [](const QTerm& t) { return t.coeff.is_zero(); });
    return *this;
}

QExpr QExpr::operator-() const
{
    QExpr r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

bool operator==(const QExpr& a, const QExpr& b)
{
    return same_space(a.space_, b.space_) && a.terms_ == b.terms_;
}

QExpr qmul(const QExpr& lhs, const QExpr& rhs)
{
    if (!same_space(lhs.space(), rhs.space())) throw DomainError("multiplying operators on different Hilbert spaces");
    if (lhs.is_zero() || rhs.is_zero()) return QExpr(lhs.space());
    std::vector<QTerm> out;
    out.reserve(lhs.terms().size() * rhs.terms().size());
    for (const auto& x : lhs.terms()) {
        for (const auto& y : rhs.terms()) {
            ScalarExpr c = x.coeff * y.coeff;
            if (c.is_zero()) continue;
            for (auto& [k, str] : multiply_strings(*lhs.space(), x.ops, y.ops)) {
                out.push_back(QTerm{k * c, std::move(str)});
            }
        }
    }
    // multiply_strings already yields canonical strings; from_terms only merges.
    return QExpr::from_terms(lhs.space(), std::move(out));
}

QExpr adjoint(const QExpr& x)
{
    std::vector<QTerm> out;
    out.reserve(x.terms().size());
    for (const auto& t : x.terms()) {
        if (std::any_of(t.ops.begin(), t.ops.end(), [](const FundamentalOp& o) { return o.frozen; })) {
            throw DomainError("adjoint of an expression containing time-t operators");
        }
        OpString rev;
        rev.reserve(t.ops.size());
        for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) rev.push_back(it->adjoint());
        out.push_back(QTerm{t.coeff.conj(), std::move(rev)});
    }
    return QExpr::from_terms(x.space(), std::move(out));
}

QExpr commutator(const QExpr& x, const QExpr& y)
{
    if (!same_space(x.space(), y.space())) throw DomainError("commutator of operators on different Hilbert spaces");
    return qmul(x, y) - qmul(y, x);
}

QExpr lift(const QExpr& x, SpacePtr target)
{
    const auto& src = *x.space();
    if (!target || target->size() < src.size()) throw DomainError("cannot lift onto a smaller space");
    for (std::size_t k = 0; k < src.size(); ++k) {
        if (!(src[k] == (*target)[k])) throw DomainError("target space does not extend the source space");
    }
    std::vector<QTerm> terms(x.terms().begin(), x.terms().end());
    return QExpr::from_terms(std::move(target), std::move(terms));
}

} // namespace cqf
