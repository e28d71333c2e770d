// archive.cpp: JSON equation archive

#include "cqf/archive.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cqf/error.hpp"

namespace cqf {

namespace {

using nlohmann::json;

std::string kind_tag(OpKind k)
{
    switch (k) {
    case OpKind::Create:
        return "c";
    case OpKind::Transition:
        return "t";
    case OpKind::Destroy:
        break;
    }
    return "d";
}

json op_json(const FundamentalOp& o)
{
    json j = json::array({o.subspace, kind_tag(o.kind)});
    if (o.kind == OpKind::Transition) {
        j.push_back(o.i);
        j.push_back(o.j);
    }
    if (o.frozen) j.push_back("frozen");
    return j;
}

FundamentalOp op_from(const json& j, const ProductSpace& space)
{
    FundamentalOp o;
    o.subspace = j.at(0).get<std::uint16_t>();
    const auto tag = j.at(1).get<std::string>();
    std::size_t next = 2;
    if (tag == "c") {
        o.kind = OpKind::Create;
    } else if (tag == "d") {
        o.kind = OpKind::Destroy;
    } else if (tag == "t") {
        o.kind = OpKind::Transition;
        o.i = j.at(2).get<std::uint8_t>();
        o.j = j.at(3).get<std::uint8_t>();
        next = 4;
    } else {
        throw IoError("unknown operator kind '" + tag + "'");
    }
    if (j.size() > next) {
        if (j.at(next) != "frozen") throw IoError("unexpected operator field");
        o.frozen = true;
    }
    check_op(space, o);
    return o;
}

json ops_json(const OpString& s)
{
    json j = json::array();
    for (const auto& o : s) j.push_back(op_json(o));
    return j;
}

OpString ops_from(const json& j, const ProductSpace& space)
{
    OpString s;
    for (const auto& e : j) s.push_back(op_from(e, space));
    return s;
}

Rational rational_from(const std::string& s)
{
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::logic_error&) {
        throw IoError("malformed rational '" + s + "'");
    }
}

json scalar_json(const ScalarExpr& x)
{
    json terms = json::array();
    for (const auto& t : x.terms()) {
        json f = json::array();
        for (const auto& p : t.factors) {
            json e;
            if (p.atom.is_param()) {
                e["param"] = p.atom.name;
                if (!p.atom.real) e["complex"] = true;
                if (p.atom.conj) e["conj"] = true;
            } else {
                e["average"] = ops_json(p.atom.avg.ops());
                if (p.atom.avg.conj()) e["conj"] = true;
            }
            if (p.exp != 1) e["exp"] = p.exp;
            f.push_back(std::move(e));
        }
        json tj;
        tj["re"] = t.coeff.re().str();
        if (!t.coeff.is_real()) tj["im"] = t.coeff.im().str();
        tj["factors"] = std::move(f);
        terms.push_back(std::move(tj));
    }
    return terms;
}

ScalarExpr scalar_from(const json& j, const ProductSpace& space)
{
    std::vector<Term> terms;
    for (const auto& tj : j) {
        Term t;
        t.coeff = Coeff(rational_from(tj.at("re").get<std::string>()),
                        tj.contains("im") ? rational_from(tj.at("im").get<std::string>()) : Rational(0));
        for (const auto& e : tj.at("factors")) {
            Power p;
            if (e.contains("param")) {
                p.atom = Atom::param(Parameter{e.at("param").get<std::string>(), !e.value("complex", false)});
                p.atom.conj = e.value("conj", false);
            } else {
                p.atom = Atom::average(AverageSymbol::from_representative(ops_from(e.at("average"), space),
                                                                          e.value("conj", false)));
            }
            p.exp = e.value("exp", 1u);
            t.factors.push_back(std::move(p));
        }
        terms.push_back(std::move(t));
    }
    return ScalarExpr::from_terms(std::move(terms));
}

json qexpr_json(const QExpr& x)
{
    json j = json::array();
    for (const auto& t : x.terms()) j.push_back({{"coeff", scalar_json(t.coeff)}, {"ops", ops_json(t.ops)}});
    return j;
}

QExpr qexpr_from(const json& j, const SpacePtr& space)
{
    std::vector<QTerm> terms;
    for (const auto& t : j) terms.push_back(QTerm{scalar_from(t.at("coeff"), *space), ops_from(t.at("ops"), *space)});
    return QExpr::from_terms(space, std::move(terms));
}

json space_json(const ProductSpace& space)
{
    json j = json::array();
    for (const auto& h : space.factors()) {
        json e;
        e["name"] = h.name;
        e["kind"] = h.kind == SpaceKind::Fock ? "fock" : "nlevel";
        if (h.kind == SpaceKind::NLevel) {
            e["levels"] = h.levels;
            e["ground"] = h.ground;
        }
        e["op"] = h.op_name;
        if (h.copy_of >= 0) e["copy_of"] = h.copy_of;
        j.push_back(std::move(e));
    }
    return j;
}

SpacePtr space_from(const json& j)
{
    std::vector<HilbertSpace> f;
    for (const auto& e : j) {
        const auto kind = e.at("kind").get<std::string>();
        HilbertSpace h;
        if (kind == "fock") {
            h = HilbertSpace::fock(e.at("name").get<std::string>(), e.at("op").get<std::string>());
        } else if (kind == "nlevel") {
            auto levels = e.at("levels").get<std::vector<std::string>>();
            auto g = e.at("ground").get<std::size_t>();
            if (g >= levels.size()) throw IoError("ground level index out of range");
            h = HilbertSpace::nlevel(e.at("name").get<std::string>(), levels, levels[g], e.at("op").get<std::string>());
        } else {
            throw IoError("unknown space kind '" + kind + "'");
        }
        h.copy_of = e.value("copy_of", -1);
        f.push_back(std::move(h));
    }
    return std::make_shared<const ProductSpace>(std::move(f));
}

} // namespace

std::string serialize(const EquationSet& eqs)
{
    const auto& m = eqs.model;
    const auto& space = *m.space;
    json j;
    j["format"] = "cqf-equations";
    j["version"] = kArchiveVersion;
    j["spaces"] = space_json(space);
    json ops = json::array();
    for (const auto& n : m.ops) ops.push_back({{"name", n.name}, {"op", op_json(n.op)}});
    j["operators"] = std::move(ops);
    json params = json::array();
    for (const auto& p : m.parameters) params.push_back({{"name", p.name}, {"real", p.real}});
    j["parameters"] = std::move(params);
    j["hamiltonian"] = qexpr_json(m.hamiltonian);
    json jumps = json::array();
    for (std::size_t k = 0; k < m.jumps.size(); ++k) {
        jumps.push_back({{"op", qexpr_json(m.jumps[k])}, {"rate", scalar_json(m.rates[k])}});
    }
    j["jumps"] = std::move(jumps);
    json order;
    order["orders"] = eqs.order.orders();
    order["per_subspace"] = !eqs.order.is_uniform();
    order["reducer"] = eqs.order.reducer() == OrderSpec::Reducer::Max ? "max" : "min";
    j["order"] = std::move(order);
    j["filter"] = eqs.filter.id;
    json list = json::array();
    for (const auto& e : eqs.equations) {
        json lhs = {{"average", ops_json(e.lhs.ops())}};
        if (e.lhs.conj()) lhs["conj"] = true;
        list.push_back({{"lhs", std::move(lhs)}, {"rhs", scalar_json(e.rhs)}});
    }
    j["equations"] = std::move(list);
    return j.dump(1) + "\n";
}

EquationSet deserialize(std::string_view text)
{
    try {
        json j = json::parse(text);
        if (j.at("format") != "cqf-equations") throw IoError("not an equation archive");
        const int version = j.at("version").get<int>();
        if (version != kArchiveVersion) throw IoError("unsupported archive version " + std::to_string(version));
        SpacePtr space = space_from(j.at("spaces"));
        ModelDefinition m(space);
        for (const auto& o : j.at("operators")) m.ops.push_back(NamedOp{o.at("name"), op_from(o.at("op"), *space)});
        for (const auto& p : j.at("parameters")) m.parameters.push_back(Parameter{p.at("name"), p.at("real")});
        m.hamiltonian = qexpr_from(j.at("hamiltonian"), space);
        for (const auto& c : j.at("jumps")) {
            m.jumps.push_back(qexpr_from(c.at("op"), space));
            m.rates.push_back(scalar_from(c.at("rate"), *space));
        }
        EquationSet eqs(std::move(m));
        const auto& o = j.at("order");
        auto orders = o.at("orders").get<std::vector<int>>();
        if (orders.empty()) throw IoError("empty order list");
        if (o.at("per_subspace").get<bool>()) {
            eqs.order = OrderSpec::per_subspace(
                orders, o.at("reducer") == "min" ? OrderSpec::Reducer::Min : OrderSpec::Reducer::Max);
        } else {
            eqs.order = OrderSpec::uniform(orders.front());
        }
        eqs.filter = FilterFunction::by_id(j.at("filter").get<std::string>());
        for (const auto& e : j.at("equations")) {
            const auto& lhs = e.at("lhs");
            eqs.equations.push_back(MeanfieldEquation{
                AverageSymbol::from_representative(ops_from(lhs.at("average"), *space), lhs.value("conj", false)),
                scalar_from(e.at("rhs"), *space)});
        }
        return eqs;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed equation archive: ") + e.what());
    } catch (const DomainError& e) {
        throw IoError(std::string("invalid equation archive: ") + e.what());
    }
}

void save_archive(const EquationSet& eqs, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << serialize(eqs);
    if (!out) throw IoError("write to '" + path + "' failed");
}

EquationSet load_archive(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

} // namespace cqf
