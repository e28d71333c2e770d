#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cqf/archive.hpp"
#include "cqf/completion.hpp"
#include "cqf/error.hpp"
#include "cqf/model_file.hpp"
#include "cqf/render.hpp"
#include "fixtures.hpp"

using namespace cqf;
using namespace fixtures;

namespace {

std::string read(const std::string& name)
{
    std::ifstream in(std::string(CQF_SOURCE_DIR) + "/models/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kLaser = R"(
param Δ g γ κ ν
space cavity fock op a
space atom nlevel g e op s
hamiltonian Δ*a†*a + g*(a†*s(g,e) + a*s(e,g))
jump a rate κ
jump s(g,e) rate γ
jump s(e,g) rate ν
)";

std::pair<std::size_t, std::size_t> error_at(const std::string& text)
{
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return {e.line(), e.column()};
    }
    FAIL("no parse error for: " << text);
    return {0, 0};
}

} // namespace

TEST_CASE("Jaynes-Cummings file reproduces the laser model")
{
    Laser L;
    ModelFile f = parse_model(kLaser);
    CHECK(*f.model.space == *L.h);
    CHECK(render(f.model.hamiltonian) == render(L.model.hamiltonian));
    REQUIRE(f.model.jumps.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(render(f.model.jumps[k]) == render(L.model.jumps[k]));
        CHECK(render(*f.model.space, f.model.rates[k]) == render(*L.h, L.model.rates[k]));
    }
    CHECK(f.model.parameters == L.model.parameters);
}

TEST_CASE("optomechanical file keeps the two Fock factors apart")
{
    Optomech O;
    ModelFile f = parse_model(read("optomech.cqf"));
    CHECK(*f.model.space == *O.h);
    CHECK(render(f.model.hamiltonian) == render(O.model.hamiltonian));
    REQUIRE(f.initial.size() == 1);
    CHECK(render_average(*f.model.space, f.initial[0].first) == "<b'*b>");
    CHECK(f.observables[1].kind == ObservableDef::Kind::Temperature);
    CHECK(f.run.params().at("G") == cplx(0.0125));
}

TEST_CASE("indexed spaces and sums expand")
{
    TavisCummings T(4);
    std::string text = R"(
let N = 4
param Δ g γ κ
space cavity fock op a
space atom[k] nlevel 1 2 op s[k] for k=1:N
hamiltonian Δ*a'*a + g*sum(j=1:N, a'*s[j](1,2) + a*s[j](2,1))
jump a rate κ
jump s[k](1,2) rate γ for k=1:N
)";
    ModelFile f = parse_model(text);
    CHECK(f.model.space->size() == 5);
    CHECK((*f.model.space)[3].op_name == "s3");
    CHECK(render(f.model.hamiltonian) == render(T.model.hamiltonian));
    CHECK(f.model.jumps.size() == 5);
}

TEST_CASE("numeric level shorthand and aliases")
{
    ModelFile f = parse_model(read("three_level_laser.cqf"));
    const auto& atom = (*f.model.space)[1];
    CHECK(atom.levels == std::vector<std::string>{"1", "2", "3"});
    CHECK(f.order == OrderSpec::uniform(4));
    CHECK(f.filter == "none");
    auto with_alias = parse_model(R"(
space cavity fock op a
space atom nlevel g e op s
op sge = transition atom g e
op ad = create cavity
hamiltonian ad*sge + sge'*a
)");
    CHECK(render(with_alias.model.hamiltonian) == "a'*s(g,e) + a*s(e,g)");
    CHECK(with_alias.model.ops.size() == 2);
}

TEST_CASE("parse errors carry line and column")
{
    CHECK(error_at("space c fock\nhamiltonian\n") == std::pair<std::size_t, std::size_t>{2, 1});
    CHECK(error_at("space c fock\nhamiltonian a + x\n") == std::pair<std::size_t, std::size_t>{2, 17});
    CHECK(error_at("space c fock\nhamiltonian a*(a'\n").first == 2);
    CHECK(error_at("space c fock\nop x = transition c g e\nhamiltonian a\n") == std::pair<std::size_t, std::size_t>{2, 8});
    CHECK(error_at("space atom nlevel g e\nop y = destroy atom\nhamiltonian 0\n").first == 2);
    CHECK(error_at("space c fock\nhamiltonian a\nspace d fock\n").first == 3);
    CHECK(error_at("space c fock\nhamiltonian a $\n") == std::pair<std::size_t, std::size_t>{2, 15});
    CHECK(error_at("space c fock\nhamiltonian a\njump a\n").first == 3);
    CHECK(error_at("param κ\nspace c fock\nhamiltonian a\njump a rate κ*a\n").first == 4);
    CHECK(error_at("space c fock\nspace d fock\nhamiltonian a\n").first == 2);
    CHECK_THROWS_AS(parse_model("space c fock\n"), ParseError);
    // columns count code points, not bytes
    CHECK(error_at("param Δ\nspace c fock\nhamiltonian Δ*ω\n") == std::pair<std::size_t, std::size_t>{3, 15});
}

TEST_CASE("printer output reparses to the same model")
{
    for (const char* name : {"laser.cqf", "three_level_laser.cqf", "superradiant.cqf", "optomech.cqf"}) {
        CAPTURE(name);
        ModelFile f = parse_model(read(name));
        std::string printed = print_model(f);
        ModelFile g = parse_model(printed);
        CHECK(f == g);
        CHECK(print_model(g) == printed);
    }
    ModelFile f = parse_model(R"(
param κ
space cavity fock op a
space atom nlevel g e ground e op s
op sm = transition atom e g
hamiltonian 3/2*im*a'*sm - (1/3 + 2*im)*a*sm' + κ^2*a'*a
jump a^2 rate κ/4
derive a*s(g,e), a'*a
order 2,1 min
observable x = conj(<a*s(g,e)>) + 2*<a'*a>^2
initial <a> = 1 - im
correlation a', a transient
)");
    ModelFile g = parse_model(print_model(f));
    CHECK(f == g);
    CHECK(g.run.steady == false);
    CHECK(g.initial[0].first.conj());
}

TEST_CASE("archive round trip is byte identical")
{
    ModelFile f = parse_model(read("three_level_laser.cqf"));
    EquationSet eqs = complete(meanfield_derive(f.derive, f.model, *f.order, FilterFunction::by_id(f.filter)));
    REQUIRE(eqs.size() == 30);
    std::string a = serialize(eqs);
    EquationSet back = deserialize(a);
    CHECK(serialize(back) == a);
    CHECK(back.size() == 30);
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        CHECK(back.equations[k] == eqs.equations[k]);
    }
    CHECK(back.model == eqs.model);
    CHECK(back.order == eqs.order);
    CHECK(back.filter.id == "none");
    CHECK_THROWS_AS(deserialize("{\"format\": \"other\"}"), IoError);
    CHECK_THROWS_AS(deserialize("not json"), IoError);
}

TEST_CASE("observables")
{
    CHECK(mandel_q(3.0, 9.0) == doctest::Approx(0.0));
    CHECK(mandel_q(3.0, 6.0) == doctest::Approx(-1.0));
    CHECK(mode_temperature(4e6, 1e7) == doctest::Approx(305.5).epsilon(0.01));

    Laser L;
    auto eqs = complete(meanfield_derive({L.ad * L.a}, L.model, OrderSpec::uniform(2), FilterFunction::phase_invariant()));
    auto prog = lower(eqs);
    Trajectory tr;
    tr.t = {0.0};
    tr.u = {std::vector<cplx>(prog.size(), cplx(1.0))};
    ObservableDef q{"Q", ObservableDef::Kind::MandelQ, {}, 0, 0.0};
    try {
        evaluate_observables({q}, prog, tr, {});
        FAIL("expected a missing-average error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("order >= 4") != std::string::npos);
    }
    ObservableDef n{"n2", ObservableDef::Kind::Expr, Coeff(2) * avg(L.ad * L.a) * p("κ"), 0, 0.0};
    auto s = evaluate_observables({n}, prog, tr, {{"κ", 1.5}});
    CHECK(s[0].values[0] == cplx(3.0));
}
