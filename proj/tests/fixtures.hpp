// fixtures.hpp: model builders shared by the unit and acceptance tests

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cqf/meanfield.hpp"

namespace fixtures {

using namespace cqf;

inline ScalarExpr p(const std::string& name)
{
    return ScalarExpr::param(name);
}

inline ScalarExpr I()
{
    return ScalarExpr(Coeff::i());
}

inline ScalarExpr half(const ScalarExpr& x)
{
    return Coeff(Rational(1, 2)) * x;
}

inline ScalarExpr avg(const QExpr& x)
{
    return average(x);
}

/// Cavity + two-level atom: H = Δ a†a + g(a†σge + aσeg), jumps a:κ, σge:γ, σeg:ν.
struct Laser {
    SpacePtr h;
    QExpr a, ad, sge, seg, see;
    ModelDefinition model;

    Laser()
        : h(std::make_shared<const ProductSpace>(std::vector<HilbertSpace>{
              HilbertSpace::fock("cavity", "a"), HilbertSpace::nlevel("atom", {"g", "e"}, "g", "s")})),
          a(QExpr::destroy(h, 0)), ad(QExpr::create(h, 0)), sge(QExpr::transition(h, 1, "g", "e")),
          seg(QExpr::transition(h, 1, "e", "g")), see(QExpr::transition(h, 1, "e", "e")), model(h)
    {
        model.ops = {{"a", FundamentalOp::destroy(0)}};
        model.parameters = {{"Δ"}, {"g"}, {"γ"}, {"κ"}, {"ν"}};
        model.hamiltonian = p("Δ") * (ad * a) + p("g") * (ad * sge + a * seg);
        model.jumps = {a, sge, seg};
        model.rates = {p("κ"), p("γ"), p("ν")};
    }
};

/// Cavity + three-level atom: H = Δ3 σ33 + g(a†σ13 + aσ31), jumps a:κ, σ32:Γ, σ13:γ, σ21:ν.
struct ThreeLevelLaser {
    SpacePtr h;
    QExpr a, ad;
    ModelDefinition model;

    QExpr s(const char* i, const char* j) const { return QExpr::transition(h, 1, i, j); }

    ThreeLevelLaser()
        : h(std::make_shared<const ProductSpace>(std::vector<HilbertSpace>{
              HilbertSpace::fock("cavity", "a"), HilbertSpace::nlevel("atom", {"1", "2", "3"}, "1", "s")})),
          a(QExpr::destroy(h, 0)), ad(QExpr::create(h, 0)), model(h)
    {
        model.parameters = {{"Δ3"}, {"g"}, {"Γ"}, {"γ"}, {"κ"}, {"ν"}};
        model.hamiltonian = p("Δ3") * s("3", "3") + p("g") * (ad * s("1", "3") + a * s("3", "1"));
        model.jumps = {a, s("3", "2"), s("1", "3"), s("2", "1")};
        model.rates = {p("κ"), p("Γ"), p("γ"), p("ν")};
    }
};

/// Cavity + N two-level atoms (levels 1, 2): Tavis-Cummings with atomic decay.
struct TavisCummings {
    SpacePtr h;
    QExpr a, ad;
    ModelDefinition model;
    int n;

    static SpacePtr make_space(int n)
    {
        std::vector<HilbertSpace> f{HilbertSpace::fock("cavity", "a")};
        for (int k = 1; k <= n; ++k) {
            f.push_back(HilbertSpace::nlevel("atom" + std::to_string(k), {"1", "2"}, "1", "s" + std::to_string(k)));
        }
        return std::make_shared<const ProductSpace>(std::move(f));
    }

    QExpr s(int k, const char* i, const char* j) const { return QExpr::transition(h, k, i, j); }

    explicit TavisCummings(int atoms)
        : h(make_space(atoms)), a(QExpr::destroy(h, 0)), ad(QExpr::create(h, 0)), model(h), n(atoms)
    {
        model.parameters = {{"Δ"}, {"g"}, {"γ"}, {"κ"}};
        QExpr hint(h);
        for (int k = 1; k <= n; ++k) hint += ad * s(k, "1", "2") + a * s(k, "2", "1");
        model.hamiltonian = p("Δ") * (ad * a) + p("g") * hint;
        model.jumps = {a};
        model.rates = {p("κ")};
        for (int k = 1; k <= n; ++k) {
            model.jumps.push_back(s(k, "1", "2"));
            model.rates.push_back(p("γ"));
        }
    }
};

/// Driven cavity a coupled by radiation pressure to a mechanical mode b.
struct Optomech {
    SpacePtr h;
    QExpr a, ad, b, bd;
    ModelDefinition model;

    Optomech()
        : h(std::make_shared<const ProductSpace>(
              std::vector<HilbertSpace>{HilbertSpace::fock("cavity", "a"), HilbertSpace::fock("motion", "b")})),
          a(QExpr::destroy(h, 0)), ad(QExpr::create(h, 0)), b(QExpr::destroy(h, 1)), bd(QExpr::create(h, 1)),
          model(h)
    {
        model.parameters = {{"Δ"}, {"ωm"}, {"E"}, {"G"}, {"κ"}};
        model.hamiltonian = -p("Δ") * (ad * a) + p("ωm") * (bd * b) + p("G") * (ad * a * (b + bd)) + p("E") * (a + ad);
        model.jumps = {a};
        model.rates = {p("κ")};
    }
};

} // namespace fixtures
