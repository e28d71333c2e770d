#include <doctest.h>

#include "cqf/completion.hpp"
#include "cqf/error.hpp"
#include "cqf/render.hpp"
#include "fixtures.hpp"

using namespace cqf;
using namespace fixtures;

TEST_CASE("field operator equation of the single-atom laser")
{
    Laser L;
    QExpr expected = -(I() * p("Δ") + half(p("κ"))) * L.a - I() * p("g") * L.sge;
    CHECK(qle_rhs(L.a, L.model) == expected);
}

TEST_CASE("excited-state population equation of the single-atom laser")
{
    Laser L;
    QExpr one = QExpr::identity(L.h);
    QExpr expected = -p("γ") * L.see + p("ν") * (one - L.see) + I() * p("g") * (L.ad * L.sge - L.a * L.seg);
    CHECK(qle_rhs(L.see, L.model) == expected);
}

TEST_CASE("trace preservation and linearity")
{
    Laser L;
    CHECK(qle_rhs(QExpr::identity(L.h), L.model).is_zero());
    auto x = L.ad * L.a;
    auto y = L.a * L.see;
    auto alpha = p("g") + I();
    CHECK(qle_rhs(alpha * x + y, L.model) == alpha * qle_rhs(x, L.model) + qle_rhs(y, L.model));
}

TEST_CASE("averaging is linear and maps the identity to 1")
{
    Laser L;
    CHECK(average(QExpr::identity(L.h)) == ScalarExpr(1));
    auto x = p("g") * (L.a * L.ad);
    CHECK(average(x) == p("g") * avg(L.ad * L.a) + p("g"));
}

TEST_CASE("photon number equation at second order")
{
    Laser L;
    auto eqs = meanfield_derive({L.ad * L.a}, L.model, OrderSpec::uniform(2), FilterFunction::phase_invariant());
    REQUIRE(eqs.size() == 1);
    ScalarExpr expected = -I() * p("g") * avg(L.ad * L.sge) + I() * p("g") * avg(L.a * L.seg) - p("κ") * avg(L.ad * L.a);
    CHECK(eqs.equations[0].rhs == expected);
    auto missing = missing_averages(eqs);
    REQUIRE(missing.size() == 1);
    CHECK(*missing.begin() == AverageSymbol::of((L.ad * L.sge).terms()[0].ops));
}

TEST_CASE("sums are rejected by meanfield_derive")
{
    Laser L;
    CHECK_THROWS_AS(meanfield_derive({L.a + L.ad}, L.model, OrderSpec::uniform(2), FilterFunction::none()),
                    DomainError);
}

TEST_CASE("completion of the single-atom laser at second order gives three equations")
{
    Laser L;
    auto eqs = meanfield_derive({L.ad * L.a}, L.model, OrderSpec::uniform(2), FilterFunction::phase_invariant());
    auto done = complete(eqs);
    CHECK(done.size() == 3);
    CHECK(missing_averages(done).empty());
}

TEST_CASE("three-level laser at fourth order needs 30 equations")
{
    ThreeLevelLaser T;
    auto eqs = meanfield_derive({T.ad * T.a, T.s("3", "3"), T.s("2", "2")}, T.model, OrderSpec::uniform(4),
                                FilterFunction::none());
    auto done = complete(eqs);
    CHECK(done.size() == 30);
}

TEST_CASE("Tavis-Cummings equation count")
{
    for (int n : {2, 3, 5}) {
        TavisCummings tc(n);
        std::vector<QExpr> seeds;
        for (int k = 1; k <= n; ++k) seeds.push_back(tc.s(k, "2", "2"));
        auto eqs = meanfield_derive(seeds, tc.model, OrderSpec::uniform(2), FilterFunction::phase_invariant());
        auto done = complete(eqs);
        CHECK(done.size() == static_cast<std::size_t>(n * (n - 1) / 2 + 2 * n + 1));
    }
}
