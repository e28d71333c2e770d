#include <doctest.h>

#include <memory>

#include "cqf/error.hpp"
#include "cqf/qexpr.hpp"

using namespace cqf;

namespace {

SpacePtr cavity_atom()
{
    return std::make_shared<const ProductSpace>(
        std::vector<HilbertSpace>{HilbertSpace::fock("cavity"), HilbertSpace::nlevel("atom", {"g", "e"}, "g")});
}

} // namespace

TEST_CASE("bosonic commutation a a' = a' a + 1")
{
    auto h = cavity_atom();
    auto a = QExpr::destroy(h, 0);
    auto ad = QExpr::create(h, 0);
    CHECK(a * ad == ad * a + QExpr::identity(h));
    CHECK(commutator(a, ad) == QExpr::identity(h));
    CHECK(commutator(ad * a, a) == -a);
}

TEST_CASE("higher Fock products follow the normal-ordering formula")
{
    auto h = cavity_atom();
    auto a = QExpr::destroy(h, 0);
    auto ad = QExpr::create(h, 0);
    // a a a' a' = a'a'aa + 4 a'a + 2
    auto lhs = a * a * ad * ad;
    auto rhs = ad * ad * a * a + ScalarExpr(4) * (ad * a) + QExpr::scalar(h, ScalarExpr(2));
    CHECK(lhs == rhs);
}

TEST_CASE("transition products and ground projector elimination")
{
    auto h = cavity_atom();
    auto sge = QExpr::transition(h, 1, "g", "e");
    auto seg = QExpr::transition(h, 1, "e", "g");
    auto see = QExpr::transition(h, 1, "e", "e");
    CHECK(sge * seg == QExpr::identity(h) - see);
    CHECK((sge * sge).is_zero());
    CHECK(seg * sge == see);
    CHECK(QExpr::transition(h, 1, "g", "g") == QExpr::identity(h) - see);
}

TEST_CASE("operators on different subspaces commute into canonical order")
{
    auto h = cavity_atom();
    auto a = QExpr::destroy(h, 0);
    auto sge = QExpr::transition(h, 1, "g", "e");
    CHECK(sge * a == a * sge);
    REQUIRE(( sge * a).is_monomial());
    CHECK((sge * a).terms().front().ops.front().subspace == 0);
}

TEST_CASE("adjoint reverses and daggers")
{
    auto h = cavity_atom();
    auto a = QExpr::destroy(h, 0);
    auto ad = QExpr::create(h, 0);
    auto sge = QExpr::transition(h, 1, "g", "e");
    auto seg = QExpr::transition(h, 1, "e", "g");
    CHECK(adjoint(ad * seg) == a * sge);
    auto x = ScalarExpr(Coeff::i()) * (ad * a);
    CHECK(adjoint(x) == ScalarExpr(-Coeff::i()) * (ad * a));
    CHECK(adjoint(adjoint(a * a * ad + sge)) == a * a * ad + sge);
}

TEST_CASE("mixing expressions from different spaces is a domain error")
{
    auto h1 = cavity_atom();
    auto h2 = std::make_shared<const ProductSpace>(std::vector<HilbertSpace>{HilbertSpace::fock("other")});
    CHECK_THROWS_AS(QExpr::destroy(h1, 0) * QExpr::destroy(h2, 0), DomainError);
    CHECK_THROWS_AS(QExpr::transition(h1, 0, "g", "e"), DomainError);
    CHECK_THROWS_AS(QExpr::transition(h1, 1, "g", "x"), DomainError);
}

TEST_CASE("qmul is associative on random-ish products")
{
    auto h = std::make_shared<const ProductSpace>(std::vector<HilbertSpace>{
        HilbertSpace::fock("c"), HilbertSpace::nlevel("atom", {"1", "2", "3"}, "1")});
    std::vector<QExpr> ops{QExpr::destroy(h, 0), QExpr::create(h, 0)};
    for (auto i : {"1", "2", "3"}) {
        for (auto j : {"1", "2", "3"}) ops.push_back(QExpr::transition(h, 1, i, j));
    }
    for (const auto& x : ops) {
        for (const auto& y : ops) {
            for (const auto& z : ops) CHECK((x * y) * z == x * (y * z));
        }
    }
}
