#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "cqf/cqf.h"

namespace {

std::string laser_path()
{
    return std::string(CQF_SOURCE_DIR) + "/models/laser.cqf";
}

std::size_t column(const cqf_table* t, const std::string& name)
{
    for (std::size_t c = 0; c < cqf_table_columns(t); ++c) {
        if (name == cqf_table_column_name(t, c)) return c;
    }
    return static_cast<std::size_t>(-1);
}

} // namespace

TEST_CASE("derive, archive and solve through the C interface")
{
    cqf_model* m = nullptr;
    REQUIRE(cqf_model_load(laser_path().c_str(), &m) == CQF_OK);
    cqf_equations* e = nullptr;
    REQUIRE(cqf_derive(m, &e) == CQF_OK);
    CHECK(cqf_equations_size(e) == 3);

    const std::string archive = "capi_laser.eqs.json";
    REQUIRE(cqf_equations_save(e, archive.c_str()) == CQF_OK);
    cqf_equations* loaded = nullptr;
    REQUIRE(cqf_equations_load(archive.c_str(), &loaded) == CQF_OK);
    char* a = nullptr;
    char* b = nullptr;
    REQUIRE(cqf_equations_dump(e, 0, &a) == CQF_OK);
    REQUIRE(cqf_equations_dump(loaded, 0, &b) == CQF_OK);
    CHECK(std::string(a) == std::string(b));
    cqf_string_free(a);
    cqf_string_free(b);

    REQUIRE(cqf_model_set_tolerances(m, 0.02, 0, 0) == CQF_OK);
    cqf_table* t = nullptr;
    REQUIRE(cqf_run(m, loaded, CQF_SOLVE, 0, &t) == CQF_OK);
    CHECK(cqf_table_rows(t) == 201);
    CHECK(std::string(cqf_table_column_name(t, 0)) == "t");
    const std::size_t n = column(t, "re:n");
    REQUIRE(n < cqf_table_columns(t));
    CHECK(cqf_table_value(t, 0, n) == 0.0);
    CHECK(cqf_table_value(t, cqf_table_rows(t) - 1, n) > 0.5);
    cqf_table_free(t);

    cqf_equations_free(loaded);
    cqf_equations_free(e);
    cqf_model_free(m);
    std::remove(archive.c_str());
}

TEST_CASE("spectrum table with the oracle column")
{
    cqf_model* m = nullptr;
    REQUIRE(cqf_model_load(laser_path().c_str(), &m) == CQF_OK);
    REQUIRE(cqf_model_set_omega(m, -2, 2, 41) == CQF_OK);
    cqf_equations* e = nullptr;
    REQUIRE(cqf_derive(m, &e) == CQF_OK);
    cqf_table* t = nullptr;
    REQUIRE(cqf_run(m, e, CQF_SPECTRUM, 1, &t) == CQF_OK);
    CHECK(cqf_table_rows(t) == 41);
    const std::size_t s = column(t, "S");
    const std::size_t o = column(t, "oracle:S");
    REQUIRE(s < cqf_table_columns(t));
    REQUIRE(o < cqf_table_columns(t));
    for (std::size_t r = 0; r < cqf_table_rows(t); ++r) {
        CHECK(cqf_table_value(t, r, s) >= 0.0);
        CHECK(cqf_table_value(t, r, o) > -1e-9);
    }
    CHECK(cqf_table_note_count(t) >= 1);
    cqf_table_free(t);
    cqf_equations_free(e);
    cqf_model_free(m);
}

TEST_CASE("errors are reported with status and message")
{
    cqf_model* m = nullptr;
    CHECK(cqf_model_load("/nonexistent/model.cqf", &m) == CQF_ERR_IO);
    CHECK(std::string(cqf_last_error()).find("/nonexistent/model.cqf") != std::string::npos);
    CHECK(m == nullptr);

    CHECK(cqf_model_parse("space c fock\nhamiltonian a'*\n", &m) == CQF_ERR_PARSE);
    CHECK(std::string(cqf_last_error()).find("2:") != std::string::npos);

    REQUIRE(cqf_model_parse("space c fock\nhamiltonian a'*a\n", &m) == CQF_OK);
    cqf_equations* e = nullptr;
    CHECK(cqf_derive(m, &e) == CQF_ERR_DOMAIN);
    CHECK(cqf_model_set_filter(m, "bogus") == CQF_ERR_ARGUMENT);
    CHECK(cqf_model_set_method(m, "euler") == CQF_ERR_ARGUMENT);
    cqf_model_free(m);
}

TEST_CASE("equations from another model are rejected")
{
    cqf_model* m = nullptr;
    cqf_model* other = nullptr;
    REQUIRE(cqf_model_load(laser_path().c_str(), &m) == CQF_OK);
    REQUIRE(cqf_model_load((std::string(CQF_SOURCE_DIR) + "/models/optomech.cqf").c_str(), &other) == CQF_OK);
    cqf_equations* e = nullptr;
    REQUIRE(cqf_derive(other, &e) == CQF_OK);
    cqf_table* t = nullptr;
    CHECK(cqf_run(m, e, CQF_SOLVE, 0, &t) != CQF_OK);
    CHECK(t == nullptr);
    cqf_equations_free(e);
    cqf_model_free(other);
    cqf_model_free(m);
}
