// capi.cpp: extern "C" wrappers with status codes and thread-local errors

#include "cqf/cqf.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>

#include "cqf/archive.hpp"
#include "cqf/driver.hpp"
#include "cqf/error.hpp"

struct cqf_model {
    cqf::ModelFile file;
};

struct cqf_equations {
    cqf::EquationSet eqs;
};

struct cqf_table {
    cqf::Table table;
};

namespace {

thread_local std::string last_error;

cqf_status code_of(cqf::ErrorKind k)
{
    using cqf::ErrorKind;
    switch (k) {
    case ErrorKind::Domain:
        return CQF_ERR_DOMAIN;
    case ErrorKind::Evaluation:
        return CQF_ERR_EVALUATION;
    case ErrorKind::Capacity:
        return CQF_ERR_CAPACITY;
    case ErrorKind::Closure:
        return CQF_ERR_CLOSURE;
    case ErrorKind::Io:
        return CQF_ERR_IO;
    case ErrorKind::Integration:
        return CQF_ERR_INTEGRATION;
    case ErrorKind::NonStationary:
        return CQF_ERR_NONSTATIONARY;
    case ErrorKind::Parse:
        return CQF_ERR_PARSE;
    default:
        return CQF_ERR_INTERNAL;
    }
}

template <class F>
cqf_status guarded(F f)
{
    last_error.clear();
    try {
        f();
        return CQF_OK;
    } catch (const cqf::Error& e) {
        last_error = e.what();
        return code_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CQF_ERR_CAPACITY;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CQF_ERR_INTERNAL;
    }
}

cqf_status bad_argument(const char* what)
{
    last_error = what;
    return CQF_ERR_ARGUMENT;
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* cqf_last_error(void)
{
    return last_error.c_str();
}

const char* cqf_version(void)
{
    return "1.0.0";
}

cqf_status cqf_model_load(const char* path, cqf_model** out)
{
    if (!path || !out) return bad_argument("null argument");
    return guarded([&] { *out = new cqf_model{cqf::load_model(path)}; });
}

cqf_status cqf_model_parse(const char* text, cqf_model** out)
{
    if (!text || !out) return bad_argument("null argument");
    return guarded([&] { *out = new cqf_model{cqf::parse_model(text)}; });
}

void cqf_model_free(cqf_model* m)
{
    delete m;
}

cqf_status cqf_model_print(const cqf_model* m, char** out)
{
    if (!m || !out) return bad_argument("null argument");
    return guarded([&] { *out = copy_string(cqf::print_model(m->file)); });
}

cqf_status cqf_model_set_order(cqf_model* m, const int* orders, size_t n, int use_min)
{
    if (!m || !orders || n == 0) return bad_argument("order list is empty");
    return guarded([&] {
        cqf::RunSettings s;
        std::vector<int> v(orders, orders + n);
        if (n == 1 && !use_min) s.order = cqf::OrderSpec::uniform(v[0]);
        else s.order = cqf::OrderSpec::per_subspace(v, use_min ? cqf::OrderSpec::Reducer::Min : cqf::OrderSpec::Reducer::Max);
        s.apply(m->file);
    });
}

cqf_status cqf_model_set_filter(cqf_model* m, const char* id)
{
    if (!m || !id) return bad_argument("null argument");
    if (std::string(id) != "none" && std::string(id) != "phase") return bad_argument("filter must be none or phase");
    return guarded([&] {
        cqf::RunSettings s;
        s.filter = id;
        s.apply(m->file);
    });
}

cqf_status cqf_model_set_method(cqf_model* m, const char* name)
{
    if (!m || !name) return bad_argument("null argument");
    std::string n = name;
    if (n == "rk4") m->file.run.method = cqf::Method::RK4;
    else if (n == "rk45") m->file.run.method = cqf::Method::RK45;
    else return bad_argument("method must be rk4 or rk45");
    last_error.clear();
    return CQF_OK;
}

cqf_status cqf_model_set_tolerances(cqf_model* m, double dt, double rtol, double atol)
{
    if (!m) return bad_argument("null argument");
    if (dt > 0) m->file.run.dt = dt;
    if (rtol > 0) m->file.run.rtol = rtol;
    if (atol > 0) m->file.run.atol = atol;
    last_error.clear();
    return CQF_OK;
}

cqf_status cqf_model_set_omega(cqf_model* m, double min, double max, int count)
{
    if (!m) return bad_argument("null argument");
    if (count < 1 || !(max >= min)) return bad_argument("omega needs min <= max and a positive count");
    m->file.run.omega = cqf::OmegaGrid{min, max, count};
    last_error.clear();
    return CQF_OK;
}

cqf_status cqf_derive(const cqf_model* m, cqf_equations** out)
{
    if (!m || !out) return bad_argument("null argument");
    return guarded([&] { *out = new cqf_equations{cqf::derive_equations(m->file)}; });
}

cqf_status cqf_equations_load(const char* path, cqf_equations** out)
{
    if (!path || !out) return bad_argument("null argument");
    return guarded([&] { *out = new cqf_equations{cqf::load_archive(path)}; });
}

cqf_status cqf_equations_save(const cqf_equations* e, const char* path)
{
    if (!e || !path) return bad_argument("null argument");
    return guarded([&] { cqf::save_archive(e->eqs, path); });
}

size_t cqf_equations_size(const cqf_equations* e)
{
    return e ? e->eqs.size() : 0;
}

cqf_status cqf_equations_dump(const cqf_equations* e, int latex, char** out)
{
    if (!e || !out) return bad_argument("null argument");
    return guarded([&] { *out = copy_string(cqf::dump_equations(e->eqs, latex != 0)); });
}

void cqf_equations_free(cqf_equations* e)
{
    delete e;
}

cqf_status cqf_run(const cqf_model* m, const cqf_equations* e, cqf_command cmd, int oracle, cqf_table** out)
{
    if (!m || !e || !out) return bad_argument("null argument");
    return guarded([&] {
        if (!(e->eqs.model == m->file.model)) throw cqf::DomainError("the equations were derived from a different model");
        switch (cmd) {
        case CQF_SOLVE:
            *out = new cqf_table{cqf::solve_table(m->file, e->eqs, oracle != 0)};
            return;
        case CQF_CORRELATE:
            *out = new cqf_table{cqf::correlate_table(m->file, e->eqs, oracle != 0)};
            return;
        case CQF_SPECTRUM:
            *out = new cqf_table{cqf::spectrum_table(m->file, e->eqs, oracle != 0)};
            return;
        }
        throw cqf::DomainError("unknown command");
    });
}

size_t cqf_table_rows(const cqf_table* t)
{
    return t ? t->table.rows.size() : 0;
}

size_t cqf_table_columns(const cqf_table* t)
{
    return t ? t->table.columns.size() : 0;
}

const char* cqf_table_column_name(const cqf_table* t, size_t col)
{
    if (!t || col >= t->table.columns.size()) return nullptr;
    return t->table.columns[col].c_str();
}

double cqf_table_value(const cqf_table* t, size_t row, size_t col)
{
    if (!t || row >= t->table.rows.size() || col >= t->table.rows[row].size()) return std::nan("");
    return t->table.rows[row][col];
}

size_t cqf_table_note_count(const cqf_table* t)
{
    return t ? t->table.notes.size() : 0;
}

const char* cqf_table_note(const cqf_table* t, size_t i)
{
    if (!t || i >= t->table.notes.size()) return nullptr;
    return t->table.notes[i].c_str();
}

cqf_status cqf_table_write_csv(const cqf_table* t, const char* path)
{
    if (!t) return bad_argument("null argument");
    return guarded([&] {
        if (!path) {
            t->table.write_csv(std::cout);
            std::cout.flush();
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw cqf::IoError(std::string("cannot write '") + path + "'");
        t->table.write_csv(f);
        if (!f) throw cqf::IoError(std::string("write to '") + path + "' failed");
    });
}

void cqf_table_free(cqf_table* t)
{
    delete t;
}

void cqf_string_free(char* s)
{
    std::free(s);
}

} // extern "C"
