// cqf_main.cpp: command-line driver over the C interface

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqf/cqf.h"

namespace {

struct Options {
    std::string model;
    std::string order;
    std::string reducer = "max";
    std::string filter;
    std::string method;
    std::string omega;
    std::string archive;
    std::string out;
    double dt = 0, rtol = 0, atol = 0;
    bool oracle = false;
    bool latex = false;
};

int report(cqf_status s)
{
    if (s != CQF_OK) std::fprintf(stderr, "cqf: error: %s\n", cqf_last_error());
    return static_cast<int>(s);
}

int bad_flag(const std::string& m)
{
    std::fprintf(stderr, "cqf: error: %s\n", m.c_str());
    return CQF_ERR_ARGUMENT;
}

int configure(cqf_model* m, const Options& o)
{
    if (!o.order.empty()) {
        std::vector<int> orders;
        std::stringstream ss(o.order);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                orders.push_back(std::stoi(item));
            } catch (const std::exception&) {
                return bad_flag("--order expects N or a comma-separated list");
            }
        }
        if (auto s = cqf_model_set_order(m, orders.data(), orders.size(), o.reducer == "min")) return report(s);
    }
    if (!o.filter.empty()) {
        if (auto s = cqf_model_set_filter(m, o.filter.c_str())) return report(s);
    }
    if (!o.method.empty()) {
        if (auto s = cqf_model_set_method(m, o.method.c_str())) return report(s);
    }
    if (auto s = cqf_model_set_tolerances(m, o.dt, o.rtol, o.atol)) return report(s);
    if (!o.omega.empty()) {
        double lo = 0, hi = 0;
        int n = 0;
        char tail = 0;
        if (std::sscanf(o.omega.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &tail) != 3) {
            return bad_flag("--omega expects min:max:count");
        }
        if (auto s = cqf_model_set_omega(m, lo, hi, n)) return report(s);
    }
    return 0;
}

std::string default_archive(const std::string& model)
{
    return std::filesystem::path(model).stem().string() + ".eqs.json";
}

int run(const std::string& command, const Options& o)
{
    cqf_model* m = nullptr;
    if (auto s = cqf_model_load(o.model.c_str(), &m)) return report(s);
    int rc = configure(m, o);
    cqf_equations* e = nullptr;
    cqf_table* t = nullptr;
    if (rc == 0) {
        cqf_status s = CQF_OK;
        if (command != "derive" && !o.archive.empty()) s = cqf_equations_load(o.archive.c_str(), &e);
        else s = cqf_derive(m, &e);
        rc = report(s);
    }
    if (rc == 0 && command == "derive") {
        const std::string path = o.archive.empty() ? default_archive(o.model) : o.archive;
        rc = report(cqf_equations_save(e, path.c_str()));
        char* dump = nullptr;
        if (rc == 0) rc = report(cqf_equations_dump(e, o.latex, &dump));
        if (rc == 0) {
            FILE* f = o.out.empty() ? stdout : std::fopen(o.out.c_str(), "w");
            if (!f) {
                rc = bad_flag("cannot write '" + o.out + "'");
            } else {
                std::fputs(dump, f);
                if (f != stdout) std::fclose(f);
                std::fprintf(stderr, "cqf: %zu equations, archive written to %s\n", cqf_equations_size(e), path.c_str());
            }
        }
        cqf_string_free(dump);
    } else if (rc == 0) {
        cqf_command cmd = command == "solve" ? CQF_SOLVE : command == "correlate" ? CQF_CORRELATE : CQF_SPECTRUM;
        rc = report(cqf_run(m, e, cmd, o.oracle, &t));
        if (rc == 0) rc = report(cqf_table_write_csv(t, o.out.empty() ? nullptr : o.out.c_str()));
        if (rc == 0 && !o.out.empty()) {
            for (size_t k = 0; k < cqf_table_note_count(t); ++k) std::fprintf(stderr, "cqf: %s\n", cqf_table_note(t, k));
        }
    }
    cqf_table_free(t);
    cqf_equations_free(e);
    cqf_model_free(m);
    return rc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cumulant-expansion equations for open quantum systems"};
    app.require_subcommand(1);
    Options o;
    std::string chosen;
    const std::vector<std::pair<const char*, const char*>> commands{
        {"derive", "derive and close the moment equations, write the archive and dump them"},
        {"solve", "integrate the equations over tspan and write a CSV table"},
        {"correlate", "two-time correlation C(tau) of the file's correlation pair"},
        {"spectrum", "power spectrum S(omega) of the file's correlation pair"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("model", o.model, "model file")->required()->check(CLI::ExistingFile);
        sub->add_option("--order", o.order, "cumulant order N, or one order per space a,b,...");
        sub->add_option("--order-reducer", o.reducer, "how mixed-space orders combine")->check(CLI::IsMember({"max", "min"}));
        sub->add_option("--filter", o.filter, "average filter")->check(CLI::IsMember({"none", "phase"}));
        sub->add_option("--archive", o.archive, "equation archive to write (derive) or read");
        sub->add_option("--out", o.out, "output file (default stdout)");
        sub->add_option("--method", o.method, "integrator")->check(CLI::IsMember({"rk4", "rk45"}));
        sub->add_option("--dt", o.dt, "fixed step for rk4")->check(CLI::PositiveNumber);
        sub->add_option("--rtol", o.rtol, "relative tolerance for rk45")->check(CLI::PositiveNumber);
        sub->add_option("--atol", o.atol, "absolute tolerance for rk45")->check(CLI::PositiveNumber);
        sub->add_option("--omega", o.omega, "spectrum grid min:max:count");
        sub->add_flag("--oracle", o.oracle, "also run the master-equation reference");
        if (std::string(name) == "derive") sub->add_flag("--latex", o.latex, "dump equations as LaTeX");
        sub->callback([&chosen, name] { chosen = name; });
    }
    CLI11_PARSE(app, argc, argv);
    return run(chosen, o);
}
