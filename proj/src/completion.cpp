// completion.cpp: breadth-first closure of moment equations

#include "cqf/completion.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "cqf/error.hpp"

namespace cqf {

namespace {

std::set<AverageSymbol> unknowns_in(const ScalarExpr& rhs, const EquationSet& eqs, const std::set<OpString>& known,
                                    const CompletionOptions* opts)
{
    std::set<AverageSymbol> out;
    for (const auto& a : rhs.averages()) {
        if (known.count(a.ops())) continue;
        if (!eqs.filter(*eqs.model.space, a.ops())) continue;
        if (opts && opts->external && opts->external(a)) continue;
        out.insert(a);
    }
    return out;
}

std::set<OpString> lhs_keys(const EquationSet& eqs)
{
    std::set<OpString> s;
    for (const auto& e : eqs.equations) s.insert(e.lhs.ops());
    return s;
}

} // namespace

std::set<AverageSymbol> missing_averages(const EquationSet& eqs)
{
    const auto known = lhs_keys(eqs);
    std::set<AverageSymbol> out;
    for (const auto& e : eqs.equations) {
        auto m = unknowns_in(e.rhs, eqs, known, nullptr);
        out.insert(m.begin(), m.end());
    }
    return out;
}

EquationSet complete(EquationSet eqs, const CompletionOptions& opts)
{
    LangevinGenerator gen(eqs.model);
    Expander expander(eqs.model.space, eqs.order, eqs.filter);
    auto known = lhs_keys(eqs);
    std::set<AverageSymbol> frontier;
    for (const auto& e : eqs.equations) {
        auto m = unknowns_in(e.rhs, eqs, known, &opts);
        frontier.insert(m.begin(), m.end());
    }
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    while (!frontier.empty()) {
        if (eqs.equations.size() + frontier.size() > opts.max_equations) {
            throw CapacityError("completion exceeds the limit of " + std::to_string(opts.max_equations) +
                                " equations");
        }
        std::vector<AverageSymbol> round(frontier.begin(), frontier.end());
        std::vector<ScalarExpr> rhs(round.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            try {
                for (std::size_t k = next++; k < round.size(); k = next++) {
                    rhs[k] = derive_rhs(round[k].ops(), gen, expander);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = round.size();
            }
        };
        unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(round.size()));
        if (n <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);
        for (std::size_t k = 0; k < round.size(); ++k) {
            known.insert(round[k].ops());
            eqs.equations.push_back(MeanfieldEquation{round[k], std::move(rhs[k])});
        }
        frontier.clear();
        for (std::size_t k = eqs.equations.size() - round.size(); k < eqs.equations.size(); ++k) {
            auto m = unknowns_in(eqs.equations[k].rhs, eqs, known, &opts);
            frontier.insert(m.begin(), m.end());
        }
        if (opts.progress) opts.progress(eqs.equations.size());
    }
    return eqs;
}

EquationSet complete(EquationSet eqs, const OrderSpec& order, const FilterFunction& filter,
                     const CompletionOptions& opts)
{
    eqs.order = order;
    eqs.filter = filter;
    return complete(std::move(eqs), opts);
}

} // namespace cqf
