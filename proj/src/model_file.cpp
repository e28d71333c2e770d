// model_file.cpp: lexer, parser and printer for model files

#include "cqf/model_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cqf/error.hpp"
#include "cqf/render.hpp"

namespace cqf {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 0;
    std::size_t col = 0;
};

bool starts_dagger(std::string_view s, std::size_t i)
{
    return s.compare(i, 3, "\xE2\x80\xA0") == 0;
}

bool ident_start(unsigned char c)
{
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

std::vector<Token> tokenize(std::string_view line, std::size_t lineno)
{
    std::vector<Token> out;
    std::size_t col = 1;
    auto advance = [&](std::size_t& i) {
        // columns count code points
        if ((static_cast<unsigned char>(line[i]) & 0xC0) != 0x80) ++col;
        ++i;
    };
    std::size_t i = 0;
    while (i < line.size()) {
        unsigned char c = line[i];
        if (c == '#') break;
        if (std::isspace(c)) {
            advance(i);
            continue;
        }
        Token t;
        t.line = lineno;
        t.col = col;
        if (starts_dagger(line, i)) {
            t.kind = Tok::Punct;
            t.text = "'";
            for (int k = 0; k < 3; ++k) advance(i);
        } else if (ident_start(c)) {
            t.kind = Tok::Ident;
            while (i < line.size() && !starts_dagger(line, i) &&
                   (ident_start(line[i]) || std::isdigit(static_cast<unsigned char>(line[i])))) {
                t.text += line[i];
                advance(i);
            }
        } else if (std::isdigit(c) || (c == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
            t.kind = Tok::Number;
            while (i < line.size() && (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '.')) {
                t.text += line[i];
                advance(i);
            }
            if (i < line.size() && (line[i] == 'e' || line[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < line.size() && (line[j] == '+' || line[j] == '-')) ++j;
                if (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
                    while (i < j) {
                        t.text += line[i];
                        advance(i);
                    }
                    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
                        t.text += line[i];
                        advance(i);
                    }
                }
            }
        } else if (std::string_view("+-*/^'()[]<>,=:").find(static_cast<char>(c)) != std::string_view::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, static_cast<char>(c));
            advance(i);
        } else {
            throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", lineno, col);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = lineno;
    end.col = col;
    out.push_back(end);
    return out;
}

const std::set<std::string> kReserved{"for", "rate", "im", "sum", "conj", "op", "ground", "steady", "transient"};

Coeff invert(const Coeff& c)
{
    Rational n = c.re() * c.re() + c.im() * c.im();
    return Coeff(c.re() / n, -c.im() / n);
}

std::string fmt_double(double x)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

class Parser {
public:
    ModelFile parse(std::string_view text)
    {
        std::size_t lineno = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++lineno;
            toks_ = tokenize(line, lineno);
            pos_ = 0;
            if (toks_.front().kind != Tok::End) statement();
            if (end == text.size()) break;
            start = end + 1;
        }
        if (!file_) throw ParseError("model file declares no hamiltonian", lineno, 1);
        return std::move(*file_);
    }

private:
    // token helpers

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool is_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

    [[noreturn]] void fail(const std::string& m, const Token& t) const { throw ParseError(m, t.line, t.col); }
    [[noreturn]] void fail(const std::string& m) const { fail(m, peek()); }

    void expect(const char* p)
    {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'" + found());
        next();
    }

    std::string found() const
    {
        if (at_end()) return " at end of line";
        return " but found '" + peek().text + "'";
    }

    std::string ident()
    {
        if (peek().kind != Tok::Ident) fail("expected a name" + found());
        return next().text;
    }

    void expect_end()
    {
        if (!at_end()) fail("unexpected '" + peek().text + "'");
    }

    double number()
    {
        bool neg = false;
        if (is_punct("-")) {
            next();
            neg = true;
        }
        if (peek().kind != Tok::Number) fail("expected a number" + found());
        const Token& t = next();
        double v = 0;
        auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (r.ec != std::errc() || r.ptr != t.text.data() + t.text.size()) fail("malformed number '" + t.text + "'", t);
        return neg ? -v : v;
    }

    // integer expressions for indices and loop bounds

    long iexpr()
    {
        long v = iterm();
        while (is_punct("+") || is_punct("-")) {
            bool plus = next().text == "+";
            long r = iterm();
            v = plus ? v + r : v - r;
        }
        return v;
    }

    long iterm()
    {
        long v = iatom();
        while (is_punct("*")) {
            next();
            v *= iatom();
        }
        return v;
    }

    long iatom()
    {
        if (is_punct("-")) {
            next();
            return -iatom();
        }
        if (is_punct("(")) {
            next();
            long v = iexpr();
            expect(")");
            return v;
        }
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            next();
            long v = 0;
            auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (r.ec != std::errc() || r.ptr != t.text.data() + t.text.size()) fail("expected an integer", t);
            return v;
        }
        if (t.kind == Tok::Ident) {
            if (auto v = integer_name(t.text)) {
                next();
                return *v;
            }
            fail("'" + t.text + "' is not an integer constant", t);
        }
        fail("expected an integer" + found());
    }

    std::optional<long> integer_name(const std::string& n) const
    {
        if (auto it = locals_.find(n); it != locals_.end()) return it->second;
        if (auto it = lets_.find(n); it != lets_.end()) return it->second;
        return std::nullopt;
    }

    /// A name with an optional [index] suffix, e.g. atom[k] -> atom3.
    std::string indexed_name()
    {
        std::string n = ident();
        while (is_punct("[")) {
            next();
            n += std::to_string(iexpr());
            expect("]");
        }
        return n;
    }

    void check_fresh(const std::string& n, const Token& at)
    {
        if (kReserved.count(n)) fail("'" + n + "' is a reserved word", at);
        if (names_.count(n)) fail("'" + n + "' is already declared", at);
        names_.insert(n);
    }

    // statements

    /// Splits off a trailing `for k=a:b` and runs body once per k.
    template <class F>
    void with_loop(F body)
    {
        std::size_t for_at = toks_.size() - 1;
        for (std::size_t k = pos_; k + 1 < toks_.size(); ++k) {
            if (toks_[k].kind == Tok::Ident && toks_[k].text == "for") {
                for_at = k;
                break;
            }
        }
        if (for_at == toks_.size() - 1) {
            body();
            expect_end();
            return;
        }
        const std::size_t body_start = pos_;
        auto saved = toks_;
        pos_ = for_at + 1;
        const Token var_tok = peek();
        std::string var = ident();
        if (integer_name(var) || names_.count(var)) fail("loop variable '" + var + "' shadows a declaration", var_tok);
        expect("=");
        long lo = iexpr();
        expect(":");
        long hi = iexpr();
        expect_end();
        Token end = toks_[for_at];
        end.kind = Tok::End;
        toks_.resize(for_at);
        toks_.push_back(end);
        for (long k = lo; k <= hi; ++k) {
            locals_[var] = k;
            pos_ = body_start;
            body();
            expect_end();
        }
        locals_.erase(var);
        toks_ = std::move(saved);
    }

    void statement()
    {
        const Token kw = peek();
        if (kw.kind != Tok::Ident) fail("expected a keyword" + found());
        const std::string k = next().text;
        static const std::set<std::string> decl{"let", "param", "space", "op"};
        if (decl.count(k) && file_) fail("'" + k + "' must come before the hamiltonian and other model lines", kw);
        if (k == "let") return let_line();
        if (k == "param") return param_line();
        if (k == "space") return with_loop([&] { space_line(); });
        if (k == "op") return with_loop([&] { op_line(); });
        if (k == "hamiltonian") return hamiltonian_line(kw);
        if (!file_) fail("'" + k + "' needs a preceding hamiltonian line", kw);
        if (k == "jump") return with_loop([&] { jump_line(); });
        if (k == "derive") return with_loop([&] { derive_line(); });
        if (k == "order") return order_line(kw);
        if (k == "filter") return filter_line();
        if (k == "observable") return observable_line();
        if (k == "initial") return with_loop([&] { initial_line(); });
        if (k == "tspan") {
            double a = number();
            double b = number();
            if (!(b > a)) fail("tspan end must exceed its start", kw);
            run().tspan = {a, b};
            return expect_end();
        }
        if (k == "method") {
            const Token t = peek();
            std::string m = ident();
            if (m == "rk4") run().method = Method::RK4;
            else if (m == "rk45") run().method = Method::RK45;
            else fail("unknown method '" + m + "' (rk4 or rk45)", t);
            return expect_end();
        }
        if (k == "dt") return positive(run().dt, kw);
        if (k == "rtol") return positive(run().rtol, kw);
        if (k == "atol") return positive(run().atol, kw);
        if (k == "save_every") return positive(run().save_every, kw);
        if (k == "tau") return positive(run().tau_max, kw);
        if (k == "maxsteps") {
            long n = iexpr();
            if (n <= 0) fail("maxsteps must be positive", kw);
            run().max_steps = static_cast<std::size_t>(n);
            return expect_end();
        }
        if (k == "cutoff") return cutoff_line();
        if (k == "correlation") return correlation_line();
        if (k == "omega") {
            OmegaGrid g;
            g.min = number();
            g.max = number();
            const Token t = peek();
            g.count = static_cast<int>(iexpr());
            if (g.count < 1 || !(g.max >= g.min)) fail("omega needs min <= max and a positive count", t);
            run().omega = g;
            return expect_end();
        }
        fail("unknown keyword '" + k + "'", kw);
    }

    RunOptions& run() { return file_->run; }

    void positive(std::optional<double>& slot, const Token& kw)
    {
        double v = number();
        if (!(v > 0)) fail(kw.text + " must be positive", kw);
        slot = v;
        expect_end();
    }

    void let_line()
    {
        const Token t = peek();
        std::string n = ident();
        check_fresh(n, t);
        expect("=");
        lets_[n] = iexpr();
        expect_end();
    }

    void param_line()
    {
        if (at_end()) fail("expected parameter names");
        while (!at_end()) {
            const Token t = peek();
            std::string n = ident();
            check_fresh(n, t);
            params_.push_back(Parameter{n, true});
            if (is_punct("=")) {
                next();
                values_.emplace_back(n, number());
            }
            if (is_punct(",")) next();
        }
    }

    void space_line()
    {
        const Token t = peek();
        std::string name = indexed_name();
        for (const auto& s : spaces_) {
            if (s.name == name) fail("space '" + name + "' is already declared", t);
        }
        const Token kt = peek();
        std::string kind = ident();
        std::optional<std::string> op;
        HilbertSpace h;
        if (kind == "fock") {
            h = HilbertSpace::fock(name);
        } else if (kind == "nlevel") {
            std::vector<std::string> levels;
            while (peek().kind == Tok::Ident || peek().kind == Tok::Number) {
                if (is_word("ground") || is_word("op")) break;
                levels.push_back(next().text);
            }
            if (levels.size() == 1 && std::all_of(levels[0].begin(), levels[0].end(), ::isdigit)) {
                int n = std::stoi(levels[0]);
                levels.clear();
                for (int k = 1; k <= n; ++k) levels.push_back(std::to_string(k));
            }
            if (levels.size() < 2) fail("an nlevel space needs at least two levels", kt);
            std::set<std::string> uniq(levels.begin(), levels.end());
            if (uniq.size() != levels.size()) fail("level labels must be distinct", kt);
            std::optional<std::string> ground;
            if (is_word("ground")) {
                next();
                const Token g = peek();
                if (g.kind != Tok::Ident && g.kind != Tok::Number) fail("expected a level label" + found());
                ground = next().text;
                if (!uniq.count(*ground)) fail("ground level '" + *ground + "' is not a level of '" + name + "'", g);
            }
            h = HilbertSpace::nlevel(name, levels, ground);
        } else {
            fail("expected 'fock' or 'nlevel'" + found(), kt);
        }
        if (is_word("op")) {
            next();
            const Token o = peek();
            std::string n = indexed_name();
            check_fresh(n, o);
            h.op_name = n;
        } else {
            if (names_.count(h.op_name)) {
                fail("operator name '" + h.op_name + "' is taken; give this space its own with 'op NAME'", t);
            }
            names_.insert(h.op_name);
        }
        families_[h.op_name] = spaces_.size();
        spaces_.push_back(std::move(h));
    }

    std::size_t space_ref()
    {
        const Token t = peek();
        std::string n = indexed_name();
        for (std::size_t s = 0; s < spaces_.size(); ++s) {
            if (spaces_[s].name == n) return s;
        }
        fail("undeclared space '" + n + "'", t);
    }

    std::string level_ref(const HilbertSpace& h)
    {
        const Token t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::Number) fail("expected a level label" + found());
        next();
        if (std::find(h.levels.begin(), h.levels.end(), t.text) == h.levels.end()) {
            fail("'" + t.text + "' is not a level of '" + h.name + "'", t);
        }
        return t.text;
    }

    void op_line()
    {
        const Token t = peek();
        std::string n = indexed_name();
        check_fresh(n, t);
        expect("=");
        const Token kt = peek();
        std::string kind = ident();
        std::size_t s = space_ref();
        const auto& h = spaces_[s];
        FundamentalOp op;
        if (kind == "destroy" || kind == "create") {
            if (h.kind != SpaceKind::Fock) fail("'" + kind + "' needs a Fock space; '" + h.name + "' is nlevel", kt);
            op = kind == "destroy" ? FundamentalOp::destroy(s) : FundamentalOp::create(s);
        } else if (kind == "transition") {
            if (h.kind != SpaceKind::NLevel) fail("'transition' needs an nlevel space; '" + h.name + "' is fock", kt);
            std::string i = level_ref(h);
            std::string j = level_ref(h);
            op = FundamentalOp::transition(s, h.level_index(i), h.level_index(j));
        } else {
            fail("expected destroy, create or transition" + found(), kt);
        }
        aliases_[n] = op;
        named_.push_back(NamedOp{n, op});
    }

    SpacePtr space()
    {
        if (!space_) {
            if (spaces_.empty()) fail("no space declared");
            space_ = std::make_shared<const ProductSpace>(spaces_);
        }
        return space_;
    }

    void hamiltonian_line(const Token& kw)
    {
        if (file_) fail("duplicate hamiltonian line", kw);
        SpacePtr h = space();
        ModelDefinition m(h);
        m.ops = named_;
        m.parameters = params_;
        file_.emplace(std::move(m));
        run().values = values_;
        if (at_end()) fail("empty hamiltonian", kw);
        const Token start = peek();
        QExpr x = expr();
        expect_end();
        for (const auto& t : x.terms()) {
            if (!t.coeff.averages().empty()) fail("averages are not allowed in the hamiltonian", start);
        }
        file_->model.hamiltonian = std::move(x);
    }

    void jump_line()
    {
        QExpr c = expr();
        if (!is_word("rate")) fail("expected 'rate'" + found());
        next();
        const Token t = peek();
        ScalarExpr r = scalar(expr(), t);
        file_->model.jumps.push_back(std::move(c));
        file_->model.rates.push_back(std::move(r));
    }

    void derive_line()
    {
        for (;;) {
            const Token t = peek();
            QExpr x = expr();
            if (x.is_zero() || !x.is_monomial() || x.terms().front().ops.empty()) {
                fail("derive needs single operator products", t);
            }
            file_->derive.push_back(std::move(x));
            if (!is_punct(",")) break;
            next();
        }
    }

    void order_line(const Token& kw)
    {
        std::vector<int> orders;
        for (;;) {
            const Token t = peek();
            long n = iexpr();
            if (n < 1) fail("orders must be at least 1", t);
            orders.push_back(static_cast<int>(n));
            if (!is_punct(",")) break;
            next();
        }
        auto red = OrderSpec::Reducer::Max;
        bool explicit_reducer = false;
        if (is_word("max") || is_word("min")) {
            red = next().text == "max" ? OrderSpec::Reducer::Max : OrderSpec::Reducer::Min;
            explicit_reducer = true;
        }
        expect_end();
        if (orders.size() == 1 && !explicit_reducer) {
            file_->order = OrderSpec::uniform(orders[0]);
            return;
        }
        OrderSpec o = OrderSpec::per_subspace(orders, red);
        try {
            o.validate(*space());
        } catch (const Error& e) {
            fail(e.what(), kw);
        }
        file_->order = o;
    }

    void filter_line()
    {
        const Token t = peek();
        std::string f = ident();
        if (f != "none" && f != "phase") fail("unknown filter '" + f + "' (none or phase)", t);
        file_->filter = f;
        expect_end();
    }

    std::size_t fock_family(const Token& t, const std::string& n)
    {
        auto it = families_.find(n);
        if (it == families_.end() || spaces_[it->second].kind != SpaceKind::Fock) {
            auto al = aliases_.find(n);
            if (al != aliases_.end() && al->second.kind == OpKind::Destroy) return al->second.subspace;
            fail("'" + n + "' is not a Fock-space operator", t);
        }
        return it->second;
    }

    void observable_line()
    {
        const Token t = peek();
        std::string n = ident();
        for (const auto& o : file_->observables) {
            if (o.name == n) fail("observable '" + n + "' is already defined", t);
        }
        expect("=");
        ObservableDef d;
        d.name = n;
        if ((is_word("mandel_q") || is_word("temperature")) && peek(1).kind == Tok::Punct && peek(1).text == "(") {
            bool mandel = next().text == "mandel_q";
            next();
            const Token at = peek();
            d.subspace = fock_family(at, ident());
            if (mandel) {
                d.kind = ObservableDef::Kind::MandelQ;
            } else {
                d.kind = ObservableDef::Kind::Temperature;
                expect(",");
                d.omega = number();
                if (!(d.omega > 0)) fail("temperature needs a positive mode frequency", at);
            }
            expect(")");
        } else {
            const Token at = peek();
            d.expr = scalar(expr(), at);
        }
        expect_end();
        file_->observables.push_back(std::move(d));
    }

    void initial_line()
    {
        const Token t = peek();
        ScalarExpr lhs = scalar(expr(), t);
        const auto& terms = lhs.terms();
        if (terms.size() != 1 || !terms[0].coeff.is_one() || terms[0].factors.size() != 1 ||
            !terms[0].factors[0].atom.is_average() || terms[0].factors[0].exp != 1) {
            fail("initial needs a single average on the left", t);
        }
        AverageSymbol a = terms[0].factors[0].atom.avg;
        expect("=");
        const Token v = peek();
        ScalarExpr value = scalar(expr(), v);
        if (!value.averages().empty()) fail("initial values cannot refer to averages", v);
        for (auto& [sym, val] : file_->initial) {
            if (sym.representative() == a.representative()) fail("duplicate initial value", t);
        }
        file_->initial.emplace_back(a, std::move(value));
    }

    void cutoff_line()
    {
        std::vector<std::size_t> targets;
        if (peek().kind == Tok::Ident && !integer_name(peek().text)) {
            std::size_t s = space_ref();
            if (spaces_[s].kind != SpaceKind::Fock) fail("cutoffs apply to Fock spaces only");
            targets.push_back(s);
        } else {
            for (std::size_t s = 0; s < spaces_.size(); ++s) {
                if (spaces_[s].kind == SpaceKind::Fock) targets.push_back(s);
            }
        }
        const Token t = peek();
        long c = iexpr();
        if (c < 1) fail("cutoffs must be at least 1", t);
        expect_end();
        auto& cuts = run().cutoffs;
        for (std::size_t s : targets) {
            auto it = std::find_if(cuts.begin(), cuts.end(), [&](const auto& p) { return p.first == s; });
            if (it != cuts.end()) it->second = static_cast<int>(c);
            else cuts.emplace_back(s, static_cast<int>(c));
        }
        std::sort(cuts.begin(), cuts.end());
    }

    void correlation_line()
    {
        const Token t = peek();
        QExpr a = expr();
        expect(",");
        QExpr b = expr();
        for (const auto* x : {&a, &b}) {
            if (x->is_zero() || !x->is_monomial()) fail("correlation needs single operator products", t);
        }
        if (is_word("steady") || is_word("transient")) run().steady = next().text == "steady";
        expect_end();
        run().correlation.emplace(std::move(a), std::move(b));
    }

    // expressions

    ScalarExpr scalar(const QExpr& x, const Token& at)
    {
        ScalarExpr out;
        for (const auto& t : x.terms()) {
            if (!t.ops.empty()) fail("expected a c-number expression, found operators", at);
            out += t.coeff;
        }
        return out;
    }

    QExpr expr()
    {
        QExpr v = term();
        while (is_punct("+") || is_punct("-")) {
            bool plus = next().text == "+";
            QExpr r = term();
            if (plus) v += r;
            else v -= r;
        }
        return v;
    }

    QExpr term()
    {
        QExpr v = unary();
        for (;;) {
            if (is_punct("*")) {
                next();
                v = qmul(v, unary());
            } else if (is_punct("/")) {
                const Token t = next();
                QExpr d = unary();
                std::optional<Coeff> c;
                if (d.is_monomial() && d.terms().front().ops.empty()) c = d.terms().front().coeff.constant_value();
                if (!c || c->is_zero()) fail("division only by nonzero numeric constants", t);
                v *= ScalarExpr(invert(*c));
            } else {
                return v;
            }
        }
    }

    QExpr unary()
    {
        if (is_punct("-")) {
            next();
            return -unary();
        }
        if (is_punct("+")) {
            next();
            return unary();
        }
        return power();
    }

    QExpr power()
    {
        QExpr base = postfix();
        if (!is_punct("^")) return base;
        next();
        const Token t = peek();
        long n = iatom();
        if (n < 0) fail("negative powers are not supported", t);
        QExpr out = QExpr::identity(space());
        for (long k = 0; k < n; ++k) out = qmul(out, base);
        return out;
    }

    QExpr postfix()
    {
        QExpr v = primary();
        while (is_punct("'")) {
            next();
            v = adjoint(v);
        }
        return v;
    }

    QExpr constant(const Coeff& c) { return QExpr::scalar(space(), ScalarExpr(c)); }

    QExpr primary()
    {
        const Token t = peek();
        if (t.kind == Tok::Number) {
            next();
            try {
                return constant(Coeff(Rational::from_decimal(t.text)));
            } catch (const Error& e) {
                fail(e.what(), t);
            }
        }
        if (is_punct("(")) {
            next();
            QExpr v = expr();
            expect(")");
            return v;
        }
        if (is_punct("<")) {
            next();
            QExpr v = expr();
            expect(">");
            for (const auto& qt : v.terms()) {
                if (!qt.coeff.averages().empty()) fail("nested averages", t);
            }
            return QExpr::scalar(space(), average(v));
        }
        if (t.kind != Tok::Ident) fail("expected an expression" + found());
        next();
        const std::string& n = t.text;
        if (n == "im") return constant(Coeff::i());
        if (n == "sum") return sum_form(t);
        if (n == "conj") {
            expect("(");
            QExpr v = expr();
            expect(")");
            return QExpr::scalar(space(), scalar(v, t).conj());
        }
        if (auto v = integer_name(n)) return constant(Coeff(*v));
        std::string full = n;
        while (is_punct("[")) {
            next();
            full += std::to_string(iexpr());
            expect("]");
        }
        for (const auto& p : params_) {
            if (p.name == full) return QExpr::scalar(space(), ScalarExpr::param(p));
        }
        if (auto it = aliases_.find(full); it != aliases_.end()) return QExpr::op(space(), it->second);
        if (auto it = families_.find(full); it != families_.end()) {
            const auto& h = spaces_[it->second];
            if (h.kind == SpaceKind::Fock) return QExpr::destroy(space(), it->second);
            expect("(");
            std::string i = level_ref(h);
            expect(",");
            std::string j = level_ref(h);
            expect(")");
            return QExpr::transition(space(), it->second, i, j);
        }
        fail("undeclared identifier '" + full + "'", t);
    }

    QExpr sum_form(const Token& at)
    {
        expect("(");
        const Token vt = peek();
        std::string var = ident();
        if (integer_name(var) || names_.count(var)) fail("loop variable '" + var + "' shadows a declaration", vt);
        expect("=");
        long lo = iexpr();
        expect(":");
        long hi = iexpr();
        expect(",");
        const std::size_t body = pos_;
        QExpr out(space());
        std::size_t after = body;
        if (hi < lo) fail("empty sum range", at);
        for (long k = lo; k <= hi; ++k) {
            locals_[var] = k;
            pos_ = body;
            out += expr();
            after = pos_;
        }
        locals_.erase(var);
        pos_ = after;
        expect(")");
        return out;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, long> lets_;
    std::map<std::string, long> locals_;
    std::set<std::string> names_;
    std::vector<Parameter> params_;
    std::vector<std::pair<std::string, double>> values_;
    std::vector<HilbertSpace> spaces_;
    std::map<std::string, std::size_t> families_;
    std::map<std::string, FundamentalOp> aliases_;
    std::vector<NamedOp> named_;
    SpacePtr space_;
    std::optional<ModelFile> file_;
};

} // namespace

ParamValues RunOptions::params() const
{
    ParamValues p;
    for (const auto& [k, v] : values) p[k] = v;
    return p;
}

StepperConfig RunOptions::stepper() const
{
    StepperConfig c;
    if (method) c.method = *method;
    if (dt) c.dt = *dt;
    if (rtol) c.rtol = *rtol;
    if (atol) c.atol = *atol;
    if (max_steps) c.max_steps = *max_steps;
    if (save_every) c.save_interval = *save_every;
    return c;
}

bool operator==(const ModelFile& a, const ModelFile& b)
{
    return a.model == b.model && a.derive == b.derive && a.order == b.order && a.filter == b.filter &&
           a.observables == b.observables && a.initial == b.initial && a.run == b.run;
}

ModelFile parse_model(std::string_view text)
{
    return Parser().parse(text);
}

ModelFile load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_model(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.line(), e.column());
    }
}

std::string print_model(const ModelFile& m)
{
    const auto& space = *m.model.space;
    std::ostringstream o;
    for (const auto& p : m.model.parameters) {
        o << "param " << p.name;
        for (const auto& [k, v] : m.run.values) {
            if (k == p.name) o << " = " << fmt_double(v);
        }
        o << '\n';
    }
    for (const auto& h : space.factors()) {
        o << "space " << h.name;
        if (h.kind == SpaceKind::Fock) {
            o << " fock";
        } else {
            o << " nlevel";
            for (const auto& l : h.levels) o << ' ' << l;
            o << " ground " << h.levels[h.ground];
        }
        o << " op " << h.op_name << '\n';
    }
    for (const auto& n : m.model.ops) {
        const auto& h = space[n.op.subspace];
        o << "op " << n.name << " = ";
        switch (n.op.kind) {
        case OpKind::Destroy:
            o << "destroy " << h.name;
            break;
        case OpKind::Create:
            o << "create " << h.name;
            break;
        case OpKind::Transition:
            o << "transition " << h.name << ' ' << h.levels[n.op.i] << ' ' << h.levels[n.op.j];
            break;
        }
        o << '\n';
    }
    o << "hamiltonian " << render(m.model.hamiltonian) << '\n';
    for (std::size_t k = 0; k < m.model.jumps.size(); ++k) {
        o << "jump " << render(m.model.jumps[k]) << " rate " << render(space, m.model.rates[k]) << '\n';
    }
    for (const auto& d : m.derive) o << "derive " << render(d) << '\n';
    if (m.order) {
        o << "order ";
        const auto& v = m.order->orders();
        for (std::size_t k = 0; k < v.size(); ++k) o << (k ? "," : "") << v[k];
        if (!m.order->is_uniform()) o << (m.order->reducer() == OrderSpec::Reducer::Max ? " max" : " min");
        o << '\n';
    }
    if (m.filter != "none") o << "filter " << m.filter << '\n';
    for (const auto& d : m.observables) {
        o << "observable " << d.name << " = ";
        switch (d.kind) {
        case ObservableDef::Kind::Expr:
            o << render(space, d.expr);
            break;
        case ObservableDef::Kind::MandelQ:
            o << "mandel_q(" << space[d.subspace].op_name << ")";
            break;
        case ObservableDef::Kind::Temperature:
            o << "temperature(" << space[d.subspace].op_name << ", " << fmt_double(d.omega) << ")";
            break;
        }
        o << '\n';
    }
    for (const auto& [a, v] : m.initial) o << "initial " << render_average(space, a) << " = " << render(space, v) << '\n';
    const auto& r = m.run;
    if (r.tspan) o << "tspan " << fmt_double(r.tspan->first) << ' ' << fmt_double(r.tspan->second) << '\n';
    if (r.method) o << "method " << (*r.method == Method::RK4 ? "rk4" : "rk45") << '\n';
    if (r.dt) o << "dt " << fmt_double(*r.dt) << '\n';
    if (r.rtol) o << "rtol " << fmt_double(*r.rtol) << '\n';
    if (r.atol) o << "atol " << fmt_double(*r.atol) << '\n';
    if (r.save_every) o << "save_every " << fmt_double(*r.save_every) << '\n';
    if (r.max_steps) o << "maxsteps " << *r.max_steps << '\n';
    for (const auto& [s, c] : r.cutoffs) o << "cutoff " << space[s].name << ' ' << c << '\n';
    if (r.correlation) {
        o << "correlation " << render(r.correlation->first) << ", " << render(r.correlation->second)
          << (r.steady ? " steady" : " transient") << '\n';
    }
    if (r.tau_max) o << "tau " << fmt_double(*r.tau_max) << '\n';
    if (r.omega) o << "omega " << fmt_double(r.omega->min) << ' ' << fmt_double(r.omega->max) << ' ' << r.omega->count << '\n';
    return o.str();
}

std::vector<cplx> initial_state(const ModelFile& m, const RHSProgram& prog)
{
    std::vector<cplx> u(prog.size(), cplx(0.0));
    Bindings b;
    for (const auto& [k, v] : m.run.params()) b.params[k] = v;
    for (const auto& [a, v] : m.initial) {
        auto idx = prog.index_of(a.representative());
        if (!idx) throw DomainError("initial value given for " + render_average(*prog.space(), a) + ", which is not in the equation set");
        cplx x = scalar_evaluate(v, b);
        u[*idx] = a.conj() ? std::conj(x) : x;
    }
    return u;
}

} // namespace cqf
