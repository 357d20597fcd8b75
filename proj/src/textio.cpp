#include "fl/textio.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "fl/validate.hpp"

namespace fl {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    int line, column;
};

const std::set<std::string> kKeywords = {
    "if",  "then", "else",   "while",   "do",   "invariant", "skip",     "alloc",    "free",  "exists",
    "forall", "ite", "Sp",   "true",    "false", "nil",      "emptyset", "cup",      "cap",   "in",
    "notin", "subseteq", "goal", "field", "fun", "const",    "rel",      "var",      "emp",   "triple"};

std::vector<Token> lex(const std::string& text, const std::string& file) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    static const char* syms[] = {":=", "&&", "||", "=>", "!=", "<=", ">=", "|-", "->", ":", ",", ";", ".",
                                 "(",  ")",  "{",  "}",  "[",  "]",  "!",  "=",  "<",  ">",  "+", "-", "~", "*"};
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') adv(1);
            continue;
        }
        int l = line, cc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '#') {
            size_t j = i + 1;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                       text[j] == '#' || text[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, text.substr(i, j - i), l, cc});
            adv(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({Tok::Number, text.substr(i, j - i), l, cc});
            adv(j - i);
            continue;
        }
        bool matched = false;
        for (const char* s : syms) {
            size_t n = std::char_traits<char>::length(s);
            if (text.compare(i, n, s) == 0) {
                out.push_back({Tok::Sym, s, l, cc});
                adv(n);
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ParseError({file, l, cc, 1}, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

struct Scope {
    std::vector<std::pair<std::string, Sort>> vars;
};

class Parser {
public:
    Parser(const std::string& text, std::string file, Signature& sig, DefinitionSet& defs, SLDefinitionSet& sldefs)
        : toks_(lex(text, file)), file_(std::move(file)), sig_(sig), defs_(defs), sldefs_(sldefs) {}

    // ---------- token helpers ----------
    const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool is(const char* s, size_t k = 0) const {
        auto& t = peek(k);
        return (t.kind == Tok::Sym || t.kind == Tok::Ident) && t.text == s;
    }
    bool is_ident(size_t k = 0) const {
        auto& t = peek(k);
        return t.kind == Tok::Ident && !kKeywords.count(t.text);
    }
    bool accept(const char* s) {
        if (is(s)) {
            ++pos_;
            return true;
        }
        return false;
    }
    Span span_here() const { return {peek().line, peek().column, static_cast<int>(peek().text.size())}; }
    Span span_from(size_t start) const {
        auto& a = toks_[start];
        auto& b = toks_[pos_ > start ? pos_ - 1 : start];
        int len = (b.line == a.line) ? b.column + static_cast<int>(b.text.size()) - a.column : 1;
        return {a.line, a.column, std::max(len, 1)};
    }
    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) {
        auto& t = peek();
        throw ParseError({file_, t.line, t.column, std::max<int>(1, static_cast<int>(t.text.size()))},
                         msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"),
                         std::move(expected));
    }
    void expect(const char* s) {
        if (!accept(s)) fail(std::string("expected '") + s + "'", {s});
    }
    std::string ident(const char* what = "identifier") {
        if (!is_ident()) fail(std::string("expected ") + what, {what});
        return toks_[pos_++].text;
    }

    template <class F>
    auto attempt(F&& f) -> std::optional<decltype(f())> {
        size_t save = pos_;
        try {
            return f();
        } catch (const ParseError& e) {
            record(e);
            pos_ = save;
            return std::nullopt;
        }
    }
    void record(const ParseError& e) {
        auto& s = e.span();
        if (!furthest_ || s.line > furthest_->span().line ||
            (s.line == furthest_->span().line && s.column > furthest_->span().column))
            furthest_ = e;
    }
    [[noreturn]] void rethrow_furthest(const std::string& fallback) {
        auto& t = peek();
        if (furthest_ && (furthest_->span().line > t.line ||
                          (furthest_->span().line == t.line && furthest_->span().column >= t.column)))
            throw *furthest_;
        fail(fallback);
    }

    // ---------- sorts and scopes ----------
    std::optional<Sort> var_sort(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            for (auto jt = it->vars.rbegin(); jt != it->vars.rend(); ++jt)
                if (jt->first == name) return jt->second;
        return sig_.variable(name);
    }
    Sort sort_name_tok() {
        auto& t = peek();
        auto s = t.kind == Tok::Ident ? parse_sort_name(t.text) : std::nullopt;
        if (!s) fail("expected a sort", {"loc", "int", "bool", "set"});
        ++pos_;
        return *s;
    }

    static NodePtr spanned(NodePtr n, Span s) {
        std::const_pointer_cast<Node>(n)->span = s;
        return n;
    }

    // ---------- formulas ----------
    NodePtr formula() { return implies(); }

    NodePtr implies() {
        size_t st = pos_;
        auto a = disj();
        if (accept("=>")) return spanned(mk::implies(a, implies()), span_from(st));
        return a;
    }
    NodePtr disj() {
        size_t st = pos_;
        auto a = conj();
        while (accept("||")) a = spanned(mk::or_(a, conj()), span_from(st));
        return a;
    }
    NodePtr conj() {
        size_t st = pos_;
        auto a = unary();
        while (accept("&&")) a = spanned(mk::and_(a, unary()), span_from(st));
        return a;
    }
    NodePtr unary() {
        size_t st = pos_;
        if (accept("!")) return spanned(mk::not_(unary()), span_from(st));
        return primary_formula();
    }

    bool at_comparison_op() const {
        return is("=") || is("!=") || is("in") || is("notin") || is("subseteq") || is("<") || is("<=") ||
               is(">") || is(">=");
    }

    NodePtr comparison() {
        size_t st = pos_;
        auto a = term();
        if (!at_comparison_op())
            fail("expected a comparison", {"=", "!=", "in", "notin", "subseteq", "<", "<=", ">", ">="});
        std::string op = toks_[pos_++].text;
        auto b = term();
        NodePtr r;
        if (op == "=") r = mk::eq(a, b);
        else if (op == "!=") r = mk::neq(a, b);
        else if (op == "in") r = mk::in(a, b);
        else if (op == "notin") r = mk::notin(a, b);
        else r = mk::rel(op, {a, b});
        Span s = span_from(st);
        if (r->kind == Kind::Not) spanned(r->kids[0], s);
        return spanned(r, s);
    }

    std::vector<Binder> binders() {
        std::vector<Binder> bs;
        do {
            if (accept("(")) {
                std::string n = ident("variable");
                expect(":");
                Sort s = sort_name_tok();
                expect(")");
                bs.push_back({Symbol(n), s});
            } else {
                bs.push_back({Symbol(ident("variable")), Sort::Foreground});
            }
        } while (accept(","));
        return bs;
    }

    NodePtr quantifier(bool is_forall) {
        size_t st = pos_;
        ++pos_;
        auto bs = binders();
        Scope sc;
        for (auto& b : bs) sc.vars.emplace_back(b.var.str(), b.sort);
        scopes_.push_back(sc);
        NodePtr guard = mk::tru();
        if (accept(":")) guard = formula();
        expect(".");
        auto body = formula();
        scopes_.pop_back();
        return spanned(is_forall ? mk::forall(bs, guard, body) : mk::exists(bs, guard, body), span_from(st));
    }

    bool is_relation_name(const std::string& n) const {
        return sig_.relation(n) || defs_.find(n) || pending_defs_.count(n);
    }

    NodePtr primary_formula() {
        size_t st = pos_;
        if (is("exists")) return quantifier(false);
        if (is("forall")) return quantifier(true);
        if ((is("true") || is("false")) && !(peek(1).kind == Tok::Sym && is_comparison_text(peek(1).text))) {
            bool t = is("true");
            ++pos_;
            return spanned(t ? mk::tru() : mk::fls(), span_from(st));
        }
        if (is_ident() && is("(", 1) && is_relation_name(peek().text)) {
            std::string r = ident();
            expect("(");
            std::vector<NodePtr> args;
            if (!is(")")) {
                do args.push_back(term());
                while (accept(","));
            }
            expect(")");
            return spanned(mk::rel(r, args), span_from(st));
        }
        if (auto c = attempt([&] { return comparison(); })) return *c;
        if (is("ite")) {
            ++pos_;
            expect("(");
            auto g = formula();
            expect(":");
            auto a = formula();
            expect(",");
            auto b = formula();
            expect(")");
            return spanned(mk::ite(g, a, b), span_from(st));
        }
        if (accept("(")) {
            auto f = formula();
            expect(")");
            return f;
        }
        rethrow_furthest("expected a formula");
    }

    static bool is_comparison_text(const std::string& s) {
        return s == "=" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=";
    }

    // ---------- terms ----------
    NodePtr term() {
        size_t st = pos_;
        auto a = simple_term();
        while (is("+") || is("-") || is("cup") || is("cap")) {
            std::string op = toks_[pos_++].text;
            auto b = simple_term();
            if (op == "+") a = mk::plus(a, b);
            else if (op == "-") a = mk::minus(a, b);
            else if (op == "cup") a = mk::cup(a, b);
            else a = mk::cap(a, b);
            spanned(a, span_from(st));
        }
        return a;
    }

    NodePtr simple_term() {
        size_t st = pos_;
        auto& t = peek();
        if (accept("~")) return spanned(mk::compl_(simple_term()), span_from(st));
        if (t.kind == Tok::Number) {
            int64_t v = std::stoll(t.text);
            ++pos_;
            return spanned(mk::int_lit(v), span_from(st));
        }
        if (is("-") && peek(1).kind == Tok::Number) {
            ++pos_;
            int64_t v = -std::stoll(peek().text);
            ++pos_;
            return spanned(mk::int_lit(v), span_from(st));
        }
        if (is("true") || is("false")) {
            bool b = is("true");
            ++pos_;
            return spanned(mk::bool_lit(b), span_from(st));
        }
        if (accept("nil")) return spanned(mk::nil(), span_from(st));
        if (accept("emptyset")) return spanned(mk::empty(), span_from(st));
        if (is("Sp")) {
            ++pos_;
            expect("(");
            NodePtr inner;
            if (auto f = attempt([&] {
                    auto r = formula();
                    if (!is(")")) fail("expected ')'", {")"});
                    return r;
                }))
                inner = *f;
            else
                inner = term();
            expect(")");
            return spanned(mk::sp(inner), span_from(st));
        }
        if (is("ite")) {
            ++pos_;
            expect("(");
            auto g = formula();
            expect(":");
            auto a = term();
            expect(",");
            auto b = term();
            expect(")");
            if (a->sort != b->sort) fail("ite branches have different sorts");
            return spanned(mk::ite_term(g, a, b), span_from(st));
        }
        if (accept("(")) {
            auto r = term();
            expect(")");
            return r;
        }
        if (is_ident()) {
            std::string n = ident();
            if (is("(")) {
                auto* f = sig_.function(n);
                if (!f) {
                    if (is_relation_name(n)) fail("relation " + n + " used as a term");
                    throw ParseError({file_, toks_[st].line, toks_[st].column, static_cast<int>(n.size())},
                                     "UnknownSymbol: unknown function " + n);
                }
                ++pos_;
                std::vector<NodePtr> args;
                if (!is(")")) {
                    do args.push_back(term());
                    while (accept(","));
                }
                expect(")");
                return spanned(mk::app(n, args, f->result), span_from(st));
            }
            if (auto s = var_sort(n)) return spanned(mk::var(n, *s), span_from(st));
            if (auto* c = sig_.constant(n)) return spanned(mk::cnst(n, c->sort), span_from(st));
            return spanned(mk::var(n, Sort::Foreground), span_from(st));
        }
        fail("expected a term", {"identifier", "number", "Sp", "ite", "(", "~"});
    }

    // ---------- declarations and definitions ----------
    std::vector<Sort> sort_list() {
        std::vector<Sort> out;
        do out.push_back(sort_name_tok());
        while (accept(","));
        return out;
    }

    void declaration() {
        size_t st = pos_;
        std::string kw = toks_[pos_++].text;
        try {
            if (kw == "field" || kw == "fun") {
                std::string n = ident("function name");
                expect(":");
                auto args = sort_list();
                expect("->");
                Sort r = sort_name_tok();
                expect(";");
                sig_.add_function({n, args, r, kw == "field"});
            } else if (kw == "const") {
                std::string n = ident("constant name");
                expect(":");
                Sort s = sort_name_tok();
                expect(";");
                sig_.add_constant(n, s);
            } else if (kw == "rel") {
                std::string n = ident("relation name");
                expect(":");
                auto args = sort_list();
                expect(";");
                sig_.add_relation({n, args});
            } else {
                std::vector<std::string> names;
                do names.push_back(ident("variable name"));
                while (accept(","));
                expect(":");
                Sort s = sort_name_tok();
                expect(";");
                for (auto& n : names) sig_.add_variable(n, s);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            auto& t = toks_[st];
            throw ParseError({file_, t.line, t.column, static_cast<int>(t.text.size())}, e.what());
        }
    }

    void definition(FileMode mode) {
        size_t st = pos_;
        std::string name = ident("definition name");
        expect("(");
        std::vector<Binder> params;
        if (!is(")")) {
            do {
                std::string p = ident("parameter");
                Sort s = Sort::Foreground;
                if (accept(":")) s = sort_name_tok();
                params.push_back({Symbol(p), s});
            } while (accept(","));
        }
        expect(")");
        expect(":=");
        Scope sc;
        for (auto& b : params) sc.vars.emplace_back(b.var.str(), b.sort);
        scopes_.push_back(sc);
        if (mode == FileMode::Separation) {
            if (params.size() != 1 || params[0].sort != Sort::Foreground)
                fail("separation logic predicates take one loc parameter");
            auto body = sl_formula();
            scopes_.pop_back();
            expect(";");
            try {
                sldefs_.add({name, params[0].var.str(), body, span_from(st)});
            } catch (const Error& e) {
                auto& t = toks_[st];
                throw ParseError({file_, t.line, t.column, static_cast<int>(name.size())}, e.what());
            }
            return;
        }
        auto body = formula();
        scopes_.pop_back();
        expect(";");
        Definition d{name, params, body, 0, span_from(st)};
        try {
            defs_.add(d);
        } catch (const Error& e) {
            auto& t = toks_[st];
            throw ParseError({file_, t.line, t.column, static_cast<int>(name.size())}, e.what());
        }
    }

    // pre-scan so that definitions may refer to each other in any order
    void collect_definition_names(FileMode mode) {
        for (size_t i = 0; i + 1 < toks_.size(); ++i) {
            if (toks_[i].kind != Tok::Ident || kKeywords.count(toks_[i].text)) continue;
            bool line_start = i == 0 || toks_[i - 1].text == ";" || toks_[i - 1].text == "}";
            if (!line_start || toks_[i + 1].text != "(") continue;
            int depth = 0;
            size_t j = i + 1;
            for (; j < toks_.size(); ++j) {
                if (toks_[j].text == "(") ++depth;
                if (toks_[j].text == ")" && --depth == 0) break;
            }
            if (j + 1 < toks_.size() && toks_[j + 1].text == ":=") {
                if (mode == FileMode::Logic) pending_defs_.insert(toks_[i].text);
                else pending_sl_.insert(toks_[i].text);
            }
        }
    }

    ParsedFile file(FileMode mode) {
        ParsedFile out;
        collect_definition_names(mode);
        while (!at_end()) {
            if (is("field") || is("fun") || is("const") || is("rel") || is("var")) {
                declaration();
            } else if (accept("goal")) {
                if (mode == FileMode::Separation) out.sl_goals.push_back(sl_formula());
                else out.goals.push_back(formula());
                expect(";");
            } else if (is("triple") || is("{")) {
                out.triples.push_back(triple());
            } else if (is_ident() && is("(", 1)) {
                definition(mode);
            } else {
                fail("expected a declaration, definition, goal or triple",
                     {"field", "fun", "const", "rel", "var", "goal", "{", "definition"});
            }
        }
        return out;
    }

    // ---------- programs ----------
    StmtPtr statements() {
        size_t st = pos_;
        std::vector<StmtPtr> parts;
        parts.push_back(statement());
        while (accept(";")) {
            if (is("}") || at_end() || is("else")) break;
            parts.push_back(statement());
        }
        if (parts.size() == 1) return parts[0];
        auto s = stmt::seq(parts);
        std::const_pointer_cast<Stmt>(s)->span = span_from(st);
        return s;
    }

    StmtPtr block() {
        if (accept("{")) {
            auto s = statements();
            expect("}");
            return s;
        }
        return statements();
    }

    NodePtr location_operand() {
        auto t = term();
        if (t->kind != Kind::Var && t->kind != Kind::Const) fail("expected a variable or constant");
        return t;
    }

    StmtPtr statement() {
        size_t st = pos_;
        StmtPtr s;
        if (accept("skip")) {
            s = stmt::skip();
        } else if (accept("alloc")) {
            expect("(");
            std::string x = ident("variable");
            expect(")");
            s = stmt::alloc(x);
        } else if (accept("free")) {
            expect("(");
            std::string x = ident("variable");
            expect(")");
            s = stmt::free_(x);
        } else if (accept("if")) {
            auto c = formula();
            expect("then");
            auto a = block();
            expect("else");
            auto b = block();
            s = stmt::if_(c, a, b);
        } else if (accept("while")) {
            auto c = formula();
            NodePtr inv;
            if (accept("invariant")) {
                expect(":");
                inv = formula();
            }
            expect("do");
            auto body = block();
            s = stmt::while_(c, body, inv);
        } else if (is_ident() && is(".", 1)) {
            std::string x = ident();
            expect(".");
            std::string f = ident("field");
            if (!sig_.function(f)) fail("unknown field " + f);
            expect(":=");
            s = stmt::mutate(x, f, location_operand());
        } else if (is_ident() && is(":=", 1)) {
            std::string x = ident();
            expect(":=");
            if (is_ident() && is(".", 1)) {
                std::string y = ident();
                expect(".");
                std::string f = ident("field");
                if (!sig_.function(f)) fail("unknown field " + f);
                s = stmt::lookup(x, y, f);
            } else {
                auto rhs = term();
                Sort xs = var_sort(x).value_or(Sort::Foreground);
                if (xs == Sort::Foreground && rhs->kind != Kind::Var && rhs->kind != Kind::Const)
                    fail("a location variable can only be assigned a variable or constant");
                s = stmt::assign(x, rhs);
            }
        } else {
            fail("expected a statement", {"skip", "alloc", "free", "if", "while", "identifier"});
        }
        std::const_pointer_cast<Stmt>(s)->span = span_from(st);
        return s;
    }

    Triple triple() {
        Triple t;
        if (accept("triple")) t.name = ident("triple name");
        expect("{");
        t.pre = formula();
        expect("}");
        t.program = statements();
        expect("{");
        t.post = formula();
        expect("}");
        return t;
    }

    // ---------- separation logic ----------
    SLPtr sl_formula() {
        size_t st = pos_;
        auto a = sl_conj();
        while (accept("||")) {
            a = sl::or_(a, sl_conj());
            std::const_pointer_cast<SLNode>(a)->span = span_from(st);
        }
        return a;
    }
    SLPtr sl_conj() {
        size_t st = pos_;
        auto a = sl_star();
        while (accept("&&")) {
            a = sl::and_(a, sl_star());
            std::const_pointer_cast<SLNode>(a)->span = span_from(st);
        }
        return a;
    }
    SLPtr sl_star() {
        size_t st = pos_;
        auto a = sl_atom();
        while (accept("*")) {
            a = sl::star(a, sl_atom());
            std::const_pointer_cast<SLNode>(a)->span = span_from(st);
        }
        return a;
    }

    SLPtr points_to() {
        auto x = location_operand();
        expect("|-");
        std::string f = ident("field");
        if (!sig_.function(f)) fail("unknown field " + f);
        expect("->");
        auto y = location_operand();
        return sl::points_to(x, f, y);
    }

    SLPtr sl_atom() {
        size_t st = pos_;
        SLPtr r;
        if (accept("emp")) {
            r = sl::emp();
        } else if (accept("!")) {
            r = sl::not_(sl_atom());
        } else if (is("exists")) {
            ++pos_;
            std::string y = ident("variable");
            expect(".");
            scopes_.push_back(Scope{{{y, Sort::Foreground}}});
            expect("(");
            auto pt = points_to();
            expect(")");
            expect("*");
            auto body = sl_star();
            scopes_.pop_back();
            r = sl::exists_points_to(y, pt->x, pt->field, body);
            if (!(pt->y->kind == Kind::Var && pt->y->name() == y))
                fail("existential must bind the target of the points-to");
        } else if (is("ite")) {
            ++pos_;
            expect("(");
            auto c = formula();
            expect(",");
            auto a = sl_formula();
            expect(",");
            auto b = sl_formula();
            expect(")");
            r = sl::ite(c, a, b);
        } else if (accept("[")) {
            auto f = formula();
            expect("]");
            r = sl::stack(f);
        } else if (is_ident() && is("(", 1) && (sldefs_.find(peek().text) || pending_sl_.count(peek().text))) {
            std::string p = ident();
            expect("(");
            auto a = location_operand();
            expect(")");
            r = sl::pred(p, a);
        } else if (auto pt = attempt([&] { return points_to(); })) {
            r = *pt;
        } else if (is("(")) {
            ++pos_;
            r = sl_formula();
            expect(")");
            return r;
        } else if (is("true") || is("false")) {
            bool t = is("true");
            ++pos_;
            r = sl::stack(t ? mk::tru() : mk::fls());
        } else if (auto c = attempt([&] { return comparison(); })) {
            r = sl::stack(*c);
        } else {
            rethrow_furthest("expected a separation logic formula");
        }
        std::const_pointer_cast<SLNode>(r)->span = span_from(st);
        return r;
    }

    void finish() {
        if (!at_end()) fail("unexpected trailing input");
    }

    size_t pos_ = 0;
    std::set<std::string> pending_defs_;
    std::set<std::string> pending_sl_;

private:
    std::vector<Token> toks_;
    std::string file_;
    Signature& sig_;
    DefinitionSet& defs_;
    SLDefinitionSet& sldefs_;
    std::vector<Scope> scopes_;
    std::optional<ParseError> furthest_;
};

std::string read_all(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

FileMode mode_for_path(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".slf" ? FileMode::Separation : FileMode::Logic;
}

namespace {
ParsedFile parse_with(const std::string& text, const std::string& filename, FileMode mode, const Signature* base,
                      const ParsedFile* imported) {
    ParsedFile out;
    out.sig = std::make_shared<Signature>(imported ? *imported->sig : base ? *base : Signature());
    DefinitionSet defs = imported ? imported->defs : DefinitionSet{};
    SLDefinitionSet sldefs = imported ? imported->sl_defs : SLDefinitionSet{};
    Parser p(text, filename, *out.sig, defs, sldefs);
    auto f = p.file(mode);
    stratify(defs);
    f.sig = out.sig;
    f.defs = std::move(defs);
    f.sl_defs = std::move(sldefs);
    return f;
}

// imports bring declarations and definitions; their goals and triples are dropped
ParsedFile load_nested(const std::string& path, int depth) {
    if (depth > 16) throw Error(ErrorCode::InvalidInput, "import nesting too deep at " + path);
    static const std::regex line(R"re(^\s*import\s+"([^"]+)"\s*;\s*$)re");
    std::istringstream in(read_all(path));
    std::string text, l;
    auto dir = std::filesystem::path(path).parent_path();
    std::optional<ParsedFile> acc;
    while (std::getline(in, l)) {
        std::smatch m;
        if (std::regex_match(l, m, line)) {
            auto sub = load_nested((dir / m[1].str()).string(), depth + 1);
            if (acc) {
                for (auto& d : sub.defs.all())
                    if (!acc->defs.find(d.name)) acc->defs.add(d);
                for (auto& d : sub.sl_defs.all())
                    if (!acc->sl_defs.find(d.name)) acc->sl_defs.add(d);
                for (auto& f : sub.sig->functions())
                    if (!acc->sig->function(f.name)) acc->sig->add_function(f);
                for (auto& c : sub.sig->constants())
                    if (!acc->sig->constant(c.name)) acc->sig->add_constant(c.name, c.sort);
                for (auto& r : sub.sig->relations())
                    if (!acc->sig->relation(r.name)) acc->sig->add_relation(r);
                for (auto& [v, s] : sub.sig->variables())
                    if (!acc->sig->variable(v)) acc->sig->add_variable(v, s);
            } else {
                acc = std::move(sub);
            }
            acc->goals.clear();
            acc->triples.clear();
            acc->sl_goals.clear();
            text += "\n";
        } else {
            text += l + "\n";
        }
    }
    return parse_with(text, path, mode_for_path(path), nullptr, acc ? &*acc : nullptr);
}
}  // namespace

ParsedFile parse_file(const std::string& text, const std::string& filename, FileMode mode, const Signature* base) {
    return parse_with(text, filename, mode, base, nullptr);
}

ParsedFile load_file(const std::string& path) { return load_nested(path, 0); }

NodePtr parse_formula(const std::string& text, const Signature& sig, const DefinitionSet& defs) {
    Signature s = sig;
    DefinitionSet d = defs;
    SLDefinitionSet sd;
    Parser p(text, "", s, d, sd);
    auto f = p.formula();
    p.finish();
    return f;
}

NodePtr parse_term(const std::string& text, const Signature& sig, const DefinitionSet& defs) {
    Signature s = sig;
    DefinitionSet d = defs;
    SLDefinitionSet sd;
    Parser p(text, "", s, d, sd);
    auto t = p.term();
    p.finish();
    return t;
}

DefinitionSet parse_defs(const std::string& text, Signature& sig) {
    auto f = parse_file(text, "", FileMode::Logic, &sig);
    sig = *f.sig;
    return f.defs;
}

StmtPtr parse_program(const std::string& text, const Signature& sig, const DefinitionSet& defs) {
    Signature s = sig;
    DefinitionSet d = defs;
    SLDefinitionSet sd;
    Parser p(text, "", s, d, sd);
    auto r = p.statements();
    p.finish();
    return r;
}

Triple parse_triple(const std::string& text, const Signature& sig, const DefinitionSet& defs) {
    Signature s = sig;
    DefinitionSet d = defs;
    SLDefinitionSet sd;
    Parser p(text, "", s, d, sd);
    auto r = p.triple();
    p.finish();
    return r;
}

SLPtr parse_sl(const std::string& text, const Signature& sig, const SLDefinitionSet& defs) {
    Signature s = sig;
    DefinitionSet d;
    SLDefinitionSet sd = defs;
    Parser p(text, "", s, d, sd);
    auto r = p.sl_formula();
    p.finish();
    return r;
}

// ---------------- models ----------------

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

}  // namespace

PreModel parse_model(const std::string& text, std::shared_ptr<const Signature> sig) {
    ConfigExtras ex;
    return parse_model(text, std::move(sig), ex);
}

PreModel parse_model(const std::string& text, std::shared_ptr<const Signature> sig, ConfigExtras& extras) {
    std::istringstream in(text);
    std::string raw;
    int fg = -1;
    IntRange ints;
    std::vector<std::pair<int, std::string>> entries;
    int line = 0;
    auto err = [&](const std::string& msg) -> ParseError {
        return ParseError({"", line, 1, static_cast<int>(raw.size())}, msg);
    };
    while (std::getline(in, raw)) {
        ++line;
        std::string l = trim(raw.substr(0, raw.find("//")));
        if (l.empty()) continue;
        if (l.rfind("fg:", 0) == 0) {
            try {
                fg = std::stoi(trim(l.substr(3)));
            } catch (...) {
                throw err("bad foreground size");
            }
        } else if (l.rfind("int:", 0) == 0) {
            std::string r = trim(l.substr(4));
            auto dots = r.find("..");
            if (dots == std::string::npos) throw err("bad int range");
            try {
                ints.lo = std::stoll(r.substr(0, dots));
                ints.hi = std::stoll(r.substr(dots + 2));
            } catch (...) {
                throw err("bad int range");
            }
        } else if (l.rfind("heap:", 0) == 0 || l.rfind("free:", 0) == 0) {
            auto v = parse_value(trim(l.substr(5)), Sort::SetOfForeground);
            if (!v) throw err("bad location set");
            if (l[0] == 'h') {
                extras.H = v->mask();
                extras.has_heap = true;
            } else {
                extras.U = v->mask();
                extras.has_free = true;
            }
        } else {
            entries.emplace_back(line, l);
        }
    }
    if (fg < 0) throw ParseError({"", 1, 1, 1}, "model lacks a 'fg:' line");
    PreModel m(sig, fg, ints);
    for (auto& [ln, l] : entries) {
        line = ln;
        raw = l;
        auto eq = l.find('=');
        auto paren = l.find('(');
        if (eq == std::string::npos) {
            // relation tuple R(a,b)
            if (paren == std::string::npos || l.back() != ')') throw err("expected an entry");
            std::string r = trim(l.substr(0, paren));
            auto* rd = sig->relation(r);
            if (!rd) throw err("unknown relation " + r);
            auto args = split_args(l.substr(paren + 1, l.size() - paren - 2));
            if (args.size() != rd->args.size()) throw err("wrong arity for " + r);
            std::vector<Value> vals;
            for (size_t i = 0; i < args.size(); ++i) {
                auto v = parse_value(args[i], rd->args[i]);
                if (!v) throw err("bad value " + args[i]);
                vals.push_back(*v);
            }
            m.set_relation(r, vals, true);
            continue;
        }
        std::string lhs = trim(l.substr(0, eq)), rhs = trim(l.substr(eq + 1));
        if (paren == std::string::npos || paren > eq) {
            auto* c = sig->constant(lhs);
            if (!c) throw err("unknown constant " + lhs);
            auto v = parse_value(rhs, c->sort);
            if (!v) throw err("bad value " + rhs);
            try {
                m.set_constant(lhs, *v);
            } catch (const Error& e) {
                throw err(e.what());
            }
            continue;
        }
        std::string f = trim(lhs.substr(0, paren));
        auto* fd = sig->function(f);
        if (!fd) throw err("unknown function " + f);
        if (lhs.back() != ')') throw err("expected ')'");
        auto args = split_args(lhs.substr(paren + 1, lhs.size() - paren - 2));
        if (args.size() != fd->args.size()) throw err("wrong arity for " + f);
        std::vector<Value> vals;
        for (size_t i = 0; i < args.size(); ++i) {
            auto v = parse_value(args[i], fd->args[i]);
            if (!v) throw err("bad value " + args[i]);
            vals.push_back(*v);
        }
        auto v = parse_value(rhs, fd->result);
        if (!v) throw err("bad value " + rhs);
        try {
            m.set(f, vals, *v);
        } catch (const Error& e) {
            throw err(e.what());
        }
    }
    return m;
}

std::string print(const PreModel& m) {
    std::string out = "fg: " + std::to_string(m.fg_size()) + "\n";
    out += "int: " + std::to_string(m.ints().lo) + ".." + std::to_string(m.ints().hi) + "\n";
    auto& sig = m.signature();
    for (size_t i = 1; i < sig.constants().size(); ++i)
        out += sig.constants()[i].name + "=" + format_value(m.constant(static_cast<int>(i))) + "\n";
    std::vector<Value> args;
    for (size_t fi = 0; fi < sig.functions().size(); ++fi) {
        auto& f = sig.functions()[fi];
        args.resize(f.args.size());
        size_t n = m.tuple_count(f.args);
        for (size_t t = 0; t < n; ++t) {
            m.tuple_values(f.args, t, args.data());
            out += f.name + "(";
            for (size_t k = 0; k < args.size(); ++k) out += (k ? "," : "") + format_value(args[k]);
            out += ")=" + format_value(m.entry(static_cast<int>(fi), t)) + "\n";
        }
    }
    for (size_t ri = 0; ri < sig.relations().size(); ++ri) {
        auto& r = sig.relations()[ri];
        args.resize(r.args.size());
        size_t n = m.tuple_count(r.args);
        for (size_t t = 0; t < n; ++t) {
            if (!m.holds_entry(static_cast<int>(ri), t)) continue;
            m.tuple_values(r.args, t, args.data());
            out += r.name + "(";
            for (size_t k = 0; k < args.size(); ++k) out += (k ? "," : "") + format_value(args[k]);
            out += ")\n";
        }
    }
    return out;
}

// ---------------- printing ----------------

namespace {

std::string binder_text(const Binder& b) {
    if (b.sort == Sort::Foreground) return b.var.str();
    return "(" + b.var.str() + " : " + sort_name(b.sort) + ")";
}

std::string pt(const NodePtr& n, int ctx);
std::string pf(const NodePtr& n, int ctx);

std::string wrap(bool w, const std::string& s) { return w ? "(" + s + ")" : s; }

// term levels: 0 top, 1 left operand of a binary operator, 2 right operand or prefix operand
std::string pt(const NodePtr& n, int ctx) {
    switch (n->kind) {
        case Kind::Const:
        case Kind::Var:
            return n->name();
        case Kind::IntLit:
            return std::to_string(n->ival);
        case Kind::BoolLit:
            return n->ival ? "true" : "false";
        case Kind::App: {
            const std::string& f = n->name();
            if (f == "cup" || f == "cap" || f == "+" || f == "-")
                return wrap(ctx >= 2, pt(n->kids[0], 1) + " " + f + " " + pt(n->kids[1], 2));
            if (f == "compl") return "~" + pt(n->kids[0], 2);
            std::string s = f + "(";
            for (size_t i = 0; i < n->kids.size(); ++i) s += (i ? ", " : "") + pt(n->kids[i], 0);
            return s + ")";
        }
        case Kind::IteTerm:
            return "ite(" + pf(n->kids[0], 0) + " : " + pt(n->kids[1], 0) + ", " + pt(n->kids[2], 0) + ")";
        case Kind::SpFormula:
            return "Sp(" + pf(n->kids[0], 0) + ")";
        case Kind::SpTerm:
            return "Sp(" + pt(n->kids[0], 0) + ")";
        default:
            return pf(n, 0);
    }
}

// formula levels: 0 top, 1 implies, 2 or, 3 and, 4 unary
std::string pf(const NodePtr& n, int ctx) {
    switch (n->kind) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Eq: return pt(n->kids[0], 0) + " = " + pt(n->kids[1], 0);
        case Kind::Rel: {
            const std::string& r = n->name();
            if (is_builtin_relation(r)) return pt(n->kids[0], 0) + " " + r + " " + pt(n->kids[1], 0);
            std::string s = r + "(";
            for (size_t i = 0; i < n->kids.size(); ++i) s += (i ? ", " : "") + pt(n->kids[i], 0);
            return s + ")";
        }
        case Kind::Not: {
            auto& k = n->kids[0];
            if (k->kind == Kind::Eq) return pt(k->kids[0], 0) + " != " + pt(k->kids[1], 0);
            if (k->kind == Kind::Rel && k->name() == "in") return pt(k->kids[0], 0) + " notin " + pt(k->kids[1], 0);
            std::string inner = pf(k, 4);
            bool atomic = k->kind == Kind::Rel || k->kind == Kind::True || k->kind == Kind::False ||
                          k->kind == Kind::Ite || k->kind == Kind::Not;
            return "!" + (atomic ? inner : wrap(inner[0] != '(', inner));
        }
        case Kind::And: return wrap(ctx > 3, pf(n->kids[0], 3) + " && " + pf(n->kids[1], 4));
        case Kind::Or: return wrap(ctx > 2, pf(n->kids[0], 2) + " || " + pf(n->kids[1], 3));
        case Kind::Implies: return wrap(ctx > 1, pf(n->kids[0], 2) + " => " + pf(n->kids[1], 1));
        case Kind::Ite:
            return "ite(" + pf(n->kids[0], 0) + " : " + pf(n->kids[1], 0) + ", " + pf(n->kids[2], 0) + ")";
        case Kind::Exists:
        case Kind::Forall: {
            std::string s = n->kind == Kind::Exists ? "exists " : "forall ";
            for (size_t i = 0; i < n->binders.size(); ++i) s += (i ? ", " : "") + binder_text(n->binders[i]);
            s += " : " + pf(n->kids[0], 0) + " . " + pf(n->kids[1], 0);
            return wrap(ctx > 0, s);
        }
        default:
            return pt(n, 0);
    }
}

std::string indent_str(int k) { return std::string(static_cast<size_t>(k) * 2, ' '); }

std::string print_stmt(const StmtPtr& s, int ind);

std::string print_block(const StmtPtr& s, int ind) {
    return "{\n" + print_stmt(s, ind + 1) + "\n" + indent_str(ind) + "}";
}

std::string print_stmt(const StmtPtr& s, int ind) {
    std::string p = indent_str(ind);
    switch (s->kind) {
        case StmtKind::Skip: return p + "skip";
        case StmtKind::AssignConst:
        case StmtKind::AssignVar:
        case StmtKind::AssignExpr: return p + s->x + " := " + pt(s->expr, 0);
        case StmtKind::Lookup: return p + s->x + " := " + s->y + "." + s->field;
        case StmtKind::Mutate: return p + s->x + "." + s->field + " := " + pt(s->expr, 0);
        case StmtKind::Alloc: return p + "alloc(" + s->x + ")";
        case StmtKind::Free: return p + "free(" + s->x + ")";
        case StmtKind::If:
            return p + "if " + pf(s->expr, 0) + " then " + print_block(s->body[0], ind) + " else " +
                   print_block(s->body[1], ind);
        case StmtKind::While: {
            std::string r = p + "while " + pf(s->expr, 0);
            if (s->invariant) r += " invariant: " + pf(s->invariant, 0);
            return r + " do " + print_block(s->body[0], ind);
        }
        case StmtKind::Seq: {
            std::string r;
            for (size_t i = 0; i < s->body.size(); ++i) {
                if (i) r += " ;\n";
                r += print_stmt(s->body[i], ind);
            }
            return r;
        }
    }
    return "";
}

std::string psl(const SLPtr& s, int ctx);

// SL levels: 0 top, 1 or, 2 and, 3 star operand
std::string psl(const SLPtr& s, int ctx) {
    switch (s->kind) {
        case SLKind::Stack: {
            auto& f = s->sf;
            bool simple = f->kind == Kind::Eq || f->kind == Kind::True || f->kind == Kind::False ||
                          (f->kind == Kind::Rel && is_builtin_relation(f->name())) ||
                          (f->kind == Kind::Not && f->kids[0]->kind == Kind::Eq) ||
                          (f->kind == Kind::Not && f->kids[0]->kind == Kind::Rel && f->kids[0]->name() == "in");
            return simple ? pf(f, 4) : "[" + pf(f, 0) + "]";
        }
        case SLKind::Emp: return "emp";
        case SLKind::PointsTo: return pt(s->x, 0) + " |-" + s->field + "-> " + pt(s->y, 0);
        case SLKind::Ite:
            return "ite(" + pf(s->sf, 0) + ", " + psl(s->kids[0], 0) + ", " + psl(s->kids[1], 0) + ")";
        case SLKind::And: return wrap(ctx > 2, psl(s->kids[0], 2) + " && " + psl(s->kids[1], 3));
        case SLKind::Or: return wrap(ctx > 1, psl(s->kids[0], 1) + " || " + psl(s->kids[1], 2));
        case SLKind::Star: return wrap(ctx > 3, psl(s->kids[0], 3) + " * " + psl(s->kids[1], 4));
        case SLKind::Pred: return s->name + "(" + pt(s->x, 0) + ")";
        case SLKind::ExistsPointsTo:
            return wrap(ctx > 0, "exists " + s->name + ". (" + pt(s->x, 0) + " |-" + s->field + "-> " + s->name +
                                     ") * " + psl(s->kids[0], 3));
        case SLKind::Not: return "!" + wrap(true, psl(s->kids[0], 0));
    }
    return "";
}

}  // namespace

std::string print(const NodePtr& n) { return n->is_term() ? pt(n, 0) : pf(n, 0); }

std::string print(const Definition& d) {
    std::string s = d.name + "(";
    for (size_t i = 0; i < d.params.size(); ++i) {
        s += (i ? ", " : "") + d.params[i].var.str();
        if (d.params[i].sort != Sort::Foreground) s += std::string(": ") + sort_name(d.params[i].sort);
    }
    return s + ") := " + pf(d.body, 0) + ";";
}

std::string print(const DefinitionSet& defs) {
    std::string s;
    for (auto& d : defs.all()) s += print(d) + "\n";
    return s;
}

std::string print(const StmtPtr& s, int indent) { return print_stmt(s, indent); }

std::string print(const Triple& t) {
    std::string s;
    if (!t.name.empty()) s += "triple " + t.name + "\n";
    s += "{ " + pf(t.pre, 0) + " }\n" + print_stmt(t.program, 0) + "\n{ " + pf(t.post, 0) + " }\n";
    return s;
}

std::string print(const SLPtr& s) { return psl(s, 0); }

std::string print(const SLDefinition& d) { return d.name + "(" + d.param + ") := " + psl(d.body, 0) + ";"; }

std::string print(const Signature& sig) {
    std::string s;
    auto sorts = [](const std::vector<Sort>& v) {
        std::string r;
        for (size_t i = 0; i < v.size(); ++i) r += (i ? ", " : "") + std::string(sort_name(v[i]));
        return r;
    };
    for (size_t i = 1; i < sig.constants().size(); ++i)
        s += "const " + sig.constants()[i].name + " : " + sort_name(sig.constants()[i].sort) + ";\n";
    for (auto& f : sig.functions())
        s += std::string(f.is_mutable ? "field " : "fun ") + f.name + " : " + sorts(f.args) + " -> " +
             sort_name(f.result) + ";\n";
    for (auto& r : sig.relations()) s += "rel " + r.name + " : " + sorts(r.args) + ";\n";
    for (auto& [n, so] : sig.variables()) s += "var " + n + " : " + sort_name(so) + ";\n";
    return s;
}

std::string print(const ParsedFile& f, FileMode mode) {
    std::string s = print(*f.sig);
    if (mode == FileMode::Separation) {
        for (auto& d : f.sl_defs.all()) s += print(d) + "\n";
        for (auto& g : f.sl_goals) s += "goal " + print(g) + ";\n";
        return s;
    }
    s += print(f.defs);
    for (auto& g : f.goals) s += "goal " + print(g) + ";\n";
    for (auto& t : f.triples) s += print(t);
    return s;
}

}  // namespace fl
