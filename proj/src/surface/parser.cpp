#include "asg/surface.hpp"

#include <cctype>
#include <set>

namespace asg {

ParseError::ParseError(Pos p, const std::string& msg)
    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg), pos(p) {}

namespace {

enum class Tok : std::uint8_t {
    Int, Ident, Input, Hole,
    Def, Fun, Loop, Break, Continue, If, Then, Else, Ref,
    LParen, RParen, LBrace, RBrace, Comma, Arrow, Semi, Assign, Eq, EqEq, Lt,
    Plus, Minus, Star, Bang, End
};

struct Token {
    Tok kind;
    Pos pos;
    std::string text;
};

const char* tok_name(Tok t) {
    switch (t) {
    case Tok::Int: return "integer";
    case Tok::Ident: return "identifier";
    case Tok::Input: return "input marker";
    case Tok::Hole: return "hole";
    case Tok::Def: return "'def'";
    case Tok::Fun: return "'fun'";
    case Tok::Loop: return "'loop'";
    case Tok::Break: return "'break'";
    case Tok::Continue: return "'continue'";
    case Tok::If: return "'if'";
    case Tok::Then: return "'then'";
    case Tok::Else: return "'else'";
    case Tok::Ref: return "'ref'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Arrow: return "'->'";
    case Tok::Semi: return "';'";
    case Tok::Assign: return "':='";
    case Tok::Eq: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::Lt: return "'<'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Bang: return "'!'";
    case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    Pos pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++pos.col;
            }
        }
    };
    auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        const Pos start = pos;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Tok::Int, start, std::string(src.substr(i, j - i))});
            advance(j - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                      src[j] == '_' || src[j] == '\'')) {
                ++j;
            }
            std::string word(src.substr(i, j - i));
            static const std::pair<const char*, Tok> kw[] = {
                {"def", Tok::Def},     {"fun", Tok::Fun},   {"loop", Tok::Loop},
                {"break", Tok::Break}, {"continue", Tok::Continue},
                {"if", Tok::If},       {"then", Tok::Then}, {"else", Tok::Else},
                {"ref", Tok::Ref}};
            Tok kind = Tok::Ident;
            for (auto& [w, k] : kw) {
                if (word == w) kind = k;
            }
            out.push_back({kind, start, std::move(word)});
            advance(j - i);
            continue;
        }
        if (c == '$') {
            std::size_t j = i + 1;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j == i + 1) throw ParseError(start, "expected digits after '$'");
            out.push_back({Tok::Input, start, std::string(src.substr(i + 1, j - i - 1))});
            advance(j - i);
            continue;
        }
        if (starts("[·]") || starts("[.]")) {
            const std::size_t n = starts("[·]") ? std::string_view("[·]").size() : 3;
            out.push_back({Tok::Hole, start, "[·]"});
            advance(n);
            continue;
        }
        static const std::pair<const char*, Tok> punct[] = {
            {"->", Tok::Arrow}, {":=", Tok::Assign}, {"==", Tok::EqEq}, {"(", Tok::LParen},
            {")", Tok::RParen}, {"{", Tok::LBrace},  {"}", Tok::RBrace}, {",", Tok::Comma},
            {";", Tok::Semi},   {"=", Tok::Eq},      {"<", Tok::Lt},     {"+", Tok::Plus},
            {"-", Tok::Minus},  {"*", Tok::Star},    {"!", Tok::Bang}};
        bool matched = false;
        for (auto& [p, k] : punct) {
            if (starts(p)) {
                out.push_back({k, start, p});
                advance(std::string_view(p).size());
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, pos, ""});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {
        for (const auto& n : opts.prebound) scope_.push_back(n);
    }

    TermPtr program() {
        TermPtr t = expr(false);
        expect(Tok::End);
        if (opts_.allow_hole && holes_ != 1) {
            throw ParseError(toks_.front().pos, "a context needs exactly one hole");
        }
        return t;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    Token take() { return toks_[p_ < toks_.size() - 1 ? p_++ : p_]; }
    Token expect(Tok k) {
        if (!at(k)) {
            throw ParseError(peek().pos, std::string("expected ") + tok_name(k) + ", found " +
                                             tok_name(peek().kind));
        }
        return take();
    }

    static std::shared_ptr<Term> at_pos(TermPtr t, Pos p) {
        auto m = std::const_pointer_cast<Term>(t);
        m->pos = p;
        return m;
    }

    void require_bound(const Token& id) {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
            if (*it == id.text) return;
        }
        throw ParseError(id.pos, "unbound variable '" + id.text + "'");
    }

    // noseq: a ';' at this level belongs to an enclosing def.
    TermPtr expr(bool noseq) {
        const Pos p = peek().pos;
        switch (peek().kind) {
        case Tok::Def: {
            take();
            const Token id = expect(Tok::Ident);
            expect(Tok::Eq);
            TermPtr bound = expr(true);
            expect(Tok::Semi);
            scope_.push_back(id.text);
            TermPtr body = expr(noseq);
            scope_.pop_back();
            return at_pos(term::def(id.text, bound, body), p);
        }
        case Tok::Fun: {
            take();
            expect(Tok::LParen);
            std::vector<std::string> params;
            std::set<std::string> seen;
            if (!at(Tok::RParen)) {
                for (;;) {
                    const Token id = expect(Tok::Ident);
                    if (!seen.insert(id.text).second) {
                        throw ParseError(id.pos, "duplicate parameter '" + id.text + "'");
                    }
                    params.push_back(id.text);
                    if (!at(Tok::Comma)) break;
                    take();
                }
            }
            expect(Tok::RParen);
            expect(Tok::Arrow);
            for (const auto& n : params) scope_.push_back(n);
            TermPtr body = expr(noseq);
            scope_.resize(scope_.size() - params.size());
            return at_pos(term::fun(params, body), p);
        }
        case Tok::Loop: {
            take();
            const Token id = expect(Tok::Ident);
            expect(Tok::LBrace);
            scope_.push_back(id.text);
            TermPtr body = expr(false);
            scope_.pop_back();
            expect(Tok::RBrace);
            return at_pos(term::loop(id.text, body), p);
        }
        case Tok::Break: {
            take();
            const Token id = expect(Tok::Ident);
            require_bound(id);
            return at_pos(term::brk(id.text, expr(noseq)), p);
        }
        case Tok::Continue: {
            take();
            const Token id = expect(Tok::Ident);
            require_bound(id);
            return at_pos(term::cont(id.text), p);
        }
        case Tok::If: {
            take();
            TermPtr c = expr(false);
            expect(Tok::Then);
            TermPtr t = expr(false);
            expect(Tok::Else);
            TermPtr e = expr(noseq);
            return at_pos(term::cond(c, t, e), p);
        }
        default: break;
        }
        TermPtr a = assign();
        if (!noseq && at(Tok::Semi)) {
            take();
            return at_pos(term::seq(a, expr(false)), p);
        }
        return a;
    }

    TermPtr assign() {
        const Pos p = peek().pos;
        TermPtr a = cmp();
        if (at(Tok::Assign)) {
            take();
            return at_pos(term::assign(a, cmp()), p);
        }
        return a;
    }

    TermPtr cmp() {
        const Pos p = peek().pos;
        TermPtr a = add();
        if (at(Tok::EqEq) || at(Tok::Lt)) {
            const BinOp op = take().kind == Tok::EqEq ? BinOp::Eq : BinOp::Lt;
            return at_pos(term::binary(op, a, add()), p);
        }
        return a;
    }

    TermPtr add() {
        const Pos p = peek().pos;
        TermPtr a = mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const BinOp op = take().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
            a = at_pos(term::binary(op, a, mul()), p);
        }
        return a;
    }

    TermPtr mul() {
        const Pos p = peek().pos;
        TermPtr a = unary();
        while (at(Tok::Star)) {
            take();
            a = at_pos(term::binary(BinOp::Mul, a, unary()), p);
        }
        return a;
    }

    TermPtr unary() {
        const Pos p = peek().pos;
        if (at(Tok::Ref)) {
            take();
            return at_pos(term::ref(unary()), p);
        }
        if (at(Tok::Bang)) {
            take();
            return at_pos(term::deref(unary()), p);
        }
        return call();
    }

    TermPtr call() {
        const Pos p = peek().pos;
        TermPtr f = atom();
        while (at(Tok::LParen)) {
            take();
            std::vector<TermPtr> args;
            if (!at(Tok::RParen)) {
                for (;;) {
                    args.push_back(expr(false));
                    if (!at(Tok::Comma)) break;
                    take();
                }
            }
            expect(Tok::RParen);
            f = at_pos(term::call(f, std::move(args)), p);
        }
        return f;
    }

    TermPtr atom() {
        const Token t = peek();
        switch (t.kind) {
        case Tok::Int:
            take();
            return at_pos(term::integer(BigInt(t.text)), t.pos);
        case Tok::Ident:
            take();
            require_bound(t);
            return at_pos(term::var(t.text), t.pos);
        case Tok::Input:
            take();
            if (!opts_.allow_inputs) throw ParseError(t.pos, "input markers are only allowed in templates");
            return at_pos(term::input(static_cast<std::uint32_t>(std::stoul(t.text))), t.pos);
        case Tok::Hole:
            take();
            if (!opts_.allow_hole) throw ParseError(t.pos, "holes are only allowed in contexts");
            ++holes_;
            return at_pos(term::hole(), t.pos);
        case Tok::LParen: {
            take();
            if (at(Tok::RParen)) {
                take();
                return at_pos(term::unit(), t.pos);
            }
            TermPtr e = expr(false);
            expect(Tok::RParen);
            return e;
        }
        default:
            throw ParseError(t.pos, std::string("expected an expression, found ") + tok_name(t.kind));
        }
    }

    std::vector<Token> toks_;
    std::size_t p_ = 0;
    const ParseOptions& opts_;
    std::vector<std::string> scope_;
    int holes_ = 0;
};

}  // namespace

TermPtr parse(std::string_view text, const ParseOptions& opts) {
    Parser p(lex(text), opts);
    return p.program();
}

}  // namespace asg
