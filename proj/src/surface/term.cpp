#include "asg/surface.hpp"

#include <sstream>

namespace asg {

std::string_view binop_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "==";
    case BinOp::Lt: return "<";
    }
    return "?";
}

OpKind binop_kind(BinOp op) {
    switch (op) {
    case BinOp::Add: return OpKind::Add;
    case BinOp::Sub: return OpKind::Sub;
    case BinOp::Mul: return OpKind::Mul;
    case BinOp::Eq: return OpKind::Eq;
    case BinOp::Lt: return OpKind::Lt;
    }
    return OpKind::Add;
}

namespace term {
namespace {
std::shared_ptr<Term> make(Term::Kind k) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    return t;
}
}  // namespace

TermPtr integer(BigInt v) {
    auto t = make(Term::Kind::Int);
    t->value = std::move(v);
    return t;
}
TermPtr unit() { return make(Term::Kind::Unit); }
TermPtr var(std::string name) {
    auto t = make(Term::Kind::Var);
    t->name = std::move(name);
    return t;
}
TermPtr input(std::uint32_t k) {
    auto t = make(Term::Kind::Input);
    t->index = k;
    return t;
}
TermPtr hole() { return make(Term::Kind::Hole); }
TermPtr def(std::string name, TermPtr bound, TermPtr body) {
    auto t = make(Term::Kind::Def);
    t->name = std::move(name);
    t->kids = {std::move(bound), std::move(body)};
    return t;
}
TermPtr fun(std::vector<std::string> params, TermPtr body) {
    auto t = make(Term::Kind::Fun);
    t->params = std::move(params);
    t->kids = {std::move(body)};
    return t;
}
TermPtr loop(std::string label, TermPtr body) {
    auto t = make(Term::Kind::Loop);
    t->name = std::move(label);
    t->kids = {std::move(body)};
    return t;
}
TermPtr brk(std::string label, TermPtr value) {
    auto t = make(Term::Kind::Break);
    t->name = std::move(label);
    t->kids = {std::move(value)};
    return t;
}
TermPtr cont(std::string label) {
    auto t = make(Term::Kind::Continue);
    t->name = std::move(label);
    return t;
}
TermPtr cond(TermPtr c, TermPtr th, TermPtr el) {
    auto t = make(Term::Kind::If);
    t->kids = {std::move(c), std::move(th), std::move(el)};
    return t;
}
TermPtr seq(TermPtr a, TermPtr b) {
    auto t = make(Term::Kind::Seq);
    t->kids = {std::move(a), std::move(b)};
    return t;
}
TermPtr assign(TermPtr a, TermPtr b) {
    auto t = make(Term::Kind::Assign);
    t->kids = {std::move(a), std::move(b)};
    return t;
}
TermPtr binary(BinOp op, TermPtr a, TermPtr b) {
    auto t = make(Term::Kind::Binary);
    t->op = op;
    t->kids = {std::move(a), std::move(b)};
    return t;
}
TermPtr ref(TermPtr a) {
    auto t = make(Term::Kind::Ref);
    t->kids = {std::move(a)};
    return t;
}
TermPtr deref(TermPtr a) {
    auto t = make(Term::Kind::Deref);
    t->kids = {std::move(a)};
    return t;
}
TermPtr call(TermPtr f, std::vector<TermPtr> args) {
    auto t = make(Term::Kind::Call);
    t->kids.push_back(std::move(f));
    for (auto& a : args) t->kids.push_back(std::move(a));
    return t;
}
}  // namespace term

bool same_term(const Term& a, const Term& b) {
    if (a.kind != b.kind || a.value != b.value || a.index != b.index || a.name != b.name ||
        a.params != b.params || a.kids.size() != b.kids.size()) {
        return false;
    }
    if (a.kind == Term::Kind::Binary && a.op != b.op) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i) {
        if (!same_term(*a.kids[i], *b.kids[i])) return false;
    }
    return true;
}

bool shareable(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Int:
    case Term::Kind::Unit:
    case Term::Kind::Var:
    case Term::Kind::Input:
    case Term::Kind::Fun: return true;
    case Term::Kind::Binary: return shareable(*t.kids[0]) && shareable(*t.kids[1]);
    default: return false;
    }
}

bool contains_hole(const Term& t) {
    if (t.kind == Term::Kind::Hole) return true;
    for (const auto& k : t.kids) {
        if (contains_hole(*k)) return true;
    }
    return false;
}

std::size_t max_input_index(const Term& t) {
    std::size_t m = t.kind == Term::Kind::Input ? t.index + 1 : 0;
    for (const auto& k : t.kids) m = std::max(m, max_input_index(*k));
    return m;
}

// ---------------------------------------------------------------------------
// Printing. Levels follow the grammar: 0 expr, 1 assign, 2 cmp, 3 add,
// 4 mul, 5 unary, 6 call, 7 atom.

namespace {

int level_of(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Int: return t.value < 0 ? 3 : 7;
    case Term::Kind::Unit:
    case Term::Kind::Var:
    case Term::Kind::Input:
    case Term::Kind::Hole: return 7;
    case Term::Kind::Call: return 6;
    case Term::Kind::Ref:
    case Term::Kind::Deref: return 5;
    case Term::Kind::Binary:
        switch (t.op) {
        case BinOp::Mul: return 4;
        case BinOp::Add:
        case BinOp::Sub: return 3;
        default: return 2;
        }
    case Term::Kind::Assign: return 1;
    default: return 0;
    }
}

class Printer {
public:
    std::string run(const Term& t) {
        emit(t, 0, false);
        return os_.str();
    }

private:
    // `noseq`: a trailing ';' would be taken by an enclosing def.
    void emit(const Term& t, int need, bool noseq) {
        const bool wrap = level_of(t) < need || (noseq && t.kind == Term::Kind::Seq);
        if (wrap) {
            os_ << "(";
            body(t, false);
            os_ << ")";
        } else {
            body(t, noseq);
        }
    }

    void body(const Term& t, bool noseq) {
        using K = Term::Kind;
        switch (t.kind) {
        case K::Int:
            if (t.value < 0) {
                os_ << "0 - " << BigInt(-t.value).str();
            } else {
                os_ << t.value.str();
            }
            break;
        case K::Unit: os_ << "()"; break;
        case K::Var: os_ << t.name; break;
        case K::Input: os_ << "$" << t.index; break;
        case K::Hole: os_ << "[·]"; break;
        case K::Def:
            os_ << "def " << t.name << " = ";
            emit(*t.kids[0], 0, true);
            os_ << "; ";
            emit(*t.kids[1], 0, noseq);
            break;
        case K::Fun:
            os_ << "fun(";
            for (std::size_t i = 0; i < t.params.size(); ++i) os_ << (i ? ", " : "") << t.params[i];
            os_ << ") -> ";
            emit(*t.kids[0], 0, noseq);
            break;
        case K::Loop:
            os_ << "loop " << t.name << " { ";
            emit(*t.kids[0], 0, false);
            os_ << " }";
            break;
        case K::Break:
            os_ << "break " << t.name << " ";
            emit(*t.kids[0], 0, noseq);
            break;
        case K::Continue: os_ << "continue " << t.name; break;
        case K::If:
            os_ << "if ";
            emit(*t.kids[0], 0, false);
            os_ << " then ";
            emit(*t.kids[1], 0, false);
            os_ << " else ";
            emit(*t.kids[2], 0, noseq);
            break;
        case K::Seq:
            emit(*t.kids[0], 1, false);
            os_ << "; ";
            emit(*t.kids[1], 0, noseq);
            break;
        case K::Assign:
            emit(*t.kids[0], 2, false);
            os_ << " := ";
            emit(*t.kids[1], 2, false);
            break;
        case K::Binary: {
            const int lv = level_of(t);
            const bool chain = lv >= 3;  // + - * associate to the left
            emit(*t.kids[0], chain ? lv : lv + 1, false);
            os_ << " " << binop_text(t.op) << " ";
            emit(*t.kids[1], lv + 1, false);
            break;
        }
        case K::Ref:
            os_ << "ref ";
            emit(*t.kids[0], 5, false);
            break;
        case K::Deref:
            os_ << "!";
            emit(*t.kids[0], 5, false);
            break;
        case K::Call:
            emit(*t.kids[0], 6, false);
            os_ << "(";
            for (std::size_t i = 1; i < t.kids.size(); ++i) {
                if (i > 1) os_ << ", ";
                emit(*t.kids[i], 0, false);
            }
            os_ << ")";
            break;
        }
    }

    std::ostringstream os_;
};

}  // namespace

std::string print(const Term& t) { return Printer{}.run(t); }

}  // namespace asg
