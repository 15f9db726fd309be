#include "asg/surface.hpp"

#include <unordered_map>

namespace asg {

namespace {

struct NotATerm {};

class Reader {
public:
    TermPtr level(const Graph& g, const std::vector<TermPtr>& input_terms) {
        State st{g, input_terms, {}, {}};
        TermPtr body = expr(st, g.root());
        for (auto it = st.defs.rbegin(); it != st.defs.rend(); ++it) {
            body = term::def(it->first, it->second, body);
        }
        return body;
    }

private:
    struct State {
        const Graph& g;
        const std::vector<TermPtr>& inputs;
        std::unordered_map<std::uint32_t, TermPtr> named;  // link -> variable term
        std::vector<std::pair<std::string, TermPtr>> defs;
    };

    std::string fresh() { return "v" + std::to_string(next_++); }

    // A link that must be referred to by name: it is shared, or it crosses
    // into a box.
    TermPtr name_for(State& st, LinkId l) {
        if (auto in = st.g.input_index(l)) return st.inputs.at(*in);
        if (auto it = st.named.find(idx(l)); it != st.named.end()) return it->second;
        if (std::holds_alternative<Sharing>(st.g.node(*st.g.definer(l)).label)) return expr(st, l);
        TermPtr m = expr_of_node(st, l);
        if (!shareable(*m)) throw NotATerm{};
        const std::string n = fresh();
        st.defs.emplace_back(n, m);
        TermPtr v = term::var(n);
        st.named.emplace(idx(l), v);
        return v;
    }

    TermPtr expr(State& st, LinkId l) {
        if (auto in = st.g.input_index(l)) return st.inputs.at(*in);
        if (auto it = st.named.find(idx(l)); it != st.named.end()) return it->second;
        const Node& n = st.g.node(*st.g.definer(l));
        if (std::holds_alternative<Sharing>(n.label)) {
            TermPtr v = name_for(st, n.operands[0]);
            st.named.emplace(idx(l), v);
            return v;
        }
        return expr_of_node(st, l);
    }

    TermPtr boxed(State& st, LinkId thunk_link, std::vector<std::string> params) {
        const Label* lab = st.g.label_of(thunk_link);
        if (lab == nullptr || !std::holds_alternative<Thunk>(*lab)) throw NotATerm{};
        const Thunk& th = std::get<Thunk>(*lab);
        if (th.bound != params.size()) throw NotATerm{};
        std::vector<TermPtr> ins;
        for (const auto& p : params) ins.push_back(term::var(p));
        for (LinkId o : st.g.node(*st.g.definer(thunk_link)).operands) {
            TermPtr t = name_for(st, o);
            if (t->kind != Term::Kind::Var && t->kind != Term::Kind::Input) throw NotATerm{};
            ins.push_back(t);
        }
        return level(*th.box, ins);
    }

    TermPtr label_var(State& st, LinkId l) {
        TermPtr t = expr(st, l);
        if (t->kind != Term::Kind::Var) throw NotATerm{};
        return t;
    }

    TermPtr expr_of_node(State& st, LinkId l) {
        const Graph& g = st.g;
        auto d = g.definer(l);
        if (!d) return expr(st, l);
        const Node& n = g.node(*d);
        if (n.state != NodeState::Live) throw NotATerm{};
        if (const auto* lit = std::get_if<Lit>(&n.label)) return term::integer(lit->value);
        if (std::holds_alternative<UnitVal>(n.label)) return term::unit();
        const Op* op = as_op(n.label);
        if (op == nullptr) throw NotATerm{};  // thunk, atom, anchor, label value, sharing
        const auto& o = n.operands;
        switch (op->kind) {
        case OpKind::Add: return term::binary(BinOp::Add, expr(st, o[0]), expr(st, o[1]));
        case OpKind::Sub: return term::binary(BinOp::Sub, expr(st, o[0]), expr(st, o[1]));
        case OpKind::Mul: return term::binary(BinOp::Mul, expr(st, o[0]), expr(st, o[1]));
        case OpKind::Eq: return term::binary(BinOp::Eq, expr(st, o[0]), expr(st, o[1]));
        case OpKind::Lt: return term::binary(BinOp::Lt, expr(st, o[0]), expr(st, o[1]));
        case OpKind::App: {
            TermPtr f = expr(st, o[0]);
            std::vector<TermPtr> args;
            for (std::size_t i = 1; i < o.size(); ++i) args.push_back(expr(st, o[i]));
            return term::call(f, std::move(args));
        }
        case OpKind::Lam: {
            std::vector<std::string> params;
            for (std::uint32_t i = 0; i < op->arity; ++i) params.push_back(fresh());
            TermPtr body = boxed(st, o[0], params);
            return term::fun(std::move(params), body);
        }
        case OpKind::If: {
            TermPtr c = expr(st, o[0]);
            TermPtr t = boxed(st, o[1], {});
            TermPtr e = boxed(st, o[2], {});
            return term::cond(c, t, e);
        }
        case OpKind::Ref: return term::ref(expr(st, o[0]));
        case OpKind::Deref: return term::deref(expr(st, o[0]));
        case OpKind::Assign: return term::assign(expr(st, o[0]), expr(st, o[1]));
        case OpKind::Seq: return term::seq(expr(st, o[0]), expr(st, o[1]));
        case OpKind::Loop: {
            const Label* al = g.label_of(o[0]);
            if (al == nullptr || !std::holds_alternative<Atom>(*al) || g.fan_in(o[0]) != 1) throw NotATerm{};
            const Label* init = g.label_of(g.node(*g.definer(o[0])).operands[0]);
            if (init == nullptr || !std::holds_alternative<UnitVal>(*init)) throw NotATerm{};
            const std::string label = fresh();
            TermPtr body = boxed(st, o[1], {label});
            return term::loop(label, body);
        }
        case OpKind::Break: {
            TermPtr lv = label_var(st, o[0]);
            return term::brk(lv->name, expr(st, o[1]));
        }
        case OpKind::Continue: return term::cont(label_var(st, o[0])->name);
        }
        throw NotATerm{};
    }

    int next_ = 0;
};

}  // namespace

std::optional<TermPtr> readback(const Graph& g) {
    std::vector<TermPtr> ins;
    for (std::uint32_t i = 0; i < g.inputs().size(); ++i) ins.push_back(term::input(i));
    try {
        Reader r;
        return r.level(g, ins);
    } catch (const NotATerm&) {
        return std::nullopt;
    }
}

}  // namespace asg
