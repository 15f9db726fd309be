#include "asg/rules.hpp"

#include <algorithm>

namespace asg {

namespace {

const Label* operand_label(const Graph& g, NodeId n, std::uint32_t slot) {
    return g.label_of(g.node(n).operands.at(slot));
}

template <class T>
bool operand_is(const Graph& g, NodeId n, std::uint32_t slot) {
    const Label* l = operand_label(g, n, slot);
    return l != nullptr && std::holds_alternative<T>(*l);
}

Use consumer(const Graph& g, NodeId n) {
    const auto& uses = g.link(g.out_of(n)).uses;
    if (uses.size() != 1) throw GraphError("rewrite at a node without a unique consumer");
    return uses.front();
}

// Marks consumed nodes as deleted once their operands were released.
void consume(Graph& g, NodeId n) {
    if (g.alive(n)) g.erase_node(n);
}

void normalize_link_if_live(Graph& g, LinkId l) {
    if (auto d = g.definer(l); d && g.node(*d).state != NodeState::Live) return;
    g.normalize_link(l);
}

void normalize_all_of(Graph& g, const std::vector<LinkId>& ls) {
    for (LinkId l : ls) normalize_link_if_live(g, l);
}

std::optional<std::size_t> find_anchor(const MachineState& s, LabelId label) {
    for (std::size_t j = s.frames.size(); j-- > 0;) {
        const Label& l = s.graph.node(s.frames[j].node).label;
        if (const auto* a = std::get_if<Anchor>(&l); a && a->label == label) return j;
    }
    return std::nullopt;
}

const LabelVal* label_operand(const Graph& g, NodeId n) {
    const Label* l = operand_label(g, n, 0);
    return l ? std::get_if<LabelVal>(l) : nullptr;
}

// -- arith ------------------------------------------------------------------

bool arith_ok(const MachineState& s, NodeId n) {
    const Op* op = as_op(s.graph.node(n).label);
    return op && is_arith(op->kind) && operand_is<Lit>(s.graph, n, 0) && operand_is<Lit>(s.graph, n, 1);
}

RuleResult arith_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const Op op = *as_op(g.node(n).label);
    const NodeId a = *g.definer(g.node(n).operands[0]);
    const NodeId b = *g.definer(g.node(n).operands[1]);
    const BigInt& x = std::get<Lit>(g.node(a).label).value;
    const BigInt& y = std::get<Lit>(g.node(b).label).value;
    BigInt r;
    switch (op.kind) {
    case OpKind::Add: r = x + y; break;
    case OpKind::Sub: r = x - y; break;
    case OpKind::Mul: r = x * y; break;
    case OpKind::Eq: r = x == y ? 1 : 0; break;
    case OpKind::Lt: r = x < y ? 1 : 0; break;
    default: break;
    }
    const Use u = consumer(g, n);
    const NodeId lit = g.add_node(Lit{std::move(r)});
    g.redirect(u, g.out_of(lit));
    g.erase_node(n);
    consume(g, a);
    consume(g, b);
    return {g.out_of(lit), Dir::Up};
}

// -- beta -------------------------------------------------------------------

bool beta_ok(const MachineState& s, NodeId n) {
    const Op* op = as_op(s.graph.node(n).label);
    if (!op || op->kind != OpKind::App) return false;
    const Label* f = operand_label(s.graph, n, 0);
    const Op* lam = f ? as_op(*f) : nullptr;
    return lam && lam->kind == OpKind::Lam && lam->arity == op->arity;
}

RuleResult beta_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const std::vector<LinkId> ops = g.node(n).operands;
    const NodeId lam = *g.definer(ops[0]);
    const NodeId th = *g.definer(g.node(lam).operands[0]);
    const Thunk thunk = std::get<Thunk>(g.node(th).label);
    std::vector<LinkId> bindings(ops.begin() + 1, ops.end());
    for (LinkId o : g.node(th).operands) bindings.push_back(o);

    const Use u = consumer(g, n);
    const LinkId root = g.graft(*thunk.box, bindings);
    g.redirect(u, root);
    g.erase_node(n);
    consume(g, lam);
    consume(g, th);
    normalize_all_of(g, bindings);
    return {g.operand(u), Dir::Up};
}

// -- if ---------------------------------------------------------------------

bool if_ok(const MachineState& s, NodeId n) {
    return is_op(s.graph.node(n).label, OpKind::If) && operand_is<Lit>(s.graph, n, 0);
}

RuleResult if_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const std::vector<LinkId> ops = g.node(n).operands;
    const NodeId c = *g.definer(ops[0]);
    const bool yes = std::get<Lit>(g.node(c).label).value != 0;
    const NodeId th = *g.definer(ops[yes ? 1 : 2]);
    const Thunk thunk = std::get<Thunk>(g.node(th).label);
    const std::vector<LinkId> bindings = g.node(th).operands;

    const Use u = consumer(g, n);
    const LinkId root = g.graft(*thunk.box, bindings);
    g.redirect(u, root);
    g.erase_node(n);
    consume(g, c);
    consume(g, th);
    normalize_all_of(g, bindings);
    return {g.operand(u), Dir::Up};
}

// -- store ------------------------------------------------------------------

bool ref_ok(const MachineState& s, NodeId n) {
    if (!is_op(s.graph.node(n).label, OpKind::Ref)) return false;
    const Label* v = operand_label(s.graph, n, 0);
    return v && is_value(*v);
}

RuleResult ref_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const LinkId v = g.node(n).operands[0];
    const Use u = consumer(g, n);
    const NodeId atom = g.add_node(Atom{}, {v});
    g.redirect(u, g.out_of(atom));
    g.erase_node(n);
    g.normalize_link(v);
    return {g.out_of(atom), Dir::Up};
}

bool deref_ok(const MachineState& s, NodeId n) {
    return is_op(s.graph.node(n).label, OpKind::Deref) && operand_is<Atom>(s.graph, n, 0);
}

RuleResult deref_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const NodeId atom = *g.definer(g.node(n).operands[0]);
    const LinkId target = g.node(atom).operands[0];
    const Use u = consumer(g, n);
    g.redirect(u, target);
    g.erase_node(n);
    normalize_link_if_live(g, target);
    return {g.operand(u), Dir::Up};
}

bool assign_ok(const MachineState& s, NodeId n) {
    if (!is_op(s.graph.node(n).label, OpKind::Assign) || !operand_is<Atom>(s.graph, n, 0)) return false;
    const Label* v = operand_label(s.graph, n, 1);
    return v && is_value(*v);
}

RuleResult assign_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const LinkId a = g.node(n).operands[0];
    const LinkId v = g.node(n).operands[1];
    const NodeId atom = *g.definer(a);
    const LinkId old = g.node(atom).operands[0];
    const Use u = consumer(g, n);
    const NodeId unit = g.add_node(UnitVal{});
    g.redirect(u, g.out_of(unit));
    g.redirect(Use{atom, 0}, v);
    g.erase_node(n);
    normalize_link_if_live(g, v);
    normalize_link_if_live(g, old);
    return {g.out_of(unit), Dir::Up};
}

// -- sequencing -------------------------------------------------------------

bool seq_ok(const MachineState& s, NodeId n) {
    if (!is_op(s.graph.node(n).label, OpKind::Seq)) return false;
    const Label* v = operand_label(s.graph, n, 0);
    return v && is_value(*v);
}

RuleResult seq_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const LinkId second = g.node(n).operands[1];
    const Use u = consumer(g, n);
    g.redirect(u, second);
    g.erase_node(n);
    normalize_link_if_live(g, second);
    return {g.operand(u), Dir::Up};
}

// -- control ----------------------------------------------------------------

bool loop_ok(const MachineState& s, NodeId n) {
    const Graph& g = s.graph;
    if (!is_op(g.node(n).label, OpKind::Loop) || !operand_is<Atom>(g, n, 0)) return false;
    const Label* t = operand_label(g, n, 1);
    return t && std::holds_alternative<Thunk>(*t) && std::get<Thunk>(*t).bound == 1;
}

RuleResult loop_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const LinkId a = g.node(n).operands[0];
    const LinkId t = g.node(n).operands[1];
    const NodeId atom = *g.definer(a);
    const NodeId th = *g.definer(t);
    const Thunk thunk = std::get<Thunk>(g.node(th).label);

    const LabelId id{s.next_label++};
    const LinkId lv = g.out_of(g.add_node(LabelVal{id}));
    const LinkId old = g.node(atom).operands[0];
    g.redirect(Use{atom, 0}, lv);

    std::vector<LinkId> bindings{lv};
    for (LinkId o : g.node(th).operands) bindings.push_back(o);
    const LinkId body = g.graft(*thunk.box, bindings);

    const Use u = consumer(g, n);
    const NodeId anchor = g.add_node(Anchor{id}, {body, a, t});
    g.redirect(u, g.out_of(anchor));
    g.erase_node(n);
    normalize_link_if_live(g, old);
    normalize_all_of(g, bindings);
    s.frames.push_back(Frame{anchor, 0});
    return {g.node(anchor).operands[0], Dir::Up};
}

bool repeat_ok(const MachineState& s, NodeId n) {
    const Graph& g = s.graph;
    if (!std::holds_alternative<Anchor>(g.node(n).label)) return false;
    const Label* body = operand_label(g, n, 0);
    return body && is_value(*body);
}

// Replaces anchor `a` by a fresh loop node over its atom and thunk.
LinkId restart_loop(Graph& g, NodeId a) {
    const LinkId atom = g.node(a).operands[1];
    const LinkId thunk = g.node(a).operands[2];
    const Use u = consumer(g, a);
    const NodeId loop = g.add_node(Op{OpKind::Loop}, {atom, thunk});
    g.redirect(u, g.out_of(loop));
    g.erase_node(a);
    return g.out_of(loop);
}

RuleResult repeat_apply(MachineState& s, NodeId n) {
    return {restart_loop(s.graph, n), Dir::Up};
}

bool break_ok(const MachineState& s, NodeId n) {
    if (!is_op(s.graph.node(n).label, OpKind::Break)) return false;
    const LabelVal* l = label_operand(s.graph, n);
    const Label* v = operand_label(s.graph, n, 1);
    return l && v && is_value(*v) && find_anchor(s, l->id).has_value();
}

RuleResult break_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const std::size_t j = *find_anchor(s, label_operand(g, n)->id);
    const NodeId anchor = s.frames[j].node;
    const LinkId v = g.node(n).operands[1];
    const Use u = consumer(g, anchor);
    g.redirect(u, v);
    g.erase_node(anchor);  // releases the abandoned body, which holds this break node
    consume(g, n);
    normalize_link_if_live(g, v);
    s.frames.resize(j);
    return {g.operand(u), Dir::Down};
}

bool continue_ok(const MachineState& s, NodeId n) {
    if (!is_op(s.graph.node(n).label, OpKind::Continue)) return false;
    const LabelVal* l = label_operand(s.graph, n);
    return l && find_anchor(s, l->id).has_value();
}

RuleResult continue_apply(MachineState& s, NodeId n) {
    Graph& g = s.graph;
    const std::size_t j = *find_anchor(s, label_operand(g, n)->id);
    const LinkId loop = restart_loop(g, s.frames[j].node);
    consume(g, n);
    s.frames.resize(j);
    return {loop, Dir::Up};
}

}  // namespace

const std::vector<Rule>& rule_table() {
    static const std::vector<Rule> table{
        {"arith", arith_ok, arith_apply},
        {"beta", beta_ok, beta_apply},
        {"if", if_ok, if_apply},
        {"ref", ref_ok, ref_apply},
        {"deref", deref_ok, deref_apply},
        {"assign", assign_ok, assign_apply},
        {"seq", seq_ok, seq_apply},
        {"loop_enter", loop_ok, loop_apply},
        {"repeat", repeat_ok, repeat_apply},
        {"break", break_ok, break_apply},
        {"continue", continue_ok, continue_apply},
    };
    return table;
}

std::vector<const Rule*> applicable_rules(const MachineState& s, NodeId n) {
    std::vector<const Rule*> out;
    for (const Rule& r : rule_table()) {
        if (r.applicable(s, n)) out.push_back(&r);
    }
    return out;
}

std::string counter_key(const Rule& r, const MachineState& s, NodeId n) {
    if (r.name == "beta") {
        const std::uint32_t k = as_op(s.graph.node(n).label)->arity;
        if (k != 1) return "beta" + std::to_string(k);
    }
    return std::string(r.name);
}

std::string diagnose(const MachineState& s, NodeId n) {
    const Graph& g = s.graph;
    const Label& l = g.node(n).label;
    const Op* op = as_op(l);
    if (op == nullptr) return "no-rule";
    switch (op->kind) {
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Eq:
    case OpKind::Lt: return "arith-on-non-literal";
    case OpKind::App: {
        const Label* f = operand_label(g, n, 0);
        if (f && is_op(*f, OpKind::Lam)) return "arity-mismatch";
        return "applying-non-function";
    }
    case OpKind::If: return "if-on-non-literal";
    case OpKind::Deref: return "deref-non-atom";
    case OpKind::Assign: return "assign-to-non-atom";
    case OpKind::Loop: return "malformed-loop";
    case OpKind::Break:
    case OpKind::Continue:
        if (!label_operand(g, n)) return "control-on-non-label";
        return "dangling-label";
    default: return "no-rule";
    }
}

void copy_step(MachineState& s) {
    Graph& g = s.graph;
    const Use entry = entry_use(s);
    const LinkId shared = g.operand(entry);
    const NodeId sharing = *g.definer(shared);
    const LinkId target = g.node(sharing).operands[0];
    const NodeId copy = g.deep_copy_node(*g.definer(target));
    g.redirect(entry, g.out_of(copy));
    g.normalize_link(shared);
    s.focus = g.out_of(copy);
}

}  // namespace asg
