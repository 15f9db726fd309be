#include "asg/hypergraph.hpp"

#include <algorithm>
#include <unordered_map>

namespace asg {

std::string_view op_name(OpKind k) {
    switch (k) {
    case OpKind::Add: return "+";
    case OpKind::Sub: return "-";
    case OpKind::Mul: return "*";
    case OpKind::Eq: return "==";
    case OpKind::Lt: return "<";
    case OpKind::App: return "@";
    case OpKind::Lam: return "lambda";
    case OpKind::If: return "if";
    case OpKind::Ref: return "ref";
    case OpKind::Deref: return "!";
    case OpKind::Assign: return ":=";
    case OpKind::Seq: return ";";
    case OpKind::Loop: return "loop";
    case OpKind::Break: return "break";
    case OpKind::Continue: return "continue";
    }
    return "?";
}

bool is_arith(OpKind k) {
    return k == OpKind::Add || k == OpKind::Sub || k == OpKind::Mul || k == OpKind::Eq ||
           k == OpKind::Lt;
}

const Op* as_op(const Label& l) { return std::get_if<Op>(&l); }

bool is_op(const Label& l, OpKind k) {
    const Op* op = as_op(l);
    return op != nullptr && op->kind == k;
}

bool is_value(const Label& l) {
    if (const Op* op = as_op(l)) return op->kind == OpKind::Lam;
    return std::holds_alternative<Lit>(l) || std::holds_alternative<UnitVal>(l) ||
           std::holds_alternative<LabelVal>(l) || std::holds_alternative<Atom>(l) ||
           std::holds_alternative<Thunk>(l);
}

std::string describe(const Label& l) {
    struct V {
        std::string operator()(const Lit& x) const { return x.value.str(); }
        std::string operator()(const UnitVal&) const { return "()"; }
        std::string operator()(const LabelVal& x) const {
            return "label" + std::to_string(idx(x.id));
        }
        std::string operator()(const Op& x) const {
            std::string s{op_name(x.kind)};
            if (x.kind == OpKind::App || x.kind == OpKind::Lam) s += std::to_string(x.arity);
            return s;
        }
        std::string operator()(const Thunk& x) const {
            return "thunk" + std::to_string(x.bound);
        }
        std::string operator()(const Sharing&) const { return "share"; }
        std::string operator()(const Atom&) const { return "atom"; }
        std::string operator()(const Anchor& x) const {
            return "anchor" + std::to_string(idx(x.label));
        }
    };
    return std::visit(V{}, l);
}

std::size_t expected_arity(const Label& l) {
    struct V {
        std::size_t operator()(const Lit&) const { return 0; }
        std::size_t operator()(const UnitVal&) const { return 0; }
        std::size_t operator()(const LabelVal&) const { return 0; }
        std::size_t operator()(const Op& x) const {
            switch (x.kind) {
            case OpKind::App: return x.arity + 1;
            case OpKind::Lam:
            case OpKind::Ref:
            case OpKind::Deref:
            case OpKind::Continue: return 1;
            case OpKind::If: return 3;
            default: return 2;
            }
        }
        std::size_t operator()(const Thunk& x) const {
            const std::size_t in = x.box ? x.box->inputs().size() : 0;
            return in >= x.bound ? in - x.bound : 0;
        }
        std::size_t operator()(const Sharing&) const { return 1; }
        std::size_t operator()(const Atom&) const { return 1; }
        std::size_t operator()(const Anchor&) const { return 3; }
    };
    return std::visit(V{}, l);
}

// ---------------------------------------------------------------------------

LinkId Graph::add_input() {
    const LinkId l{static_cast<std::uint32_t>(links_.size())};
    links_.push_back(Link{{Definer::Kind::Input, static_cast<std::uint32_t>(inputs_.size())}, {}});
    inputs_.push_back(l);
    return l;
}

NodeId Graph::add_node(Label label, std::vector<LinkId> operands) {
    for (LinkId o : operands) {
        if (idx(o) >= links_.size()) throw GraphError("operand refers to an unknown link");
    }
    const NodeId n{static_cast<std::uint32_t>(nodes_.size())};
    const LinkId out{static_cast<std::uint32_t>(links_.size())};
    links_.push_back(Link{{Definer::Kind::Node, idx(n)}, {}});
    nodes_.push_back(Node{std::move(label), out, std::move(operands), NodeState::Live});
    const auto& ops = nodes_.back().operands;
    for (std::uint32_t i = 0; i < ops.size(); ++i) add_use(ops[i], Use{n, i});
    return n;
}

void Graph::wire(NodeId n, std::vector<LinkId> operands) {
    if (!node(n).operands.empty()) throw GraphError("wire: node already has operands");
    for (LinkId o : operands) {
        if (idx(o) >= links_.size()) throw GraphError("operand refers to an unknown link");
    }
    mut(n).operands = std::move(operands);
    const auto& ops = node(n).operands;
    for (std::uint32_t i = 0; i < ops.size(); ++i) add_use(ops[i], Use{n, i});
}

void Graph::set_root(LinkId l) {
    if (root_ != kNoLink) remove_use(root_, kRootUse);
    root_ = l;
    add_use(l, kRootUse);
}

std::optional<NodeId> Graph::definer(LinkId l) const {
    const Definer& d = link(l).definer;
    if (d.kind != Definer::Kind::Node) return std::nullopt;
    return NodeId{d.index};
}

std::optional<std::uint32_t> Graph::input_index(LinkId l) const {
    const Definer& d = link(l).definer;
    if (d.kind != Definer::Kind::Input) return std::nullopt;
    return d.index;
}

const Label* Graph::label_of(LinkId l) const {
    auto d = definer(l);
    return d ? &node(*d).label : nullptr;
}

LinkId Graph::operand(Use u) const {
    return u.node == kNoNode ? root_ : node(u.node).operands.at(u.slot);
}

std::size_t Graph::count(NodeState s) const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [s](const Node& n) { return n.state == s; }));
}

std::vector<NodeId> Graph::nodes_in(NodeState s) const {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].state == s) out.push_back(NodeId{i});
    }
    return out;
}

std::uint32_t Graph::next_label_id() const {
    std::uint32_t next = 0;
    for (const Node& n : nodes_) {
        if (n.state == NodeState::Deleted) continue;
        if (auto* lv = std::get_if<LabelVal>(&n.label)) next = std::max(next, idx(lv->id) + 1);
        if (auto* an = std::get_if<Anchor>(&n.label)) next = std::max(next, idx(an->label) + 1);
    }
    return next;
}

void Graph::add_use(LinkId l, Use u) { links_.at(idx(l)).uses.push_back(u); }

void Graph::remove_use(LinkId l, Use u) {
    auto& uses = links_.at(idx(l)).uses;
    auto it = std::find(uses.begin(), uses.end(), u);
    if (it == uses.end()) throw GraphError("internal: use not registered");
    uses.erase(it);
}

void Graph::redirect(Use u, LinkId to) {
    const LinkId from = operand(u);
    remove_use(from, u);
    if (u.node == kNoNode) {
        root_ = to;
    } else {
        mut(u.node).operands.at(u.slot) = to;
    }
    add_use(to, u);
}

void Graph::replace_uses(LinkId from, LinkId to) {
    if (from == to) return;
    const std::vector<Use> uses = link(from).uses;
    for (const Use& u : uses) redirect(u, to);
}

void Graph::drop_use(LinkId l, Use u) {
    remove_use(l, u);
    settle(l);
}

void Graph::settle(LinkId start) {
    std::vector<LinkId> work{start};
    while (!work.empty()) {
        const LinkId l = work.back();
        work.pop_back();
        auto d = definer(l);
        if (!d) continue;
        Node& n = mut(*d);
        if (n.state != NodeState::Live) continue;
        const std::size_t fan = link(l).uses.size();
        if (std::holds_alternative<Sharing>(n.label)) {
            const LinkId target = n.operands.at(0);
            if (fan == 0) {
                n.state = NodeState::Garbage;
                remove_use(target, Use{*d, 0});
                work.push_back(target);
            } else if (fan == 1) {
                const Use only = link(l).uses.front();
                redirect(only, target);
                remove_use(target, Use{*d, 0});
                mut(*d).state = NodeState::Deleted;
            }
            continue;
        }
        if (fan != 0) continue;
        n.state = NodeState::Garbage;
        const std::vector<LinkId> ops = n.operands;
        for (std::uint32_t i = 0; i < ops.size(); ++i) {
            remove_use(ops[i], Use{*d, i});
            work.push_back(ops[i]);
        }
    }
}

void Graph::erase_node(NodeId id) {
    Node& n = mut(id);
    const bool registered = n.state == NodeState::Live;
    n.state = NodeState::Deleted;
    if (!registered) return;
    const std::vector<LinkId> ops = n.operands;
    for (std::uint32_t i = 0; i < ops.size(); ++i) remove_use(ops[i], Use{id, i});
    for (LinkId o : ops) settle(o);
}

void Graph::normalize_link(LinkId l) {
    // Collapse sharing nodes that consume l directly.
    for (bool again = true; again;) {
        again = false;
        for (const Use& u : link(l).uses) {
            if (u.node == kNoNode) continue;
            const Node& c = node(u.node);
            if (c.state != NodeState::Live || !std::holds_alternative<Sharing>(c.label)) continue;
            const NodeId cid = u.node;
            const LinkId cout = c.out;
            replace_uses(cout, l);
            remove_use(l, Use{cid, 0});
            mut(cid).state = NodeState::Deleted;
            again = true;
            break;
        }
    }
    const Label* lab = label_of(l);
    if (lab != nullptr) {
        if (node(*definer(l)).state != NodeState::Live) return;
        if (std::holds_alternative<Sharing>(*lab) || std::holds_alternative<Atom>(*lab)) {
            settle(l);
            return;
        }
    }
    const std::size_t fan = link(l).uses.size();
    if (fan == 0) {
        settle(l);
    } else if (fan >= 2) {
        const std::vector<Use> uses = link(l).uses;
        const NodeId s = add_node(Sharing{}, {l});
        const LinkId sout = node(s).out;
        for (const Use& u : uses) redirect(u, sout);
    }
}

void Graph::normalize_all() {
    const std::size_t n = links_.size();
    for (std::uint32_t i = 0; i < n; ++i) {
        const LinkId l{i};
        const Definer& d = links_[i].definer;
        if (d.kind == Definer::Kind::Node && nodes_[d.index].state != NodeState::Live) continue;
        if (d.kind == Definer::Kind::Input && d.index >= inputs_.size()) continue;
        if (d.kind == Definer::Kind::Input && inputs_[d.index] != l) continue;
        normalize_link(l);
    }
}

NodeId Graph::deep_copy_node(NodeId n) {
    const Node& src = node(n);
    if (std::holds_alternative<Sharing>(src.label) || std::holds_alternative<Atom>(src.label)) {
        throw GraphError("cannot copy a sharing or atom node");
    }
    if (std::holds_alternative<Anchor>(src.label)) throw GraphError("cannot copy an anchor");
    Label label = src.label;
    const std::vector<LinkId> ops = src.operands;
    std::vector<LinkId> copied;
    std::vector<LinkId> shared;
    copied.reserve(ops.size());
    for (LinkId o : ops) {
        const Label* ol = label_of(o);
        if (ol != nullptr && std::holds_alternative<Thunk>(*ol)) {
            const NodeId t = deep_copy_node(*definer(o));
            copied.push_back(node(t).out);
        } else {
            copied.push_back(o);
            shared.push_back(o);
        }
    }
    const NodeId c = add_node(std::move(label), std::move(copied));
    for (LinkId o : shared) normalize_link(o);
    return c;
}

LinkId Graph::graft(const Graph& box, std::span<const LinkId> bindings) {
    if (bindings.size() != box.inputs().size()) {
        throw GraphError("graft arity mismatch: box has " + std::to_string(box.inputs().size()) +
                         " inputs, " + std::to_string(bindings.size()) + " bindings given");
    }
    std::vector<LinkId> lmap(box.link_slots(), kNoLink);
    for (std::size_t i = 0; i < bindings.size(); ++i) lmap[idx(box.inputs()[i])] = bindings[i];
    std::vector<std::pair<NodeId, NodeId>> made;
    for (std::uint32_t i = 0; i < box.node_slots(); ++i) {
        const Node& bn = box.node(NodeId{i});
        if (bn.state != NodeState::Live) continue;
        const NodeId c = add_node(bn.label, {});
        lmap[idx(bn.out)] = node(c).out;
        made.emplace_back(NodeId{i}, c);
    }
    for (auto [src, dst] : made) {
        const auto& bops = box.node(src).operands;
        std::vector<LinkId> ops;
        ops.reserve(bops.size());
        for (LinkId o : bops) {
            if (lmap[idx(o)] == kNoLink) throw GraphError("graft: box refers to a dead link");
            ops.push_back(lmap[idx(o)]);
        }
        mut(dst).operands = ops;
        for (std::uint32_t s = 0; s < ops.size(); ++s) add_use(ops[s], Use{dst, s});
    }
    return lmap.at(idx(box.root()));
}

std::size_t Graph::collect_garbage() {
    const Partition p = reachable_and_garbage(*this);
    std::vector<LinkId> touched;
    for (NodeId id : p.garbage) {
        Node& n = mut(id);
        const bool registered = n.state == NodeState::Live;
        n.state = NodeState::Deleted;
        if (!registered) continue;
        for (std::uint32_t i = 0; i < n.operands.size(); ++i) {
            remove_use(n.operands[i], Use{id, i});
            touched.push_back(n.operands[i]);
        }
    }
    for (LinkId l : touched) settle(l);
    // Settling may only dissolve reachable sharing nodes; anything it flags
    // as garbage was unreachable already and is now deleted.
    for (Node& n : nodes_) {
        if (n.state == NodeState::Garbage) n.state = NodeState::Deleted;
    }
    return p.garbage.size();
}

std::vector<std::uint32_t> Graph::drop_unused_inputs(std::uint32_t first) {
    std::vector<LinkId> kept_links;
    std::vector<std::uint32_t> kept;
    for (std::uint32_t i = 0; i < inputs_.size(); ++i) {
        const LinkId l = inputs_[i];
        if (i < first || !links_[idx(l)].uses.empty()) {
            links_[idx(l)].definer.index = static_cast<std::uint32_t>(kept_links.size());
            kept_links.push_back(l);
            kept.push_back(i);
        } else {
            links_[idx(l)].definer.index = 0xffffffffu;
        }
    }
    inputs_ = std::move(kept_links);
    return kept;
}

// ---------------------------------------------------------------------------

Graph build(const GraphSpec& spec) {
    Graph g;
    std::unordered_map<std::string, LinkId> names;
    auto define = [&](const std::string& name, LinkId l) {
        if (!names.emplace(name, l).second) {
            throw GraphError("duplicate definer for link '" + name + "'");
        }
    };
    for (const auto& in : spec.inputs) define(in, g.add_input());
    // Outputs first, operands second: the description may reference links
    // before their definer appears.
    std::vector<NodeId> made;
    for (const auto& ns : spec.nodes) {
        if (expected_arity(ns.label) != ns.operands.size()) {
            throw GraphError("operand-count mismatch: " + describe(ns.label) + " expects " +
                             std::to_string(expected_arity(ns.label)) + " operands, got " +
                             std::to_string(ns.operands.size()));
        }
        const NodeId n = g.add_node(ns.label, {});
        define(ns.out, g.node(n).out);
        made.push_back(n);
    }
    auto resolve = [&](const std::string& name) {
        auto it = names.find(name);
        if (it == names.end()) throw GraphError("dangling link '" + name + "'");
        return it->second;
    };
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        std::vector<LinkId> ops;
        for (const auto& o : spec.nodes[i].operands) ops.push_back(resolve(o));
        g.wire(made[i], std::move(ops));
    }
    g.set_root(resolve(spec.root));
    return g;
}

}  // namespace asg
