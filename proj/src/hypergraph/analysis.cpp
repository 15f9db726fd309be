#include "asg/hypergraph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace asg {

namespace {

bool is_thunk_slot(const Label& consumer, std::uint32_t slot) {
    if (is_op(consumer, OpKind::Lam)) return slot == 0;
    if (is_op(consumer, OpKind::If)) return slot == 1 || slot == 2;
    if (is_op(consumer, OpKind::Loop)) return slot == 1;
    if (std::holds_alternative<Anchor>(consumer)) return slot == 2;
    return false;
}

std::optional<std::uint32_t> required_bound(const Label& consumer, std::uint32_t slot) {
    if (!is_thunk_slot(consumer, slot)) return std::nullopt;
    if (const Op* op = as_op(consumer)) {
        if (op->kind == OpKind::Lam) return op->arity;
        if (op->kind == OpKind::If) return 0u;
    }
    return 1u;
}

void validate_into(const Graph& g, const std::string& where, std::vector<Violation>& out,
                   std::map<const Graph*, bool>& seen_boxes) {
    auto report = [&](std::string code, std::string detail) {
        out.push_back({std::move(code), where + detail});
    };
    if (g.root() == kNoLink || idx(g.root()) >= g.link_slots()) {
        report("dangling link", "root is not set");
        return;
    }
    auto live = [&](NodeId n) { return g.node(n).state == NodeState::Live; };
    auto link_ok = [&](LinkId l) {
        if (idx(l) >= g.link_slots()) return false;
        if (auto d = g.definer(l)) return live(*d);
        auto in = g.input_index(l);
        return in && *in < g.inputs().size() && g.inputs()[*in] == l;
    };
    if (!link_ok(g.root())) report("dangling link", "root link has no live definer");

    for (std::uint32_t i = 0; i < g.node_slots(); ++i) {
        const NodeId id{i};
        const Node& n = g.node(id);
        if (n.state != NodeState::Live) continue;
        const std::string name = "node " + std::to_string(i) + " (" + describe(n.label) + ")";
        if (g.link(n.out).definer.kind != Definer::Kind::Node ||
            g.link(n.out).definer.index != i) {
            report("duplicate definer", name + " output is defined elsewhere");
        }
        if (n.operands.size() != expected_arity(n.label)) {
            if (std::holds_alternative<Thunk>(n.label)) {
                report("box interface mismatch",
                       name + " has " + std::to_string(n.operands.size()) +
                           " operands for " + std::to_string(expected_arity(n.label)) +
                           " free box inputs");
            } else {
                report("operand-count mismatch", name);
            }
        }
        for (std::uint32_t s = 0; s < n.operands.size(); ++s) {
            const LinkId o = n.operands[s];
            if (!link_ok(o)) {
                report("dangling link", name + " operand " + std::to_string(s));
                continue;
            }
            const auto& uses = g.link(o).uses;
            if (std::find(uses.begin(), uses.end(), Use{id, s}) == uses.end()) {
                report("use registry", name + " operand " + std::to_string(s) + " not registered");
            }
            const Label* ol = g.label_of(o);
            const bool thunk_here = ol != nullptr && std::holds_alternative<Thunk>(*ol);
            if (auto need = required_bound(n.label, s)) {
                if (!thunk_here || std::get<Thunk>(*ol).bound != *need) {
                    report("thunk placement", name + " slot " + std::to_string(s) +
                                                  " needs a thunk with " + std::to_string(*need) +
                                                  " bound inputs");
                }
            } else if (thunk_here) {
                report("thunk placement", name + " consumes a thunk in a value position");
            }
            const bool atom_slot =
                (is_op(n.label, OpKind::Loop) && s == 0) ||
                (std::holds_alternative<Anchor>(n.label) && s == 1);
            if (atom_slot && (ol == nullptr || !std::holds_alternative<Atom>(*ol))) {
                report("loop without atom", name);
            }
        }
        if (const auto* th = std::get_if<Thunk>(&n.label)) {
            if (!th->box) {
                report("box interface mismatch", name + " has no box");
            } else {
                if (th->box->inputs().size() < th->bound) {
                    report("box interface mismatch", name + " binds more inputs than the box has");
                }
                if (!seen_boxes.count(th->box.get())) {
                    seen_boxes.emplace(th->box.get(), true);
                    validate_into(*th->box, where + "box of " + name + ": ", out, seen_boxes);
                }
            }
        }
        if (std::holds_alternative<Sharing>(n.label) && link_ok(n.operands.at(0))) {
            const Label* t = g.label_of(n.operands[0]);
            if (t != nullptr && std::holds_alternative<Sharing>(*t)) {
                report("sharing chain", name + " shares another sharing node");
            }
            if (t != nullptr && std::holds_alternative<Atom>(*t)) {
                report("sharing chain", name + " shares an atom");
            }
        }
    }

    // Consumer side: registrations, fan-in discipline.
    for (std::uint32_t i = 0; i < g.link_slots(); ++i) {
        const LinkId l{i};
        if (!link_ok(l)) continue;
        const auto& uses = g.link(l).uses;
        for (const Use& u : uses) {
            if (u.node == kNoNode) {
                if (g.root() != l) report("use registry", "stale root use on link " + std::to_string(i));
                continue;
            }
            if (idx(u.node) >= g.node_slots() || !live(u.node) ||
                g.node(u.node).operands.size() <= u.slot ||
                g.node(u.node).operands[u.slot] != l) {
                report("use registry", "stale use on link " + std::to_string(i));
            }
        }
        const Label* lab = g.label_of(l);
        const std::string what =
            "link " + std::to_string(i) + (lab ? " (" + describe(*lab) + ")" : " (input)");
        if (lab != nullptr && std::holds_alternative<Sharing>(*lab)) {
            if (uses.size() < 2) report("sharing fan-in", what + " has fan-in " + std::to_string(uses.size()));
        } else if (lab != nullptr && std::holds_alternative<Atom>(*lab)) {
            if (uses.empty()) report("orphan node", what + " has no consumer");
        } else if (uses.size() > 1) {
            report("unshared fan-in", what + " has " + std::to_string(uses.size()) + " consumers");
        } else if (uses.empty() && lab != nullptr) {
            report("orphan node", what + " is live but unused");
        }
        if (lab != nullptr && std::holds_alternative<Thunk>(*lab)) {
            for (const Use& u : uses) {
                if (u.node == kNoNode || !is_thunk_slot(g.node(u.node).label, u.slot)) {
                    report("thunk placement", what + " consumed outside a thunk slot");
                }
            }
        }
    }

    // Acyclicity, except through an atom's store edge.
    std::vector<std::uint8_t> color(g.node_slots(), 0);
    for (std::uint32_t i = 0; i < g.node_slots(); ++i) {
        if (!live(NodeId{i}) || color[i] != 0) continue;
        std::vector<std::pair<std::uint32_t, std::size_t>> stack{{i, 0}};
        color[i] = 1;
        while (!stack.empty()) {
            auto& [cur, next] = stack.back();
            const Node& n = g.node(NodeId{cur});
            const bool atom = std::holds_alternative<Atom>(n.label);
            if (atom || next >= n.operands.size()) {
                color[cur] = 2;
                stack.pop_back();
                continue;
            }
            const LinkId o = n.operands[next++];
            auto d = link_ok(o) ? g.definer(o) : std::nullopt;
            if (!d) continue;
            const std::uint32_t t = idx(*d);
            if (color[t] == 1) {
                report("cycle", "directed cycle through node " + std::to_string(t));
            } else if (color[t] == 0) {
                color[t] = 1;
                stack.emplace_back(t, 0);
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate(const Graph& g) {
    std::vector<Violation> out;
    std::map<const Graph*, bool> seen;
    validate_into(g, "", out, seen);
    return out;
}

Partition reachable_and_garbage(const Graph& g) {
    std::vector<bool> mark(g.node_slots(), false);
    std::vector<LinkId> work;
    if (g.root() != kNoLink) work.push_back(g.root());
    for (LinkId in : g.inputs()) work.push_back(in);
    while (!work.empty()) {
        const LinkId l = work.back();
        work.pop_back();
        auto d = g.definer(l);
        if (!d || mark[idx(*d)] || g.node(*d).state == NodeState::Deleted) continue;
        mark[idx(*d)] = true;
        for (LinkId o : g.node(*d).operands) work.push_back(o);
    }
    Partition p;
    for (std::uint32_t i = 0; i < g.node_slots(); ++i) {
        if (g.node(NodeId{i}).state == NodeState::Deleted) continue;
        (mark[i] ? p.reachable : p.garbage).push_back(NodeId{i});
    }
    return p;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct BoxCanon {
    std::string text;
    std::vector<std::uint32_t> free_order;  // free input positions (0-based among free)
};

class Canonicalizer {
public:
    std::string top(const Graph& g) {
        std::string out;
        walk(g, static_cast<std::uint32_t>(g.inputs().size()), out, nullptr);
        out += "|in" + std::to_string(g.inputs().size());
        return out;
    }

private:
    void walk(const Graph& g, std::uint32_t prenumbered, std::string& out,
              std::vector<std::uint32_t>* free_order) {
        std::vector<std::int64_t> num(g.link_slots(), -1);
        std::int64_t next = 0;
        for (std::uint32_t i = 0; i < prenumbered && i < g.inputs().size(); ++i) {
            num[idx(g.inputs()[i])] = next++;
        }
        std::function<void(LinkId)> visit = [&](LinkId l) {
            if (num[idx(l)] >= 0) {
                out += "#" + std::to_string(num[idx(l)]);
                return;
            }
            const std::int64_t me = next++;
            num[idx(l)] = me;
            out += "#" + std::to_string(me) + "=";
            if (auto in = g.input_index(l)) {
                out += "in";
                if (free_order) free_order->push_back(*in - prenumbered);
                return;
            }
            const Node& n = g.node(*g.definer(l));
            out += text_of(n.label);
            if (const auto* th = std::get_if<Thunk>(&n.label)) {
                const BoxCanon& bc = box(*th);
                out += "{" + bc.text + "}(";
                bool first = true;
                for (std::uint32_t j : bc.free_order) {
                    if (!first) out += ",";
                    first = false;
                    visit(n.operands.at(j));
                }
                out += ")";
                return;
            }
            out += "(";
            for (std::size_t j = 0; j < n.operands.size(); ++j) {
                if (j) out += ",";
                visit(n.operands[j]);
            }
            out += ")";
        };
        visit(g.root());
    }

    const BoxCanon& box(const Thunk& th) {
        auto it = boxes_.find(th.box.get());
        if (it != boxes_.end()) return it->second;
        BoxCanon bc;
        walk(*th.box, th.bound, bc.text, &bc.free_order);
        const std::size_t nfree = th.box->inputs().size() - th.bound;
        std::vector<bool> seen(nfree, false);
        for (auto j : bc.free_order) seen[j] = true;
        for (std::uint32_t j = 0; j < nfree; ++j) {
            if (!seen[j]) bc.free_order.push_back(j);
        }
        bc.text += "|b" + std::to_string(th.bound) + "f" + std::to_string(nfree);
        return boxes_.emplace(th.box.get(), std::move(bc)).first->second;
    }

    std::string text_of(const Label& l) {
        if (const auto* lit = std::get_if<Lit>(&l)) return "lit" + lit->value.str();
        if (const auto* lv = std::get_if<LabelVal>(&l)) return "label" + label_number(lv->id);
        if (const auto* an = std::get_if<Anchor>(&l)) return "anchor" + label_number(an->label);
        return describe(l);
    }

    std::string label_number(LabelId id) {
        auto [it, fresh] = labels_.emplace(idx(id), labels_.size());
        (void)fresh;
        return std::to_string(it->second);
    }

    std::unordered_map<const Graph*, BoxCanon> boxes_;
    std::unordered_map<std::uint32_t, std::size_t> labels_;
};

}  // namespace

std::string canonical_form(const Graph& g) {
    if (g.root() == kNoLink) throw GraphError("canonical_form: graph has no root");
    Canonicalizer c;
    return c.top(g);
}

std::uint64_t fingerprint(std::string_view canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fingerprint_hex(std::string_view canonical) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fingerprint(canonical);
    return os.str();
}

// ---------------------------------------------------------------------------
// DOT export

namespace {

std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        if (c == '"' || c == '\\') r += '\\';
        r += c;
    }
    return r;
}

class DotWriter {
public:
    explicit DotWriter(std::optional<LinkId> focus) : focus_(focus) {}

    std::string run(const Graph& g) {
        out_ << "digraph asg {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n";
        emit(g, "", "  ", true);
        out_ << "}\n";
        return out_.str();
    }

private:
    // Stable node order: first visit from the root, then inputs, then the
    // remaining (garbage) nodes by slot.
    static std::vector<NodeId> order(const Graph& g) {
        std::vector<bool> seen(g.node_slots(), false);
        std::vector<NodeId> seq;
        std::function<void(LinkId)> visit = [&](LinkId l) {
            auto d = g.definer(l);
            if (!d || seen[idx(*d)] || g.node(*d).state == NodeState::Deleted) return;
            seen[idx(*d)] = true;
            seq.push_back(*d);
            for (LinkId o : g.node(*d).operands) visit(o);
        };
        if (g.root() != kNoLink) visit(g.root());
        for (std::uint32_t i = 0; i < g.node_slots(); ++i) {
            if (!seen[i] && g.node(NodeId{i}).state != NodeState::Deleted) seq.push_back(NodeId{i});
        }
        return seq;
    }

    void emit(const Graph& g, const std::string& prefix, const std::string& ind, bool top) {
        const auto seq = order(g);
        std::unordered_map<std::uint32_t, std::string> name;
        for (std::size_t k = 0; k < seq.size(); ++k) name[idx(seq[k])] = prefix + "n" + std::to_string(k);
        auto source = [&](LinkId l) -> std::string {
            if (auto in = g.input_index(l)) return prefix + "in" + std::to_string(*in);
            return name.at(idx(*g.definer(l)));
        };
        for (std::size_t i = 0; i < g.inputs().size(); ++i) {
            out_ << ind << prefix << "in" << i << " [shape=plaintext,label=\"in" << i << "\"];\n";
        }
        std::vector<std::pair<LinkId, std::string>> edges;
        for (NodeId id : seq) {
            const Node& n = g.node(id);
            const std::string& me = name.at(idx(id));
            const bool garbage = n.state == NodeState::Garbage;
            std::string attrs;
            if (std::holds_alternative<Sharing>(n.label)) {
                attrs = "shape=point,width=0.12";
            } else if (std::holds_alternative<Atom>(n.label)) {
                attrs = "shape=circle,label=\"\",width=0.25";
            } else if (const auto* th = std::get_if<Thunk>(&n.label)) {
                const std::string sub = me + "_";
                out_ << ind << "subgraph cluster_" << me << " {\n"
                     << ind << "  label=\"" << escape(describe(n.label)) << "\";\n"
                     << ind << "  style=rounded;\n";
                out_ << ind << "  " << me << " [shape=none,label=\"\",width=0,height=0];\n";
                emit(*th->box, sub, ind + "  ", false);
                out_ << ind << "}\n";
                attrs.clear();
            } else {
                attrs = "label=\"" + escape(describe(n.label)) + "\"";
            }
            if (!std::holds_alternative<Thunk>(n.label)) {
                if (top && n.out == g.root()) attrs += ",peripheries=2";
                if (top && focus_ && n.out == *focus_) attrs += ",color=red,penwidth=2";
                if (garbage) attrs += ",style=dashed";
                out_ << ind << me << " [" << attrs << "];\n";
            }
            for (std::size_t s = 0; s < n.operands.size(); ++s) {
                std::ostringstream e;
                e << source(n.operands[s]) << " -> " << me << " [label=\"" << s << "\"";
                if (top && focus_ && n.operands[s] == *focus_) e << ",color=red,penwidth=2";
                e << "];\n";
                edges.emplace_back(n.operands[s], e.str());
            }
        }
        for (auto& [l, text] : edges) {
            (void)l;
            out_ << ind << text;
        }
        if (!top) {
            out_ << ind << source(g.root()) << " -> " << prefix << "out [style=dotted];\n"
                 << ind << prefix << "out [shape=plaintext,label=\"out\"];\n";
        }
    }

    std::optional<LinkId> focus_;
    std::ostringstream out_;
};

}  // namespace

std::string dot_export(const Graph& g, std::optional<LinkId> focus) {
    DotWriter w(focus);
    return w.run(g);
}

}  // namespace asg
