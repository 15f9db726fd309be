#include "asg/machine.hpp"

#include "asg/rules.hpp"

#include <functional>

namespace asg {

const std::vector<std::uint32_t>& strict_operands(const Label& l) {
    static const std::vector<std::uint32_t> none;
    static const std::vector<std::uint32_t> first{0};
    static const std::vector<std::uint32_t> both{0, 1};
    if (std::holds_alternative<Anchor>(l)) return first;
    const Op* op = as_op(l);
    if (op == nullptr) return none;
    switch (op->kind) {
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Eq:
    case OpKind::Lt:
    case OpKind::Assign:
    case OpKind::Break: return both;
    case OpKind::If:
    case OpKind::Ref:
    case OpKind::Deref:
    case OpKind::Seq:
    case OpKind::Continue: return first;
    case OpKind::App: {
        static const std::vector<std::vector<std::uint32_t>> table = [] {
            std::vector<std::vector<std::uint32_t>> t(64);
            for (std::uint32_t k = 0; k < t.size(); ++k) {
                for (std::uint32_t i = 0; i <= k; ++i) t[k].push_back(i);
            }
            return t;
        }();
        if (op->arity >= table.size()) throw GraphError("application arity too large");
        return table[op->arity];
    }
    case OpKind::Lam:
    case OpKind::Loop: return none;
    }
    return none;
}

Use entry_use(const MachineState& s) {
    if (s.frames.empty()) return kRootUse;
    const Frame& f = s.frames.back();
    return Use{f.node, strict_operands(s.graph.node(f.node).label).at(f.idx)};
}

MachineState init(Graph g) {
    if (auto vs = validate(g); !vs.empty()) {
        throw GraphError("invalid graph: " + vs.front().code + ": " + vs.front().detail);
    }
    MachineState s;
    s.next_label = g.next_label_id();
    s.graph = std::move(g);
    s.focus = s.graph.root();
    s.dir = Dir::Up;
    return s;
}

MachineState start_at(Graph g, LinkId entry) {
    MachineState s = init(std::move(g));
    // Depth-first search along strict operands for the entry link.
    std::vector<Frame> path;
    std::function<bool(LinkId)> search = [&](LinkId l) {
        if (l == entry) return true;
        auto d = s.graph.definer(l);
        if (!d) return false;
        const auto& strict = strict_operands(s.graph.node(*d).label);
        for (std::uint32_t i = 0; i < strict.size(); ++i) {
            path.push_back(Frame{*d, i});
            if (search(s.graph.node(*d).operands[strict[i]])) return true;
            path.pop_back();
        }
        return false;
    };
    if (search(s.graph.root())) {
        s.frames = std::move(path);
        s.focus = entry;
    }
    return s;
}

std::string_view clause_name(Clause c) {
    switch (c) {
    case Clause::UpValue: return "up-value";
    case Clause::UpOperation: return "up-operation";
    case Clause::UpSharing: return "up-sharing";
    case Clause::UpBoundary: return "up-boundary";
    case Clause::DownFrame: return "down-frame";
    case Clause::DownFinal: return "down-final";
    }
    return "?";
}

std::vector<Clause> enabled_clauses(const MachineState& s) {
    std::vector<Clause> out;
    if (s.status != Status::Running) return out;
    const Label* l = s.graph.label_of(s.focus);
    const bool up = s.dir == Dir::Up;
    if (up && l == nullptr) out.push_back(Clause::UpBoundary);
    if (up && l != nullptr && std::holds_alternative<Sharing>(*l)) out.push_back(Clause::UpSharing);
    if (up && l != nullptr && is_value(*l)) out.push_back(Clause::UpValue);
    if (up && l != nullptr && ((as_op(*l) && !is_op(*l, OpKind::Lam)) || std::holds_alternative<Anchor>(*l))) {
        out.push_back(Clause::UpOperation);
    }
    if (!up && !s.frames.empty()) out.push_back(Clause::DownFrame);
    if (!up && s.frames.empty() && s.focus == s.graph.root()) out.push_back(Clause::DownFinal);
    return out;
}

bool frames_consistent(const MachineState& s) {
    const Graph& g = s.graph;
    LinkId expect = g.root();
    for (const Frame& f : s.frames) {
        if (g.node(f.node).state != NodeState::Live || g.out_of(f.node) != expect) return false;
        const auto& strict = strict_operands(g.node(f.node).label);
        if (f.idx >= strict.size()) return false;
        expect = g.node(f.node).operands[strict[f.idx]];
    }
    return expect == s.focus;
}

namespace {

void stuck(MachineState& s, std::string reason) {
    s.status = Status::Stuck;
    s.stuck_reason = std::move(reason);
}

StepEvent fire(MachineState& s, NodeId n, const StepOptions& opts) {
    const auto rules = applicable_rules(s, n);
    if (rules.empty()) {
        stuck(s, diagnose(s, n));
        return {};
    }
    const Rule& r = *rules.front();
    const std::string key = counter_key(r, s, n);
    const RuleResult res = r.apply(s, n);
    ++s.rewrites[key];
    s.focus = res.focus;
    s.dir = res.dir;
    if (opts.gc) s.collected += s.graph.collect_garbage();
    if (opts.mode == RefocusMode::Root) {
        s.frames.clear();
        s.focus = s.graph.root();
        s.dir = Dir::Up;
    }
    return {StepEvent::Kind::Rewrite, key};
}

}  // namespace

StepEvent step(MachineState& s, const StepOptions& opts) {
    if (s.status != Status::Running) throw GraphError("step on a stopped machine");
    ++s.steps;
    Graph& g = s.graph;
    if (s.dir == Dir::Up) {
        auto d = g.definer(s.focus);
        if (!d) {
            stuck(s, "open-input");
            return {};
        }
        const Label& l = g.node(*d).label;
        if (std::holds_alternative<Sharing>(l)) {
            if (!g.definer(g.node(*d).operands[0])) {
                stuck(s, "open-input");
                return {};
            }
            copy_step(s);
            ++s.rewrites["copy"];
            return {StepEvent::Kind::Copy, "copy"};
        }
        if (is_value(l)) {
            s.dir = Dir::Down;
            return {};
        }
        const auto& strict = strict_operands(l);
        if (strict.empty()) return fire(s, *d, opts);
        s.frames.push_back(Frame{*d, 0});
        s.focus = g.node(*d).operands[strict[0]];
        return {};
    }
    if (s.frames.empty()) {
        s.status = Status::Final;
        return {};
    }
    Frame& top = s.frames.back();
    const auto& strict = strict_operands(g.node(top.node).label);
    if (top.idx + 1 < strict.size()) {
        ++top.idx;
        s.focus = g.node(top.node).operands[strict[top.idx]];
        s.dir = Dir::Up;
        return {};
    }
    const NodeId n = top.node;
    s.frames.pop_back();
    return fire(s, n, opts);
}

std::string_view outcome_name(RunOutcome::Kind k) {
    switch (k) {
    case RunOutcome::Kind::Final: return "final";
    case RunOutcome::Kind::Stuck: return "stuck";
    case RunOutcome::Kind::Cutoff: return "cutoff";
    }
    return "?";
}

std::string observe_value(const Graph& g, LinkId l) {
    const Label* lab = g.label_of(l);
    if (lab == nullptr) return "<input>";
    if (const auto* lit = std::get_if<Lit>(lab)) return lit->value.str();
    if (std::holds_alternative<UnitVal>(*lab)) return "()";
    if (is_op(*lab, OpKind::Lam)) return "<closure>";
    if (std::holds_alternative<Atom>(*lab)) return "<ref>";
    if (std::holds_alternative<LabelVal>(*lab)) return "<label>";
    return "<" + describe(*lab) + ">";
}

RunOutcome run_state(MachineState& s, const RunOptions& opts) {
    const StepOptions so{opts.mode, opts.gc};
    while (s.status == Status::Running && s.steps < opts.max_steps) {
        const StepEvent ev = step(s, so);
        if (opts.on_step) opts.on_step(s, ev);
    }
    RunOutcome out;
    out.rewrites = s.rewrites;
    out.steps = s.steps;
    out.garbage = s.collected + reachable_and_garbage(s.graph).garbage.size();
    switch (s.status) {
    case Status::Final:
        out.kind = RunOutcome::Kind::Final;
        out.value = observe_value(s.graph, s.graph.root());
        out.readback = readback(s.graph);
        break;
    case Status::Stuck:
        out.kind = RunOutcome::Kind::Stuck;
        out.reason = s.stuck_reason;
        break;
    case Status::Running: out.kind = RunOutcome::Kind::Cutoff; break;
    }
    return out;
}

RunOutcome run(Graph g, const RunOptions& opts) {
    MachineState s = init(std::move(g));
    return run_state(s, opts);
}

}  // namespace asg
