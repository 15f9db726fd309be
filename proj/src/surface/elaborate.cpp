#include "asg/surface.hpp"

#include <algorithm>
#include <map>

namespace asg {

namespace {

struct Binding {
    std::string name;
    std::size_t depth;
    LinkId link;
};

struct Level {
    Graph* g;
    std::shared_ptr<Graph> owned;
    std::map<const Binding*, LinkId> free_in;
    std::vector<LinkId> free_outer;  // parent-level link per free input, in creation order
};

struct Boxed {
    std::shared_ptr<const Graph> box;
    std::vector<LinkId> outer;
};

class Elaborator {
public:
    Elaborator(Graph& top, const HoleFiller* hole) : hole_(hole) {
        levels_.push_back(Level{&top, nullptr, {}, {}});
    }

    void bind(const std::string& name, LinkId l) {
        scope_.push_back(std::make_unique<Binding>(Binding{name, 0, l}));
    }

    LinkId go(const Term& t) {
        using K = Term::Kind;
        Graph& g = *levels_.back().g;
        switch (t.kind) {
        case K::Int: return g.out_of(g.add_node(Lit{t.value}));
        case K::Unit: return g.out_of(g.add_node(UnitVal{}));
        case K::Var: return lookup(t.name);
        case K::Input: return lookup("$" + std::to_string(t.index));
        case K::Hole: {
            if (!hole_ || !*hole_) throw GraphError("elaborate: hole without a filler");
            auto resolver = [this](const std::string& n) { return lookup(n); };
            return (*hole_)(g, resolver);
        }
        case K::Def: {
            if (!shareable(*t.kids[0])) {
                // evaluated once, before the body
                return go(*term::call(term::fun({t.name}, t.kids[1]), {t.kids[0]}));
            }
            const LinkId bound = go(*t.kids[0]);
            scope_.push_back(std::make_unique<Binding>(Binding{t.name, depth(), bound}));
            const LinkId body = go(*t.kids[1]);
            scope_.pop_back();
            return body;
        }
        case K::Fun: {
            const auto k = static_cast<std::uint32_t>(t.params.size());
            Boxed b = box(t.params, *t.kids[0]);
            Graph& h = *levels_.back().g;
            const NodeId th = h.add_node(Thunk{b.box, k}, b.outer);
            return h.out_of(h.add_node(Op{OpKind::Lam, k}, {h.out_of(th)}));
        }
        case K::Loop: {
            const LinkId atom = g.out_of(g.add_node(Atom{}, {g.out_of(g.add_node(UnitVal{}))}));
            Boxed b = box({t.name}, *t.kids[0]);
            Graph& h = *levels_.back().g;
            const NodeId th = h.add_node(Thunk{b.box, 1}, b.outer);
            return h.out_of(h.add_node(Op{OpKind::Loop}, {atom, h.out_of(th)}));
        }
        case K::Break: {
            const LinkId label = lookup(t.name);
            const LinkId v = go(*t.kids[0]);
            return g.out_of(g.add_node(Op{OpKind::Break}, {label, v}));
        }
        case K::Continue:
            return g.out_of(g.add_node(Op{OpKind::Continue}, {lookup(t.name)}));
        case K::If: {
            const LinkId c = go(*t.kids[0]);
            Boxed bt = box({}, *t.kids[1]);
            Boxed be = box({}, *t.kids[2]);
            const NodeId tt = g.add_node(Thunk{bt.box, 0}, bt.outer);
            const NodeId te = g.add_node(Thunk{be.box, 0}, be.outer);
            return g.out_of(g.add_node(Op{OpKind::If}, {c, g.out_of(tt), g.out_of(te)}));
        }
        case K::Seq:
        case K::Assign:
        case K::Binary: {
            const LinkId a = go(*t.kids[0]);
            const LinkId b = go(*t.kids[1]);
            const OpKind k = t.kind == K::Seq      ? OpKind::Seq
                             : t.kind == K::Assign ? OpKind::Assign
                                                   : binop_kind(t.op);
            return g.out_of(g.add_node(Op{k}, {a, b}));
        }
        case K::Ref:
        case K::Deref: {
            const LinkId a = go(*t.kids[0]);
            return g.out_of(g.add_node(Op{t.kind == K::Ref ? OpKind::Ref : OpKind::Deref}, {a}));
        }
        case K::Call: {
            std::vector<LinkId> ops;
            for (const auto& k : t.kids) ops.push_back(go(*k));
            const auto arity = static_cast<std::uint32_t>(t.kids.size() - 1);
            return g.out_of(g.add_node(Op{OpKind::App, arity}, std::move(ops)));
        }
        }
        throw GraphError("elaborate: unknown term");
    }

private:
    std::size_t depth() const { return levels_.size() - 1; }

    LinkId lookup(const std::string& name) {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
            if ((*it)->name == name) return resolve(**it, depth());
        }
        throw GraphError("elaborate: unbound variable '" + name + "'");
    }

    LinkId resolve(const Binding& b, std::size_t d) {
        if (b.depth == d) return b.link;
        if (auto it = levels_[d].free_in.find(&b); it != levels_[d].free_in.end()) return it->second;
        const LinkId outer = resolve(b, d - 1);
        Level& lv = levels_[d];
        const LinkId in = lv.g->add_input();
        lv.free_in.emplace(&b, in);
        lv.free_outer.push_back(outer);
        return in;
    }

    Boxed box(const std::vector<std::string>& bound, const Term& body) {
        auto g = std::make_shared<Graph>();
        levels_.push_back(Level{g.get(), g, {}, {}});
        const std::size_t d = depth();
        for (const auto& n : bound) {
            scope_.push_back(std::make_unique<Binding>(Binding{n, d, g->add_input()}));
        }
        g->set_root(go(body));
        scope_.resize(scope_.size() - bound.size());

        g->normalize_all();
        g->collect_garbage();
        const auto m = static_cast<std::uint32_t>(bound.size());
        const auto kept = g->drop_unused_inputs(m);
        Boxed out;
        for (std::uint32_t k : kept) {
            if (k >= m) out.outer.push_back(levels_.back().free_outer.at(k - m));
        }
        out.box = std::move(g);
        levels_.pop_back();
        return out;
    }

    const HoleFiller* hole_;
    std::vector<Level> levels_;
    std::vector<std::unique_ptr<Binding>> scope_;
};

}  // namespace

Graph elaborate(const TermPtr& t, std::size_t min_inputs) {
    Graph g;
    Elaborator e(g, nullptr);
    const std::size_t n = std::max(min_inputs, max_input_index(*t));
    for (std::size_t k = 0; k < n; ++k) e.bind("$" + std::to_string(k), g.add_input());
    g.set_root(e.go(*t));
    g.normalize_all();
    return g;
}

LinkId elaborate_into(Graph& g, const TermPtr& t, const ElabEnv& env) {
    Elaborator e(g, &env.hole);
    for (const auto& [name, link] : env.names) e.bind(name, link);
    return e.go(*t);
}

}  // namespace asg
