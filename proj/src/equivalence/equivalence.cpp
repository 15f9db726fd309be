#include "asg/equivalence.hpp"

#include <json.hpp>

#include <algorithm>
#include <exception>
#include <functional>

namespace asg {

std::string_view fragment_name(Fragment f) {
    switch (f) {
    case Fragment::Pure: return "pure";
    case Fragment::State: return "state";
    case Fragment::Control: return "control";
    case Fragment::All: return "all";
    }
    return "?";
}

std::optional<Fragment> parse_fragment(std::string_view s) {
    for (Fragment f : {Fragment::Pure, Fragment::State, Fragment::Control, Fragment::All}) {
        if (fragment_name(f) == s) return f;
    }
    return std::nullopt;
}

std::string input_var(std::size_t i) { return "v" + std::to_string(i); }

Template make_template(std::string name, std::string_view left, std::string_view right) {
    ParseOptions po;
    po.allow_inputs = true;
    Template t;
    t.name = std::move(name);
    t.left_term = parse(left, po);
    t.right_term = parse(right, po);
    t.arity = std::max(max_input_index(*t.left_term), max_input_index(*t.right_term));
    t.left = elaborate(t.left_term, t.arity);
    t.right = elaborate(t.right_term, t.arity);
    return t;
}

// ---------------------------------------------------------------------------
// Contexts

namespace {

std::vector<std::string> frame_texts(Fragment f, std::size_t arity) {
    std::vector<std::string> out;
    const bool pure = true;
    const bool state = f == Fragment::State || f == Fragment::All;
    const bool control = f == Fragment::Control || f == Fragment::All;
    if (pure) {
        out.insert(out.end(), {
            "[·] + 1",
            "1 + [·]",
            "(fun(x) -> x)([·])",
            "(fun(x) -> [·])(0)",
            "[·](1)",
            "if [·] then 1 else 0",
            "if 0 then 1 else [·]",
            "(fun(f) -> f(0) + f(0))(fun(z) -> [·])",
        });
    }
    if (state) {
        out.insert(out.end(), {
            "ref [·]",
            "!(ref [·])",
            "def r = ref 0; r := [·]; !r",
        });
        for (std::size_t i = 0; i < arity; ++i) {
            const std::string v = input_var(i);
            out.push_back(v + " := 1; [·]");
            out.push_back("[·]; !" + v);
        }
    }
    if (control) {
        out.insert(out.end(), {
            "loop l { break l [·] }",
            "loop l { [·]; break l 0 }",
            "def c = ref 0; loop l { if !c then break l [·] else (c := 1; continue l) }",
        });
    }
    return out;
}

TermPtr substitute(const TermPtr& outer, const TermPtr& inner) {
    if (outer->kind == Term::Kind::Hole) return inner;
    if (!contains_hole(*outer)) return outer;
    auto t = std::make_shared<Term>(*outer);
    for (auto& k : t->kids) k = substitute(k, inner);
    return t;
}

}  // namespace

std::vector<TermPtr> enumerate_contexts(Fragment f, int depth, std::size_t arity) {
    ParseOptions po;
    po.allow_hole = true;
    for (std::size_t i = 0; i < arity; ++i) po.prebound.push_back(input_var(i));
    std::vector<TermPtr> frames;
    for (const auto& text : frame_texts(f, arity)) frames.push_back(parse(text, po));

    std::vector<TermPtr> out{term::hole()};
    std::vector<TermPtr> layer{term::hole()};
    for (int d = 1; d <= depth; ++d) {
        std::vector<TermPtr> next;
        // outermost frame varies slowest
        for (const auto& fr : frames) {
            for (const auto& inner : layer) next.push_back(substitute(fr, inner));
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plugging

Plugged plug(const TermPtr& context, const Graph& side, const std::vector<TermPtr>& suppliers,
             std::uint64_t budget) {
    Plugged p;
    if (suppliers.size() < side.inputs().size()) {
        throw PlugError("template has " + std::to_string(side.inputs().size()) + " inputs but only " +
                        std::to_string(suppliers.size()) + " suppliers");
    }
    for (const auto& sup : suppliers) {
        MachineState ms = init(elaborate(sup));
        RunOptions ro;
        ro.max_steps = budget;
        const RunOutcome r = run_state(ms, ro);
        if (r.kind != RunOutcome::Kind::Final) {
            throw PlugError("supplier '" + print(*sup) + "' did not evaluate to a value");
        }
        ms.graph.collect_garbage();
        p.inputs.push_back(p.graph.graft(ms.graph, {}));
    }
    ElabEnv env;
    for (std::size_t i = 0; i < p.inputs.size(); ++i) env.names.emplace_back(input_var(i), p.inputs[i]);
    env.hole = [&](Graph& target, const std::function<LinkId(const std::string&)>& lookup) {
        std::vector<LinkId> bindings;
        for (std::size_t i = 0; i < side.inputs().size(); ++i) bindings.push_back(lookup(input_var(i)));
        const LinkId r = target.graft(side, bindings);
        if (&target == &p.graph) p.hole_root = r;
        return r;
    };
    p.graph.set_root(elaborate_into(p.graph, context, env));
    p.graph.normalize_all();
    return p;
}

std::string observation(const RunOutcome& r) {
    switch (r.kind) {
    case RunOutcome::Kind::Final: return "final:" + r.value;
    case RunOutcome::Kind::Stuck: return "stuck";
    case RunOutcome::Kind::Cutoff: return "cutoff";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Checking

namespace {

enum class Cmp { Same, Inconclusive, Differ };

Cmp compare(const std::string& a, const std::string& b) {
    if (a == b) return Cmp::Same;
    if (a == "cutoff" || b == "cutoff") return Cmp::Inconclusive;
    return Cmp::Differ;
}

using ObsPair = std::pair<std::string, std::string>;

// Evaluates `job(i)` for i in [0, n) in chunks, scanning results in index
// order; returns the first index whose observations differ.
struct Scan {
    std::size_t tested = 0;
    std::size_t inconclusive = 0;
    std::optional<std::size_t> first_diff;
    ObsPair diff;
};

Scan ordered_scan(std::size_t n, const std::function<ObsPair(std::size_t)>& job, Exec exec) {
    constexpr std::size_t kChunk = 64;
    Scan scan;
    std::vector<ObsPair> obs(n);
    for (std::size_t base = 0; base < n; base += kChunk) {
        const std::size_t end = std::min(n, base + kChunk);
        if (exec == Exec::Parallel) {
            std::exception_ptr failure;
            const auto lo = static_cast<long>(base);
            const auto hi = static_cast<long>(end);
#pragma omp parallel for schedule(dynamic)
            for (long i = lo; i < hi; ++i) {
                try {
                    obs[static_cast<std::size_t>(i)] = job(static_cast<std::size_t>(i));
                } catch (...) {
#pragma omp critical
                    if (!failure) failure = std::current_exception();
                }
            }
            if (failure) std::rethrow_exception(failure);
        } else {
            for (std::size_t i = base; i < end; ++i) obs[i] = job(i);
        }
        for (std::size_t i = base; i < end; ++i) {
            ++scan.tested;
            switch (compare(obs[i].first, obs[i].second)) {
            case Cmp::Same: break;
            case Cmp::Inconclusive: ++scan.inconclusive; break;
            case Cmp::Differ:
                scan.first_diff = i;
                scan.diff = obs[i];
                return scan;
            }
        }
    }
    return scan;
}

std::string run_plugged(Plugged p, std::optional<std::size_t> entry, std::uint64_t budget) {
    MachineState ms = entry ? start_at(std::move(p.graph), p.inputs.at(*entry)) : init(std::move(p.graph));
    RunOptions ro;
    ro.max_steps = budget;
    return observation(run_state(ms, ro));
}

}  // namespace

Verdict contextual_check(const Template& t, const ContextSpec& spec, std::uint64_t budget, Exec exec) {
    const auto contexts = enumerate_contexts(spec.fragment, spec.depth, t.arity);
    auto job = [&](std::size_t i) -> ObsPair {
        return {run_plugged(plug(contexts[i], t.left, spec.suppliers, budget), std::nullopt, budget),
                run_plugged(plug(contexts[i], t.right, spec.suppliers, budget), std::nullopt, budget)};
    };
    const Scan scan = ordered_scan(contexts.size(), job, exec);
    Verdict v;
    v.depth = spec.depth;
    v.tested = scan.tested;
    v.inconclusive = scan.inconclusive;
    if (scan.first_diff) {
        v.kind = Verdict::Kind::Counterexample;
        v.context = contexts[*scan.first_diff];
        v.left_obs = scan.diff.first;
        v.right_obs = scan.diff.second;
    }
    return v;
}

ClosureReport output_closed_check(const Template& t, const std::vector<TermPtr>& suppliers,
                                  std::uint64_t budget) {
    ClosureReport rep;
    const std::pair<const char*, const Graph*> sides[] = {{"left", &t.left}, {"right", &t.right}};
    for (const auto& [name, g] : sides) {
        for (std::size_t i = 0; i < g->inputs().size(); ++i) {
            bool violation = g->root() == g->inputs()[i];
            if (!violation) {
                Plugged p = plug(term::hole(), *g, suppliers, budget);
                const LinkId entry = p.inputs.at(i);
                MachineState ms = start_at(std::move(p.graph), entry);
                RunOptions ro;
                ro.max_steps = budget;
                const RunOutcome r = run_state(ms, ro);
                if (r.kind == RunOutcome::Kind::Cutoff) {
                    rep.cutoff = true;
                    continue;
                }
                violation = r.kind == RunOutcome::Kind::Final && ms.graph.root() == entry;
            }
            if (violation && rep.ok) {
                rep.ok = false;
                rep.side = name;
                rep.input = i;
            }
        }
    }
    return rep;
}

SafetyReport input_safety_probe(const Template& t, const ContextSpec& spec, std::uint64_t budget,
                                Exec exec) {
    const auto contexts = enumerate_contexts(spec.fragment, spec.depth, t.arity);
    SafetyReport rep;
    for (std::size_t e = 0; e <= t.arity; ++e) {
        const std::optional<std::size_t> entry = e == 0 ? std::nullopt : std::optional<std::size_t>(e - 1);
        auto job = [&](std::size_t i) -> ObsPair {
            return {run_plugged(plug(contexts[i], t.left, spec.suppliers, budget), entry, budget),
                    run_plugged(plug(contexts[i], t.right, spec.suppliers, budget), entry, budget)};
        };
        const Scan scan = ordered_scan(contexts.size(), job, exec);
        rep.tested += scan.tested;
        rep.inconclusive += scan.inconclusive;
        if (scan.first_diff) {
            rep.ok = false;
            rep.entry = entry ? "$" + std::to_string(*entry) : "root";
            rep.context = contexts[*scan.first_diff];
            rep.left_obs = scan.diff.first;
            rep.right_obs = scan.diff.second;
            return rep;
        }
    }
    return rep;
}

Fixture load_fixture(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("fixture is not valid JSON: ") + e.what());
    }
    auto str = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw std::runtime_error(std::string("fixture field '") + key + "' must be a string");
        }
        return j[key].get<std::string>();
    };
    Fixture fx;
    fx.tmpl = make_template(str("name"), str("left"), str("right"));
    if (!j.contains("suppliers") || !j["suppliers"].is_array()) {
        throw std::runtime_error("fixture field 'suppliers' must be an array");
    }
    for (const auto& s : j["suppliers"]) {
        if (!s.is_string()) throw std::runtime_error("suppliers must be surface terms");
        fx.spec.suppliers.push_back(parse(s.get<std::string>()));
    }
    if (fx.spec.suppliers.size() < fx.tmpl.arity) {
        throw std::runtime_error("fixture needs a supplier for each of the " +
                                 std::to_string(fx.tmpl.arity) + " inputs");
    }
    auto frag = parse_fragment(str("fragment"));
    if (!frag) throw std::runtime_error("unknown fragment '" + str("fragment") + "'");
    fx.spec.fragment = *frag;
    if (!j.contains("depth") || !j["depth"].is_number_integer() || j["depth"].get<int>() < 1) {
        throw std::runtime_error("fixture field 'depth' must be an integer >= 1");
    }
    fx.spec.depth = j["depth"].get<int>();
    if (j.contains("budget")) {
        if (!j["budget"].is_number_unsigned() || j["budget"].get<std::uint64_t>() == 0) {
            throw std::runtime_error("fixture field 'budget' must be a positive integer");
        }
        fx.budget = j["budget"].get<std::uint64_t>();
    }
    return fx;
}

}  // namespace asg
