#include "progen.hpp"

#include <functional>
#include <map>

namespace asg::testing {

using K = Term::Kind;

ProgramGen::ProgramGen(std::uint64_t seed, GenOptions opts) : rng_(seed), opts_(opts) {}

int ProgramGen::roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

std::optional<std::string> ProgramGen::pick(const Env& env, Ty ty) {
    // only the innermost binding of a name is visible
    std::vector<std::string> seen, hits;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (std::find(seen.begin(), seen.end(), it->name) != seen.end()) continue;
        seen.push_back(it->name);
        if (it->ty == ty) hits.push_back(it->name);
    }
    if (hits.empty()) return std::nullopt;
    return hits[static_cast<std::size_t>(roll(static_cast<int>(hits.size())))];
}

std::string ProgramGen::name_for(Ty ty) {
    static const std::vector<std::string> ints{"x", "y", "z", "a", "b"};
    static const std::vector<std::string> refs{"r", "s", "a"};
    static const std::vector<std::string> funs{"f", "g", "h"};
    static const std::vector<std::string> labels{"l", "m"};
    const auto& pool = ty == Ty::Int ? ints : ty == Ty::Ref ? refs : ty == Ty::Fun ? funs : labels;
    return pool[static_cast<std::size_t>(roll(static_cast<int>(pool.size())))];
}

TermPtr ProgramGen::program() {
    loops_ = 0;
    Env env;
    if (chance(opts_.def_chain_percent)) return gen_def(Ty::Int, opts_.max_depth, env);
    const int r = roll(100);
    if (r < 5) return gen(Ty::Fun, opts_.max_depth, env);
    if (r < 10 && opts_.state) return gen(Ty::Ref, opts_.max_depth, env);
    return gen_int(opts_.max_depth, env);
}

TermPtr ProgramGen::gen(Ty ty, int depth, Env& env) {
    switch (ty) {
    case Ty::Int: return gen_int(depth, env);
    case Ty::Ref: {
        if (auto v = pick(env, Ty::Ref); v && chance(75)) return term::var(*v);
        return term::ref(gen_int(depth - 1, env));
    }
    case Ty::Fun: {
        if (auto v = pick(env, Ty::Fun); v && chance(50)) return term::var(*v);
        Env inner = env;
        const std::string p = name_for(Ty::Int);
        inner.push_back({p, Ty::Int});
        return term::fun({p}, gen_int(depth - 1, inner));
    }
    case Ty::Label: {
        if (auto v = pick(env, Ty::Label)) return term::var(*v);
        return gen_stuck();
    }
    }
    return term::unit();
}

TermPtr ProgramGen::gen_stuck() {
    switch (roll(5)) {
    case 0: return term::call(term::integer(1), {term::integer(2)});
    case 1: return term::deref(term::integer(3));
    case 2: return term::assign(term::integer(3), term::integer(1));
    case 3: return term::binary(BinOp::Add, term::fun({"x"}, term::var("x")), term::integer(1));
    default:
        return term::cond(term::fun({"x"}, term::var("x")), term::integer(1), term::integer(2));
    }
}

TermPtr ProgramGen::gen_int(int depth, Env& env) {
    if (chance(opts_.stuck_percent)) return gen_stuck();
    if (depth <= 0 || chance(15)) {
        if (auto v = pick(env, Ty::Int); v && chance(60)) return term::var(*v);
        return term::integer(roll(6));
    }
    for (;;) {
        switch (roll(10)) {
        case 0:
        case 1: {
            static const BinOp ops[] = {BinOp::Add, BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq, BinOp::Lt};
            const BinOp op = ops[roll(6)];
            auto a = gen_int(depth - 1, env);
            return term::binary(op, a, gen_int(depth - 1, env));
        }
        case 2: {
            auto c = gen_int(depth - 1, env);
            auto t = gen_int(depth - 1, env);
            return term::cond(c, t, gen_int(depth - 1, env));
        }
        case 3: return gen_def(Ty::Int, depth, env);
        case 4: {
            if (auto f = pick(env, Ty::Fun); f && chance(60)) {
                return term::call(term::var(*f), {gen_int(depth - 1, env)});
            }
            const int n = 1 + roll(2);
            std::vector<std::string> params;
            std::vector<TermPtr> args;
            Env inner = env;
            for (int i = 0; i < n; ++i) {
                static const Ty kinds[] = {Ty::Int, Ty::Int, Ty::Fun, Ty::Ref};
                Ty ty = kinds[roll(opts_.state ? 4 : 3)];
                std::string p = name_for(ty);
                if (std::find(params.begin(), params.end(), p) != params.end()) {
                    ty = Ty::Int;
                    p = "p" + std::to_string(i);
                }
                args.push_back(gen(ty, depth - 1, env));
                params.push_back(p);
                inner.push_back({p, ty});
            }
            return term::call(term::fun(params, gen_int(depth - 1, inner)), args);
        }
        case 5:
            if (!opts_.state) break;
            return term::deref(gen(Ty::Ref, depth - 1, env));
        case 6: {
            if (!opts_.state) break;
            auto r = gen(Ty::Ref, depth - 1, env);
            auto v = gen_int(depth - 1, env);
            return term::seq(term::assign(r, v), gen_int(depth - 1, env));
        }
        case 7:
            if (!opts_.control || loops_ >= opts_.max_loops || depth < 2) break;
            return gen_loop(depth, env);
        case 8: {
            auto a = gen_int(depth - 1, env);
            return term::seq(a, gen_int(depth - 1, env));
        }
        case 9: {
            auto l = pick(env, Ty::Label);
            if (!l || !chance(40)) break;
            return term::brk(*l, gen_int(depth - 1, env));
        }
        }
    }
}

TermPtr ProgramGen::gen_def(Ty body_ty, int depth, Env& env) {
    static const Ty kinds[] = {Ty::Int, Ty::Int, Ty::Int, Ty::Fun, Ty::Ref};
    const Ty ty = kinds[roll(opts_.state ? 5 : 4)];
    const std::string x = name_for(ty);
    if (depth > 1 && chance(opts_.def_chain_percent)) {
        const Ty sty = ty == Ty::Ref ? Ty::Int : ty;
        auto bound = gen_shareable(sty, depth - 1, env);
        Env inner = env;
        inner.push_back({x, sty});
        return term::def(x, bound, gen_def(body_ty, depth - 1, inner));
    }
    auto bound = gen(ty, depth - 1, env);
    Env inner = env;
    inner.push_back({x, ty});
    return term::def(x, bound, gen(body_ty, depth - 1, inner));
}

TermPtr ProgramGen::gen_shareable(Ty ty, int depth, Env& env) {
    if (ty == Ty::Fun) return gen(Ty::Fun, depth, env);
    auto leaf = [&]() -> TermPtr {
        if (auto v = pick(env, Ty::Int); v && chance(60)) return term::var(*v);
        return term::integer(roll(6));
    };
    if (depth <= 0 || chance(30)) return leaf();
    static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Lt};
    auto a = gen_shareable(Ty::Int, depth - 1, env);
    return term::binary(ops[roll(4)], a, gen_shareable(Ty::Int, depth - 1, env));
}

TermPtr ProgramGen::gen_loop(int depth, Env& env) {
    ++loops_;
    const std::string l = name_for(Ty::Label);
    Env inner = env;
    inner.push_back({l, Ty::Label});
    auto k = [&] { return term::integer(roll(4)); };
    auto c = [] { return term::var("c"); };
    auto bump = [&] { return term::assign(c(), term::binary(BinOp::Add, term::deref(c()), term::integer(1))); };
    if (chance(8)) return term::loop(l, gen_int(depth - 1, inner));  // may diverge
    switch (roll(4)) {
    case 0: return term::loop(l, term::brk(l, gen_int(depth - 1, inner)));
    case 1: {
        // def c = ref 0; loop l { if !c < K then (c := !c + 1; S) else break l E }
        auto s = gen_int(depth - 1, inner);
        auto e = gen_int(depth - 1, inner);
        auto body = term::cond(term::binary(BinOp::Lt, term::deref(c()), k()), term::seq(bump(), s),
                               term::brk(l, e));
        return term::def("c", term::ref(term::integer(0)), term::loop(l, body));
    }
    case 2: {
        // def c = ref 0; loop l { c := !c + 1; if !c < K then (S; continue l) else break l E }
        auto s = gen_int(depth - 1, inner);
        auto e = gen_int(depth - 1, inner);
        auto body = term::seq(bump(), term::cond(term::binary(BinOp::Lt, term::deref(c()), k()),
                                                 term::seq(s, term::cont(l)), term::brk(l, e)));
        return term::def("c", term::ref(term::integer(0)), term::loop(l, body));
    }
    default: {
        // the label travels through a function
        Env fn = inner;
        fn.push_back({"k", Ty::Label});
        auto e = gen_int(depth - 1, fn);
        return term::loop(l, term::call(term::fun({"k"}, term::brk("k", e)), {term::var(l)}));
    }
    }
}

// ---------------------------------------------------------------------------

namespace {

void collect_free(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
    auto is_bound = [&](const std::string& n) {
        return std::find(bound.begin(), bound.end(), n) != bound.end();
    };
    switch (t.kind) {
    case K::Var:
    case K::Continue:
        if (!is_bound(t.name)) out.insert(t.name);
        return;
    case K::Break:
        if (!is_bound(t.name)) out.insert(t.name);
        collect_free(*t.kids[0], bound, out);
        return;
    case K::Def:
        collect_free(*t.kids[0], bound, out);
        bound.push_back(t.name);
        collect_free(*t.kids[1], bound, out);
        bound.pop_back();
        return;
    case K::Loop:
        bound.push_back(t.name);
        collect_free(*t.kids[0], bound, out);
        bound.pop_back();
        return;
    case K::Fun:
        bound.insert(bound.end(), t.params.begin(), t.params.end());
        collect_free(*t.kids[0], bound, out);
        bound.resize(bound.size() - t.params.size());
        return;
    default:
        for (const auto& k : t.kids) collect_free(*k, bound, out);
    }
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
    std::vector<std::string> bound;
    std::set<std::string> out;
    collect_free(t, bound, out);
    return out;
}

TermPtr alpha_rename(const TermPtr& t, std::mt19937_64& rng) {
    int counter = 0;
    auto fresh = [&](const std::string& old) {
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) return old;
        return "qq" + std::to_string(counter++);
    };
    using Scope = std::map<std::string, std::string>;
    std::function<TermPtr(const TermPtr&, const Scope&)> go = [&](const TermPtr& u, const Scope& sc) {
        auto name = [&](const std::string& n) {
            auto it = sc.find(n);
            return it == sc.end() ? n : it->second;
        };
        auto r = std::make_shared<Term>(*u);
        switch (u->kind) {
        case K::Var:
        case K::Continue: r->name = name(u->name); break;
        case K::Break:
            r->name = name(u->name);
            r->kids[0] = go(u->kids[0], sc);
            break;
        case K::Def: {
            r->kids[0] = go(u->kids[0], sc);
            Scope inner = sc;
            r->name = inner[u->name] = fresh(u->name);
            r->kids[1] = go(u->kids[1], inner);
            break;
        }
        case K::Loop: {
            Scope inner = sc;
            r->name = inner[u->name] = fresh(u->name);
            r->kids[0] = go(u->kids[0], inner);
            break;
        }
        case K::Fun: {
            Scope inner = sc;
            for (auto& p : r->params) p = inner[p] = fresh(p);
            r->kids[0] = go(u->kids[0], inner);
            break;
        }
        default:
            for (auto& k : r->kids) k = go(k, sc);
        }
        return TermPtr(r);
    };
    return go(t, {});
}

namespace {

bool swappable_here(const Term& t) {
    if (t.kind != K::Def || t.kids[1]->kind != K::Def) return false;
    const Term& inner = *t.kids[1];
    if (t.name == inner.name) return false;
    if (!shareable(*t.kids[0]) || !shareable(*inner.kids[0])) return false;
    return !free_vars(*inner.kids[0]).contains(t.name) && !free_vars(*t.kids[0]).contains(inner.name);
}

void count_swappable(const Term& t, std::size_t& n) {
    if (swappable_here(t)) ++n;
    for (const auto& k : t.kids) count_swappable(*k, n);
}

TermPtr swap_at(const TermPtr& t, std::size_t& k) {
    if (swappable_here(*t)) {
        if (k == 0) {
            k = static_cast<std::size_t>(-1);
            const Term& inner = *t->kids[1];
            return term::def(inner.name, inner.kids[0], term::def(t->name, t->kids[0], inner.kids[1]));
        }
        --k;
    }
    auto r = std::make_shared<Term>(*t);
    for (auto& kid : r->kids) {
        if (k == static_cast<std::size_t>(-1)) break;
        kid = swap_at(kid, k);
    }
    return r;
}

}  // namespace

std::size_t swappable_defs(const Term& t) {
    std::size_t n = 0;
    count_swappable(t, n);
    return n;
}

TermPtr swap_defs(const TermPtr& t, std::size_t k) { return swap_at(t, k); }

}  // namespace asg::testing
