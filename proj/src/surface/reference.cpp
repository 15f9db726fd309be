#include "asg/surface.hpp"

#include <algorithm>
#include <set>

namespace asg {

namespace {

struct Env;
using EnvPtr = std::shared_ptr<const Env>;

struct Env {
    std::string name;
    bool lazy = false;   // re-evaluate `term` in `scope` at each use
    RefValue value;
    TermPtr term;
    EnvPtr scope;
    EnvPtr next;
};

struct Closure {
    std::vector<std::string> params;
    TermPtr body;
    EnvPtr env;
};

struct Stuck {
    std::string reason;
};
struct OutOfFuel {};
struct Signal {
    bool is_break;
    std::uint32_t label;
    RefValue value;
};

// Deep recursion in the interpreter is reported as a cutoff.
constexpr int kMaxDepth = 4000;

class Interp {
public:
    explicit Interp(std::uint64_t fuel) : fuel_(fuel) {}

    RefValue eval(const Term& t, const EnvPtr& env) {
        if (++steps_ > fuel_ || depth_ >= kMaxDepth) throw OutOfFuel{};
        struct Guard {
            int& d;
            explicit Guard(int& x) : d(x) { ++d; }
            ~Guard() { --d; }
        } guard(depth_);

        using K = Term::Kind;
        switch (t.kind) {
        case K::Int: return num(t.value);
        case K::Unit: return RefValue{};
        case K::Var: return lookup(t.name, env);
        case K::Input:
        case K::Hole: throw Stuck{"open-input"};
        case K::Def: {
            auto e = std::make_shared<Env>();
            e->name = t.name;
            e->next = env;
            if (shareable(*t.kids[0])) {
                e->lazy = true;
                e->term = t.kids[0];
                e->scope = env;
            } else {
                e->value = eval(*t.kids[0], env);
            }
            return eval(*t.kids[1], e);
        }
        case K::Fun: {
            closures_.push_back(Closure{t.params, t.kids[0], env});
            RefValue v;
            v.kind = RefValue::Kind::Closure;
            v.id = static_cast<std::uint32_t>(closures_.size() - 1);
            return v;
        }
        case K::Loop:
            for (;;) {
                const std::uint32_t l = next_label_++;
                live_.insert(l);
                RefValue lv;
                lv.kind = RefValue::Kind::Label;
                lv.id = l;
                try {
                    eval(*t.kids[0], bind(env, t.name, lv));
                    live_.erase(l);
                } catch (const Signal& s) {
                    live_.erase(l);
                    if (s.label != l) throw;
                    if (s.is_break) return s.value;
                }
            }
        case K::Break:
        case K::Continue: {
            const RefValue l = lookup(t.name, env);
            if (l.kind != RefValue::Kind::Label) throw Stuck{"control-on-non-label"};
            RefValue v;
            if (t.kind == K::Break) v = eval(*t.kids[0], env);
            if (!live_.count(l.id)) throw Stuck{"dangling-label"};
            throw Signal{t.kind == K::Break, l.id, v};
        }
        case K::If: {
            const RefValue c = eval(*t.kids[0], env);
            if (c.kind != RefValue::Kind::Int) throw Stuck{"if-on-non-literal"};
            return eval(*t.kids[c.num != 0 ? 1 : 2], env);
        }
        case K::Seq:
            eval(*t.kids[0], env);
            return eval(*t.kids[1], env);
        case K::Assign: {
            const RefValue a = eval(*t.kids[0], env);
            const RefValue b = eval(*t.kids[1], env);
            if (a.kind != RefValue::Kind::Ref) throw Stuck{"assign-to-non-atom"};
            store_.at(a.id) = b;
            return RefValue{};
        }
        case K::Binary: {
            const RefValue a = eval(*t.kids[0], env);
            const RefValue b = eval(*t.kids[1], env);
            if (a.kind != RefValue::Kind::Int || b.kind != RefValue::Kind::Int) {
                throw Stuck{"arith-on-non-literal"};
            }
            switch (t.op) {
            case BinOp::Add: return num(a.num + b.num);
            case BinOp::Sub: return num(a.num - b.num);
            case BinOp::Mul: return num(a.num * b.num);
            case BinOp::Eq: return num(a.num == b.num ? 1 : 0);
            case BinOp::Lt: return num(a.num < b.num ? 1 : 0);
            }
            break;
        }
        case K::Ref: {
            store_.push_back(eval(*t.kids[0], env));
            RefValue v;
            v.kind = RefValue::Kind::Ref;
            v.id = static_cast<std::uint32_t>(store_.size() - 1);
            return v;
        }
        case K::Deref: {
            const RefValue a = eval(*t.kids[0], env);
            if (a.kind != RefValue::Kind::Ref) throw Stuck{"deref-non-atom"};
            return store_.at(a.id);
        }
        case K::Call: {
            const RefValue f = eval(*t.kids[0], env);
            std::vector<RefValue> args;
            for (std::size_t i = 1; i < t.kids.size(); ++i) args.push_back(eval(*t.kids[i], env));
            if (f.kind != RefValue::Kind::Closure) throw Stuck{"applying-non-function"};
            const Closure c = closures_.at(f.id);
            if (c.params.size() != args.size()) throw Stuck{"arity-mismatch"};
            EnvPtr e = c.env;
            for (std::size_t i = 0; i < args.size(); ++i) e = bind(e, c.params[i], args[i]);
            return eval(*c.body, e);
        }
        }
        throw Stuck{"unknown term"};
    }

    std::uint64_t steps() const { return steps_; }

private:
    static RefValue num(BigInt n) {
        RefValue v;
        v.kind = RefValue::Kind::Int;
        v.num = std::move(n);
        return v;
    }

    static EnvPtr bind(const EnvPtr& env, const std::string& name, RefValue v) {
        auto e = std::make_shared<Env>();
        e->name = name;
        e->value = std::move(v);
        e->next = env;
        return e;
    }

    RefValue lookup(const std::string& name, const EnvPtr& env) {
        for (const Env* e = env.get(); e != nullptr; e = e->next.get()) {
            if (e->name != name) continue;
            if (e->lazy) return eval(*e->term, e->scope);
            return e->value;
        }
        throw Stuck{"unbound variable " + name};
    }

    std::uint64_t fuel_;
    std::uint64_t steps_ = 0;
    int depth_ = 0;
    std::uint32_t next_label_ = 0;
    std::set<std::uint32_t> live_;
    std::vector<RefValue> store_;
    std::vector<Closure> closures_;
};

}  // namespace

RefOutcome reference_eval(const TermPtr& t, std::uint64_t fuel) {
    Interp in(fuel);
    RefOutcome out;
    try {
        out.value = in.eval(*t, nullptr);
        out.status = RefOutcome::Status::Value;
    } catch (const Stuck& s) {
        out.status = RefOutcome::Status::Stuck;
        out.reason = s.reason;
    } catch (const OutOfFuel&) {
        out.status = RefOutcome::Status::Cutoff;
    } catch (const Signal&) {
        // a signal can only escape if its label was live, which needs a loop
        out.status = RefOutcome::Status::Stuck;
        out.reason = "dangling-label";
    }
    out.steps = std::min(in.steps(), fuel);
    return out;
}

std::string observe(const RefValue& v) {
    switch (v.kind) {
    case RefValue::Kind::Int: return v.num.str();
    case RefValue::Kind::Unit: return "()";
    case RefValue::Kind::Closure: return "<closure>";
    case RefValue::Kind::Ref: return "<ref>";
    case RefValue::Kind::Label: return "<label>";
    }
    return "?";
}

}  // namespace asg
