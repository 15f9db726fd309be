#include "doctest.h"

#include "asg/surface.hpp"
#include "progen.hpp"

#include <random>

using namespace asg;
using asg::testing::GenOptions;
using asg::testing::ProgramGen;

namespace {

const char* kFig1 =
    "def x = 0;\n"
    "def y = x + 1;\n"
    "def x = 2;\n"
    "def z = x + 3;\n"
    "y + z\n";

const char* kFig3 = "def x = 2; def z = x + 3; z + z";

std::string canon(const std::string& src) { return canonical_form(elaborate(parse(src))); }

// A directly shared definition whose name the body never mentions.
bool unused_shared_def(const Term& t) {
    if (t.kind == Term::Kind::Def && shareable(*t.kids[0]) &&
        !asg::testing::free_vars(*t.kids[1]).contains(t.name)) {
        return true;
    }
    for (const auto& k : t.kids) {
        if (unused_shared_def(*k)) return true;
    }
    return false;
}

std::string value_of(const RefOutcome& r) {
    return r.status == RefOutcome::Status::Value ? observe(r.value) : "<" + r.reason + ">";
}

}  // namespace

TEST_CASE("parse basics") {
    auto t = parse("1 + 2");
    REQUIRE(t->kind == Term::Kind::Binary);
    CHECK(t->op == BinOp::Add);
    CHECK(t->kids[0]->value == 1);
    CHECK(t->kids[1]->value == 2);

    auto f = parse(kFig1);
    int defs = 0;
    const Term* cur = f.get();
    while (cur->kind == Term::Kind::Def) {
        ++defs;
        cur = cur->kids[1].get();
    }
    CHECK(defs == 4);
    CHECK(cur->kind == Term::Kind::Binary);
    CHECK(cur->kids[0]->name == "y");
    CHECK(cur->kids[1]->name == "z");

    CHECK(same_term(*parse("1 + 2 * 3"), *parse("1 + (2 * 3)")));
    CHECK(same_term(*parse("a := 1; 2", {false, false, {"a"}}), *parse("(a := 1); 2", {false, false, {"a"}})));
    CHECK(same_term(*parse("f(1)(2)", {false, false, {"f"}}),
                    *term::call(term::call(term::var("f"), {term::integer(1)}), {term::integer(2)})));
    CHECK(parse("()  # trailing comment")->kind == Term::Kind::Unit);
}

TEST_CASE("def-bound expressions stop at the first semicolon") {
    auto t = parse("def a = fun(x) -> x; a(1)");
    REQUIRE(t->kind == Term::Kind::Def);
    CHECK(t->kids[0]->kind == Term::Kind::Fun);
    CHECK(t->kids[1]->kind == Term::Kind::Call);
}

TEST_CASE("parse errors carry positions") {
    auto fails = [](const std::string& src, int line, int col) {
        try {
            parse(src);
        } catch (const ParseError& e) {
            CHECK(e.pos.line == line);
            CHECK(e.pos.col == col);
            return true;
        }
        return false;
    };
    CHECK(fails("def x =", 1, 8));
    CHECK(fails("1 +\n  y", 2, 3));
    CHECK(fails("fun(x, x) -> x", 1, 8));
    CHECK(fails("1 @ 2", 1, 3));
    CHECK(fails("$0", 1, 1));
    CHECK(fails("[·] + 1", 1, 1));
    CHECK(fails("loop l { continue m }", 1, 19));
    CHECK_NOTHROW(parse("$0 + $1", {true, false, {}}));
    CHECK_THROWS_AS(parse("[·] + [·]", {false, true, {}}), ParseError);
    CHECK(parse("[.] + 1", {false, true, {}})->kids[0]->kind == Term::Kind::Hole);
}

TEST_CASE("print") {
    CHECK(print(*parse("1 + 2 * 3")) == "1 + 2 * 3");
    CHECK(print(*parse("(1 + 2) * 3")) == "(1 + 2) * 3");
    CHECK(print(*parse("1 - (2 - 3)")) == "1 - (2 - 3)");
    CHECK(print(*term::integer(-4)) == "0 - 4");
    CHECK(print(*parse("def a = ref 0; a := 1; !a")) == "def a = ref 0; a := 1; !a");
}

TEST_CASE("property: parse . print is the identity") {
    ProgramGen gen(11);
    for (int i = 0; i < 500; ++i) {
        auto t = gen.program();
        const std::string text = print(*t);
        INFO(text);
        auto back = parse(text);
        REQUIRE(same_term(*back, *t));
    }
}

TEST_CASE("elaborate") {
    SUBCASE("fig 3 shares z") {
        Graph g = elaborate(parse(kFig3));
        CHECK(is_valid(g));
        const Label* root = g.label_of(g.root());
        REQUIRE(root != nullptr);
        CHECK(is_op(*root, OpKind::Add));
        const LinkId zs = g.node(*g.definer(g.root())).operands[0];
        CHECK(std::holds_alternative<Sharing>(*g.label_of(zs)));
        CHECK(g.fan_in(zs) == 2);
        CHECK(g.count(NodeState::Live) == 5);
    }
    SUBCASE("identity function") {
        Graph g = elaborate(parse("fun(x) -> x"));
        CHECK(g.count(NodeState::Live) == 2);
        const Node& lam = g.node(*g.definer(g.root()));
        REQUIRE(is_op(lam.label, OpKind::Lam));
        const auto& th = std::get<Thunk>(g.node(*g.definer(lam.operands[0])).label);
        CHECK(th.bound == 1);
        CHECK(th.box->root() == th.box->inputs()[0]);
    }
    SUBCASE("fig 6 term") {
        Graph g = elaborate(parse("(fun(f,x) -> f(f(x)))(fun(x) -> x+1, 2)"));
        CHECK(is_valid(g));
        const Node& app = g.node(*g.definer(g.root()));
        CHECK(is_op(app.label, OpKind::App));
        CHECK(std::get<Op>(app.label).arity == 2);
        const Node& lam = g.node(*g.definer(app.operands[0]));
        CHECK(is_op(lam.label, OpKind::Lam));
        const auto& box = *std::get<Thunk>(g.node(*g.definer(lam.operands[0])).label).box;
        CHECK(box.count(NodeState::Live) == 3);  // f shared, two applications
        const LinkId f = box.node(*box.definer(box.root())).operands[0];
        CHECK(std::holds_alternative<Sharing>(*box.label_of(f)));
        CHECK(box.fan_in(f) == 2);
    }
    SUBCASE("unused binding is garbage") {
        Graph g = elaborate(parse("def a = 1 + 2; 5"));
        CHECK(reachable_and_garbage(g).garbage.size() == 3);
        CHECK(is_valid(g));
    }
    SUBCASE("effectful definitions are applied once") {
        Graph g = elaborate(parse("def a = ref 0; !a"));
        CHECK(is_op(*g.label_of(g.root()), OpKind::App));
    }
}

TEST_CASE("property: elaborated programs validate, without garbage unless a binding is unused") {
    ProgramGen gen(12);
    int clean = 0;
    for (int i = 0; i < 500; ++i) {
        auto t = gen.program();
        INFO(print(*t));
        Graph g = elaborate(t);
        REQUIRE(validate(g).empty());
        if (!unused_shared_def(*t)) {
            REQUIRE(reachable_and_garbage(g).garbage.empty());
            ++clean;
        }
    }
    CHECK(clean > 100);
}

TEST_CASE("canonical form quotients renaming and independent definitions") {
    const std::string base = canon(kFig1);
    CHECK(canon("def x = 0; def y = x + 1; def w = 2; def z = w + 3; y + z") == base);
    CHECK(canon("def x = 2; def z = x + 3; def x = 0; def y = x + 1; y + z") == base);
    CHECK(canon(kFig3) != base);
    CHECK(canon("1 + 2") != canon("2 + 1"));
}

TEST_CASE("property: renaming and definition swaps preserve the canonical form") {
    GenOptions opts;
    opts.def_chain_percent = 80;
    opts.max_depth = 5;
    ProgramGen gen(13, opts);
    std::mt19937_64 rng(1013);
    int swaps = 0;
    for (int i = 0; i < 300; ++i) {
        auto t = gen.program();
        auto u = asg::testing::alpha_rename(t, rng);
        if (const std::size_t n = asg::testing::swappable_defs(*u); n > 0) {
            u = asg::testing::swap_defs(u, std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
            ++swaps;
        }
        INFO(print(*t));
        INFO(print(*u));
        REQUIRE(canonical_form(elaborate(t)) == canonical_form(elaborate(u)));
    }
    CHECK(swaps > 100);
}

TEST_CASE("readback") {
    auto rb = readback(elaborate(parse(kFig3)));
    REQUIRE(rb.has_value());
    CHECK(canonical_form(elaborate(*rb)) == canon(kFig3));

    Graph lit;
    lit.set_root(lit.out_of(lit.add_node(Lit{3})));
    REQUIRE(readback(lit).has_value());
    CHECK(print(**readback(lit)) == "3");

    // a store cell that refers to itself
    Graph cyc;
    const NodeId a = cyc.add_node(Atom{});
    cyc.wire(a, {cyc.out_of(a)});
    cyc.set_root(cyc.out_of(a));
    CHECK_FALSE(readback(cyc).has_value());
}

TEST_CASE("property: readback round-trips pure programs") {
    GenOptions opts;
    opts.state = false;
    opts.control = false;
    ProgramGen gen(14, opts);
    for (int i = 0; i < 300; ++i) {
        auto t = gen.program();
        INFO(print(*t));
        Graph g = elaborate(t);
        g.collect_garbage();
        auto rb = readback(g);
        REQUIRE(rb.has_value());
        REQUIRE(canonical_form(elaborate(*rb)) == canonical_form(g));
    }
}

TEST_CASE("reference interpreter") {
    auto eval = [](const std::string& src) { return value_of(reference_eval(parse(src), 100000)); };
    CHECK(eval(kFig1) == std::to_string((0 + 1) + (2 + 3)));
    CHECK(eval("(fun(f,x) -> f(f(x)))(fun(x) -> x+1, 2)") == "4");
    CHECK(eval("def a = ref 0; a := 1; !a") == "1");
    CHECK(eval("def a = ref 0; def b = !a; a := 1; b") == "0");
    CHECK(eval("loop x { break x 7 }") == "7");
    CHECK(eval("1(2)") == "<applying-non-function>");
    CHECK(eval("fun(x) -> x") == "<closure>");
    CHECK(eval("3 < 4") == "1");
    CHECK(reference_eval(parse("loop x { () }"), 1000).status == RefOutcome::Status::Cutoff);
}
