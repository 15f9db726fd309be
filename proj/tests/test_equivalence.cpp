#include "doctest.h"

#include "asg/equivalence.hpp"
#include "progen.hpp"

using namespace asg;

namespace {

constexpr std::uint64_t kBudget = 10000;

ContextSpec spec_of(Fragment f, int depth, std::vector<std::string> suppliers) {
    ContextSpec s;
    s.fragment = f;
    s.depth = depth;
    for (const auto& src : suppliers) s.suppliers.push_back(parse(src));
    return s;
}

Template beta_law() { return make_template("beta", "(fun(x) -> x + x)($0)", "def x = $0; x + x"); }

std::string run_plugged(const Plugged& p) {
    RunOptions o;
    o.max_steps = kBudget;
    return observation(run(p.graph, o));
}

bool same_verdict(const Verdict& a, const Verdict& b) {
    const bool ctx = (!a.context && !b.context) ||
                     (a.context && b.context && same_term(*a.context, *b.context));
    return a.kind == b.kind && a.tested == b.tested && a.inconclusive == b.inconclusive && ctx &&
           a.left_obs == b.left_obs && a.right_obs == b.right_obs;
}

}  // namespace

TEST_CASE("context enumeration") {
    const auto pure1 = enumerate_contexts(Fragment::Pure, 1, 0);
    const std::size_t m = pure1.size() - 1;
    CHECK(m == 8);
    CHECK(pure1.front()->kind == Term::Kind::Hole);
    CHECK(enumerate_contexts(Fragment::Pure, 2, 0).size() == 1 + m + m * m);
    CHECK(enumerate_contexts(Fragment::Pure, 2, 0).size() == 73);
    // state frames mention each input variable
    const auto st = enumerate_contexts(Fragment::State, 1, 2);
    CHECK(st.size() == 1 + m + 3 + 2 * 2);
    bool mentions_v1 = false;
    for (const auto& c : st) mentions_v1 = mentions_v1 || print(*c).find("v1") != std::string::npos;
    CHECK(mentions_v1);
    // depth d is a prefix of depth d + 1
    const auto a = enumerate_contexts(Fragment::All, 1, 1);
    const auto b = enumerate_contexts(Fragment::All, 2, 1);
    REQUIRE(b.size() > a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_term(*a[i], *b[i]));
    for (const auto& c : b) CHECK(contains_hole(*c));
}

TEST_CASE("plug") {
    Graph two = elaborate(parse("2"));
    ParseOptions po;
    po.allow_hole = true;
    Plugged p = plug(parse("[·] + 1", po), two, {}, kBudget);
    CHECK(is_valid(p.graph));
    CHECK(run_plugged(p) == "final:3");

    Graph g = elaborate(parse("def x = 2; def z = x + 3; z + z"));
    Plugged id = plug(term::hole(), g, {}, kBudget);
    CHECK(canonical_form(id.graph) == canonical_form(g));
    CHECK(id.hole_root == id.graph.root());

    // the context and the supplier share one store cell
    Template t = make_template("deref", "!$0", "0");
    po.prebound = {"v0"};
    Plugged q = plug(parse("v0 := 1; [·]", po), t.left, {parse("ref 0")}, kBudget);
    CHECK(validate(q.graph).empty());
    CHECK(q.graph.fan_in(q.inputs[0]) == 2);
    CHECK(run_plugged(q) == "final:1");

    CHECK_THROWS_AS(plug(term::hole(), t.left, {}, kBudget), PlugError);
    CHECK_THROWS_AS(plug(term::hole(), t.left, {parse("loop l { () }")}, 100), PlugError);
}

TEST_CASE("the beta law survives the store") {
    const Template t = beta_law();
    CHECK(canonical_form(t.left) != canonical_form(t.right));
    for (Fragment f : {Fragment::Pure, Fragment::State}) {
        const Verdict v = contextual_check(t, spec_of(f, 3, {"2"}), kBudget);
        CHECK(v.kind == Verdict::Kind::NoCounterexample);
        CHECK(v.inconclusive == 0);
        CHECK(v.tested == enumerate_contexts(f, 3, 1).size());
    }
    // a functional argument is copied rather than shared; still equivalent
    const Verdict fv = contextual_check(t, spec_of(Fragment::Pure, 2, {"fun(y) -> y"}), kBudget);
    CHECK(fv.kind == Verdict::Kind::NoCounterexample);
}

TEST_CASE("reading a cell is not a constant") {
    const Template t = make_template("deref", "!$0", "0");
    const Verdict v = contextual_check(t, spec_of(Fragment::State, 3, {"ref 0"}), kBudget);
    REQUIRE(v.kind == Verdict::Kind::Counterexample);
    REQUIRE(v.context);
    CHECK(print(*v.context).find(":=") != std::string::npos);
    CHECK(v.left_obs != v.right_obs);
    // the pure fragment cannot write to the cell
    CHECK(contextual_check(t, spec_of(Fragment::Pure, 2, {"ref 0"}), kBudget).kind ==
          Verdict::Kind::NoCounterexample);
}

TEST_CASE("cutoff is inconclusive") {
    const Template t = make_template("div", "loop l { () }", "0");
    const Verdict v = contextual_check(t, spec_of(Fragment::Pure, 1, {}), 2000);
    CHECK(v.kind == Verdict::Kind::NoCounterexample);
    CHECK(v.inconclusive > 0);
}

TEST_CASE("serial and parallel checks agree") {
    const std::vector<std::tuple<Template, ContextSpec>> cases{
        {beta_law(), spec_of(Fragment::All, 2, {"2"})},
        {make_template("deref", "!$0", "0"), spec_of(Fragment::All, 3, {"ref 0"})},
        {make_template("arith", "1 + 2", "3"), spec_of(Fragment::Control, 2, {})},
        {make_template("neq", "$0 + 1", "$0"), spec_of(Fragment::Pure, 2, {"5"})},
        {make_template("div", "loop l { () }", "0"), spec_of(Fragment::Pure, 1, {})},
    };
    for (const auto& [t, s] : cases) {
        INFO(t.name);
        const Verdict a = contextual_check(t, s, 2000, Exec::Serial);
        const Verdict b = contextual_check(t, s, 2000, Exec::Parallel);
        CHECK(same_verdict(a, b));
        const SafetyReport x = input_safety_probe(t, s, 2000, Exec::Serial);
        const SafetyReport y = input_safety_probe(t, s, 2000, Exec::Parallel);
        CHECK(x.ok == y.ok);
        CHECK(x.entry == y.entry);
        CHECK(x.tested == y.tested);
    }
}

TEST_CASE("property: identity templates pass, verdicts are symmetric and monotone") {
    asg::testing::GenOptions opts;
    opts.max_depth = 3;
    asg::testing::ProgramGen gen(31, opts);
    for (int i = 0; i < 25; ++i) {
        const std::string a = print(*gen.program());
        const std::string b = print(*gen.program());
        INFO(a);
        INFO(b);
        const ContextSpec s2 = spec_of(Fragment::All, 2, {});
        const ContextSpec s1 = spec_of(Fragment::All, 1, {});

        CHECK(contextual_check(make_template("id", a, a), s2, 2000).kind == Verdict::Kind::NoCounterexample);

        const Verdict ab = contextual_check(make_template("ab", a, b), s2, 2000);
        const Verdict ba = contextual_check(make_template("ba", b, a), s2, 2000);
        CHECK(ab.kind == ba.kind);
        if (ab.kind == Verdict::Kind::NoCounterexample) {
            CHECK(contextual_check(make_template("ab", a, b), s1, 2000).kind == Verdict::Kind::NoCounterexample);
        }
    }
    const Template t = beta_law();
    for (int d = 3; d >= 1; --d) {
        CHECK(contextual_check(t, spec_of(Fragment::State, d, {"2"}), kBudget).kind ==
              Verdict::Kind::NoCounterexample);
    }
}

TEST_CASE("output closure") {
    const Template beta = beta_law();
    CHECK(output_closed_check(beta, {parse("2")}, kBudget).ok);

    const Template konst = make_template("const", "def x = $0; 3", "3");
    CHECK(output_closed_check(konst, {parse("2")}, kBudget).ok);

    const Template bare = make_template("bare", "$0", "(fun(x) -> 0)($0)");
    const ClosureReport r = output_closed_check(bare, {parse("2")}, kBudget);
    CHECK_FALSE(r.ok);
    CHECK(r.side == "left");
    CHECK(r.input == 0);

    const Template reads = make_template("reads", "(fun(x) -> x)($0)", "(fun(y) -> 0 + y)($0)");
    const ClosureReport q = output_closed_check(reads, {parse("2")}, kBudget);
    CHECK_FALSE(q.ok);
    CHECK(q.side == "left");

    const Template div = make_template("div", "(fun(x) -> loop l { () })($0)", "0");
    const ClosureReport c = output_closed_check(div, {parse("2")}, 500);
    CHECK(c.ok);
    CHECK(c.cutoff);
}

TEST_CASE("input safety probe") {
    const Template same = make_template("same", "$0 + 1", "$0 + 1");
    CHECK(input_safety_probe(same, spec_of(Fragment::State, 2, {"4"}), kBudget).ok);

    const SafetyReport beta = input_safety_probe(beta_law(), spec_of(Fragment::Pure, 2, {"2"}), kBudget);
    CHECK(beta.ok);
    CHECK(beta.tested == 2 * enumerate_contexts(Fragment::Pure, 2, 1).size());

    const SafetyReport wrong = input_safety_probe(make_template("false", "1 + 2", "4"),
                                                  spec_of(Fragment::Pure, 1, {}), kBudget);
    CHECK_FALSE(wrong.ok);
    CHECK(wrong.entry == "root");
    CHECK(wrong.left_obs == "final:3");
    CHECK(wrong.right_obs == "final:4");
}

TEST_CASE("fixtures") {
    const Fixture fx = load_fixture(R"J({"name": "beta", "left": "(fun(x) -> x + x)($0)",
        "right": "def x = $0; x + x", "suppliers": ["2"], "fragment": "state", "depth": 3})J");
    CHECK(fx.tmpl.name == "beta");
    CHECK(fx.tmpl.arity == 1);
    CHECK(fx.spec.fragment == Fragment::State);
    CHECK(fx.spec.depth == 3);
    CHECK(fx.budget == 10000);

    const Fixture b = load_fixture(R"J({"name": "n", "left": "1", "right": "1", "suppliers": [],
        "fragment": "all", "depth": 1, "budget": 50})J");
    CHECK(b.budget == 50);

    CHECK_THROWS(load_fixture("{"));
    CHECK_THROWS(load_fixture(R"J({"name": "n", "left": "1", "right": "1", "suppliers": [], "fragment": "odd", "depth": 1})J"));
    CHECK_THROWS(load_fixture(R"J({"name": "n", "left": "$0", "right": "1", "suppliers": [], "fragment": "pure", "depth": 1})J"));
    CHECK_THROWS(load_fixture(R"J({"name": "n", "left": "1", "right": "1", "suppliers": [], "fragment": "pure", "depth": 0})J"));
    CHECK_THROWS_AS(load_fixture(R"J({"name": "n", "left": "1 +", "right": "1", "suppliers": [], "fragment": "pure", "depth": 1})J"),
                    ParseError);
}
