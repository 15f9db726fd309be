#pragma once

// Templates and bounded contextual-equivalence testing.

#include "asg/machine.hpp"
#include "asg/surface.hpp"

#include <optional>
#include <string>
#include <vector>

namespace asg {

enum class Fragment : std::uint8_t { Pure, State, Control, All };
std::string_view fragment_name(Fragment f);
std::optional<Fragment> parse_fragment(std::string_view s);

/// Two graphs over the same interface ($0..$n-1).
struct Template {
    std::string name;
    TermPtr left_term, right_term;
    Graph left, right;
    std::size_t arity = 0;
};

/// Parses and elaborates both sides. Throws ParseError or GraphError.
Template make_template(std::string name, std::string_view left, std::string_view right);

struct ContextSpec {
    Fragment fragment = Fragment::Pure;
    int depth = 1;
    std::vector<TermPtr> suppliers;  // closes $i; bound to v<i> in contexts
};

/// Name under which input i is visible to contexts.
std::string input_var(std::size_t i);

/// Every composition of up to `depth` frames of the fragment, shallowest
/// first, starting with the bare hole. `arity` inputs are in scope.
std::vector<TermPtr> enumerate_contexts(Fragment f, int depth, std::size_t arity);

struct Plugged {
    Graph graph;
    LinkId hole_root = kNoLink;         // filled hole, when it sits at top level
    std::vector<LinkId> inputs;         // supplier values closing $i
};

class PlugError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluates the suppliers to values, elaborates the context over them and
/// grafts `side` at the hole. Throws PlugError when a supplier does not
/// evaluate to a value within `budget`.
Plugged plug(const TermPtr& context, const Graph& side, const std::vector<TermPtr>& suppliers,
             std::uint64_t budget);

/// "final:<value>", "stuck" or "cutoff".
std::string observation(const RunOutcome& r);

struct Verdict {
    enum class Kind : std::uint8_t { NoCounterexample, Counterexample } kind = Kind::NoCounterexample;
    int depth = 0;
    std::size_t tested = 0;
    std::size_t inconclusive = 0;  // one side cut off, the other did not
    TermPtr context;
    std::string left_obs, right_obs;
};

enum class Exec : std::uint8_t { Serial, Parallel };

Verdict contextual_check(const Template& t, const ContextSpec& spec, std::uint64_t budget,
                         Exec exec = Exec::Parallel);

struct ClosureReport {
    bool ok = true;
    bool cutoff = false;
    std::string side;       // "left" or "right" of the first problem
    std::size_t input = 0;
};

/// Flags sides whose output can be one of their inputs: the input is the
/// side's root, or running from that input ends with the input as the result.
ClosureReport output_closed_check(const Template& t, const std::vector<TermPtr>& suppliers,
                                  std::uint64_t budget);

struct SafetyReport {
    bool ok = true;
    std::string entry;  // "root" or "$i"
    TermPtr context;
    std::string left_obs, right_obs;
    std::size_t tested = 0;
    std::size_t inconclusive = 0;
};

/// Approximate input-safety: for each entry (the root and every input), both
/// sides are plugged into every context, the machine starts at the entry, and
/// observations are compared. No violation found is not a proof.
SafetyReport input_safety_probe(const Template& t, const ContextSpec& spec, std::uint64_t budget,
                                Exec exec = Exec::Parallel);

struct Fixture {
    Template tmpl;
    ContextSpec spec;
    std::uint64_t budget = 10000;
};

/// Loads {"name","left","right","suppliers","fragment","depth"[,"budget"]}.
/// Throws std::runtime_error on malformed input.
Fixture load_fixture(const std::string& json_text);

}  // namespace asg
