#pragma once

// Surface language: terms, parser, pretty-printer, elaboration to graphs,
// readback, and a direct AST interpreter used as an independent oracle.

#include "asg/hypergraph.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace asg {

struct Pos {
    int line = 1;
    int col = 1;
};

enum class BinOp : std::uint8_t { Add, Sub, Mul, Eq, Lt };
std::string_view binop_text(BinOp op);
OpKind binop_kind(BinOp op);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind : std::uint8_t {
        Int, Unit, Var, Input, Hole,
        Def,       // name = kids[0]; kids[1]
        Fun,       // params -> kids[0]
        Loop,      // loop name { kids[0] }
        Break,     // break name kids[0]
        Continue,  // continue name
        If,        // kids[0] then kids[1] else kids[2]
        Seq, Assign, Binary,
        Ref, Deref,
        Call       // kids[0](kids[1..])
    };
    Kind kind = Kind::Unit;
    Pos pos;
    BigInt value;                     // Int
    std::uint32_t index = 0;          // Input ($k)
    BinOp op = BinOp::Add;            // Binary
    std::string name;                 // Var, Def, Loop, Break, Continue
    std::vector<std::string> params;  // Fun
    std::vector<TermPtr> kids;
};

namespace term {
TermPtr integer(BigInt v);
TermPtr unit();
TermPtr var(std::string name);
TermPtr input(std::uint32_t k);
TermPtr hole();
TermPtr def(std::string name, TermPtr bound, TermPtr body);
TermPtr fun(std::vector<std::string> params, TermPtr body);
TermPtr loop(std::string label, TermPtr body);
TermPtr brk(std::string label, TermPtr value);
TermPtr cont(std::string label);
TermPtr cond(TermPtr c, TermPtr t, TermPtr e);
TermPtr seq(TermPtr a, TermPtr b);
TermPtr assign(TermPtr a, TermPtr b);
TermPtr binary(BinOp op, TermPtr a, TermPtr b);
TermPtr ref(TermPtr a);
TermPtr deref(TermPtr a);
TermPtr call(TermPtr f, std::vector<TermPtr> args);
}  // namespace term

/// Structural equality ignoring positions.
bool same_term(const Term& a, const Term& b);

class ParseError : public std::runtime_error {
public:
    ParseError(Pos pos, const std::string& msg);
    Pos pos;
};

struct ParseOptions {
    bool allow_inputs = false;  // $k markers (template sides)
    bool allow_hole = false;    // [.] (contexts)
    std::vector<std::string> prebound;
};

/// Throws ParseError for lexical and syntax errors and unbound variables.
TermPtr parse(std::string_view text, const ParseOptions& opts = {});

/// Prints a term so that parse(print(t)) is structurally equal to t.
std::string print(const Term& t);

/// Definitions that are bound by direct sharing. Anything else is evaluated
/// once before the body, as an application of a one-argument function.
bool shareable(const Term& t);

bool contains_hole(const Term& t);
std::size_t max_input_index(const Term& t);  // 0 if none; else 1 + max k

// -- elaboration -------------------------------------------------------------

/// Called at the hole with the graph under construction and a resolver for
/// names in scope at the hole. Returns the link that fills the hole.
using HoleFiller =
    std::function<LinkId(Graph&, const std::function<LinkId(const std::string&)>&)>;

struct ElabEnv {
    std::vector<std::pair<std::string, LinkId>> names;  // pre-bound at top level
    HoleFiller hole;
};

/// Elaborates a closed term. $k inputs become interface inputs 0..n-1,
/// where n is at least `min_inputs`.
Graph elaborate(const TermPtr& t, std::size_t min_inputs = 0);

/// Elaborates into an existing graph at top level, returning the term's link.
/// The result still has to be normalized by the caller.
LinkId elaborate_into(Graph& g, const TermPtr& t, const ElabEnv& env);

// -- readback ----------------------------------------------------------------

/// Empty when the graph has no term reading (atoms, anchors, labels, or a
/// shared expression that would not elaborate back to sharing).
std::optional<TermPtr> readback(const Graph& g);

// -- reference interpreter ---------------------------------------------------

struct RefValue {
    enum class Kind : std::uint8_t { Int, Unit, Closure, Ref, Label } kind = Kind::Unit;
    BigInt num;
    std::uint32_t id = 0;  // location or label identity
};

struct RefOutcome {
    enum class Status : std::uint8_t { Value, Stuck, Cutoff } status = Status::Cutoff;
    RefValue value;
    std::string reason;
    std::uint64_t steps = 0;
};

RefOutcome reference_eval(const TermPtr& t, std::uint64_t fuel);

/// Observation text of a reference value: the integer, "()", "<closure>",
/// "<ref>" or "<label>".
std::string observe(const RefValue& v);

}  // namespace asg
