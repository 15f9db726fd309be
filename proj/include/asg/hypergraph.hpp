#pragma once

// Hierarchical interfaced hypergraphs: the abstract syntax graphs the machine
// evaluates. Links are vertices, nodes are hyperedges with one output link and
// an ordered list of operand links. Links point from use to definition.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace asg {

using BigInt = boost::multiprecision::cpp_int;

enum class NodeId : std::uint32_t {};
enum class LinkId : std::uint32_t {};
enum class LabelId : std::uint32_t {};

inline constexpr NodeId kNoNode{0xffffffffu};
inline constexpr LinkId kNoLink{0xffffffffu};

constexpr std::uint32_t idx(NodeId n) { return static_cast<std::uint32_t>(n); }
constexpr std::uint32_t idx(LinkId l) { return static_cast<std::uint32_t>(l); }
constexpr std::uint32_t idx(LabelId l) { return static_cast<std::uint32_t>(l); }

enum class OpKind : std::uint8_t {
    Add, Sub, Mul, Eq, Lt,
    App,     // @k, operands: function, k arguments
    Lam,     // λk, operand: Thunk with k bound inputs
    If,      // cond, then-thunk, else-thunk
    Ref, Deref, Assign, Seq,
    Loop,    // atom, thunk with one bound input (the label)
    Break,   // label, value
    Continue // label
};

std::string_view op_name(OpKind k);
bool is_arith(OpKind k);

class Graph;

struct Lit { BigInt value; };
struct UnitVal {};
struct LabelVal { LabelId id; };
struct Op {
    OpKind kind;
    std::uint32_t arity = 0;  // k for App and Lam, unused otherwise
};
/// A node labelled by a graph. The first `bound` inputs of the box are bound
/// variables; the remaining inputs are free and match the node's operands
/// positionally. Boxes are immutable once sealed and may be shared between
/// copies of the owning node.
struct Thunk {
    std::shared_ptr<const Graph> box;
    std::uint32_t bound = 0;
};
struct Sharing {};
struct Atom {};
/// Marks a live loop. Operands: body, the loop's atom, the loop's thunk.
struct Anchor { LabelId label; };

using Label = std::variant<Lit, UnitVal, LabelVal, Op, Thunk, Sharing, Atom, Anchor>;

bool is_value(const Label& l);  // Lit, Unit, LabelVal, λ, Atom, Thunk
bool is_op(const Label& l, OpKind k);
const Op* as_op(const Label& l);
std::string describe(const Label& l);

/// Expected operand count for a label. For thunks, the number of free inputs.
std::size_t expected_arity(const Label& l);

/// A consumer slot. node == kNoNode denotes the graph root.
struct Use {
    NodeId node;
    std::uint32_t slot;
    friend bool operator==(const Use&, const Use&) = default;
};
inline constexpr Use kRootUse{kNoNode, 0};

enum class NodeState : std::uint8_t { Live, Garbage, Deleted };

struct Node {
    Label label;
    LinkId out = kNoLink;
    std::vector<LinkId> operands;
    NodeState state = NodeState::Live;
};

struct Definer {
    enum class Kind : std::uint8_t { Node, Input } kind = Kind::Node;
    std::uint32_t index = 0;
};

struct Link {
    Definer definer;
    std::vector<Use> uses;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Graph {
public:
    Graph() = default;

    // -- construction -------------------------------------------------------
    LinkId add_input();
    NodeId add_node(Label label, std::vector<LinkId> operands = {});
    /// Sets the operands of a node that was created without any.
    void wire(NodeId n, std::vector<LinkId> operands);
    void set_root(LinkId l);

    // -- access -------------------------------------------------------------
    const Node& node(NodeId n) const { return nodes_.at(idx(n)); }
    const Link& link(LinkId l) const { return links_.at(idx(l)); }
    LinkId out_of(NodeId n) const { return node(n).out; }
    std::size_t node_slots() const { return nodes_.size(); }
    std::size_t link_slots() const { return links_.size(); }
    LinkId root() const { return root_; }
    const std::vector<LinkId>& inputs() const { return inputs_; }

    std::optional<NodeId> definer(LinkId l) const;
    std::optional<std::uint32_t> input_index(LinkId l) const;
    /// Label of the node defining `l`, or nullptr for interface inputs.
    const Label* label_of(LinkId l) const;
    LinkId operand(Use u) const;
    std::size_t fan_in(LinkId l) const { return link(l).uses.size(); }

    bool alive(NodeId n) const { return node(n).state != NodeState::Deleted; }
    std::size_t count(NodeState s) const;
    std::vector<NodeId> nodes_in(NodeState s) const;

    /// Largest LabelVal/Anchor identity in use, plus one.
    std::uint32_t next_label_id() const;

    // -- mutation primitives ------------------------------------------------
    // None of these enforce the sharing discipline on their own; callers
    // finish with normalize_link / drop_use so fan-in invariants are restored.

    /// Points the consumer slot `u` at `to`, moving the registration.
    void redirect(Use u, LinkId to);
    /// Every consumer of `from` is moved to `to`.
    void replace_uses(LinkId from, LinkId to);
    /// Removes one registered use and settles the definer: sharing nodes of
    /// fan-in one dissolve, nodes and atoms left without consumers become
    /// garbage and release their own operands.
    void drop_use(LinkId l, Use u);
    /// Deletes a node. Remaining operand registrations are dropped as by
    /// drop_use. Consumers of the output must already be rewired.
    void erase_node(NodeId n);
    /// Restores the sharing discipline around one link: nested sharing
    /// collapses, sharing over atoms dissolves into direct fan-in, fan-in of
    /// two or more on an ordinary definer gets a sharing node, and unused
    /// definers are released.
    void normalize_link(LinkId l);
    void normalize_all();

    /// Copies node `n`. Thunk operands are copied along (they are owned);
    /// atom operands are pointed at directly; every other operand becomes
    /// shared between the original and the copy.
    NodeId deep_copy_node(NodeId n);

    /// Merges a fresh copy of `box` into this graph, wiring box input i to
    /// bindings[i]. Returns the copied root. Bindings gain uses; callers
    /// normalize them afterwards.
    LinkId graft(const Graph& box, std::span<const LinkId> bindings);

    /// Deletes every node unreachable from the root and inputs.
    std::size_t collect_garbage();

    /// Removes interface inputs at positions >= first that have no uses.
    /// Returns the original positions of the inputs that were kept.
    std::vector<std::uint32_t> drop_unused_inputs(std::uint32_t first);

private:
    void add_use(LinkId l, Use u);
    void remove_use(LinkId l, Use u);
    void settle(LinkId l);
    Node& mut(NodeId n) { return nodes_.at(idx(n)); }

    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<LinkId> inputs_;
    LinkId root_ = kNoLink;
};

// -- construction from a wiring description ---------------------------------

struct NodeSpec {
    Label label;
    std::string out;
    std::vector<std::string> operands;
};

struct GraphSpec {
    std::vector<std::string> inputs;
    std::vector<NodeSpec> nodes;
    std::string root;
};

/// Builds a graph from named links. Throws GraphError on a dangling link, a
/// duplicate definer, or an operand count that does not match the label.
/// Fan-in discipline is not checked here; see validate.
Graph build(const GraphSpec& spec);

// -- analyses ----------------------------------------------------------------

struct Violation {
    std::string code;    // e.g. "unshared fan-in", "box interface mismatch"
    std::string detail;
};

std::vector<Violation> validate(const Graph& g);
inline bool is_valid(const Graph& g) { return validate(g).empty(); }

struct Partition {
    std::vector<NodeId> reachable;
    std::vector<NodeId> garbage;
};
Partition reachable_and_garbage(const Graph& g);

/// Deterministic serialization; equal strings iff the reachable parts are
/// isomorphic (labels, operand order, top-level interface order). Free
/// inputs of boxes are ordered by first visit, so their declared order is
/// not significant.
std::string canonical_form(const Graph& g);
std::uint64_t fingerprint(std::string_view canonical);
std::string fingerprint_hex(std::string_view canonical);

std::string dot_export(const Graph& g, std::optional<LinkId> focus = std::nullopt);

}  // namespace asg
