#pragma once

// The focused traversal evaluator.

#include "asg/hypergraph.hpp"
#include "asg/surface.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace asg {

enum class Dir : std::uint8_t { Up, Down };
enum class RefocusMode : std::uint8_t { Local, Root };
enum class Status : std::uint8_t { Running, Final, Stuck };

struct Frame {
    NodeId node;
    std::uint32_t idx;  // position in the node's strict operand list
};

struct MachineState {
    Graph graph;
    LinkId focus = kNoLink;
    Dir dir = Dir::Up;
    std::vector<Frame> frames;
    std::uint64_t steps = 0;
    std::map<std::string, std::uint64_t> rewrites;
    Status status = Status::Running;
    std::string stuck_reason;
    std::uint32_t next_label = 0;
    std::uint64_t collected = 0;  // nodes removed by mid-run collection
};

/// Strict operand slots of an operation, in evaluation order. Empty for
/// values and for loop nodes. Anchors evaluate their body (slot 0).
const std::vector<std::uint32_t>& strict_operands(const Label& l);

/// The consumer slot the focus arrived through: the top frame's operand, or
/// the root when there are no frames.
Use entry_use(const MachineState& s);

/// Throws GraphError if g does not validate.
MachineState init(Graph g);

/// Starts at `entry` moving up. Frames are rebuilt along the strict path from
/// the root; when entry is not on such a path the machine starts at the root.
MachineState start_at(Graph g, LinkId entry);

enum class Clause : std::uint8_t { UpValue, UpOperation, UpSharing, UpBoundary, DownFrame, DownFinal };
std::string_view clause_name(Clause c);

/// All transition clauses whose guard holds in `s`.
std::vector<Clause> enabled_clauses(const MachineState& s);

/// Checks that the frames trace a strict path from the root to the focus.
bool frames_consistent(const MachineState& s);

struct StepEvent {
    enum class Kind : std::uint8_t { Move, Copy, Rewrite } kind = Kind::Move;
    std::string rule;
};

struct StepOptions {
    RefocusMode mode = RefocusMode::Local;
    bool gc = false;  // collect garbage after every rewrite
};

/// One transition. Requires status Running.
StepEvent step(MachineState& s, const StepOptions& opts = {});

struct RunOptions {
    std::uint64_t max_steps = 100000;
    RefocusMode mode = RefocusMode::Local;
    bool gc = false;
    std::function<void(const MachineState&, const StepEvent&)> on_step;
};

struct RunOutcome {
    enum class Kind : std::uint8_t { Final, Stuck, Cutoff } kind = Kind::Cutoff;
    std::string value;  // observation of the final value
    std::string reason;  // stuck reason
    std::optional<TermPtr> readback;
    std::map<std::string, std::uint64_t> rewrites;
    std::uint64_t steps = 0;
    std::uint64_t garbage = 0;
};

std::string_view outcome_name(RunOutcome::Kind k);

/// Observation of a value link: the integer, "()", "<closure>", "<ref>",
/// "<label>".
std::string observe_value(const Graph& g, LinkId l);

/// Runs to completion or the step budget.
/// One line of the JSON trace stream:
/// {"step","kind","rule"?,"focus","dir"}.
std::string trace_step_json(const MachineState& s, const StepEvent& ev);

/// Closing record of the trace stream:
/// {"status","value","steps","rewrites","garbage"}; value is null unless final.
std::string trace_final_json(const RunOutcome& r);

RunOutcome run(Graph g, const RunOptions& opts = {});
RunOutcome run_state(MachineState& s, const RunOptions& opts);

}  // namespace asg
