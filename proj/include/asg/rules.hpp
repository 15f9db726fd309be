#pragma once

// Rewrite rules fired by the machine.

#include "asg/machine.hpp"

#include <string_view>
#include <vector>

namespace asg {

struct RuleResult {
    LinkId focus;
    Dir dir;
};

struct Rule {
    std::string_view name;
    bool (*applicable)(const MachineState&, NodeId);
    RuleResult (*apply)(MachineState&, NodeId);
};

/// The immutable rule table.
const std::vector<Rule>& rule_table();

std::vector<const Rule*> applicable_rules(const MachineState& s, NodeId n);

/// Counter key for a rule application; beta is keyed by arity above one.
std::string counter_key(const Rule& r, const MachineState& s, NodeId n);

/// Why no rule applies at n.
std::string diagnose(const MachineState& s, NodeId n);

/// Copies the node behind the sharing node the focus is entering, and moves
/// the entry edge onto the copy. Focus stays on the entry edge, moving up.
void copy_step(MachineState& s);

}  // namespace asg
