#include "asg/machine.hpp"

#include <json.hpp>

namespace asg {

std::string trace_step_json(const MachineState& s, const StepEvent& ev) {
    nlohmann::ordered_json j;
    j["step"] = s.steps;
    switch (ev.kind) {
    case StepEvent::Kind::Move: j["kind"] = "move"; break;
    case StepEvent::Kind::Copy: j["kind"] = "copy"; break;
    case StepEvent::Kind::Rewrite: j["kind"] = "rewrite"; break;
    }
    if (!ev.rule.empty()) j["rule"] = ev.rule;
    j["focus"] = idx(s.focus);
    j["dir"] = s.dir == Dir::Up ? "up" : "down";
    return j.dump();
}

std::string trace_final_json(const RunOutcome& r) {
    nlohmann::ordered_json j;
    j["status"] = outcome_name(r.kind);
    if (r.kind == RunOutcome::Kind::Final) {
        j["value"] = r.value;
    } else {
        j["value"] = nullptr;
    }
    j["steps"] = r.steps;
    j["rewrites"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.rewrites) j["rewrites"][k] = v;
    j["garbage"] = r.garbage;
    return j.dump();
}

}  // namespace asg
