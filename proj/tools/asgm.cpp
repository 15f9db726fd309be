// asgm: run, trace, export and compare abstract syntax graph programs.

#include "asg/equivalence.hpp"
#include "asg/machine.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace asg;

namespace {

enum Exit : int {
    kOk = 0,
    kUsage = 1,
    kStuck = 2,
    kCutoff = 3,
    kCounterexample = 4,
    kInconclusive = 5,
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TermPtr load_program(const std::string& path) {
    try {
        return parse(slurp(path));
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ":" + e.what());
    }
}

struct RunConfig {
    std::string input;
    std::uint64_t max_steps = 100000;
    std::string refocus = "local";
    std::string trace;
    std::string dot_dir;
    std::uint64_t dot_every = 1;
    bool gc = false;
    bool stats = false;
};

void write_dot(const std::string& dir, std::uint64_t step, const MachineState& s) {
    char name[32];
    std::snprintf(name, sizeof name, "step-%06llu.dot", static_cast<unsigned long long>(step));
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
    out << dot_export(s.graph, s.focus);
}

int cmd_run(const RunConfig& cfg) {
    TermPtr t = load_program(cfg.input);
    MachineState s = init(elaborate(t));

    std::ofstream trace;
    if (!cfg.trace.empty()) {
        trace.open(cfg.trace);
        if (!trace) throw std::runtime_error("cannot write " + cfg.trace);
    }
    if (!cfg.dot_dir.empty()) {
        std::filesystem::create_directories(cfg.dot_dir);
        write_dot(cfg.dot_dir, 0, s);
    }

    RunOptions o;
    o.max_steps = cfg.max_steps;
    o.mode = cfg.refocus == "root" ? RefocusMode::Root : RefocusMode::Local;
    o.gc = cfg.gc;
    if (trace.is_open() || !cfg.dot_dir.empty()) {
        o.on_step = [&](const MachineState& st, const StepEvent& ev) {
            if (trace.is_open()) trace << trace_step_json(st, ev) << '\n';
            if (!cfg.dot_dir.empty() && st.steps % cfg.dot_every == 0) write_dot(cfg.dot_dir, st.steps, st);
        };
    }
    const RunOutcome r = run_state(s, o);
    if (trace.is_open()) trace << trace_final_json(r) << '\n';

    if (cfg.stats) {
        std::cerr << "steps " << r.steps << ", garbage " << r.garbage << ", rewrites";
        for (const auto& [k, v] : r.rewrites) std::cerr << ' ' << k << ':' << v;
        std::cerr << '\n';
    }
    switch (r.kind) {
    case RunOutcome::Kind::Final:
        std::cout << r.value << '\n';
        return kOk;
    case RunOutcome::Kind::Stuck:
        std::cout << "stuck: " << r.reason << '\n';
        return kStuck;
    case RunOutcome::Kind::Cutoff:
        std::cout << "cutoff after " << r.steps << " steps\n";
        return kCutoff;
    }
    return kUsage;
}

int cmd_oracle(const std::string& path, std::uint64_t fuel) {
    const RefOutcome r = reference_eval(load_program(path), fuel);
    switch (r.status) {
    case RefOutcome::Status::Value:
        std::cout << observe(r.value) << '\n';
        return kOk;
    case RefOutcome::Status::Stuck:
        std::cout << "stuck: " << r.reason << '\n';
        return kStuck;
    case RefOutcome::Status::Cutoff:
        std::cout << "cutoff after " << r.steps << " steps\n";
        return kCutoff;
    }
    return kUsage;
}

int cmd_canon(const std::vector<std::string>& paths, bool show_form) {
    std::vector<std::string> forms;
    for (const auto& p : paths) {
        forms.push_back(canonical_form(elaborate(load_program(p))));
        std::cout << fingerprint_hex(forms.back()) << "  " << p << '\n';
        if (show_form) std::cout << forms.back() << '\n';
    }
    if (forms.size() == 2 && forms[0] != forms[1]) return 2;
    return kOk;
}

int cmd_check_equiv(const std::string& path, bool serial) {
    Fixture fx;
    try {
        fx = load_fixture(slurp(path));
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    const Template& t = fx.tmpl;
    const Exec exec = serial ? Exec::Serial : Exec::Parallel;

    std::cout << "template " << t.name << ": " << print(*t.left_term) << "  vs  " << print(*t.right_term) << '\n';
    std::cout << "fragment " << fragment_name(fx.spec.fragment) << ", depth " << fx.spec.depth << ", budget "
              << fx.budget << ", suppliers";
    for (const auto& s : fx.spec.suppliers) std::cout << " [" << print(*s) << ']';
    std::cout << '\n';

    // A closure violation only means the preconditions fail; it refutes nothing.
    bool refuted = false, inconclusive = false;

    const ClosureReport oc = output_closed_check(t, fx.spec.suppliers, fx.budget);
    if (!oc.ok) {
        inconclusive = true;
        std::cout << "output-closed: violation, " << oc.side << " side reaches its output from $" << oc.input << '\n';
    } else {
        std::cout << "output-closed: ok" << (oc.cutoff ? " (some probes cut off)" : "") << '\n';
    }
    inconclusive = inconclusive || oc.cutoff;

    const SafetyReport sp = input_safety_probe(t, fx.spec, fx.budget, exec);
    if (!sp.ok) {
        refuted = true;
        std::cout << "input-safety (approximate): mismatch from " << sp.entry << " in `" << print(*sp.context)
                  << "`: left " << sp.left_obs << ", right " << sp.right_obs << '\n';
    } else {
        std::cout << "input-safety (approximate): no violation in " << sp.tested << " probes";
        if (sp.inconclusive > 0) std::cout << " (" << sp.inconclusive << " inconclusive)";
        std::cout << '\n';
    }
    inconclusive = inconclusive || sp.inconclusive > 0;

    const Verdict v = contextual_check(t, fx.spec, fx.budget, exec);
    if (v.kind == Verdict::Kind::Counterexample) {
        refuted = true;
        std::cout << "contextual: counterexample `" << print(*v.context) << "`: left " << v.left_obs << ", right "
                  << v.right_obs << '\n';
    } else {
        std::cout << "contextual: no counterexample in " << v.tested << " contexts";
        if (v.inconclusive > 0) std::cout << " (" << v.inconclusive << " inconclusive: budget)";
        std::cout << '\n';
    }
    inconclusive = inconclusive || v.inconclusive > 0;

    if (refuted) {
        std::cout << "verdict: refuted\n";
        return kCounterexample;
    }
    if (inconclusive) {
        std::cout << "verdict: inconclusive\n";
        return kInconclusive;
    }
    std::cout << "verdict: ok\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Abstract syntax graph machine"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto* run = app.add_subcommand("run", "Evaluate a program on the graph machine");
    run->add_option("file", cfg.input, "Program file")->required();
    run->add_option("--max-steps", cfg.max_steps, "Step budget")->check(CLI::PositiveNumber);
    run->add_option("--refocus", cfg.refocus, "Refocusing after a rewrite")->check(CLI::IsMember({"local", "root"}));
    run->add_option("--trace", cfg.trace, "Write a JSON-lines trace to this file");
    run->add_option("--dot-dir", cfg.dot_dir, "Write step-NNNNNN.dot snapshots here");
    run->add_option("--dot-every", cfg.dot_every, "Snapshot every N steps")->check(CLI::PositiveNumber);
    run->add_flag("--gc", cfg.gc, "Collect garbage after every rewrite");
    run->add_flag("--stats", cfg.stats, "Print step, garbage and rewrite counts to stderr");

    std::string oracle_file;
    std::uint64_t fuel = 100000;
    auto* oracle = app.add_subcommand("oracle", "Evaluate a program with the reference interpreter");
    oracle->add_option("file", oracle_file, "Program file")->required();
    oracle->add_option("--max-steps", fuel, "Fuel")->check(CLI::PositiveNumber);

    std::vector<std::string> canon_files;
    bool show_form = false;
    auto* canon = app.add_subcommand("canon", "Print canonical-form hashes; with two files, compare them");
    canon->add_option("files", canon_files, "One or two program files")->required()->expected(1, 2);
    canon->add_flag("--form", show_form, "Also print the canonical form");

    std::string fixture;
    bool serial = false;
    auto* check = app.add_subcommand("check-equiv", "Test a template fixture for contextual equivalence");
    check->add_option("fixture", fixture, "Template fixture (JSON)")->required();
    check->add_flag("--serial", serial, "Evaluate contexts on one thread");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) return cmd_run(cfg);
        if (*oracle) return cmd_oracle(oracle_file, fuel);
        if (*canon) return cmd_canon(canon_files, show_form);
        if (*check) return cmd_check_equiv(fixture, serial);
    } catch (const std::exception& e) {
        std::cerr << "asgm: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
