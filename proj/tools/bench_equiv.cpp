// Times the serial and OpenMP context checkers on the same workloads.

#include "asg/equivalence.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>

using namespace asg;

namespace {

struct Workload {
    const char* name;
    const char* left;
    const char* right;
    const char* supplier;
    Fragment fragment;
};

double time_check(const Template& t, const ContextSpec& spec, std::uint64_t budget, Exec exec, int repeat,
                  Verdict& out) {
    double best = 1e300;
    for (int i = 0; i < repeat; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        out = contextual_check(t, spec, budget, exec);
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs parallel contextual_check"};
    int depth = 3;
    int repeat = 3;
    int threads = 0;
    std::uint64_t budget = 10000;
    app.add_option("--depth", depth, "Context depth")->check(CLI::Range(1, 4));
    app.add_option("--repeat", repeat, "Runs per measurement (best is reported)")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)");
    app.add_option("--budget", budget, "Step budget per run")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    const Workload loads[] = {
        {"beta/pure", "(fun(x) -> x + x)($0)", "def x = $0; x + x", "2", Fragment::Pure},
        {"beta/state", "(fun(x) -> x + x)($0)", "def x = $0; x + x", "2", Fragment::State},
        {"beta/all", "(fun(x) -> x + x)($0)", "def x = $0; x + x", "2", Fragment::All},
        {"deref/all", "!$0", "0", "ref 0", Fragment::All},
    };
    std::printf("threads %d, depth %d, budget %llu\n", omp_get_max_threads(), depth,
                static_cast<unsigned long long>(budget));
    std::printf("%-12s %9s %10s %10s %8s %s\n", "workload", "contexts", "serial_s", "parallel_s", "speedup",
                "agree");
    int disagreements = 0;
    for (const auto& w : loads) {
        const Template t = make_template(w.name, w.left, w.right);
        ContextSpec spec;
        spec.fragment = w.fragment;
        spec.depth = depth;
        spec.suppliers.push_back(parse(w.supplier));
        Verdict vs, vp;
        const double ts = time_check(t, spec, budget, Exec::Serial, repeat, vs);
        const double tp = time_check(t, spec, budget, Exec::Parallel, repeat, vp);
        const bool agree = vs.kind == vp.kind && vs.tested == vp.tested && vs.inconclusive == vp.inconclusive &&
                           (!vs.context || same_term(*vs.context, *vp.context));
        disagreements += !agree;
        std::printf("%-12s %9zu %10.4f %10.4f %8.2f %s\n", w.name, vs.tested, ts, tp, ts / tp,
                    agree ? "yes" : "NO");
    }
    return disagreements == 0 ? 0 : 1;
}
