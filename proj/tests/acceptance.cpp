// Acceptance gate: runs the full default-scale verification battery and
// prints one line per criterion. A line passes when the check's assertions
// hold AND it finished inside its runtime budget. Exit 0 iff every line is
// PASS.

#include <cstdio>

#include "nlot/suite.hpp"

int main() {
    auto P = nlot::default_suite();
    int idx = 0, failed = 0;
    for (const auto& [name, fn] : nlot::suite_registry()) {
        ++idx;
        auto r = fn(P);
        double budget = nlot::runtime_budget_ms(name);
        bool on_time = r.runtime_ms <= budget;
        bool ok = r.pass && on_time;
        failed += !ok;
        std::printf("%s %2d. %-32s (slack=%.3g, runtime=%.0fms, budget=%.0fms)%s\n",
                    ok ? "PASS" : "FAIL", idx, r.name.c_str(), r.slack, r.runtime_ms, budget,
                    !r.pass ? " [assertion]" : (!on_time ? " [overtime]" : ""));
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", idx - failed, idx);
    return failed == 0 ? 0 : 1;
}
