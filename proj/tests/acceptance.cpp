// Acceptance gate: runs the ten criteria at full size and prints one
// PASS/FAIL line per criterion, followed by the individual checks.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include <hypcocycle/validation.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using namespace hypcocycle;

namespace {

struct Criterion {
    int number;
    const char* title;
    const char* suite;
};

constexpr Criterion kCriteria[] = {
    {1, "cocycle-law suite", "cocycle-laws"},
    {2, "geometry suite", "geometry"},
    {3, "diffusion suite", "diffusion"},
    {4, "drift and shadowing", "shadowing"},
    {5, "direction uniformity", "uniformity"},
    {6, "spectrum cross-validation", "spectrum"},
    {7, "interval convergence", "interval"},
    {8, "expectation convergence", "expectation"},
    {9, "circle-average estimate", "circle"},
    {10, "regularity probe", "regularity"},
};

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::atoi(argv[i]));

    ValidationContext ctx;
    if (const char* env = std::getenv("HYPCOCYCLE_SEED"))
        ctx.seed = std::strtoull(env, nullptr, 10);
    std::printf("acceptance: seed %llu, %u workers\n", static_cast<unsigned long long>(ctx.seed), ctx.workers);
    std::fflush(stdout);

    std::vector<std::string> lines;
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end())
            continue;
        SuiteResult r;
        bool crashed = false;
        std::string error;
        try {
            r = run_suite(c.suite, ctx);
        } catch (const std::exception& e) {
            crashed = true;
            error = e.what();
        }
        const bool ok = !crashed && r.passed();
        if (!ok)
            ++failures;
        const std::string line =
            strprintf("criterion %2d %s  %s (%.1f s)", c.number, ok ? "PASS" : "FAIL", c.title, r.seconds);
        lines.push_back(line);
        std::printf("%s\n", line.c_str());
        if (crashed)
            std::printf("    error: %s\n", error.c_str());
        for (const auto& chk : r.checks)
            std::printf("    [%s] %s: %s\n", chk.passed ? "ok" : "FAILED", chk.name.c_str(), chk.detail.c_str());
        std::fflush(stdout);
    }

    std::printf("\nsummary\n");
    for (const auto& l : lines)
        std::printf("%s\n", l.c_str());
    std::printf("%d of %zu criteria failed\n", failures, lines.size());
    return failures == 0 ? 0 : 1;
}
