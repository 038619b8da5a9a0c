// Runs every acceptance criterion and prints one line per criterion.
#include "adelic/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
    adelic::VerifyOptions opts;
    if (argc > 1) opts.seed = std::stoull(argv[1]);
    bool ok = true;
    for (int id = 1; id <= 10; ++id) {
        const adelic::CriterionResult r = adelic::run_criterion(id, opts);
        std::printf("%s\n", adelic::format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.passed;
    }
    std::printf("%s\n", ok ? "acceptance: all criteria pass" : "acceptance: FAILED");
    return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
