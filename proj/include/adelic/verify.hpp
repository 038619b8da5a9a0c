#pragma once

// Acceptance checks shared by `adelic verify` and the acceptance test binary.

#include "adelic/heatkernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adelic {

struct VerifyOptions {
    std::uint64_t seed = 20240917;
    std::size_t samples = 100'000;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0;
    double limit_seconds = 0;
    std::string detail;
};

/// Criterion 1..10; `passed` includes the runtime limit.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

/// Suite names: the criterion names, their numbers, or "all".
std::vector<CriterionResult> run_suite(const std::string& suite, const VerifyOptions& opts = {});
std::vector<std::string> suite_names();

/// One line: "PASS  4 heat-kernel  12.3 s (limit 60 s)  <detail>".
std::string format_result(const CriterionResult& r);

/// Slow reference sum for z_finite in 50-digit arithmetic; q runs over all
/// prime powers in (lower, 1/r) (upper end: until the terms are negligible).
double z_finite_oracle(const Radius& r, const KernelParams& params, std::uint64_t lower_denominator = 10'000);

}  // namespace adelic
