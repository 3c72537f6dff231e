#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sohb {

/// Outcome of one acceptance criterion.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    std::uint64_t seed = 20240601;
    unsigned threads = 0;  // 0: default_thread_count()
};

inline constexpr int criterion_count = 11;

/// Short label of criterion `id` (1..criterion_count); throws InvalidArgument.
const char* criterion_name(int id);

/// Runs one criterion. Errors raised inside are reported as a failure with
/// the message in `detail`, never propagated.
CriterionResult run_criterion(int id, const ValidationOptions& opt = {});

/// Runs the listed criteria (all when `only` is empty) in ascending order,
/// calling `on_result` after each.
std::vector<CriterionResult> run_validation(const std::vector<int>& only, const ValidationOptions& opt = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  [ 3] consistency relation (1.2 s): detail".
std::string format_result(const CriterionResult& r);

}  // namespace sohb
