#pragma once

// The acceptance battery: twelve numbered checks, each returning a verdict
// line. Shared by `glab suite` and the acceptance test binary.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace glab::acceptance {

struct Result {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0: none
};

inline constexpr int kCriterionCount = 12;

/// Runs criterion `id` (1..12). Exceptions inside a check become a failed result.
[[nodiscard]] Result run(int id);

/// Runs the listed criteria (all when empty) in order, calling `on_result` after each.
std::vector<Result> run_all(const std::vector<int>& ids = {},
                            const std::function<void(const Result&)>& on_result = {});

/// "[PASS] 06 title (1.23 s): detail"
[[nodiscard]] std::string format(const Result& r);

}  // namespace glab::acceptance
