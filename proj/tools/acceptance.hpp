#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fracflow::acceptance {

enum class Level { Fast, Full };

struct Options {
    Level level{Level::Fast};
    /// Off reproduces the ablation: the boundary route loses its window correction.
    bool correction_enabled{true};
    std::uint64_t seed{20240917};
};

struct Result {
    int id{0};
    std::string title;
    bool pass{false};
    /// Not part of this level; counts as neither pass nor failure.
    bool skipped{false};
    std::string detail;
    double seconds{0.0};
};

/// Runs the acceptance criteria in order, reporting each as it finishes.
std::vector<Result> run_all(const Options& options, const std::function<void(const Result&)>& report = {});

/// "PASS [n] title: detail (12.3 s)"; SKIP for criteria outside the level.
std::string format_result(const Result& result);

}  // namespace fracflow::acceptance
