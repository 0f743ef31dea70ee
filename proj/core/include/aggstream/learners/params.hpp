#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace aggstream {

enum class SplitCriterion : uint8_t { Gini, InfoGain };

std::string_view to_string(SplitCriterion c);
std::optional<SplitCriterion> parse_split_criterion(std::string_view text);

struct HoeffdingTreeParams {
    SplitCriterion split_criterion = SplitCriterion::InfoGain;
    double split_confidence = 0.01; // delta of the Hoeffding bound
    double tie_threshold = 0.05;
    int grace_period = 200; // instances at a leaf between split attempts
    int max_depth = 20;
    int split_points = 10; // candidate thresholds per numeric feature
};

struct ForestParams {
    HoeffdingTreeParams tree;
    int ensemble_size = 10;
    int subspace_size = 0;      // 0: floor(sqrt(M)) + 1; otherwise capped at M
    double poisson_lambda = 6.0;
    bool bagging = true;        // false: every member trains each instance once
    bool drift_detection = true;
    int drift_window = 500;     // sliding window of prequential outcomes
    double warning_sigmas = 2.0;
    double drift_sigmas = 3.0;
};

enum class Regularizer : uint8_t { None, L1, L2 };

struct LogisticParams {
    double learning_rate = 0.1; // constant SGD step
    Regularizer regularizer = Regularizer::L2;
    double regularization = 0.01;
};

} // namespace aggstream
