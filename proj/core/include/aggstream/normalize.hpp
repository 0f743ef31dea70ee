#pragma once

#include "aggstream/quantile_sketch.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aggstream {

enum class NormalizationMode : uint8_t { Off, MinMax, MinMaxNoOutliers, ZScore };

std::string_view to_string(NormalizationMode mode);
std::optional<NormalizationMode> parse_normalization_mode(std::string_view text);

/// Incremental single-feature statistics: count, min, max, mean, M2
/// (sum of squared deviations) and a quantile sketch for q25/q75.
struct FeatureStats {
    uint64_t n = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    QuantileSketch sketch;

    void update(double value);

    /// Combines with stats of a disjoint value stream (parallel-moments rule).
    void merge(const FeatureStats& other);

    /// Sample standard deviation sqrt(M2/(n-1)); 0 when n < 2.
    double sample_std() const;
};

/// Immutable per-feature numbers the normalizer reads. Workers always see the
/// snapshot published at the previous batch barrier, never live statistics.
struct StatsSnapshot {
    struct Entry {
        uint64_t n = 0;
        double min = 0.0;
        double max = 0.0;
        double mean = 0.0;
        double std = 0.0;
        double q25 = 0.0;
        double q75 = 0.0;
    };
    std::vector<Entry> features;
};

/// Per-feature running statistics for one instance stream.
class RunningStats {
public:
    explicit RunningStats(size_t feature_count);

    void update(std::span<const double> values);
    void merge(const RunningStats& other);
    StatsSnapshot snapshot(); // non-const: flushes sketch buffers

    size_t feature_count() const { return features_.size(); }
    const FeatureStats& feature(size_t i) const { return features_[i]; }
    FeatureStats& feature(size_t i) { return features_[i]; }

private:
    std::vector<FeatureStats> features_;
};

/// Rescales one value. Conventions: a feature with no statistics (n == 0)
/// passes through unchanged; degenerate spread (max == min, std == 0, or an
/// empty outlier fence) maps to 0; minmax outputs clamp to [0,1].
double normalize_value(double value, const StatsSnapshot::Entry& entry, NormalizationMode mode);

void normalize_in_place(std::vector<double>& values, const StatsSnapshot& snapshot,
                        NormalizationMode mode);

/// JSON stats file: object mapping feature index to
/// {"min":..,"max":..,"mean":..,"std":..,"q25":..,"q75":..}.
StatsSnapshot load_stats_file(const std::filesystem::path& file, size_t feature_count);
void save_stats_file(const StatsSnapshot& snapshot, const std::filesystem::path& file);

} // namespace aggstream
