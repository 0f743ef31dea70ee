#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aggstream {

/// Bounded-memory streaming quantile estimator.
///
/// Keeps at most `max_knots` weighted (value, weight) knots sorted by value.
/// Incoming values buffer up and are folded in by repeatedly merging the
/// closest adjacent pair of knots into their weighted centroid, which keeps
/// compression deterministic (ties break toward the lower index). Two
/// sketches merge by concatenating knots and re-compressing, so per-worker
/// sketches can be combined at a batch barrier.
///
/// With the default 200 knots the observed rank error on continuous data is
/// well under the 1% the normalizer needs for quartile fences.
class QuantileSketch {
public:
    explicit QuantileSketch(size_t max_knots = 200);

    void add(double value);
    void merge(const QuantileSketch& other);

    /// Rank-interpolated quantile, q in [0,1]. Flushes pending values.
    /// Returns 0 when the sketch is empty.
    double quantile(double q);

    uint64_t count() const { return count_; }
    size_t knot_count() const { return knots_.size(); }
    size_t max_knots() const { return max_knots_; }

private:
    struct Knot {
        double value;
        double weight;
    };

    void compress();

    std::vector<Knot> knots_;      // sorted by value
    std::vector<double> pending_;  // unsorted new values
    size_t max_knots_;
    uint64_t count_ = 0;
};

} // namespace aggstream
