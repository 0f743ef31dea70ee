#include "aggstream/quantile_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aggstream {

QuantileSketch::QuantileSketch(size_t max_knots) : max_knots_(std::max<size_t>(max_knots, 8)) {
    knots_.reserve(max_knots_ * 2 + 2);
    pending_.reserve(max_knots_);
}

void QuantileSketch::add(double value) {
    pending_.push_back(value);
    ++count_;
    if (pending_.size() >= max_knots_) compress();
}

void QuantileSketch::merge(const QuantileSketch& other) {
    for (const Knot& k : other.knots_) {
        knots_.push_back(k);
    }
    for (double v : other.pending_) {
        pending_.push_back(v);
    }
    count_ += other.count_;
    std::sort(knots_.begin(), knots_.end(),
              [](const Knot& a, const Knot& b) { return a.value < b.value; });
    compress();
}

void QuantileSketch::compress() {
    if (!pending_.empty()) {
        std::sort(pending_.begin(), pending_.end());
        std::vector<Knot> merged;
        merged.reserve(knots_.size() + pending_.size());
        size_t i = 0, j = 0;
        while (i < knots_.size() || j < pending_.size()) {
            if (j >= pending_.size() ||
                (i < knots_.size() && knots_[i].value <= pending_[j])) {
                merged.push_back(knots_[i++]);
            } else {
                merged.push_back({pending_[j++], 1.0});
            }
        }
        knots_ = std::move(merged);
        pending_.clear();
    }

    while (knots_.size() > max_knots_) {
        // merge the adjacent pair with the smallest cost; weighting by the
        // combined mass keeps dense regions from collapsing into one heavy
        // knot, which matters for quantiles of skewed data
        size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i + 1 < knots_.size(); ++i) {
            double cost = (knots_[i + 1].value - knots_[i].value) *
                          (knots_[i].weight + knots_[i + 1].weight);
            if (cost < best_cost) {
                best_cost = cost;
                best = i;
            }
        }
        Knot& a = knots_[best];
        const Knot& b = knots_[best + 1];
        double w = a.weight + b.weight;
        a.value = (a.value * a.weight + b.value * b.weight) / w;
        a.weight = w;
        knots_.erase(knots_.begin() + static_cast<ptrdiff_t>(best) + 1);
    }
}

double QuantileSketch::quantile(double q) {
    compress();
    if (knots_.empty()) return 0.0;
    if (knots_.size() == 1) return knots_[0].value;
    q = std::clamp(q, 0.0, 1.0);

    double total = 0.0;
    for (const Knot& k : knots_) total += k.weight;
    double target = q * total;

    // knot i covers cumulative mass centered at cum_i = sum(w_0..w_{i-1}) + w_i/2
    double cum = 0.0;
    double prev_center = knots_[0].weight * 0.5;
    if (target <= prev_center) return knots_[0].value;
    cum = knots_[0].weight;
    for (size_t i = 1; i < knots_.size(); ++i) {
        double center = cum + knots_[i].weight * 0.5;
        if (target <= center) {
            double span = center - prev_center;
            double t = span > 0.0 ? (target - prev_center) / span : 0.0;
            return knots_[i - 1].value + t * (knots_[i].value - knots_[i - 1].value);
        }
        cum += knots_[i].weight;
        prev_center = center;
    }
    return knots_.back().value;
}

} // namespace aggstream
