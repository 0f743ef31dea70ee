#include "aggstream/normalize.hpp"

#include "aggstream/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace aggstream {

std::string_view to_string(NormalizationMode mode) {
    switch (mode) {
        case NormalizationMode::Off: return "off";
        case NormalizationMode::MinMax: return "minmax";
        case NormalizationMode::MinMaxNoOutliers: return "minmax-no-outliers";
        case NormalizationMode::ZScore: return "zscore";
    }
    return "off";
}

std::optional<NormalizationMode> parse_normalization_mode(std::string_view text) {
    if (text == "off" || text == "none") return NormalizationMode::Off;
    if (text == "minmax") return NormalizationMode::MinMax;
    if (text == "minmax-no-outliers" || text == "minmax_no_outliers")
        return NormalizationMode::MinMaxNoOutliers;
    if (text == "zscore" || text == "z-score") return NormalizationMode::ZScore;
    return std::nullopt;
}

void FeatureStats::update(double value) {
    if (n == 0) {
        min = max = value;
    } else {
        min = std::min(min, value);
        max = std::max(max, value);
    }
    ++n;
    // Welford single-pass moment recurrence
    double delta = value - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (value - mean);
    sketch.add(value);
}

void FeatureStats::merge(const FeatureStats& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    double na = static_cast<double>(n);
    double nb = static_cast<double>(other.n);
    double delta = other.mean - mean;
    double total = na + nb;
    // Chan et al. pairwise combination
    mean += delta * (nb / total);
    m2 += other.m2 + delta * delta * (na * nb / total);
    n += other.n;
    min = std::min(min, other.min);
    max = std::max(max, other.max);
    sketch.merge(other.sketch);
}

double FeatureStats::sample_std() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1));
}

RunningStats::RunningStats(size_t feature_count) : features_(feature_count) {}

void RunningStats::update(std::span<const double> values) {
    for (size_t i = 0; i < features_.size() && i < values.size(); ++i) {
        features_[i].update(values[i]);
    }
}

void RunningStats::merge(const RunningStats& other) {
    if (other.features_.size() != features_.size()) {
        throw ContractViolation("RunningStats::merge: feature count mismatch");
    }
    for (size_t i = 0; i < features_.size(); ++i) {
        features_[i].merge(other.features_[i]);
    }
}

StatsSnapshot RunningStats::snapshot() {
    StatsSnapshot snap;
    snap.features.resize(features_.size());
    for (size_t i = 0; i < features_.size(); ++i) {
        FeatureStats& f = features_[i];
        StatsSnapshot::Entry& e = snap.features[i];
        e.n = f.n;
        e.min = f.min;
        e.max = f.max;
        e.mean = f.mean;
        e.std = f.sample_std();
        e.q25 = f.sketch.quantile(0.25);
        e.q75 = f.sketch.quantile(0.75);
    }
    return snap;
}

double normalize_value(double value, const StatsSnapshot::Entry& entry, NormalizationMode mode) {
    if (mode == NormalizationMode::Off || entry.n == 0) return value;
    switch (mode) {
        case NormalizationMode::MinMax: {
            double span = entry.max - entry.min;
            if (span <= 0.0) return 0.0;
            return std::clamp((value - entry.min) / span, 0.0, 1.0);
        }
        case NormalizationMode::MinMaxNoOutliers: {
            double iqr = entry.q75 - entry.q25;
            double lo = std::max(entry.min, entry.q25 - 1.5 * iqr);
            double hi = std::min(entry.max, entry.q75 + 1.5 * iqr);
            double span = hi - lo;
            if (span <= 0.0) return 0.0;
            return std::clamp((value - lo) / span, 0.0, 1.0);
        }
        case NormalizationMode::ZScore: {
            if (entry.std <= 0.0) return 0.0;
            return (value - entry.mean) / entry.std;
        }
        case NormalizationMode::Off: break;
    }
    return value;
}

void normalize_in_place(std::vector<double>& values, const StatsSnapshot& snapshot,
                        NormalizationMode mode) {
    if (mode == NormalizationMode::Off) return;
    for (size_t i = 0; i < values.size() && i < snapshot.features.size(); ++i) {
        values[i] = normalize_value(values[i], snapshot.features[i], mode);
    }
}

StatsSnapshot load_stats_file(const std::filesystem::path& file, size_t feature_count) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open stats file: " + file.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad stats file " + file.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw IoError("stats file must be a JSON object: " + file.string());

    StatsSnapshot snap;
    snap.features.resize(feature_count);
    for (auto& [key, value] : doc.items()) {
        size_t index = 0;
        try {
            index = std::stoul(key);
        } catch (const std::exception&) {
            throw IoError("stats file key is not a feature index: " + key);
        }
        if (index >= feature_count) {
            throw IoError("stats file index out of range: " + key);
        }
        StatsSnapshot::Entry& e = snap.features[index];
        e.min = value.at("min").get<double>();
        e.max = value.at("max").get<double>();
        e.mean = value.at("mean").get<double>();
        e.std = value.at("std").get<double>();
        e.q25 = value.at("q25").get<double>();
        e.q75 = value.at("q75").get<double>();
        e.n = 1; // marks the entry as usable
    }
    return snap;
}

void save_stats_file(const StatsSnapshot& snapshot, const std::filesystem::path& file) {
    nlohmann::json doc = nlohmann::json::object();
    for (size_t i = 0; i < snapshot.features.size(); ++i) {
        const StatsSnapshot::Entry& e = snapshot.features[i];
        if (e.n == 0) continue;
        doc[std::to_string(i)] = {{"min", e.min},   {"max", e.max}, {"mean", e.mean},
                                  {"std", e.std},   {"q25", e.q25}, {"q75", e.q75}};
    }
    std::ofstream out(file);
    if (!out) throw IoError("cannot write stats file: " + file.string());
    out << doc.dump(2) << "\n";
}

} // namespace aggstream
