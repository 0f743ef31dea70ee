#include "aggstream/types.hpp"

#include <algorithm>
#include <numeric>

namespace aggstream {

std::string_view to_string(ClassLabel label) {
    switch (label) {
        case ClassLabel::Normal: return "normal";
        case ClassLabel::Abusive: return "abusive";
        case ClassLabel::Hateful: return "hateful";
    }
    return "unknown";
}

std::optional<ClassLabel> parse_class_label(std::string_view text) {
    if (text == "normal") return ClassLabel::Normal;
    if (text == "abusive") return ClassLabel::Abusive;
    if (text == "hateful") return ClassLabel::Hateful;
    return std::nullopt;
}

std::string_view effective_class_name(int index, ClassScheme scheme) {
    if (index == 0) return "normal";
    if (scheme == ClassScheme::TwoClass) return "aggressive";
    return index == 1 ? "abusive" : "hateful";
}

int ClassDistribution::argmax() const {
    if (probs.empty()) return 0;
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double ClassDistribution::max_prob() const {
    if (probs.empty()) return 0.0;
    return *std::max_element(probs.begin(), probs.end());
}

double ClassDistribution::sum() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

} // namespace aggstream
