#include "aggstream/learners/classifier.hpp"

#include "aggstream/error.hpp"
#include "aggstream/learners/hoeffding_tree.hpp"
#include "aggstream/learners/logistic.hpp"
#include "aggstream/learners/random_forest.hpp"

#include <cmath>
#include <fstream>

namespace aggstream {

namespace {
constexpr uint8_t kMagic[4] = {'A', 'G', 'S', 'M'};
constexpr uint16_t kFormatVersion = 1;
} // namespace

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::HoeffdingTree: return "ht";
        case ClassifierKind::AdaptiveRandomForest: return "arf";
        case ClassifierKind::Logistic: return "slr";
    }
    return "unknown";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) {
    if (text == "ht") return ClassifierKind::HoeffdingTree;
    if (text == "arf") return ClassifierKind::AdaptiveRandomForest;
    if (text == "slr") return ClassifierKind::Logistic;
    return std::nullopt;
}

double hoeffding_bound(double range, double confidence, uint64_t n) {
    return std::sqrt(range * range * std::log(1.0 / confidence) /
                     (2.0 * static_cast<double>(n)));
}

int Classifier::require_label(const Instance& instance) const {
    if (!instance.label.has_value()) {
        throw ContractViolation("train_one: unlabeled instance");
    }
    int raw = static_cast<int>(*instance.label);
    if (raw < 0 || raw > 2) {
        throw ContractViolation("train_one: label outside scheme");
    }
    return effective_label(*instance.label, scheme_);
}

void Classifier::check_features(const Instance& instance) const {
    if (instance.features.size() != static_cast<size_t>(feature_count_)) {
        throw ContractViolation("instance feature count mismatch");
    }
    for (double v : instance.features) {
        if (!std::isfinite(v)) throw ContractViolation("non-finite feature value");
    }
}

std::vector<uint8_t> serialize_model(const Classifier& model) {
    BinaryWriter out;
    for (uint8_t b : kMagic) out.u8(b);
    out.u16(kFormatVersion);
    out.u8(static_cast<uint8_t>(model.kind()));
    out.u8(static_cast<uint8_t>(model.scheme_));
    out.u32(static_cast<uint32_t>(model.feature_count_));
    out.u64(model.version_);
    model.save_payload(out);
    return out.take();
}

std::unique_ptr<Classifier> deserialize_model(std::span<const uint8_t> bytes) {
    BinaryReader in(bytes);
    for (uint8_t expected : kMagic) {
        if (in.u8() != expected) throw DecodeError("bad model magic");
    }
    uint16_t format = in.u16();
    if (format != kFormatVersion) throw DecodeError("unknown model format version");
    uint8_t kind = in.u8();
    uint8_t scheme_raw = in.u8();
    if (scheme_raw > 1) throw DecodeError("bad class scheme");
    ClassScheme scheme = static_cast<ClassScheme>(scheme_raw);
    int feature_count = static_cast<int>(in.u32());
    if (feature_count <= 0 || feature_count > 4096) throw DecodeError("bad feature count");
    uint64_t version = in.u64();

    std::unique_ptr<Classifier> model;
    switch (static_cast<ClassifierKind>(kind)) {
        case ClassifierKind::HoeffdingTree:
            model = HoeffdingTree::load_payload(scheme, feature_count, in);
            break;
        case ClassifierKind::AdaptiveRandomForest:
            model = AdaptiveRandomForest::load_payload(scheme, feature_count, in);
            break;
        case ClassifierKind::Logistic:
            model = StreamingLogisticRegression::load_payload(scheme, feature_count, in);
            break;
        default:
            throw DecodeError("unknown model kind");
    }
    model->version_ = version;
    if (!in.at_end()) throw DecodeError("trailing bytes after model payload");
    return model;
}

void save_model_file(const Classifier& model, const std::filesystem::path& file) {
    std::vector<uint8_t> bytes = serialize_model(model);
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + file.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::unique_ptr<Classifier> load_model_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + file.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

} // namespace aggstream
