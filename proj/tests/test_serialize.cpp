#include "aggstream/learners/classifier.hpp"

#include "aggstream/error.hpp"
#include "aggstream/learners/hoeffding_tree.hpp"
#include "aggstream/learners/logistic.hpp"
#include "aggstream/learners/random_forest.hpp"
#include "support/streams.hpp"

#include <doctest.h>

#include <random>

using namespace aggstream;
using namespace aggstream::testsupport;

namespace {

Instance random_instance(std::mt19937_64& g, int features) {
    Instance inst;
    for (int f = 0; f < features; ++f) inst.features.push_back(rng::uniform01(g));
    return inst;
}

void check_round_trip(const Classifier& model, int features, uint64_t seed) {
    std::vector<uint8_t> bytes = serialize_model(model);
    auto restored = deserialize_model(bytes);
    CHECK(restored->kind() == model.kind());
    CHECK(restored->scheme() == model.scheme());
    CHECK(restored->feature_count() == model.feature_count());
    CHECK(restored->version() == model.version());
    std::mt19937_64 g(seed);
    for (int i = 0; i < 1000; ++i) {
        Instance probe = random_instance(g, features);
        CHECK(model.predict(probe).probs == restored->predict(probe).probs);
    }
    // serialization is stable
    CHECK(serialize_model(*restored) == bytes);
}

} // namespace

TEST_CASE("hoeffding tree round-trips with identical predictions") {
    HoeffdingTreeParams params;
    params.grace_period = 100;
    HoeffdingTree tree(ClassScheme::ThreeClass, 5, params);
    std::mt19937_64 g(7);
    for (int i = 0; i < 4000; ++i) {
        Instance inst = random_instance(g, 5);
        double x = inst.features[0];
        inst.label = x > 0.7 ? ClassLabel::Hateful
                             : (x > 0.4 ? ClassLabel::Abusive : ClassLabel::Normal);
        tree.train_one(inst);
    }
    CHECK(tree.node_count() > 1);
    check_round_trip(tree, 5, 100);
}

TEST_CASE("logistic model round-trips") {
    StreamingLogisticRegression model(ClassScheme::TwoClass, 3, LogisticParams{});
    std::mt19937_64 g(9);
    for (int i = 0; i < 500; ++i) {
        Instance inst = random_instance(g, 3);
        inst.label = inst.features[0] > 0.5 ? ClassLabel::Abusive : ClassLabel::Normal;
        model.train_one(inst);
    }
    check_round_trip(model, 3, 200);
}

TEST_CASE("random forest round-trips including monitors and rng state") {
    ForestParams params;
    params.ensemble_size = 4;
    params.drift_window = 100;
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 4, params, 21);
    auto stream = two_class_gaussian(800, 23, 2, 2);
    for (const Instance& inst : stream) forest.train_one(inst);
    check_round_trip(forest, 4, 300);

    // restored forest continues training identically (rng state preserved)
    std::vector<uint8_t> bytes = serialize_model(forest);
    auto restored = deserialize_model(bytes);
    auto more = two_class_gaussian(200, 29, 2, 2);
    for (const Instance& inst : more) {
        forest.train_one(inst);
        restored->train_one(inst);
    }
    CHECK(serialize_model(forest) == serialize_model(*restored));
}

TEST_CASE("truncated buffers fail to decode without a partial model") {
    HoeffdingTree tree(ClassScheme::TwoClass, 2, HoeffdingTreeParams{});
    std::mt19937_64 g(31);
    for (int i = 0; i < 300; ++i) {
        Instance inst = random_instance(g, 2);
        inst.label = inst.features[0] > 0.5 ? ClassLabel::Abusive : ClassLabel::Normal;
        tree.train_one(inst);
    }
    std::vector<uint8_t> bytes = serialize_model(tree);
    for (size_t cut : {size_t{0}, size_t{3}, size_t{7}, bytes.size() / 2, bytes.size() - 1}) {
        std::vector<uint8_t> truncated(bytes.begin(), bytes.begin() + static_cast<long>(cut));
        CHECK_THROWS_AS(deserialize_model(truncated), DecodeError);
    }
}

TEST_CASE("corrupt magic and unknown versions are rejected") {
    StreamingLogisticRegression model(ClassScheme::TwoClass, 1, LogisticParams{});
    std::vector<uint8_t> bytes = serialize_model(model);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize_model(bad_magic), DecodeError);
    auto bad_version = bytes;
    bad_version[4] = 0xFF;
    CHECK_THROWS_AS(deserialize_model(bad_version), DecodeError);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(deserialize_model(trailing), DecodeError);
}

TEST_CASE("model files save and load") {
    StreamingLogisticRegression model(ClassScheme::ThreeClass, 2, LogisticParams{});
    model.train_one([] {
        Instance inst;
        inst.features = {0.3, 0.9};
        inst.label = ClassLabel::Hateful;
        return inst;
    }());
    auto path = std::filesystem::temp_directory_path() / "aggstream_model_test.bin";
    save_model_file(model, path);
    auto loaded = load_model_file(path);
    CHECK(loaded->kind() == ClassifierKind::Logistic);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.bin"), IoError);
}
