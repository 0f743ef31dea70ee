#include "aggstream/learners/random_forest.hpp"

#include "aggstream/learners/hoeffding_tree.hpp"
#include "support/streams.hpp"

#include <doctest.h>

#include <random>

using namespace aggstream;
using namespace aggstream::testsupport;

namespace {

Instance make_instance(std::vector<double> x, std::optional<ClassLabel> label = {}) {
    Instance inst;
    inst.features = std::move(x);
    inst.label = label;
    return inst;
}

ForestParams degenerate_params(int features) {
    ForestParams params;
    params.ensemble_size = 1;
    params.bagging = false; // k == 1 for every instance
    params.drift_detection = false;
    params.subspace_size = features;
    return params;
}

} // namespace

TEST_CASE("subspace size follows floor(sqrt(M)) + 1") {
    ForestParams params;
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 16, params, 1);
    CHECK(forest.subspace_size() == 5);
    for (int m = 0; m < forest.ensemble_size(); ++m) {
        CHECK(forest.member_subset(m).size() == 5);
    }
    AdaptiveRandomForest nine(ClassScheme::TwoClass, 9, params, 1);
    CHECK(nine.subspace_size() == 4);

    ForestParams capped;
    capped.subspace_size = 100;
    AdaptiveRandomForest all(ClassScheme::TwoClass, 6, capped, 1);
    CHECK(all.subspace_size() == 6);
}

TEST_CASE("member subsets differ across the ensemble") {
    ForestParams params;
    params.ensemble_size = 10;
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 16, params, 42);
    bool any_differ = false;
    for (int m = 1; m < forest.ensemble_size(); ++m) {
        if (forest.member_subset(m) != forest.member_subset(0)) any_differ = true;
    }
    CHECK(any_differ);
}

TEST_CASE("poisson lambda zero skips all training") {
    ForestParams params;
    params.ensemble_size = 3;
    params.poisson_lambda = 0.0; // k == 0 for every member
    params.drift_detection = false;
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 2, params, 7);
    Instance probe = make_instance({0.3, 0.7});
    auto before = forest.predict(probe).probs;
    std::mt19937_64 g(11);
    for (int i = 0; i < 500; ++i) {
        forest.train_one(make_instance({rng::uniform01(g), rng::uniform01(g)},
                                       ClassLabel::Abusive));
    }
    CHECK(forest.predict(probe).probs == before);
    for (int m = 0; m < forest.ensemble_size(); ++m) {
        CHECK(forest.member_tree(m).node_count() == 1);
        CHECK(forest.member_tree(m).leaf_views()[0].class_counts[1] == 0.0);
    }
}

TEST_CASE("prediction is the unweighted mean of member distributions") {
    ForestParams params;
    params.ensemble_size = 2;
    params.bagging = false;
    params.drift_detection = false;
    params.subspace_size = 1;
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 1, params, 3);
    // train members identically: mean of identical distributions is itself
    std::mt19937_64 g(5);
    for (int i = 0; i < 50; ++i) {
        forest.train_one(make_instance({rng::uniform01(g)}, ClassLabel::Normal));
    }
    Instance probe = make_instance({0.5});
    ClassDistribution member0 = forest.member_tree(0).predict(probe);
    ClassDistribution member1 = forest.member_tree(1).predict(probe);
    ClassDistribution combined = forest.predict(probe);
    for (size_t c = 0; c < 2; ++c) {
        CHECK(combined.probs[c] ==
              doctest::Approx(0.5 * (member0.probs[c] + member1.probs[c])));
    }

    // untrained 3-class forest: uniform
    AdaptiveRandomForest fresh(ClassScheme::ThreeClass, 2, params, 3);
    ClassDistribution uniform = fresh.predict(make_instance({0.1, 0.2}));
    for (double p : uniform.probs) CHECK(p == doctest::Approx(1.0 / 3.0));

    // members diverged by bagging still average elementwise
    ForestParams bagged;
    bagged.ensemble_size = 3;
    bagged.poisson_lambda = 2.0;
    bagged.drift_detection = false;
    AdaptiveRandomForest diverse(ClassScheme::TwoClass, 1, bagged, 11);
    std::mt19937_64 g2(13);
    for (int i = 0; i < 300; ++i) {
        double x = rng::uniform01(g2);
        diverse.train_one(make_instance({x}, x > 0.5 ? ClassLabel::Abusive : ClassLabel::Normal));
    }
    Instance probe2 = make_instance({0.52});
    ClassDistribution got = diverse.predict(probe2);
    for (size_t c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (int m = 0; m < diverse.ensemble_size(); ++m) {
            mean += diverse.member_tree(m).predict(probe2).probs[c];
        }
        mean /= diverse.ensemble_size();
        CHECK(got.probs[c] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("degenerate forest equals a plain hoeffding tree") {
    const int features = 6;
    ForestParams params = degenerate_params(features);
    AdaptiveRandomForest forest(ClassScheme::TwoClass, features, params, 99);
    HoeffdingTree tree(ClassScheme::TwoClass, features, params.tree);

    auto stream = two_class_gaussian(3000, 101, 3, 3);
    for (const Instance& inst : stream) {
        CHECK(forest.predict(inst).probs == tree.predict(inst).probs);
        forest.train_one(inst);
        tree.train_one(inst);
    }
    CHECK(forest.member_tree(0).node_count() == tree.node_count());
}

TEST_CASE("drift detection resets a member after a concept flip") {
    ForestParams params;
    params.ensemble_size = 3;
    params.bagging = false;
    params.subspace_size = 2;
    params.drift_window = 200;
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 2, params, 17);
    std::mt19937_64 g(19);
    auto label_of = [](double x, bool flipped) {
        bool aggressive = x > 0.5;
        if (flipped) aggressive = !aggressive;
        return aggressive ? ClassLabel::Abusive : ClassLabel::Normal;
    };
    for (int i = 0; i < 3000; ++i) {
        double x = rng::uniform01(g);
        forest.train_one(make_instance({x, rng::uniform01(g)}, label_of(x, false)));
    }
    CHECK(forest.total_resets() == 0);
    for (int i = 0; i < 3000; ++i) {
        double x = rng::uniform01(g);
        forest.train_one(make_instance({x, rng::uniform01(g)}, label_of(x, true)));
    }
    CHECK(forest.total_resets() > 0);

    // accuracy recovers on the flipped concept
    uint64_t correct = 0;
    int probe_n = 1000;
    for (int i = 0; i < probe_n; ++i) {
        double x = rng::uniform01(g);
        Instance inst = make_instance({x, rng::uniform01(g)}, label_of(x, true));
        if (forest.predict(inst).argmax() == effective_label(*inst.label, ClassScheme::TwoClass)) {
            ++correct;
        }
        forest.train_one(inst);
    }
    CHECK(static_cast<double>(correct) / probe_n > 0.8);
}

TEST_CASE("forest replicas defer drift decisions to the barrier") {
    ForestParams params;
    params.ensemble_size = 2;
    params.bagging = true;
    params.poisson_lambda = 6.0;
    params.tree.grace_period = 100000; // keep the barrier from splitting counts away
    AdaptiveRandomForest forest(ClassScheme::TwoClass, 2, params, 23);
    auto stream = two_class_gaussian(400, 103, 2, 0);

    auto r1 = forest.fork_replica(rng::replica_salt(1, 0, 0));
    auto r2 = forest.fork_replica(rng::replica_salt(1, 0, 1));
    for (size_t i = 0; i < 200; ++i) r1->train_one(stream[i]);
    for (size_t i = 200; i < 400; ++i) r2->train_one(stream[i]);

    // parent untouched until the merge
    CHECK(forest.member_tree(0).leaf_views()[0].class_counts[0] == 0.0);

    std::vector<std::unique_ptr<Classifier>> replicas;
    replicas.push_back(std::move(r1));
    replicas.push_back(std::move(r2));
    forest.merge_replicas(std::move(replicas));

    double total = 0.0;
    for (const auto& leaf : forest.member_tree(0).leaf_views()) {
        for (double c : leaf.class_counts) total += c;
    }
    CHECK(total > 0.0); // bagging trained the member a poisson-weighted count

    // the same salts replay byte-identically
    AdaptiveRandomForest twin(ClassScheme::TwoClass, 2, params, 23);
    auto t1 = twin.fork_replica(rng::replica_salt(1, 0, 0));
    auto t2 = twin.fork_replica(rng::replica_salt(1, 0, 1));
    for (size_t i = 0; i < 200; ++i) t1->train_one(stream[i]);
    for (size_t i = 200; i < 400; ++i) t2->train_one(stream[i]);
    std::vector<std::unique_ptr<Classifier>> twin_replicas;
    twin_replicas.push_back(std::move(t1));
    twin_replicas.push_back(std::move(t2));
    twin.merge_replicas(std::move(twin_replicas));
    CHECK(serialize_model(twin) == serialize_model(forest));
}
