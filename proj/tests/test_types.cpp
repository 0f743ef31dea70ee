#include "aggstream/types.hpp"

#include <doctest.h>

using namespace aggstream;

TEST_CASE("effective_label is the identity under ThreeClass") {
    CHECK(effective_label(ClassLabel::Normal, ClassScheme::ThreeClass) == 0);
    CHECK(effective_label(ClassLabel::Abusive, ClassScheme::ThreeClass) == 1);
    CHECK(effective_label(ClassLabel::Hateful, ClassScheme::ThreeClass) == 2);
}

TEST_CASE("effective_label folds abusive and hateful under TwoClass") {
    CHECK(effective_label(ClassLabel::Normal, ClassScheme::TwoClass) == 0);
    CHECK(effective_label(ClassLabel::Abusive, ClassScheme::TwoClass) == 1);
    CHECK(effective_label(ClassLabel::Hateful, ClassScheme::TwoClass) == 1);
}

TEST_CASE("effective_label is total and surjective onto the effective class set") {
    for (ClassScheme scheme : {ClassScheme::TwoClass, ClassScheme::ThreeClass}) {
        std::vector<bool> hit(static_cast<size_t>(num_classes(scheme)), false);
        for (ClassLabel label : {ClassLabel::Normal, ClassLabel::Abusive, ClassLabel::Hateful}) {
            int index = effective_label(label, scheme);
            REQUIRE(index >= 0);
            REQUIRE(index < num_classes(scheme));
            hit[static_cast<size_t>(index)] = true;
        }
        for (bool b : hit) CHECK(b);
    }
}

TEST_CASE("class label names round-trip") {
    for (ClassLabel label : {ClassLabel::Normal, ClassLabel::Abusive, ClassLabel::Hateful}) {
        CHECK(parse_class_label(to_string(label)) == label);
    }
    CHECK_FALSE(parse_class_label("spam").has_value());
    CHECK(effective_class_name(1, ClassScheme::TwoClass) == "aggressive");
    CHECK(effective_class_name(2, ClassScheme::ThreeClass) == "hateful");
}

TEST_CASE("class distribution argmax and sum") {
    ClassDistribution dist;
    dist.probs = {0.2, 0.5, 0.3};
    CHECK(dist.argmax() == 1);
    CHECK(dist.max_prob() == doctest::Approx(0.5));
    CHECK(dist.sum() == doctest::Approx(1.0));
}
