#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "melaseg/errors.hpp"
#include "melaseg/evaluation.hpp"

using namespace melaseg;
namespace fs = std::filesystem;

namespace {

BinaryMask mask_of(int w, int h, std::initializer_list<std::pair<int, int>> lesion) {
    BinaryMask m(w, h);
    for (auto [x, y] : lesion) m.set(x, y, true);
    return m;
}

BinaryMask random_mask(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    BinaryMask m(w, h);
    for (auto& v : m.labels) v = rng() % 2;
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// truth: 8 pixels on the top row; pred: 6 of them plus 2 strays
const Confusion kPlanted{6, 2, 90, 2};

std::vector<SubmissionRow> fixture_rows() {
    return {
        {"r0", 0.9, 0.1},  {"r1", 0.8, 0.0}, {"r2", 0.2, 0.1},  // melanoma
        {"r3", 0.1, 0.9},  {"r4", 0.0, 0.7}, {"r5", 0.3, 0.2},  // keratosis
        {"r6", 0.1, 0.0},  {"r7", 0.0, 0.2}, {"r8", 0.6, 0.2},  {"r9", 0.2, 0.55},  // nevus
    };
}

LabelTable fixture_labels() {
    LabelTable t;
    for (const char* id : {"r0", "r1", "r2"}) t.entries[id] = LesionClass::melanoma;
    for (const char* id : {"r3", "r4", "r5"}) t.entries[id] = LesionClass::seborrheic_keratosis;
    for (const char* id : {"r6", "r7", "r8", "r9"}) t.entries[id] = LesionClass::nevus;
    return t;
}

}  // namespace

TEST_CASE("pixel confusion counts a planted overlap") {
    BinaryMask truth = mask_of(10, 10, {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {7, 0}});
    BinaryMask pred = mask_of(10, 10, {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {8, 0}, {9, 0}});
    Confusion c = confusion(pred, truth);
    CHECK(c.tp == 6);
    CHECK(c.fp == 2);
    CHECK(c.fn == 2);
    CHECK(c.tn == 90);

    Confusion same = confusion(truth, truth);
    CHECK(same.tp == 8);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);
    CHECK(same.tn == 92);

    BinaryMask inverted(10, 10);
    for (size_t i = 0; i < truth.labels.size(); ++i) inverted.labels[i] = truth.labels[i] ? 0 : 1;
    Confusion opp = confusion(inverted, truth);
    CHECK(opp.tp == 0);
    CHECK(opp.tn == 0);
    CHECK(opp.fp == 92);
    CHECK(opp.fn == 8);

    CHECK_THROWS_AS(confusion(BinaryMask(9, 10), truth), PreconditionError);
}

TEST_CASE("metric values on the planted confusion") {
    Metrics m = metrics(kPlanted);
    CHECK(m.accuracy.value == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(m.dice.value == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.jaccard.value == doctest::Approx(0.60).epsilon(1e-12));
    CHECK(m.sensitivity.value == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.specificity.value == doctest::Approx(90.0 / 92.0).epsilon(1e-12));
    CHECK((m.accuracy.defined && m.dice.defined && m.jaccard.defined && m.sensitivity.defined &&
           m.specificity.defined));
}

TEST_CASE("zero denominators are flagged vacuous, not divided") {
    Metrics empty = metrics(Confusion{});
    for (const Ratio* r : {&empty.accuracy, &empty.dice, &empty.jaccard, &empty.sensitivity,
                           &empty.specificity}) {
        CHECK(r->value == 1.0);
        CHECK(!r->defined);
    }

    Metrics tn_only = metrics(Confusion{0, 0, 5, 0});
    CHECK(tn_only.accuracy.value == 1.0);
    CHECK(tn_only.accuracy.defined);
    CHECK(tn_only.specificity.value == 1.0);
    CHECK(tn_only.specificity.defined);
    CHECK(!tn_only.dice.defined);
    CHECK(!tn_only.jaccard.defined);
    CHECK(!tn_only.sensitivity.defined);
}

TEST_CASE("disjoint prediction scores zero overlap, perfect scores one") {
    Metrics disjoint = metrics(Confusion{0, 3, 93, 4});
    CHECK(disjoint.dice.value == 0.0);
    CHECK(disjoint.jaccard.value == 0.0);
    CHECK(disjoint.dice.defined);

    Metrics perfect = metrics(Confusion{10, 0, 90, 0});
    for (const Ratio* r : {&perfect.accuracy, &perfect.dice, &perfect.jaccard,
                           &perfect.sensitivity, &perfect.specificity}) {
        CHECK(r->value == 1.0);
        CHECK(r->defined);
    }
}

TEST_CASE("dice is 2j/(1+j) and everything stays in [0,1]") {
    std::mt19937 rng(515);
    for (int k = 0; k < 1000; ++k) {
        Confusion c{rng() % 21, rng() % 21, rng() % 21, rng() % 21};
        Metrics m = metrics(c);
        double j = m.jaccard.value;
        CHECK(std::abs(m.dice.value - 2 * j / (1 + j)) < 1e-12);
        for (const Ratio* r : {&m.accuracy, &m.dice, &m.jaccard, &m.sensitivity, &m.specificity}) {
            CHECK(r->value >= 0.0);
            CHECK(r->value <= 1.0);
        }
    }
}

TEST_CASE("swapping prediction and truth only moves the directional metrics") {
    BinaryMask a = random_mask(12, 9, 3), b = random_mask(12, 9, 4);
    Metrics ab = metrics(confusion(a, b)), ba = metrics(confusion(b, a));
    CHECK(ab.accuracy.value == ba.accuracy.value);
    CHECK(ab.dice.value == ba.dice.value);
    CHECK(ab.jaccard.value == ba.jaccard.value);

    Confusion c = confusion(a, b);
    // the swapped sensitivity is the original precision
    CHECK(ba.sensitivity.value ==
          doctest::Approx(double(c.tp) / double(c.tp + c.fp)).epsilon(1e-15));

    Metrics lop = metrics(Confusion{6, 1, 90, 3});
    Metrics lop_swapped = metrics(Confusion{6, 3, 90, 1});
    CHECK(lop.sensitivity.value != lop_swapped.sensitivity.value);
}

TEST_CASE("report overall is the unweighted item mean") {
    SegReport r = seg_report({{"a", metrics(kPlanted)},
                              {"b", metrics(Confusion{10, 0, 90, 0})},
                              {"c", metrics(Confusion{0, 3, 93, 4})}});
    REQUIRE(r.items.size() == 3);
    CHECK(std::abs(r.overall.accuracy.value - (0.96 + 1.0 + 0.93) / 3) < 1e-12);
    CHECK(std::abs(r.overall.dice.value - (0.75 + 1.0 + 0.0) / 3) < 1e-12);
    CHECK(std::abs(r.overall.jaccard.value - (0.6 + 1.0 + 0.0) / 3) < 1e-12);
    CHECK(r.overall.sensitivity.defined);

    // one vacuous item poisons the overall flag but keeps the mean
    SegReport v = seg_report({{"a", metrics(kPlanted)}, {"tn", metrics(Confusion{0, 0, 5, 0})}});
    CHECK(!v.overall.sensitivity.defined);
    CHECK(v.overall.accuracy.defined);
    CHECK(std::abs(v.overall.sensitivity.value - (0.75 + 1.0) / 2) < 1e-12);

    SegReport none = seg_report({});
    CHECK(none.items.empty());
    CHECK(none.overall.accuracy.value == 1.0);
}

TEST_CASE("segmentation report text and csv bytes") {
    SegReport r = seg_report({{"x", metrics(kPlanted)}});
    CHECK(format_seg_report(r) ==
          "item x accuracy 0.960000 dice 0.750000 jaccard 0.600000 sensitivity 0.750000"
          " specificity 0.978261\n"
          "overall accuracy 0.960000 dice 0.750000 jaccard 0.600000 sensitivity 0.750000"
          " specificity 0.978261\n");

    fs::path dir = fs::current_path() / "scratch" / "eval_csv";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path csv = dir / "seg.csv";
    write_seg_csv(r, csv);
    CHECK(slurp(csv) ==
          "item,accuracy,dice,jaccard,sensitivity,specificity\n"
          "x,0.960000,0.750000,0.600000,0.750000,0.978261\n"
          "overall,0.960000,0.750000,0.600000,0.750000,0.978261\n");

    SegReport vac = seg_report({{"y", metrics(Confusion{0, 0, 5, 0})}});
    CHECK(format_seg_report(vac) ==
          "item y accuracy 1.000000 dice 1.000000 jaccard 1.000000 sensitivity 1.000000"
          " specificity 1.000000 vacuous:dice,jaccard,sensitivity\n"
          "overall accuracy 1.000000 dice 1.000000 jaccard 1.000000 sensitivity 1.000000"
          " specificity 1.000000 vacuous:dice,jaccard,sensitivity\n");
}

TEST_CASE("classification fixture is counted by hand") {
    EvalReport r = classification_metrics(fixture_rows(), fixture_labels());
    CHECK(r.n == 10);
    CHECK(r.melanoma.confusion.tp == 2);
    CHECK(r.melanoma.confusion.fp == 1);
    CHECK(r.melanoma.confusion.fn == 1);
    CHECK(r.melanoma.confusion.tn == 6);
    CHECK(r.seborrheic_keratosis.confusion.tp == 2);
    CHECK(r.seborrheic_keratosis.confusion.fp == 1);
    CHECK(r.seborrheic_keratosis.confusion.fn == 1);
    CHECK(r.seborrheic_keratosis.confusion.tn == 6);
    CHECK(r.overall_accuracy.value == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.overall_accuracy.defined);

    CHECK(format_report(r) ==
          "n 10\n"
          "melanoma tp 2 fp 1 tn 6 fn 1\n"
          "melanoma accuracy 0.800000 dice 0.666667 jaccard 0.500000 sensitivity 0.666667"
          " specificity 0.857143\n"
          "seborrheic_keratosis tp 2 fp 1 tn 6 fn 1\n"
          "seborrheic_keratosis accuracy 0.800000 dice 0.666667 jaccard 0.500000"
          " sensitivity 0.666667 specificity 0.857143\n"
          "overall_accuracy 0.600000\n");
}

TEST_CASE("threshold and tie rules") {
    LabelTable t;
    t.entries["a"] = LesionClass::melanoma;
    // a score of exactly 0.5 is not a positive call
    EvalReport border = classification_metrics({{"a", 0.5, 0.5}}, t);
    CHECK(border.melanoma.confusion.fn == 1);
    CHECK(border.overall_accuracy.value == 0.0);

    // equal scores above threshold resolve to melanoma
    EvalReport tie = classification_metrics({{"a", 0.7, 0.7}}, t);
    CHECK(tie.overall_accuracy.value == 1.0);
}

TEST_CASE("degenerate caller scenarios") {
    LabelTable t;
    for (int k = 0; k < 10; ++k)
        t.entries["i" + std::to_string(k)] =
            k == 0 ? LesionClass::melanoma : LesionClass::nevus;
    std::vector<SubmissionRow> always_mel;
    for (int k = 0; k < 10; ++k) always_mel.push_back({"i" + std::to_string(k), 1.0, 0.0});
    EvalReport r = classification_metrics(always_mel, t);
    CHECK(r.melanoma.m.sensitivity.value == 1.0);
    CHECK(r.melanoma.m.specificity.value == 0.0);
    CHECK(r.overall_accuracy.value == doctest::Approx(0.1).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(classification_metrics({{"ghost", 1.0, 0.0}}, t),
                         "no label for image ghost", PreconditionError);

    EvalReport none = classification_metrics({}, t);
    CHECK(none.n == 0);
    CHECK(!none.overall_accuracy.defined);
    CHECK(format_report(none).find("overall_accuracy 1.000000 vacuous\n") != std::string::npos);
}
