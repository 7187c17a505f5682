#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "melaseg/dataset.hpp"
#include "melaseg/types.hpp"

namespace melaseg {

struct Confusion {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Lesion = positive, exact pixel counts; masks must share dimensions.
Confusion confusion(const BinaryMask& pred, const BinaryMask& truth);

// 0/0 denominators score a vacuous 1.0 and drop the `defined` flag so
// reports can mark them.
struct Ratio {
    double value = 1.0;
    bool defined = true;
};

struct Metrics {
    Ratio accuracy;
    Ratio dice;
    Ratio jaccard;
    Ratio sensitivity;
    Ratio specificity;
};

Metrics metrics(const Confusion& c);

struct SegItem {
    std::string item;
    Metrics m;
};

// Overall block is the unweighted per-item mean of each metric.
struct SegReport {
    std::vector<SegItem> items;
    Metrics overall;
};

SegReport seg_report(std::vector<SegItem> items);
std::string format_seg_report(const SegReport& report);
// item,accuracy,dice,jaccard,sensitivity,specificity; final row item=overall
void write_seg_csv(const SegReport& report, const std::filesystem::path& path);

struct BinaryReport {
    Confusion confusion;
    Metrics m;
};

struct EvalReport {
    BinaryReport melanoma;
    BinaryReport seborrheic_keratosis;
    Ratio overall_accuracy;  // 3-class agreement
    std::uint64_t n = 0;
};

// Scores a submission against labels: the two per-task confusions at the
// 0.5 score threshold plus 3-class accuracy. Every row needs a label.
EvalReport classification_metrics(const std::vector<SubmissionRow>& rows,
                                  const LabelTable& labels);

std::string format_report(const EvalReport& report);

}  // namespace melaseg
