#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "melaseg/dataset.hpp"
#include "melaseg/features.hpp"

namespace melaseg {

// (1 + <x, z>)^2
double polynomial_kernel(const std::vector<double>& x, const std::vector<double>& z);

// Per-column z-score fit on the training set; columns with population
// stddev < 1e-12 count as constant and map to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    static Standardizer fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> apply(const std::vector<double>& row) const;
    bool constant(size_t col) const { return stddev[col] < 1e-12; }
};

struct TrainOptions {
    double c = 1.0;
    double tol = 1e-3;                                  // KKT violation threshold
    std::uint64_t max_pair_updates = 1'000'000;
    std::uint64_t gram_cache_bytes = 2ull << 30;        // cache kernel if it fits
};

// One soft-margin classifier; coeffs[i] = alpha_i * y_i.
struct BinarySvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coeffs;
    double bias = 0;
    double c = 1.0;

    double decision(const std::vector<double>& x) const;
};

// SMO on the dual; labels must be +-1 with both classes present.
BinarySvmModel train_binary(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels, const TrainOptions& opts = {});

struct OvaSvmModel {
    std::vector<std::string> feature_order;  // the 42 column names
    Standardizer standardizer;
    BinarySvmModel mel_vs_rest;
    BinarySvmModel sk_vs_rest;
};

struct Prediction {
    std::string image_id;
    double f_mel = 0;  // raw decision values
    double f_sk = 0;
    double mel_score = 0;  // 1 / (1 + exp(-f))
    double sk_score = 0;
    LesionClass predicted = LesionClass::nevus;
};

// Two one-vs-all machines over standardized features; every image_id must
// be labelled and all three classes must appear in the training set.
OvaSvmModel train_ova(const std::vector<FeatureVector>& rows, const LabelTable& labels,
                      const TrainOptions& opts = {});

Prediction predict(const OvaSvmModel& model, const FeatureVector& row);

void save_model(const std::string& path, const OvaSvmModel& model);
OvaSvmModel load_model(const std::string& path);

}  // namespace melaseg
