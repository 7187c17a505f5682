#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "melaseg/dataset.hpp"
#include "melaseg/errors.hpp"
#include "melaseg/evaluation.hpp"
#include "melaseg/features.hpp"
#include "melaseg/image_io.hpp"
#include "melaseg/parallel.hpp"
#include "melaseg/segmentation.hpp"
#include "melaseg/svm.hpp"

namespace fs = std::filesystem;
using namespace melaseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;  // some items failed / runtime error
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("MELASEG_THREADS")) {
        int v = 0;
        std::string s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
            throw UsageError("MELASEG_THREADS must be a positive integer, got '" + s + "'");
        return v;
    }
    return 1;
}

std::vector<double> parse_c_list(const std::string& spec) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= spec.size()) {
        size_t comma = spec.find(',', pos);
        std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        double v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !(v > 0))
            throw UsageError("--c expects positive numbers separated by commas, got '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw UsageError("--c expects at least one value");
    return out;
}

DiskSeed parse_lesion_seed(const std::string& spec) {
    double v[3];
    size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        size_t comma = spec.find(',', pos);
        bool last = k == 2;
        if (last != (comma == std::string::npos))
            throw UsageError("--lesion-seed expects x,y,r");
        std::string tok = spec.substr(pos, last ? std::string::npos : comma - pos);
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v[k]);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw UsageError("--lesion-seed expects numbers x,y,r, got '" + tok + "'");
        pos = comma + 1;
    }
    if (!(v[2] > 0)) throw UsageError("--lesion-seed radius must be positive");
    return {v[0], v[1], v[2]};
}

// Runs fn per item; failures are logged in item order after the pool joins
// so output is stable across thread counts. Returns the failure count.
template <typename Item, typename Fn>
size_t for_each_item(const std::vector<Item>& items, int threads, Fn fn) {
    std::vector<std::string> errors(items.size());
    parallel_for(items.size(), threads, [&](size_t k) {
        try {
            fn(items[k], k);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    });
    size_t failures = 0;
    for (size_t k = 0; k < items.size(); ++k) {
        if (errors[k].empty()) continue;
        std::cerr << "skip " << items[k].image_id << ": " << errors[k] << '\n';
        ++failures;
    }
    return failures;
}

struct SegmentArgs {
    std::string input, output;
    std::string seed_mode = "auto";
    std::string lesion_seed;
    int se_radius = kDefaultSeRadius;
    int threads = 0;
    int max_dim = 0;
};

int cmd_segment(const SegmentArgs& a) {
    SeedSpec seeds;
    if (a.seed_mode == "manual") {
        if (a.lesion_seed.empty()) throw UsageError("--seed-mode manual requires --lesion-seed");
        seeds.mode = SeedSpec::Mode::manual;
        seeds.lesion_disk = parse_lesion_seed(a.lesion_seed);
    } else if (!a.lesion_seed.empty()) {
        throw UsageError("--lesion-seed only applies with --seed-mode manual");
    }
    int threads = resolve_threads(a.threads);
    auto images = list_images(a.input);
    fs::create_directories(a.output);
    size_t failures = for_each_item(images, threads, [&](const ImageEntry& item, size_t) {
        RgbImage img = load_image(item.path);
        if (a.max_dim > 0) img = resize_max_dim(img, a.max_dim);
        BinaryMask mask = segment(img, seeds, a.se_radius);
        write_mask(mask, mask_path(a.output, item.image_id));
    });
    std::cout << "segmented " << (images.size() - failures) << "/" << images.size() << " images\n";
    return failures ? kExitPartial : kExitOk;
}

struct ExtractArgs {
    std::string input, masks, output;
    double delta = kDefaultFtsDelta;
    int ngtdm_levels = kDefaultNgtdmLevels;
    int glcm_levels = kDefaultGlcmLevels;
    int threads = 0;
    int max_dim = 0;
};

int cmd_extract(const ExtractArgs& a) {
    int threads = resolve_threads(a.threads);
    FeatureParams params{a.delta, a.ngtdm_levels, a.glcm_levels};
    auto images = list_images(a.input);
    std::vector<std::optional<FeatureVector>> slots(images.size());
    size_t failures = for_each_item(images, threads, [&](const ImageEntry& item, size_t k) {
        fs::path mpath = mask_path(a.masks, item.image_id);
        if (!fs::exists(mpath)) throw IoError("no mask " + mpath.string());
        RgbImage img = load_image(item.path);
        if (a.max_dim > 0) img = resize_max_dim(img, a.max_dim);
        BinaryMask mask = load_mask(mpath);
        slots[k] = extract_features(item.image_id, img, mask, params);
    });
    std::vector<FeatureVector> rows;  // list_images is already id-sorted
    for (auto& s : slots)
        if (s) rows.push_back(std::move(*s));
    write_features_csv(a.output, rows);
    std::cout << "extracted " << rows.size() << "/" << images.size() << " feature rows\n";
    return failures ? kExitPartial : kExitOk;
}

struct TrainArgs {
    std::string input, labels, model;
    std::string c_list = "1";
};

double training_accuracy(const OvaSvmModel& model, const std::vector<FeatureVector>& rows,
                         const LabelTable& labels) {
    size_t correct = 0;
    for (const auto& row : rows)
        if (predict(model, row).predicted == labels.entries.at(row.image_id)) ++correct;
    return static_cast<double>(correct) / rows.size();
}

int cmd_train(const TrainArgs& a) {
    std::vector<double> c_values = parse_c_list(a.c_list);
    auto rows = load_features_csv(a.input);
    if (rows.empty()) throw FormatError(a.input + ": no feature rows to train on");
    std::sort(rows.begin(), rows.end(),
              [](const FeatureVector& x, const FeatureVector& y) { return x.image_id < y.image_id; });
    LabelTable labels = load_labels(a.labels);
    std::string missing;
    for (const auto& row : rows)
        if (!labels.entries.count(row.image_id))
            missing += (missing.empty() ? "" : ", ") + row.image_id;
    if (!missing.empty()) throw FormatError("images without labels: " + missing);

    std::optional<OvaSvmModel> best;
    double best_acc = -1;
    char buf[64];
    for (double c : c_values) {
        TrainOptions opts;
        opts.c = c;
        OvaSvmModel model = train_ova(rows, labels, opts);
        double acc = training_accuracy(model, rows, labels);
        std::snprintf(buf, sizeof buf, "%g training_accuracy %.6f", c, acc);
        std::cout << "c " << buf << '\n';
        if (acc > best_acc) {
            best_acc = acc;
            best = std::move(model);
        }
    }

    auto task_accuracy = [&](const BinarySvmModel& m, LesionClass positive) {
        size_t correct = 0;
        for (const auto& row : rows) {
            std::vector<double> x =
                best->standardizer.apply(std::vector<double>(row.values.begin(), row.values.end()));
            bool pred = m.decision(x) > 0;
            bool truth = labels.entries.at(row.image_id) == positive;
            correct += pred == truth;
        }
        return static_cast<double>(correct) / rows.size();
    };
    std::snprintf(buf, sizeof buf, "%g", best->mel_vs_rest.c);
    std::cout << "selected_c " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.6f", task_accuracy(best->mel_vs_rest, LesionClass::melanoma));
    std::cout << "melanoma_vs_rest training_accuracy " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.6f",
                  task_accuracy(best->sk_vs_rest, LesionClass::seborrheic_keratosis));
    std::cout << "sk_vs_rest training_accuracy " << buf << '\n';
    save_model(a.model, *best);
    std::cout << "model " << a.model << '\n';
    return kExitOk;
}

struct PredictArgs {
    std::string input, model, output;
};

int cmd_predict(const PredictArgs& a) {
    OvaSvmModel model = load_model(a.model);
    auto rows = load_features_csv(a.input);
    std::vector<SubmissionRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {  // input order preserved
        Prediction p = predict(model, row);
        out.push_back({p.image_id, p.mel_score, p.sk_score});
    }
    write_submission(out, a.output);
    std::cout << "predicted " << out.size() << " rows\n";
    return kExitOk;
}

struct EvaluateArgs {
    std::string input, masks, labels, output;
};

int cmd_evaluate(const EvaluateArgs& a) {
    if (a.masks.empty() == a.labels.empty())
        throw UsageError("evaluate needs exactly one of --masks (segmentation) or --labels "
                         "(classification)");
    if (!a.masks.empty()) {
        auto pred = list_masks(a.input);
        auto truth = list_masks(a.masks);
        std::string only_pred, only_truth;
        {
            size_t i = 0, j = 0;
            while (i < pred.size() || j < truth.size()) {
                if (j >= truth.size() || (i < pred.size() && pred[i].image_id < truth[j].image_id))
                    only_pred += (only_pred.empty() ? "" : ", ") + pred[i++].image_id;
                else if (i >= pred.size() || truth[j].image_id < pred[i].image_id)
                    only_truth += (only_truth.empty() ? "" : ", ") + truth[j++].image_id;
                else
                    ++i, ++j;
            }
        }
        if (!only_pred.empty() || !only_truth.empty())
            throw FormatError("mask sets differ" +
                              (only_pred.empty() ? "" : "; only predicted: " + only_pred) +
                              (only_truth.empty() ? "" : "; only truth: " + only_truth));
        std::vector<SegItem> items;
        for (size_t k = 0; k < pred.size(); ++k)
            items.push_back(
                {pred[k].image_id,
                 metrics(confusion(load_mask(pred[k].path), load_mask(truth[k].path)))});
        SegReport report = seg_report(std::move(items));
        std::cout << format_seg_report(report);
        if (!a.output.empty()) write_seg_csv(report, a.output);
    } else {
        auto rows = load_submission(a.input);
        LabelTable labels = load_labels(a.labels);
        std::string missing;
        for (const auto& row : rows)
            if (!labels.entries.count(row.image_id))
                missing += (missing.empty() ? "" : ", ") + row.image_id;
        if (!missing.empty()) throw FormatError("submission rows without labels: " + missing);
        EvalReport report = classification_metrics(rows, labels);
        std::string text = format_report(report);
        std::cout << text;
        if (!a.output.empty()) {
            std::ofstream out(a.output);
            if (!out || !(out << text).flush()) throw IoError("cannot write " + a.output);
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"melanoma segmentation, feature extraction and classification pipeline"};
    app.require_subcommand(1);

    SegmentArgs seg;
    auto* seg_cmd = app.add_subcommand("segment", "segment a directory of lesion images");
    seg_cmd->add_option("--input", seg.input, "directory of JPEG/PNG images")->required();
    seg_cmd->add_option("--output", seg.output, "directory for <id>_segmentation.png masks")
        ->required();
    seg_cmd->add_option("--seed-mode", seg.seed_mode, "marker sampling mode")
        ->check(CLI::IsMember({"auto", "manual"}));
    seg_cmd->add_option("--lesion-seed", seg.lesion_seed, "manual lesion disk x,y,r");
    seg_cmd->add_option("--se-radius", seg.se_radius, "morphology structuring-element radius")
        ->check(CLI::Range(0, 64));
    seg_cmd->add_option("--threads", seg.threads, "worker threads (or MELASEG_THREADS)")
        ->check(CLI::PositiveNumber);
    seg_cmd->add_option("--max-dim", seg.max_dim, "downscale so max(width,height) <= this")
        ->check(CLI::PositiveNumber);

    ExtractArgs ext;
    auto* ext_cmd = app.add_subcommand("extract", "compute feature vectors for masked images");
    ext_cmd->add_option("--input", ext.input, "directory of JPEG/PNG images")->required();
    ext_cmd->add_option("--masks", ext.masks, "directory of <id>_segmentation.png masks")
        ->required();
    ext_cmd->add_option("--output", ext.output, "features CSV path")->required();
    ext_cmd->add_option("--delta", ext.delta, "fuzzy texture spectrum ramp half-width")
        ->check(CLI::PositiveNumber);
    ext_cmd->add_option("--ngtdm-levels", ext.ngtdm_levels, "busyness quantization levels")
        ->check(CLI::Range(2, 256));
    ext_cmd->add_option("--glcm-levels", ext.glcm_levels, "per-channel color GLCM levels")
        ->check(CLI::Range(2, 8));
    ext_cmd->add_option("--threads", ext.threads, "worker threads (or MELASEG_THREADS)")
        ->check(CLI::PositiveNumber);
    ext_cmd->add_option("--max-dim", ext.max_dim, "downscale so max(width,height) <= this")
        ->check(CLI::PositiveNumber);

    TrainArgs trn;
    auto* trn_cmd = app.add_subcommand("train", "train the one-vs-all SVM pair");
    trn_cmd->add_option("--input", trn.input, "features CSV")->required();
    trn_cmd->add_option("--labels", trn.labels, "ground-truth labels CSV")->required();
    trn_cmd->add_option("--model", trn.model, "output model path")->required();
    trn_cmd->add_option("--c", trn.c_list, "penalty parameter; comma list sweeps and keeps the "
                                           "best 3-class training accuracy");

    PredictArgs prd;
    auto* prd_cmd = app.add_subcommand("predict", "score feature vectors with a trained model");
    prd_cmd->add_option("--input", prd.input, "features CSV")->required();
    prd_cmd->add_option("--model", prd.model, "model file from train")->required();
    prd_cmd->add_option("--output", prd.output, "submission CSV path")->required();

    EvaluateArgs evl;
    auto* evl_cmd = app.add_subcommand("evaluate", "score masks or a submission against truth");
    evl_cmd->add_option("--input", evl.input, "predicted mask directory or submission CSV")
        ->required();
    evl_cmd->add_option("--masks", evl.masks, "ground-truth mask directory (segmentation mode)");
    evl_cmd->add_option("--labels", evl.labels, "ground-truth labels CSV (classification mode)");
    evl_cmd->add_option("--output", evl.output, "also write the report here (CSV for masks)");

    try {
        app.parse(argc, argv);
        if (seg_cmd->parsed()) return cmd_segment(seg);
        if (ext_cmd->parsed()) return cmd_extract(ext);
        if (trn_cmd->parsed()) return cmd_train(trn);
        if (prd_cmd->parsed()) return cmd_predict(prd);
        if (evl_cmd->parsed()) return cmd_evaluate(evl);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;  // keep 0 for --help
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartial;
    }
}
