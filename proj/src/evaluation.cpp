#include "melaseg/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

Ratio ratio(double num, double den) {
    if (den == 0) return {1.0, false};  // vacuous: nothing to get wrong
    return {num / den, true};
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// "accuracy 0.9 dice 1.0 ..." plus a marker naming vacuous entries
std::string metric_fields(const Metrics& m) {
    std::ostringstream s;
    s << "accuracy " << fmt6(m.accuracy.value) << " dice " << fmt6(m.dice.value) << " jaccard "
      << fmt6(m.jaccard.value) << " sensitivity " << fmt6(m.sensitivity.value) << " specificity "
      << fmt6(m.specificity.value);
    std::string vac;
    auto mark = [&](const Ratio& r, const char* name) {
        if (!r.defined) vac += std::string(vac.empty() ? "" : ",") + name;
    };
    mark(m.accuracy, "accuracy");
    mark(m.dice, "dice");
    mark(m.jaccard, "jaccard");
    mark(m.sensitivity, "sensitivity");
    mark(m.specificity, "specificity");
    if (!vac.empty()) s << " vacuous:" << vac;
    return s.str();
}

}  // namespace

Confusion confusion(const BinaryMask& pred, const BinaryMask& truth) {
    if (pred.width != truth.width || pred.height != truth.height)
        throw PreconditionError("mask dimensions differ");
    Confusion c;
    for (size_t i = 0; i < pred.labels.size(); ++i) {
        bool p = pred.labels[i] != 0, t = truth.labels[i] != 0;
        if (p && t)
            ++c.tp;
        else if (p && !t)
            ++c.fp;
        else if (!p && t)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

Metrics metrics(const Confusion& c) {
    double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    Metrics m;
    m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
    m.dice = ratio(2 * tp, 2 * tp + fp + fn);
    m.jaccard = ratio(tp, tp + fp + fn);
    m.sensitivity = ratio(tp, tp + fn);
    m.specificity = ratio(tn, tn + fp);
    return m;
}

SegReport seg_report(std::vector<SegItem> items) {
    SegReport r;
    r.items = std::move(items);
    if (r.items.empty()) return r;
    auto fold = [&](Ratio Metrics::* field) {
        Ratio out{0.0, true};
        for (const auto& it : r.items) {
            out.value += (it.m.*field).value;
            out.defined = out.defined && (it.m.*field).defined;
        }
        out.value /= r.items.size();
        return out;
    };
    r.overall.accuracy = fold(&Metrics::accuracy);
    r.overall.dice = fold(&Metrics::dice);
    r.overall.jaccard = fold(&Metrics::jaccard);
    r.overall.sensitivity = fold(&Metrics::sensitivity);
    r.overall.specificity = fold(&Metrics::specificity);
    return r;
}

std::string format_seg_report(const SegReport& report) {
    std::ostringstream s;
    for (const auto& it : report.items) s << "item " << it.item << ' ' << metric_fields(it.m) << '\n';
    s << "overall " << metric_fields(report.overall) << '\n';
    return s.str();
}

void write_seg_csv(const SegReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "item,accuracy,dice,jaccard,sensitivity,specificity\n";
    auto row = [&](const std::string& name, const Metrics& m) {
        out << name << ',' << fmt6(m.accuracy.value) << ',' << fmt6(m.dice.value) << ','
            << fmt6(m.jaccard.value) << ',' << fmt6(m.sensitivity.value) << ','
            << fmt6(m.specificity.value) << '\n';
    };
    for (const auto& it : report.items) row(it.item, it.m);
    row("overall", report.overall);
    if (!out.flush()) throw IoError("cannot write " + path.string());
}

EvalReport classification_metrics(const std::vector<SubmissionRow>& rows,
                                  const LabelTable& labels) {
    EvalReport r;
    Confusion mel, sk;
    std::uint64_t correct = 0;
    for (const auto& row : rows) {
        auto it = labels.entries.find(row.image_id);
        if (it == labels.entries.end())
            throw PreconditionError("no label for image " + row.image_id);
        LesionClass truth = it->second;

        bool mel_pred = row.melanoma > 0.5;
        bool sk_pred = row.seborrheic_keratosis > 0.5;
        bool mel_true = truth == LesionClass::melanoma;
        bool sk_true = truth == LesionClass::seborrheic_keratosis;
        (mel_pred ? (mel_true ? mel.tp : mel.fp) : (mel_true ? mel.fn : mel.tn)) += 1;
        (sk_pred ? (sk_true ? sk.tp : sk.fp) : (sk_true ? sk.fn : sk.tn)) += 1;

        // same rule predict() applies to raw decisions; the sigmoid is monotone
        LesionClass predicted = LesionClass::nevus;
        if (mel_pred && row.melanoma >= row.seborrheic_keratosis)
            predicted = LesionClass::melanoma;
        else if (sk_pred && row.seborrheic_keratosis > row.melanoma)
            predicted = LesionClass::seborrheic_keratosis;
        if (predicted == truth) ++correct;
    }
    r.melanoma = {mel, metrics(mel)};
    r.seborrheic_keratosis = {sk, metrics(sk)};
    r.overall_accuracy = ratio(static_cast<double>(correct), static_cast<double>(rows.size()));
    r.n = rows.size();
    return r;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream s;
    auto task = [&](const char* name, const BinaryReport& b) {
        s << name << " tp " << b.confusion.tp << " fp " << b.confusion.fp << " tn "
          << b.confusion.tn << " fn " << b.confusion.fn << '\n';
        s << name << ' ' << metric_fields(b.m) << '\n';
    };
    s << "n " << report.n << '\n';
    task("melanoma", report.melanoma);
    task("seborrheic_keratosis", report.seborrheic_keratosis);
    s << "overall_accuracy " << fmt6(report.overall_accuracy.value)
      << (report.overall_accuracy.defined ? "" : " vacuous") << '\n';
    return s.str();
}

}  // namespace melaseg
