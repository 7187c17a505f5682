#include "melaseg/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

constexpr double kTau = 1e-12;   // guard for a vanishing quadratic coefficient
constexpr double kSvEps = 1e-8;  // alphas at or below this are not stored

double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double polynomial_kernel(const std::vector<double>& x, const std::vector<double>& z) {
    if (x.size() != z.size()) throw PreconditionError("kernel arguments differ in length");
    double dot = 0;
    for (size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
    return (1 + dot) * (1 + dot);
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw PreconditionError("cannot fit a standardizer on no rows");
    size_t dim = rows[0].size();
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.stddev.assign(dim, 0.0);
    for (const auto& r : rows) {
        if (r.size() != dim) throw PreconditionError("inconsistent feature dimensions");
        for (size_t c = 0; c < dim; ++c) s.mean[c] += r[c];
    }
    for (auto& m : s.mean) m /= rows.size();
    for (const auto& r : rows)
        for (size_t c = 0; c < dim; ++c) {
            double d = r[c] - s.mean[c];
            s.stddev[c] += d * d;
        }
    for (auto& v : s.stddev) v = std::sqrt(v / rows.size());
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& row) const {
    if (row.size() != mean.size()) throw PreconditionError("row length does not match standardizer");
    std::vector<double> out(row.size());
    for (size_t c = 0; c < row.size(); ++c)
        out[c] = constant(c) ? 0.0 : (row[c] - mean[c]) / stddev[c];
    return out;
}

double BinarySvmModel::decision(const std::vector<double>& x) const {
    double f = bias;
    for (size_t k = 0; k < support_vectors.size(); ++k)
        f += coeffs[k] * polynomial_kernel(support_vectors[k], x);
    return f;
}

BinarySvmModel train_binary(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels, const TrainOptions& opts) {
    const size_t l = rows.size();
    if (l < 2) throw PreconditionError("need at least two training points");
    if (labels.size() != l) throw PreconditionError("labels and rows differ in length");
    if (opts.c <= 0) throw PreconditionError("C must be positive");
    const size_t dim = rows[0].size();
    bool pos = false, neg = false;
    for (size_t t = 0; t < l; ++t) {
        if (rows[t].size() != dim) throw PreconditionError("inconsistent feature dimensions");
        if (labels[t] == 1)
            pos = true;
        else if (labels[t] == -1)
            neg = true;
        else
            throw PreconditionError("labels must be +1 or -1");
    }
    if (!pos || !neg) throw PreconditionError("both classes must be present");

    const double C = opts.c;
    std::vector<double> gram;
    const bool cached = static_cast<std::uint64_t>(l) * l * sizeof(double) <= opts.gram_cache_bytes;
    if (cached) {
        gram.resize(l * l);
        for (size_t i = 0; i < l; ++i)
            for (size_t j = i; j < l; ++j)
                gram[i * l + j] = gram[j * l + i] = polynomial_kernel(rows[i], rows[j]);
    }
    auto kernel = [&](size_t i, size_t j) {
        return cached ? gram[i * l + j] : polynomial_kernel(rows[i], rows[j]);
    };

    // minimize 1/2 a^T Q a - e^T a, Q_ij = y_i y_j K_ij; G is its gradient
    std::vector<double> alpha(l, 0.0), grad(l, -1.0), kdiag(l);
    for (size_t t = 0; t < l; ++t) kdiag[t] = kernel(t, t);

    std::uint64_t updates = 0;
    double gmax = 0, gmin = 0;
    for (;;) {
        // maximal violating pair over -y_t G_t
        std::ptrdiff_t i = -1, j = -1;
        gmax = -std::numeric_limits<double>::infinity();
        gmin = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < l; ++t) {
            double v = -labels[t] * grad[t];
            bool in_up = labels[t] == 1 ? alpha[t] < C : alpha[t] > 0;
            bool in_low = labels[t] == 1 ? alpha[t] > 0 : alpha[t] < C;
            if (in_up && v > gmax) {
                gmax = v;
                i = static_cast<std::ptrdiff_t>(t);
            }
            if (in_low && v < gmin) {
                gmin = v;
                j = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (i < 0 || j < 0 || gmax - gmin <= opts.tol) break;
        if (updates >= opts.max_pair_updates)
            throw ConvergenceError("SMO hit the pair-update cap; max KKT violation " +
                                   fmt(gmax - gmin));
        ++updates;

        const double kii = kdiag[i], kjj = kdiag[j], kij = kernel(i, j);
        double quad = kii + kjj - 2 * kij;
        if (quad <= kTau) quad = kTau;
        const double ai_old = alpha[i], aj_old = alpha[j];
        const int yi = labels[i], yj = labels[j];

        if (yi != yj) {
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = -diff;
                }
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = C + diff;
                }
            }
        } else {
            double delta = (grad[i] - grad[j]) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = sum;
                }
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = sum;
                }
            }
        }

        const double dai = alpha[i] - ai_old, daj = alpha[j] - aj_old;
        if (dai == 0 && daj == 0) continue;
        for (size_t t = 0; t < l; ++t)
            grad[t] += labels[t] * (yi * dai * kernel(i, t) + yj * daj * kernel(j, t));
    }

    BinarySvmModel model;
    model.c = C;
    double bias_sum = 0;
    int bias_n = 0;
    for (size_t t = 0; t < l; ++t) {
        if (alpha[t] > kSvEps && alpha[t] < C - kSvEps) {
            bias_sum += -labels[t] * grad[t];
            ++bias_n;
        }
        if (alpha[t] > kSvEps) {
            model.support_vectors.push_back(rows[t]);
            model.coeffs.push_back(alpha[t] * labels[t]);
        }
    }
    model.bias = bias_n > 0 ? bias_sum / bias_n : (gmax + gmin) / 2;
    return model;
}

OvaSvmModel train_ova(const std::vector<FeatureVector>& rows, const LabelTable& labels,
                      const TrainOptions& opts) {
    if (rows.empty()) throw PreconditionError("no training rows");
    std::vector<LesionClass> cls(rows.size());
    bool seen[3] = {false, false, false};
    for (size_t t = 0; t < rows.size(); ++t) {
        auto it = labels.entries.find(rows[t].image_id);
        if (it == labels.entries.end())
            throw PreconditionError("no label for image " + rows[t].image_id);
        cls[t] = it->second;
        seen[static_cast<int>(it->second)] = true;
    }
    if (!seen[0] || !seen[1] || !seen[2])
        throw PreconditionError("training data must contain all three classes");

    std::vector<std::vector<double>> raw(rows.size());
    for (size_t t = 0; t < rows.size(); ++t)
        raw[t].assign(rows[t].values.begin(), rows[t].values.end());

    OvaSvmModel model;
    model.feature_order.assign(feature_names().begin(), feature_names().end());
    model.standardizer = Standardizer::fit(raw);
    std::vector<std::vector<double>> x(rows.size());
    for (size_t t = 0; t < rows.size(); ++t) x[t] = model.standardizer.apply(raw[t]);

    std::vector<int> y(rows.size());
    for (size_t t = 0; t < rows.size(); ++t) y[t] = cls[t] == LesionClass::melanoma ? 1 : -1;
    model.mel_vs_rest = train_binary(x, y, opts);
    for (size_t t = 0; t < rows.size(); ++t)
        y[t] = cls[t] == LesionClass::seborrheic_keratosis ? 1 : -1;
    model.sk_vs_rest = train_binary(x, y, opts);
    return model;
}

Prediction predict(const OvaSvmModel& model, const FeatureVector& row) {
    std::vector<double> x = model.standardizer.apply(
        std::vector<double>(row.values.begin(), row.values.end()));
    Prediction p;
    p.image_id = row.image_id;
    p.f_mel = model.mel_vs_rest.decision(x);
    p.f_sk = model.sk_vs_rest.decision(x);
    p.mel_score = sigmoid(p.f_mel);
    p.sk_score = sigmoid(p.f_sk);
    if (p.f_mel > 0 && p.f_mel >= p.f_sk)
        p.predicted = LesionClass::melanoma;
    else if (p.f_sk > 0 && p.f_sk > p.f_mel)
        p.predicted = LesionClass::seborrheic_keratosis;
    else
        p.predicted = LesionClass::nevus;
    return p;
}

namespace {

constexpr const char* kSchema = "melaseg-svm-1";

void write_binary_model(std::ofstream& out, const char* name, const BinarySvmModel& m) {
    out << "submodel " << name << '\n';
    out << "kernel polynomial degree 2 offset 1\n";
    out << "c " << fmt(m.c) << '\n';
    out << "bias " << fmt(m.bias) << '\n';
    out << "support_vectors " << m.support_vectors.size() << '\n';
    for (size_t k = 0; k < m.support_vectors.size(); ++k) {
        out << fmt(m.coeffs[k]);
        for (double v : m.support_vectors[k]) out << ' ' << fmt(v);
        out << '\n';
    }
}

struct ModelParser {
    std::ifstream in;
    std::string path;

    std::string next() {
        std::string t;
        if (!(in >> t)) throw FormatError(path + ": truncated model file");
        return t;
    }
    void expect(const std::string& kw) {
        std::string t = next();
        if (t != kw) throw FormatError(path + ": expected '" + kw + "', got '" + t + "'");
    }
    double number() {
        std::string t = next();
        double v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
            throw FormatError(path + ": bad number '" + t + "'");
        return v;
    }
    long long integer() {
        double v = number();
        if (v != std::floor(v)) throw FormatError(path + ": expected an integer");
        return static_cast<long long>(v);
    }

    BinarySvmModel binary_model(const char* name) {
        expect("submodel");
        expect(name);
        expect("kernel");
        expect("polynomial");
        expect("degree");
        if (integer() != 2) throw FormatError(path + ": unsupported kernel degree");
        expect("offset");
        if (integer() != 1) throw FormatError(path + ": unsupported kernel offset");
        BinarySvmModel m;
        expect("c");
        m.c = number();
        if (m.c <= 0) throw FormatError(path + ": C must be positive");
        expect("bias");
        m.bias = number();
        expect("support_vectors");
        long long n = integer();
        if (n < 1) throw FormatError(path + ": a model needs at least one support vector");
        for (long long k = 0; k < n; ++k) {
            double coeff = number();
            if (std::abs(coeff) > m.c + 1e-9)
                throw FormatError(path + ": support-vector coefficient exceeds C");
            std::vector<double> sv(kFeatureCount);
            for (auto& v : sv) v = number();
            m.coeffs.push_back(coeff);
            m.support_vectors.push_back(std::move(sv));
        }
        double sum = 0;
        for (double c : m.coeffs) sum += c;
        if (std::abs(sum) > 1e-6)
            throw FormatError(path + ": support-vector coefficients do not sum to zero");
        return m;
    }
};

}  // namespace

void save_model(const std::string& path, const OvaSvmModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "schema_version " << kSchema << '\n';
    out << "features " << kFeatureCount << '\n';
    out << "feature_order";
    for (const auto& n : model.feature_order) out << ' ' << n;
    out << '\n';
    out << "standardizer_mean";
    for (double v : model.standardizer.mean) out << ' ' << fmt(v);
    out << '\n';
    out << "standardizer_std";
    for (double v : model.standardizer.stddev) out << ' ' << fmt(v);
    out << '\n';
    write_binary_model(out, "melanoma_vs_rest", model.mel_vs_rest);
    write_binary_model(out, "sk_vs_rest", model.sk_vs_rest);
    out << "end\n";
    if (!out.flush()) throw IoError("cannot write " + path);
}

OvaSvmModel load_model(const std::string& path) {
    ModelParser p{std::ifstream(path), path};
    if (!p.in) throw IoError("cannot open " + path);
    p.expect("schema_version");
    if (p.next() != kSchema) throw FormatError(path + ": unsupported model schema version");
    p.expect("features");
    if (p.integer() != kFeatureCount) throw FormatError(path + ": unexpected feature count");

    OvaSvmModel model;
    p.expect("feature_order");
    for (int c = 0; c < kFeatureCount; ++c) {
        std::string name = p.next();
        if (name != feature_names()[c])
            throw FormatError(path + ": feature order does not match this pipeline");
        model.feature_order.push_back(name);
    }
    p.expect("standardizer_mean");
    for (int c = 0; c < kFeatureCount; ++c) model.standardizer.mean.push_back(p.number());
    p.expect("standardizer_std");
    for (int c = 0; c < kFeatureCount; ++c) {
        double v = p.number();
        if (v < 0) throw FormatError(path + ": negative standardizer std");
        model.standardizer.stddev.push_back(v);
    }
    model.mel_vs_rest = p.binary_model("melanoma_vs_rest");
    model.sk_vs_rest = p.binary_model("sk_vs_rest");
    p.expect("end");
    return model;
}

}  // namespace melaseg
