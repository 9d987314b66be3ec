#include "postop/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include "postop/random.hpp"

namespace postop {

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) out.push_back(i);
    return out;
}

FoldAssignment stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > d.size())
        throw std::invalid_argument("fold count " + std::to_string(k) + " must lie in [2, " +
                                    std::to_string(d.size()) + "]");
    FoldAssignment f{k, seed, std::vector<std::size_t>(d.size(), 0)};
    std::vector<std::vector<std::size_t>> by_class(d.num_classes());
    for (std::size_t i = 0; i < d.size(); ++i) by_class[d.class_of(i)].push_back(i);
    Rng rng(seed);
    std::size_t next = 0;
    for (auto& members : by_class) {
        shuffle(std::span<std::size_t>(members), rng);
        for (auto i : members) f.fold_of[i] = next++ % k;
    }
    return f;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool* undefined = nullptr) {
    if (den == 0) {
        if (undefined) *undefined = true;
        return 0.0;
    }
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r, bool* undefined) {
    if (p + r <= 0.0) {
        if (undefined) *undefined = true;
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

}  // namespace

ConfusionMetrics confusion_metrics(const ConfusionMatrix& c) {
    ConfusionMetrics m;
    m.accuracy = ratio(c.tp + c.tn, c.total());
    m.sensitivity = ratio(c.tp, c.tp + c.fn, &m.recall_undefined);
    m.recall = m.sensitivity;
    m.tp_rate = m.sensitivity;
    m.specificity = ratio(c.tn, c.tn + c.fp, &m.specificity_undefined);
    m.fp_rate = ratio(c.fp, c.fp + c.tn);
    m.precision = ratio(c.tp, c.tp + c.fp, &m.precision_undefined);
    m.f_measure = harmonic(m.precision, m.recall, &m.f_measure_undefined);
    return m;
}

ErrorMeasures error_measures(const ErrorMeasureInput& e) {
    const std::size_t n = e.actual.size();
    const std::size_t k = e.num_classes;
    if (n == 0) throw std::invalid_argument("error measures need at least one instance");
    if (e.predicted.size() != n) throw std::invalid_argument("predicted and actual differ in length");

    std::vector<double> mean_actual(k, 0.0);
    for (auto a : e.actual) mean_actual.at(a) += 1.0;
    for (auto& m : mean_actual) m /= static_cast<double>(n);

    double abs_err = 0.0, sq_err = 0.0, abs_base = 0.0, sq_base = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (e.predicted[i].size() != k) throw std::invalid_argument("prediction width does not match class count");
        for (std::size_t c = 0; c < k; ++c) {
            double a = e.actual[i] == c ? 1.0 : 0.0;
            double diff = e.predicted[i][c] - a;
            abs_err += std::abs(diff);
            sq_err += diff * diff;
            abs_base += std::abs(a - mean_actual[c]);
            sq_base += (a - mean_actual[c]) * (a - mean_actual[c]);
        }
    }
    const double pairs = static_cast<double>(n * k);
    ErrorMeasures out;
    out.mae = 100.0 * abs_err / pairs;
    out.rmse = 100.0 * std::sqrt(sq_err / pairs);
    if (abs_base > 0.0) out.rae = 100.0 * abs_err / abs_base;
    if (sq_base > 0.0) out.rrse = 100.0 * std::sqrt(sq_err / sq_base);
    return out;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const bool> positive) {
    if (scores.size() != positive.size()) throw std::invalid_argument("scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const auto pos = static_cast<std::uint64_t>(std::count(positive.begin(), positive.end(), true));
    const auto neg = static_cast<std::uint64_t>(positive.size()) - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("ROC analysis needs both positive and negative labels");

    RocCurve roc;
    roc.points.emplace_back(0.0, 0.0);
    std::uint64_t tp = 0, fp = 0;
    // twice the area in units of one (positive, negative) pair
    std::uint64_t doubled_area = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::uint64_t prev_tp = tp, prev_fp = fp;
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) (positive[order[i]] ? tp : fp) += 1;
        doubled_area += (fp - prev_fp) * (tp + prev_tp);
        roc.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos));
    }
    roc.auc = static_cast<double>(doubled_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return roc;
}

std::size_t Prediction::predicted() const {
    return static_cast<std::size_t>(std::max_element(distribution.begin(), distribution.end()) - distribution.begin());
}

ClassMetrics weighted_average(std::span<const ClassMetrics> rows) {
    ClassMetrics w;
    w.name = "weighted";
    double total = 0.0;
    for (const auto& r : rows) total += static_cast<double>(r.support);
    if (total <= 0.0) return w;
    for (const auto& r : rows) {
        double f = static_cast<double>(r.support) / total;
        w.support += r.support;
        w.tp_rate += f * r.tp_rate;
        w.fp_rate += f * r.fp_rate;
        w.precision += f * r.precision;
        w.recall += f * r.recall;
        w.f_measure += f * r.f_measure;
        w.auc += f * r.auc;
        w.precision_undefined = w.precision_undefined || r.precision_undefined;
    }
    return w;
}

EvaluationReport summarize(std::vector<Prediction> predictions, std::vector<std::string> classes,
                           std::size_t positive_class, std::size_t k) {
    if (predictions.empty()) throw EvaluationError("no predictions to summarize");
    const std::size_t num_classes = classes.size();
    EvaluationReport r;
    r.classes = std::move(classes);
    r.positive_class = positive_class;

    std::vector<std::size_t> fold_correct(k, 0), fold_total(k, 0);
    std::size_t correct = 0;
    ErrorMeasureInput err{{}, {}, num_classes};
    for (const auto& p : predictions) {
        bool hit = p.predicted() == p.actual;
        correct += hit;
        fold_correct.at(p.fold) += hit;
        ++fold_total.at(p.fold);
        bool actual_pos = p.actual == positive_class;
        bool predicted_pos = p.predicted() == positive_class;
        if (actual_pos && predicted_pos) ++r.confusion.tp;
        else if (actual_pos) ++r.confusion.fn;
        else if (predicted_pos) ++r.confusion.fp;
        else ++r.confusion.tn;
        err.predicted.push_back(p.distribution);
        err.actual.push_back(p.actual);
    }
    r.correctly_classified = 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
    r.positive = confusion_metrics(r.confusion);
    r.errors = error_measures(err);

    for (std::size_t f = 0; f < k; ++f)
        if (fold_total[f]) r.fold_accuracies.push_back(100.0 * static_cast<double>(fold_correct[f]) /
                                                       static_cast<double>(fold_total[f]));
    r.cva = r.fold_accuracies.empty()
                ? 0.0
                : std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) /
                      static_cast<double>(r.fold_accuracies.size());

    std::vector<double> scores(predictions.size());
    // std::vector<bool> has no contiguous storage to span over
    auto labels = std::make_unique<bool[]>(predictions.size());
    for (std::size_t c = 0; c < num_classes; ++c) {
        ConfusionMatrix one_vs_rest;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            const auto& p = predictions[i];
            bool a = p.actual == c, h = p.predicted() == c;
            if (a && h) ++one_vs_rest.tp;
            else if (a) ++one_vs_rest.fn;
            else if (h) ++one_vs_rest.fp;
            else ++one_vs_rest.tn;
            scores[i] = p.distribution[c];
            labels[i] = a;
        }
        auto m = confusion_metrics(one_vs_rest);
        ClassMetrics row{r.classes[c], one_vs_rest.tp + one_vs_rest.fn, m.tp_rate, m.fp_rate, m.precision,
                         m.recall, m.f_measure, 0.0, m.precision_undefined};
        const std::span<const bool> lab(labels.get(), predictions.size());
        bool both = row.support > 0 && row.support < predictions.size();
        if (both) {
            auto roc = roc_auc(scores, lab);
            row.auc = 100.0 * roc.auc;
            if (c == positive_class) r.roc = std::move(roc);
        } else {
            row.auc = std::numeric_limits<double>::quiet_NaN();
        }
        r.per_class.push_back(std::move(row));
    }
    r.weighted = weighted_average(r.per_class);
    r.predictions = std::move(predictions);
    return r;
}

EvaluationReport cross_validate(const Dataset& d, const ClassifierSpec& spec, const FoldAssignment& folds,
                                const CvOptions& opts) {
    if (folds.fold_of.size() != d.size()) throw EvaluationError("fold assignment does not cover the dataset");
    if (opts.positive_class >= d.num_classes()) throw EvaluationError("positive class out of range");

    auto run_fold = [&](std::size_t f) -> std::vector<Prediction> {
        auto test = folds.test_indices(f);
        if (test.empty()) return {};
        try {
            Dataset train = d.subset(folds.train_indices(f));
            if (opts.smote_within_folds) {
                SmoteConfig cfg = *opts.smote_within_folds;
                cfg.seed = derive_seed(opts.master_seed, "fold-smote", f);
                auto minority = minority_class_of(train);
                train = opts.smote_applications > 1 ? smote_repeated(train, minority, cfg, opts.smote_applications).data
                                                    : smote(train, minority, cfg).data;
            }
            auto model = spec.train(train, derive_seed(opts.master_seed, "fold-train", f));
            std::vector<Prediction> out;
            out.reserve(test.size());
            for (auto i : test) out.push_back(Prediction{i, f, d.class_of(i), model->predict(d.instance(i))});
            return out;
        } catch (const std::exception& e) {
            throw EvaluationError(spec.id + ", fold " + std::to_string(f) + ": " + e.what());
        }
    };

    std::vector<std::vector<Prediction>> per_fold(folds.k);
    if (opts.threads > 1) {
        std::vector<std::future<std::vector<Prediction>>> pending;
        for (std::size_t f = 0; f < folds.k; ++f) pending.push_back(std::async(std::launch::async, run_fold, f));
        for (std::size_t f = 0; f < folds.k; ++f) per_fold[f] = pending[f].get();
    } else {
        for (std::size_t f = 0; f < folds.k; ++f) per_fold[f] = run_fold(f);
    }

    std::vector<Prediction> pooled;
    pooled.reserve(d.size());
    for (auto& fold : per_fold)
        for (auto& p : fold) pooled.push_back(std::move(p));

    auto report = summarize(std::move(pooled), d.class_attribute().domain, opts.positive_class, folds.k);
    report.classifier = spec.id;
    report.display_name = spec.display_name;
    report.config = spec.config;
    return report;
}

const std::vector<std::string>& table_metric_names() {
    static const std::vector<std::string> names{
        "Correctly Classified Instances", "Mean absolute error", "Root mean squared error",
        "Relative absolute error",        "Root relative squared error", "True Positive (TP) Rate",
        "False Positive (FP) Rate",       "Precision",                   "Recall",
        "F-Measure",                      "ROC Area (AUC)"};
    return names;
}

std::vector<double> table_values(const EvaluationReport& r) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {r.correctly_classified,
            r.errors.mae,
            r.errors.rmse,
            r.errors.rae.value_or(nan),
            r.errors.rrse.value_or(nan),
            r.weighted.tp_rate,
            r.weighted.fp_rate,
            r.weighted.precision,
            r.weighted.recall,
            r.weighted.f_measure,
            r.weighted.auc};
}

std::string format_percent(double v) {
    if (std::isnan(v)) return "n/a";
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(1);
    // avoid "-0.0"
    s << (std::abs(v) < 0.05 ? 0.0 : v);
    return s.str();
}

std::string format_markdown(std::span<const EvaluationReport> reports) {
    std::ostringstream out;
    out << "| Performance Metrics |";
    for (const auto& r : reports) out << ' ' << r.display_name << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < reports.size(); ++i) out << "---:|";
    out << '\n';
    std::vector<std::vector<double>> cols;
    for (const auto& r : reports) cols.push_back(table_values(r));
    const auto& names = table_metric_names();
    for (std::size_t m = 0; m < names.size(); ++m) {
        out << "| " << names[m] << " |";
        for (const auto& c : cols) out << ' ' << format_percent(c[m]) << " |";
        out << '\n';
    }
    return out.str();
}

std::string format_csv(std::span<const EvaluationReport> reports) {
    std::ostringstream out;
    out << "metric";
    for (const auto& r : reports) out << ',' << r.display_name;
    out << '\n';
    std::vector<std::vector<double>> cols;
    for (const auto& r : reports) cols.push_back(table_values(r));
    const auto& names = table_metric_names();
    for (std::size_t m = 0; m < names.size(); ++m) {
        out << names[m];
        for (const auto& c : cols) out << ',' << format_percent(c[m]);
        out << '\n';
    }
    return out.str();
}

void to_json(nlohmann::json& j, const ConfusionMatrix& c) {
    j = {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

namespace {

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

nlohmann::json class_metrics_json(const ClassMetrics& m) {
    return {{"class", m.name},         {"support", m.support},     {"tp_rate", m.tp_rate},
            {"fp_rate", m.fp_rate},    {"precision", m.precision}, {"recall", m.recall},
            {"f_measure", m.f_measure}, {"auc", number_or_null(m.auc)}, {"precision_undefined", m.precision_undefined}};
}

}  // namespace

void to_json(nlohmann::json& j, const EvaluationReport& r) {
    nlohmann::json table = nlohmann::json::object();
    const auto values = table_values(r);
    const auto& names = table_metric_names();
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t m = 0; m < names.size(); ++m)
        rows.push_back({{"metric", names[m]}, {"value", number_or_null(values[m])}, {"display", format_percent(values[m])}});

    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& c : r.per_class) per_class.push_back(class_metrics_json(c));

    nlohmann::json roc = nlohmann::json::array();
    for (const auto& [x, y] : r.roc.points) roc.push_back({x, y});

    j = {{"classifier", r.classifier},
         {"display_name", r.display_name},
         {"config", r.config},
         {"classes", r.classes},
         {"positive_class", r.classes.at(r.positive_class)},
         {"table", std::move(rows)},
         {"confusion_matrix", r.confusion},
         {"positive_class_metrics",
          {{"accuracy", r.positive.accuracy},
           {"sensitivity", r.positive.sensitivity},
           {"specificity", r.positive.specificity},
           {"precision", r.positive.precision},
           {"recall", r.positive.recall},
           {"f_measure", r.positive.f_measure},
           {"tp_rate", r.positive.tp_rate},
           {"fp_rate", r.positive.fp_rate},
           {"precision_undefined", r.positive.precision_undefined},
           {"f_measure_undefined", r.positive.f_measure_undefined}}},
         {"per_class", std::move(per_class)},
         {"weighted", class_metrics_json(r.weighted)},
         {"errors",
          {{"mae", r.errors.mae},
           {"rmse", r.errors.rmse},
           {"rae", r.errors.rae ? nlohmann::json(*r.errors.rae) : nlohmann::json(nullptr)},
           {"rrse", r.errors.rrse ? nlohmann::json(*r.errors.rrse) : nlohmann::json(nullptr)}}},
         {"correctly_classified", r.correctly_classified},
         {"fold_accuracies", r.fold_accuracies},
         {"cva", r.cva},
         {"roc_curve", std::move(roc)}};
}

}  // namespace postop
