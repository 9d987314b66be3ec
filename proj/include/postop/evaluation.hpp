#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "postop/dataset.hpp"
#include "postop/resampling.hpp"

namespace postop {

/// A trained model: maps an instance to a class probability vector.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::vector<double> predict(const Instance& x) const = 0;
};

/// How to build a classifier. `train` receives the training rows and a
/// seed derived from the master seed and fold id.
struct ClassifierSpec {
    std::string id;
    std::string display_name;
    nlohmann::json config;
    std::function<std::unique_ptr<Classifier>(const Dataset&, std::uint64_t)> train;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FoldAssignment {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> fold_of;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Within each class (declaration order) indices are shuffled and dealt
/// round-robin, the dealing position carrying over between classes.
FoldAssignment stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed);

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    /// Same counts seen with the other class as positive.
    ConfusionMatrix swapped() const { return {tn, fn, tp, fp}; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// All values are percentages. A zero denominator yields 0 and sets the
/// matching `*_undefined` flag.
struct ConfusionMetrics {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double tp_rate = 0.0;
    double fp_rate = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool specificity_undefined = false;
    bool f_measure_undefined = false;
};

ConfusionMetrics confusion_metrics(const ConfusionMatrix& c);

/// Per-instance predicted distributions and actual class symbols.
struct ErrorMeasureInput {
    std::vector<std::vector<double>> predicted;
    std::vector<std::size_t> actual;
    std::size_t num_classes = 2;
};

/// Percentages. `rae`/`rrse` are empty when every actual is identical in
/// every class dimension (no baseline error to normalise by).
struct ErrorMeasures {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> rae;
    std::optional<double> rrse;
};

ErrorMeasures error_measures(const ErrorMeasureInput& e);

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (FP rate, TP rate)
    double auc = 0.0;
};

/// Threshold sweep over distinct scores, highest first. Tied scores move
/// as one step, which the trapezoid credits at one half.
RocCurve roc_auc(std::span<const double> scores, std::span<const bool> positive);

struct ClassMetrics {
    std::string name;
    std::size_t support = 0;
    double tp_rate = 0.0;
    double fp_rate = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double auc = 0.0;
    bool precision_undefined = false;
};

struct Prediction {
    std::size_t index = 0;
    std::size_t fold = 0;
    std::size_t actual = 0;
    std::vector<double> distribution;

    /// argmax, ties to the first declared class
    std::size_t predicted() const;
};

/// The report-table view of one classifier, plus the underlying counts.
struct EvaluationReport {
    std::string classifier;
    std::string display_name;
    nlohmann::json config;
    std::vector<std::string> classes;
    std::size_t positive_class = 0;

    ConfusionMatrix confusion;
    ConfusionMetrics positive;
    std::vector<ClassMetrics> per_class;
    ClassMetrics weighted;
    ErrorMeasures errors;
    RocCurve roc;
    double correctly_classified = 0.0;
    std::vector<double> fold_accuracies;
    double cva = 0.0;

    std::vector<Prediction> predictions;
};

/// Class-weighted summary over per-class rows, weights = class support.
ClassMetrics weighted_average(std::span<const ClassMetrics> rows);

/// Assembles a report from pooled predictions.
EvaluationReport summarize(std::vector<Prediction> predictions, std::vector<std::string> classes,
                           std::size_t positive_class, std::size_t k);

struct CvOptions {
    std::size_t positive_class = 0;
    std::uint64_t master_seed = 0;
    /// When set, SMOTE is applied to each training fold only.
    std::optional<SmoteConfig> smote_within_folds;
    unsigned smote_applications = 1;
    std::size_t threads = 1;
};

EvaluationReport cross_validate(const Dataset& d, const ClassifierSpec& spec, const FoldAssignment& folds,
                                const CvOptions& opts);

/// Row labels of the report table, in order.
const std::vector<std::string>& table_metric_names();

/// The 11 report-table values of one report (percentages). Undefined RAE/RRSE
/// come back as NaN.
std::vector<double> table_values(const EvaluationReport& r);

/// One decimal, "n/a" for NaN.
std::string format_percent(double v);

std::string format_markdown(std::span<const EvaluationReport> reports);
std::string format_csv(std::span<const EvaluationReport> reports);

void to_json(nlohmann::json& j, const ConfusionMatrix& c);
void to_json(nlohmann::json& j, const EvaluationReport& r);

}  // namespace postop
