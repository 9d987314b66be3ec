#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "postop/classifiers.hpp"
#include "postop/dataset.hpp"
#include "postop/evaluation.hpp"
#include "postop/io.hpp"
#include "postop/resampling.hpp"

namespace postop {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kDefaultDataFile = "ThoraricSurgery.arff";
inline constexpr const char* kDataDirEnv = "POSTOP_DATA_DIR";

/// A failure in one named stage of a run (parse, resample, folds, ...).
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

enum class OutputFormat { markdown, csv, json };

struct SmoteSettings {
    bool enabled = true;
    unsigned percent = 700;
    std::size_t k_neighbors = 5;
    /// Number of consecutive SMOTE passes at `percent`.
    unsigned applications = 1;
    bool within_folds = false;
};

struct RunConfig {
    std::string data_path;
    DataFormat format = DataFormat::arff;
    /// Unset: the last declared attribute (Risk1Yr in the UCI layout).
    std::optional<std::string> class_name;
    std::string positive_class = "T";
    std::optional<std::uint64_t> seed;
    std::size_t folds = 10;
    SmoteSettings smote;
    std::vector<std::string> classifiers = known_classifiers();
    MlpConfig mlp;
    TreeConfig j48;
    OutputFormat output = OutputFormat::markdown;
    std::size_t threads = 1;

    void validate() const;
};

/// Path given explicitly, else $POSTOP_DATA_DIR/ThoraricSurgery.arff, else
/// the bare file name.
std::string resolve_data_path(const std::optional<std::string>& explicit_path);

struct Timing {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    RunConfig config;
    std::vector<std::size_t> input_counts;
    std::vector<std::string> classes;
    std::optional<ResampleRecord> resample;
    std::uint64_t fold_seed = 0;
    std::vector<EvaluationReport> reports;
    std::vector<Timing> timings;
    std::string version = kArtifactVersion;
};

/// Loads the data named by the config with its class attribute set.
Dataset load_for_run(const RunConfig& cfg);

/// Whole-dataset SMOTE as configured; `seed` is the SMOTE seed itself.
ResampleResult apply_smote(const Dataset& d, const SmoteSettings& s, std::uint64_t seed);

ClassifierSpec classifier_for(const std::string& id, const RunConfig& cfg);

/// parse -> optional SMOTE -> stratified folds -> cross-validation of every
/// selected classifier. Sub-seeds are derived from the master seed by stage
/// name: "smote", "folds", and per fold "fold-smote"/"fold-train".
RunManifest run_bench(const RunConfig& cfg);
RunManifest run_bench(const RunConfig& cfg, const Dataset& data);

/// Deterministic report document: everything but timings.
nlohmann::json report_json(const RunManifest& m);
/// report_json plus timings.
nlohmann::json manifest_json(const RunManifest& m);

/// Metric x classifier grid from a manifest or report document.
std::string plot_csv(const nlohmann::json& manifest);

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Human summary: counts, attribute kinds, class distribution, missing
/// values per attribute.
std::string describe_dataset(const Dataset& d);

std::string to_string(OutputFormat f);
OutputFormat parse_output_format(const std::string& s);
std::string to_string(DataFormat f);
DataFormat parse_data_format(const std::string& s);

}  // namespace postop
