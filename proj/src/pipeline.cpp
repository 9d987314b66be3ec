#include "postop/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "postop/random.hpp"

namespace postop {

StageError::StageError(std::string stage, const std::string& cause)
    : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}

void RunConfig::validate() const {
    if (folds < 2) throw std::invalid_argument("folds must be at least 2");
    if (classifiers.empty()) throw std::invalid_argument("no classifiers selected");
    for (const auto& id : classifiers)
        if (std::find(known_classifiers().begin(), known_classifiers().end(), id) == known_classifiers().end())
            throw std::invalid_argument("unknown classifier '" + id + "' (expected mlp, j48 or nb)");
    if (smote.applications < 1) throw std::invalid_argument("SMOTE needs at least one application");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    SmoteConfig{smote.k_neighbors, smote.percent, 0}.validate();
    mlp.validate();
    j48.validate();
}

std::string resolve_data_path(const std::optional<std::string>& explicit_path) {
    if (explicit_path && !explicit_path->empty()) return *explicit_path;
    if (const char* dir = std::getenv(kDataDirEnv); dir && *dir)
        return (std::filesystem::path(dir) / kDefaultDataFile).string();
    return kDefaultDataFile;
}

Dataset load_for_run(const RunConfig& cfg) {
    std::optional<std::string_view> cls;
    if (cfg.class_name) cls = *cfg.class_name;
    return load_dataset(cfg.data_path, cfg.format, cls);
}

ResampleResult apply_smote(const Dataset& d, const SmoteSettings& s, std::uint64_t seed) {
    SmoteConfig sc{s.k_neighbors, s.percent, seed};
    auto minority = minority_class_of(d);
    return s.applications > 1 ? smote_repeated(d, minority, sc, s.applications) : smote(d, minority, sc);
}

ClassifierSpec classifier_for(const std::string& id, const RunConfig& cfg) {
    if (id == "mlp") return mlp_spec(cfg.mlp);
    if (id == "j48") return j48_spec(cfg.j48);
    if (id == "nb") return nb_spec();
    throw std::invalid_argument("unknown classifier '" + id + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t positive_index(const Dataset& d, const std::string& name) {
    auto idx = d.class_attribute().index_of(name);
    if (!idx) throw DataError("positive class '" + name + "' is not a value of " + d.class_attribute().name);
    return *idx;
}

}  // namespace

RunManifest run_bench(const RunConfig& cfg) {
    cfg.validate();
    auto t0 = Clock::now();
    std::optional<Dataset> data;
    try {
        data.emplace(load_for_run(cfg));
    } catch (const std::exception& e) {
        throw StageError("parse", e.what());
    }
    auto m = run_bench(cfg, *data);
    m.timings.insert(m.timings.begin(), Timing{"parse", seconds_since(t0)});
    return m;
}

RunManifest run_bench(const RunConfig& cfg, const Dataset& input) {
    cfg.validate();
    if (!cfg.seed) throw std::invalid_argument("bench requires an explicit seed");
    const std::uint64_t master = *cfg.seed;

    RunManifest m;
    m.config = cfg;
    m.classes = input.class_attribute().domain;
    m.input_counts = class_counts(input);

    std::size_t positive = 0;
    try {
        positive = positive_index(input, cfg.positive_class);
    } catch (const std::exception& e) {
        throw StageError("config", e.what());
    }

    Dataset data = input;
    if (cfg.smote.enabled && !cfg.smote.within_folds) {
        auto t0 = Clock::now();
        try {
            auto r = apply_smote(input, cfg.smote, derive_seed(master, "smote"));
            data = std::move(r.data);
            m.resample = std::move(r.record);
        } catch (const std::exception& e) {
            throw StageError("resample", e.what());
        }
        m.timings.push_back({"resample", seconds_since(t0)});
    } else if (cfg.smote.enabled) {
        ResampleRecord r;
        r.method = "smote";
        r.classes = m.classes;
        r.original_counts = m.input_counts;
        r.final_counts = m.input_counts;
        r.minority_class = minority_class_of(input);
        r.config = SmoteConfig{cfg.smote.k_neighbors, cfg.smote.percent, 0};
        r.applications = cfg.smote.applications;
        r.within_folds = true;
        m.resample = std::move(r);
    }

    FoldAssignment folds;
    m.fold_seed = derive_seed(master, "folds");
    try {
        folds = stratified_folds(data, cfg.folds, m.fold_seed);
    } catch (const std::exception& e) {
        throw StageError("folds", e.what());
    }

    CvOptions opts;
    opts.positive_class = positive;
    opts.master_seed = master;
    opts.threads = cfg.threads;
    if (cfg.smote.enabled && cfg.smote.within_folds) {
        opts.smote_within_folds = SmoteConfig{cfg.smote.k_neighbors, cfg.smote.percent, 0};
        opts.smote_applications = cfg.smote.applications;
    }

    for (const auto& id : cfg.classifiers) {
        auto t0 = Clock::now();
        try {
            m.reports.push_back(cross_validate(data, classifier_for(id, cfg), folds, opts));
        } catch (const std::exception& e) {
            throw StageError("cross-validation", e.what());
        }
        m.timings.push_back({"cv:" + id, seconds_since(t0)});
    }
    return m;
}

nlohmann::json report_json(const RunManifest& m) {
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t c = 0; c < m.classes.size(); ++c) counts[m.classes[c]] = m.input_counts.at(c);
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : m.reports) reports.push_back(r);
    return {{"artifact_version", m.version},
            {"config", m.config},
            {"input_class_counts", std::move(counts)},
            {"resample", m.resample ? nlohmann::json(*m.resample) : nlohmann::json(nullptr)},
            {"fold_seed", m.fold_seed},
            {"metrics", table_metric_names()},
            {"reports", std::move(reports)}};
}

nlohmann::json manifest_json(const RunManifest& m) {
    auto j = report_json(m);
    nlohmann::json t = nlohmann::json::object();
    for (const auto& timing : m.timings) t[timing.stage] = timing.seconds;
    j["timings_seconds"] = std::move(t);
    return j;
}

std::string plot_csv(const nlohmann::json& manifest) {
    if (!manifest.is_object() || !manifest.contains("reports") || !manifest["reports"].is_array())
        throw DataError("manifest has no report list");
    const auto& reports = manifest["reports"];
    if (reports.empty()) throw DataError("manifest lists no classifiers");

    std::ostringstream out;
    out << "metric";
    for (const auto& r : reports) out << ',' << r.at("display_name").get<std::string>();
    out << '\n';
    const auto& names = table_metric_names();
    for (std::size_t m = 0; m < names.size(); ++m) {
        out << names[m];
        for (const auto& r : reports) {
            const auto& row = r.at("table").at(m);
            if (row.at("metric").get<std::string>() != names[m])
                throw DataError("manifest table rows are out of order at '" + names[m] + "'");
            out << ',' << row.at("display").get<std::string>();
        }
        out << '\n';
    }
    return out.str();
}

std::string to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::markdown: return "markdown";
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
    }
    return "markdown";
}

OutputFormat parse_output_format(const std::string& s) {
    if (s == "markdown" || s == "md") return OutputFormat::markdown;
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + s + "'");
}

std::string to_string(DataFormat f) { return f == DataFormat::csv ? "csv" : "arff"; }

DataFormat parse_data_format(const std::string& s) {
    if (s == "arff") return DataFormat::arff;
    if (s == "csv") return DataFormat::csv;
    throw std::invalid_argument("unknown data format '" + s + "'");
}

void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"data_path", c.data_path},
         {"format", to_string(c.format)},
         {"class_name", c.class_name ? nlohmann::json(*c.class_name) : nlohmann::json(nullptr)},
         {"positive_class", c.positive_class},
         {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)},
         {"folds", c.folds},
         {"smote",
          {{"enabled", c.smote.enabled},
           {"percent", c.smote.percent},
           {"k_neighbors", c.smote.k_neighbors},
           {"applications", c.smote.applications},
           {"within_folds", c.smote.within_folds}}},
         {"classifiers", c.classifiers},
         {"mlp", c.mlp},
         {"j48",
          {{"min_leaf_instances", c.j48.min_leaf_instances},
           {"pruning_confidence", c.j48.pruning_confidence},
           {"prune", c.j48.prune}}},
         {"output_format", to_string(c.output)},
         {"threads", c.threads}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    c = RunConfig{};
    c.data_path = j.at("data_path").get<std::string>();
    c.format = parse_data_format(j.at("format").get<std::string>());
    if (!j.at("class_name").is_null()) c.class_name = j["class_name"].get<std::string>();
    c.positive_class = j.at("positive_class").get<std::string>();
    if (!j.at("seed").is_null()) c.seed = j["seed"].get<std::uint64_t>();
    c.folds = j.at("folds").get<std::size_t>();
    const auto& s = j.at("smote");
    c.smote.enabled = s.at("enabled").get<bool>();
    c.smote.percent = s.at("percent").get<unsigned>();
    c.smote.k_neighbors = s.at("k_neighbors").get<std::size_t>();
    c.smote.applications = s.at("applications").get<unsigned>();
    c.smote.within_folds = s.at("within_folds").get<bool>();
    c.classifiers = j.at("classifiers").get<std::vector<std::string>>();
    c.mlp = j.at("mlp").get<MlpConfig>();
    const auto& t = j.at("j48");
    c.j48.min_leaf_instances = t.at("min_leaf_instances").get<std::size_t>();
    c.j48.pruning_confidence = t.at("pruning_confidence").get<double>();
    c.j48.prune = t.at("prune").get<bool>();
    c.output = parse_output_format(j.at("output_format").get<std::string>());
    c.threads = j.value("threads", std::size_t{1});
}

std::string describe_dataset(const Dataset& d) {
    std::size_t nominal = 0, numeric = 0;
    for (const auto& a : d.schema()) (a.kind == AttributeKind::nominal ? nominal : numeric) += 1;
    std::ostringstream out;
    out << d.size() << " instances, " << d.num_attributes() << " attributes (" << nominal << " nominal, " << numeric
        << " numeric), class " << format_class_counts(d, class_counts(d)) << '\n';

    std::vector<std::size_t> missing(d.num_attributes(), 0);
    for (const auto& x : d.instances())
        for (std::size_t a = 0; a < x.size(); ++a) missing[a] += x[a].is_missing();
    out << "relation: " << d.relation() << '\n';
    out << "class attribute: " << d.class_attribute().name << '\n';
    for (std::size_t a = 0; a < d.num_attributes(); ++a) {
        const auto& attr = d.attribute(a);
        out << "  " << attr.name << "  " << (attr.kind == AttributeKind::nominal ? "nominal" : "numeric");
        if (attr.kind == AttributeKind::nominal) out << " (" << attr.domain.size() << " values)";
        out << ", missing " << missing[a] << '\n';
    }
    return out.str();
}

}  // namespace postop
