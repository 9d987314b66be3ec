// postop: command-line harness for the post-operative life expectancy benchmark.
//
//   postop inspect  --data FILE
//   postop resample --data FILE [--smote-percent 700] [--out FILE]
//   postop bench    --data FILE --seed N [--classifiers mlp,j48,nb] [--out DIR]
//   postop plotdata --manifest DIR/manifest.json
//
// Exit status: 0 success, 1 input/data error, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "postop/io.hpp"
#include "postop/pipeline.hpp"

namespace fs = std::filesystem;
using namespace postop;

namespace {

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<std::string> data;
    std::string format = "arff";
    std::optional<std::string> class_name;
    std::string positive = "T";
    std::optional<std::uint64_t> seed;
    std::size_t folds = 10;
    std::string smote = "on";
    unsigned smote_percent = 700;
    std::size_t smote_k = 5;
    unsigned smote_repeat = 1;
    bool smote_within_folds = false;
    std::vector<std::string> classifiers = known_classifiers();
    std::vector<std::size_t> mlp_hidden;
    double mlp_lr = 0.3;
    double mlp_momentum = 0.2;
    std::size_t mlp_epochs = 500;
    std::size_t j48_min_leaf = 2;
    double j48_confidence = 0.25;
    bool j48_unpruned = false;
    std::string output_format = "markdown";
    std::string out;
    std::size_t threads = 1;
    std::string replay;
    std::string manifest;
    std::string record;
};

void add_data_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--data", o.data, std::string("Dataset file (default $") + kDataDirEnv + "/" + kDefaultDataFile + ")");
    cmd->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"arff", "csv"}))->capture_default_str();
    cmd->add_option("--class", o.class_name, "Class attribute name (default: last attribute)");
}

void add_smote_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--smote", o.smote, "Whole-dataset SMOTE")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    cmd->add_option("--smote-percent", o.smote_percent, "Synthetic growth per pass, multiple of 100")->capture_default_str();
    cmd->add_option("--smote-k", o.smote_k, "Nearest neighbours")->capture_default_str();
    cmd->add_option("--smote-repeat", o.smote_repeat, "Consecutive SMOTE passes")->check(CLI::PositiveNumber)->capture_default_str();
}

RunConfig to_config(const Options& o) {
    RunConfig c;
    c.data_path = resolve_data_path(o.data);
    c.format = parse_data_format(o.format);
    c.class_name = o.class_name;
    c.positive_class = o.positive;
    c.seed = o.seed;
    c.folds = o.folds;
    c.smote.enabled = o.smote == "on";
    c.smote.percent = o.smote_percent;
    c.smote.k_neighbors = o.smote_k;
    c.smote.applications = o.smote_repeat;
    c.smote.within_folds = o.smote_within_folds;
    c.classifiers = o.classifiers;
    if (!o.mlp_hidden.empty()) c.mlp.hidden_sizes = o.mlp_hidden;
    c.mlp.learning_rate = o.mlp_lr;
    c.mlp.momentum = o.mlp_momentum;
    c.mlp.epochs = o.mlp_epochs;
    c.j48.min_leaf_instances = o.j48_min_leaf;
    c.j48.pruning_confidence = o.j48_confidence;
    c.j48.prune = !o.j48_unpruned;
    c.output = parse_output_format(o.output_format);
    c.threads = o.threads;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw DataError("failed writing '" + p.string() + "'");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open '" + p.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cmd_inspect(const Options& o) {
    RunConfig c;
    c.data_path = resolve_data_path(o.data);
    c.format = parse_data_format(o.format);
    c.class_name = o.class_name;
    std::cout << describe_dataset(load_for_run(c));
    return 0;
}

int cmd_resample(const Options& o) {
    RunConfig c = to_config(o);
    fs::path in_path(c.data_path);
    fs::path out_path = o.out.empty() ? in_path.parent_path() / (in_path.stem().string() + ".smote" +
                                                                 in_path.extension().string())
                                      : fs::path(o.out);
    fs::path record_path = o.record.empty() ? fs::path(out_path.string() + ".json") : fs::path(o.record);
    Dataset d = load_for_run(c);

    ResampleRecord record;
    if (!c.smote.enabled) {
        record.classes = d.class_attribute().domain;
        record.original_counts = record.final_counts = class_counts(d);
        record.minority_class = minority_class_of(d);
        write_file(out_path, read_file(in_path));
    } else {
        auto r = apply_smote(d, c.smote, o.seed.value_or(0));
        record = r.record;
        write_file(out_path, c.format == DataFormat::arff ? to_arff(r.data) : to_csv(r.data));
        d = std::move(r.data);
    }
    write_file(record_path, nlohmann::json(record).dump(2) + "\n");
    std::cout << "wrote " << out_path.string() << " class " << format_class_counts(d, record.final_counts) << '\n';
    return 0;
}

std::string render(const RunManifest& m, OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return format_csv(m.reports);
        case OutputFormat::json: return report_json(m).dump(2) + "\n";
        case OutputFormat::markdown: break;
    }
    return format_markdown(m.reports);
}

int cmd_bench(const Options& o) {
    RunConfig c;
    if (!o.replay.empty()) {
        try {
            c = nlohmann::json::parse(read_file(o.replay)).at("config").get<RunConfig>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError("unreadable manifest '" + o.replay + "': " + e.what());
        }
    } else {
        if (!o.seed) throw UsageError("bench requires --seed");
        c = to_config(o);
    }

    RunManifest m = run_bench(c);
    std::cout << render(m, c.output);
    if (m.resample && m.resample->within_folds) std::cout << "note: SMOTE applied within training folds only\n";

    fs::path dir = o.out.empty() ? fs::path("results") : fs::path(o.out);
    fs::create_directories(dir);
    write_file(dir / "report.md", format_markdown(m.reports));
    write_file(dir / "report.csv", format_csv(m.reports));
    write_file(dir / "report.json", report_json(m).dump(2) + "\n");
    auto manifest = manifest_json(m);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    write_file(dir / "plot.csv", plot_csv(manifest));
    return 0;
}

int cmd_plotdata(const Options& o) {
    if (!fs::exists(o.manifest)) throw DataError("manifest '" + o.manifest + "' does not exist");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(o.manifest));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("unreadable manifest '" + o.manifest + "': " + e.what());
    }
    std::string grid = plot_csv(j);
    fs::path out = o.out.empty() ? fs::path(o.manifest).parent_path() / "plot.csv" : fs::path(o.out);
    write_file(out, grid);
    std::cout << grid;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for post-operative life expectancy classifiers"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", kArtifactVersion);
    Options o;

    auto* inspect = app.add_subcommand("inspect", "Summarise a dataset");
    add_data_flags(inspect, o);

    auto* resample = app.add_subcommand("resample", "Write a SMOTE-resampled copy of a dataset plus a JSON record");
    add_data_flags(resample, o);
    add_smote_flags(resample, o);
    resample->add_option("--seed", o.seed, "Resampling seed (default 0)");
    resample->add_option("--out", o.out, "Output dataset path (default <name>.smote.<ext>)");
    resample->add_option("--record", o.record, "Record path (default <out>.json)");

    auto* bench = app.add_subcommand("bench", "Stratified cross-validation of the selected classifiers");
    add_data_flags(bench, o);
    add_smote_flags(bench, o);
    bench->add_option("--positive", o.positive, "Positive class value")->capture_default_str();
    bench->add_option("--seed", o.seed, "Master seed (required)");
    bench->add_option("--folds", o.folds, "Number of folds")->capture_default_str();
    bench->add_flag("--smote-within-folds", o.smote_within_folds, "Apply SMOTE to training folds only");
    bench->add_option("--classifiers", o.classifiers, "Comma-separated subset of mlp,j48,nb")->delimiter(',');
    bench->add_option("--mlp-hidden", o.mlp_hidden, "Hidden layer sizes, comma-separated")->delimiter(',');
    bench->add_option("--mlp-learning-rate", o.mlp_lr)->capture_default_str();
    bench->add_option("--mlp-momentum", o.mlp_momentum)->capture_default_str();
    bench->add_option("--mlp-epochs", o.mlp_epochs)->capture_default_str();
    bench->add_option("--j48-min-leaf", o.j48_min_leaf)->capture_default_str();
    bench->add_option("--j48-confidence", o.j48_confidence)->capture_default_str();
    bench->add_flag("--j48-unpruned", o.j48_unpruned);
    bench->add_option("--output-format", o.output_format, "Format printed to stdout")
        ->check(CLI::IsMember({"markdown", "csv", "json"}))
        ->capture_default_str();
    bench->add_option("--out", o.out, "Directory for report and manifest files (default results)");
    bench->add_option("--threads", o.threads, "Folds evaluated concurrently when > 1")->capture_default_str();
    bench->add_option("--replay", o.replay, "Re-run the configuration stored in a manifest")->excludes("--seed");

    auto* plotdata = app.add_subcommand("plotdata", "Metric x classifier CSV grid from a manifest");
    plotdata->add_option("--manifest", o.manifest, "manifest.json from a bench run")->required();
    plotdata->add_option("--out", o.out, "Output CSV (default plot.csv next to the manifest)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    try {
        if (*inspect) return cmd_inspect(o);
        if (*resample) return cmd_resample(o);
        if (*bench) return cmd_bench(o);
        return cmd_plotdata(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
}
