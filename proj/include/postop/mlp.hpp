#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "postop/dataset.hpp"
#include "postop/random.hpp"

namespace postop {

/// Raised when training diverges (non-finite loss).
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, std::size_t epoch);
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

/// Maps one schema attribute onto a slice of the input vector.
struct EncodedColumn {
    std::size_t attribute = 0;
    std::size_t offset = 0;
    std::size_t width = 0;
    bool numeric = false;
    double min = 0.0;
    double max = 0.0;
    /// Numeric attribute with min == max; always encoded as 0.
    bool constant = false;
};

/// One-hot for nominals, min-max to [0, 1] for numerics, one output unit
/// per class. Ranges come from the data the encoding was fitted on; later
/// values outside that range are not clipped.
class Encoding {
public:
    static Encoding fit(const Dataset& d);

    std::size_t input_width() const { return input_width_; }
    std::size_t output_width() const { return output_width_; }
    std::size_t class_index() const { return class_index_; }
    const std::vector<EncodedColumn>& columns() const { return columns_; }
    std::vector<std::size_t> constant_attributes() const;

    Eigen::VectorXd encode(const Instance& x) const;
    Eigen::VectorXd target(const Instance& x) const;

    friend void to_json(nlohmann::json& j, const Encoding& e);

private:
    std::vector<EncodedColumn> columns_;
    std::size_t input_width_ = 0;
    std::size_t output_width_ = 0;
    std::size_t class_index_ = 0;
};

struct EncodedData {
    Encoding encoding;
    Eigen::MatrixXd inputs;   // one row per instance
    Eigen::MatrixXd targets;  // one-hot rows
};

EncodedData encode(const Dataset& d);

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd biases;
};

struct MlpConfig {
    /// Defaults to one hidden layer of (predictors + classes) / 2 units.
    std::optional<std::vector<std::size_t>> hidden_sizes;
    double learning_rate = 0.3;
    double momentum = 0.2;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;
    double init_range = 0.05;

    void validate() const;
};

/// Feed-forward network with logistic units in every non-input layer.
class MlpModel {
public:
    /// All-zero parameters.
    explicit MlpModel(std::vector<std::size_t> layer_sizes, std::optional<Encoding> encoding = std::nullopt);
    /// Parameters uniform in [-range, range].
    static MlpModel random(std::vector<std::size_t> layer_sizes, double range, Rng& rng,
                           std::optional<Encoding> encoding = std::nullopt);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const std::optional<Encoding>& encoding() const { return encoding_; }

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    /// Activations of every layer, input first.
    std::vector<Eigen::VectorXd> activations(const Eigen::VectorXd& x) const;

    /// Output vector normalised to sum 1. Requires an encoding.
    std::vector<double> predict(const Instance& x) const;

    bool all_finite() const;

private:
    std::vector<std::size_t> sizes_;
    std::vector<DenseLayer> layers_;
    std::optional<Encoding> encoding_;
};

/// Gradient of 0.5 * sum (o - t)^2 w.r.t. every weight and bias, same
/// layout as MlpModel::layers().
std::vector<DenseLayer> backprop_gradient(const MlpModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& target);

double squared_error(const MlpModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& target);

/// Called after each epoch with (1-based epoch, summed training loss).
using EpochCallback = std::function<void(std::size_t, double)>;

/// Per-instance SGD with momentum over rows of `inputs`, visiting rows in a
/// freshly shuffled order each epoch. Deterministic for a fixed seed.
MlpModel train_network(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                       std::vector<std::size_t> layer_sizes, const MlpConfig& cfg,
                       std::optional<Encoding> encoding = std::nullopt, const EpochCallback& on_epoch = {});

std::vector<std::size_t> default_layer_sizes(const Dataset& d, const Encoding& enc, const MlpConfig& cfg);

MlpModel train_mlp(const Dataset& d, const MlpConfig& cfg, const EpochCallback& on_epoch = {});

inline Eigen::VectorXd forward(const MlpModel& m, const Eigen::VectorXd& x) { return m.forward(x); }

void to_json(nlohmann::json& j, const MlpConfig& cfg);
void from_json(const nlohmann::json& j, MlpConfig& cfg);
void to_json(nlohmann::json& j, const MlpModel& m);

}  // namespace postop
