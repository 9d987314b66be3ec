#include "postop/mlp.hpp"

#include <cmath>
#include <numeric>

namespace postop {

TrainingError::TrainingError(const std::string& what, std::size_t epoch)
    : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

Encoding Encoding::fit(const Dataset& d) {
    Encoding e;
    e.class_index_ = d.class_index();
    e.output_width_ = d.num_classes();
    std::size_t offset = 0;
    for (std::size_t j = 0; j < d.num_attributes(); ++j) {
        if (j == d.class_index()) continue;
        const auto& attr = d.attribute(j);
        EncodedColumn col;
        col.attribute = j;
        col.offset = offset;
        if (attr.is_nominal()) {
            col.width = attr.domain.size();
        } else {
            col.width = 1;
            col.numeric = true;
            bool seen = false;
            for (const auto& x : d.instances()) {
                if (x[j].is_missing()) continue;
                double v = x[j].real_value();
                col.min = seen ? std::min(col.min, v) : v;
                col.max = seen ? std::max(col.max, v) : v;
                seen = true;
            }
            col.constant = !(col.max > col.min);
        }
        offset += col.width;
        e.columns_.push_back(col);
    }
    e.input_width_ = offset;
    return e;
}

std::vector<std::size_t> Encoding::constant_attributes() const {
    std::vector<std::size_t> out;
    for (const auto& c : columns_)
        if (c.numeric && c.constant) out.push_back(c.attribute);
    return out;
}

Eigen::VectorXd Encoding::encode(const Instance& x) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(input_width_));
    for (const auto& c : columns_) {
        const auto& cell = x[c.attribute];
        if (cell.is_missing()) continue;
        auto at = static_cast<Eigen::Index>(c.offset);
        if (!c.numeric)
            v[at + static_cast<Eigen::Index>(cell.symbol_index())] = 1.0;
        else if (!c.constant)
            v[at] = (cell.real_value() - c.min) / (c.max - c.min);
    }
    return v;
}

Eigen::VectorXd Encoding::target(const Instance& x) const {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_width_));
    t[static_cast<Eigen::Index>(x[class_index_].symbol_index())] = 1.0;
    return t;
}

EncodedData encode(const Dataset& d) {
    if (d.has_missing_predictors()) throw DataError("encoding requires a dataset without missing values");
    EncodedData out{Encoding::fit(d), {}, {}};
    const auto n = static_cast<Eigen::Index>(d.size());
    out.inputs.resize(n, static_cast<Eigen::Index>(out.encoding.input_width()));
    out.targets.resize(n, static_cast<Eigen::Index>(out.encoding.output_width()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& x = d.instance(static_cast<std::size_t>(i));
        out.inputs.row(i) = out.encoding.encode(x).transpose();
        out.targets.row(i) = out.encoding.target(x).transpose();
    }
    return out;
}

void MlpConfig::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw std::invalid_argument("learning_rate must lie in (0, 1]");
    if (!(momentum >= 0.0 && momentum <= 1.0)) throw std::invalid_argument("momentum must lie in [0, 1]");
    if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
    if (!(init_range > 0.0)) throw std::invalid_argument("init_range must be positive");
    if (hidden_sizes)
        for (auto h : *hidden_sizes)
            if (h == 0) throw std::invalid_argument("hidden layers need at least one unit");
}

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

}  // namespace

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes, std::optional<Encoding> encoding)
    : sizes_(std::move(layer_sizes)), encoding_(std::move(encoding)) {
    if (sizes_.size() < 2) throw std::invalid_argument("a network needs input and output layers");
    for (auto s : sizes_)
        if (s == 0) throw std::invalid_argument("layer sizes must be positive");
    if (encoding_ && (encoding_->input_width() != sizes_.front() || encoding_->output_width() != sizes_.back()))
        throw std::invalid_argument("encoding width does not match the network");
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        auto out = static_cast<Eigen::Index>(sizes_[l]);
        auto in = static_cast<Eigen::Index>(sizes_[l - 1]);
        layers_.push_back(DenseLayer{Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    }
}

MlpModel MlpModel::random(std::vector<std::size_t> layer_sizes, double range, Rng& rng,
                          std::optional<Encoding> encoding) {
    MlpModel m(std::move(layer_sizes), std::move(encoding));
    for (auto& layer : m.layers_) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = uniform_real(rng, -range, range);
            layer.biases[r] = uniform_real(rng, -range, range);
        }
    }
    return m;
}

std::vector<Eigen::VectorXd> MlpModel::activations(const Eigen::VectorXd& x) const {
    if (x.size() != static_cast<Eigen::Index>(sizes_.front()))
        throw std::invalid_argument("input width does not match the network");
    std::vector<Eigen::VectorXd> acts;
    acts.reserve(sizes_.size());
    acts.push_back(x);
    for (const auto& layer : layers_) acts.push_back(sigmoid(layer.weights * acts.back() + layer.biases));
    return acts;
}

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& x) const { return activations(x).back(); }

std::vector<double> MlpModel::predict(const Instance& x) const {
    if (!encoding_) throw std::logic_error("MlpModel::predict needs an encoding");
    Eigen::VectorXd out = forward(encoding_->encode(x));
    double total = out.sum();
    std::vector<double> p(static_cast<std::size_t>(out.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) p[static_cast<std::size_t>(i)] = out[i] / total;
    return p;
}

bool MlpModel::all_finite() const {
    for (const auto& l : layers_)
        if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
    return true;
}

std::vector<DenseLayer> backprop_gradient(const MlpModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
    auto acts = m.activations(x);
    const auto& layers = m.layers();
    if (target.size() != acts.back().size()) throw std::invalid_argument("target width does not match the network");

    std::vector<DenseLayer> grad(layers.size());
    Eigen::VectorXd delta =
        ((acts.back() - target).array() * acts.back().array() * (1.0 - acts.back().array())).matrix();
    for (std::size_t l = layers.size(); l-- > 0;) {
        grad[l].weights = delta * acts[l].transpose();
        grad[l].biases = delta;
        if (l > 0)
            delta = ((layers[l].weights.transpose() * delta).array() * acts[l].array() * (1.0 - acts[l].array()))
                        .matrix();
    }
    return grad;
}

double squared_error(const MlpModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
    return 0.5 * (m.forward(x) - target).squaredNorm();
}

MlpModel train_network(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                       std::vector<std::size_t> layer_sizes, const MlpConfig& cfg, std::optional<Encoding> encoding,
                       const EpochCallback& on_epoch) {
    cfg.validate();
    if (inputs.rows() == 0) throw DataError("cannot train a network on an empty dataset");
    if (inputs.rows() != targets.rows()) throw std::invalid_argument("inputs and targets differ in row count");

    Rng rng(cfg.seed);
    MlpModel model = MlpModel::random(std::move(layer_sizes), cfg.init_range, rng, std::move(encoding));
    auto& layers = model.layers();

    std::vector<DenseLayer> velocity;
    for (const auto& l : layers)
        velocity.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                            Eigen::VectorXd::Zero(l.biases.size())});

    std::vector<std::size_t> order(static_cast<std::size_t>(inputs.rows()));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(std::span<std::size_t>(order), rng);
        double loss = 0.0;
        for (auto i : order) {
            const auto row = static_cast<Eigen::Index>(i);
            Eigen::VectorXd x = inputs.row(row).transpose();
            Eigen::VectorXd t = targets.row(row).transpose();
            auto acts = model.activations(x);
            loss += 0.5 * (acts.back() - t).squaredNorm();

            Eigen::VectorXd delta =
                ((acts.back() - t).array() * acts.back().array() * (1.0 - acts.back().array())).matrix();
            for (std::size_t l = layers.size(); l-- > 0;) {
                Eigen::VectorXd next_delta;
                if (l > 0)
                    next_delta = ((layers[l].weights.transpose() * delta).array() * acts[l].array() *
                                  (1.0 - acts[l].array()))
                                     .matrix();
                velocity[l].weights = -cfg.learning_rate * delta * acts[l].transpose() + cfg.momentum * velocity[l].weights;
                velocity[l].biases = -cfg.learning_rate * delta + cfg.momentum * velocity[l].biases;
                layers[l].weights += velocity[l].weights;
                layers[l].biases += velocity[l].biases;
                if (l > 0) delta = std::move(next_delta);
            }
        }
        if (!std::isfinite(loss)) throw TrainingError("non-finite training loss", epoch);
        if (on_epoch) on_epoch(epoch, loss);
    }
    return model;
}

std::vector<std::size_t> default_layer_sizes(const Dataset& d, const Encoding& enc, const MlpConfig& cfg) {
    std::vector<std::size_t> sizes{enc.input_width()};
    if (cfg.hidden_sizes) {
        sizes.insert(sizes.end(), cfg.hidden_sizes->begin(), cfg.hidden_sizes->end());
    } else {
        std::size_t predictors = d.num_attributes() - 1;
        sizes.push_back(std::max<std::size_t>(1, (predictors + d.num_classes()) / 2));
    }
    sizes.push_back(enc.output_width());
    return sizes;
}

MlpModel train_mlp(const Dataset& d, const MlpConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    if (d.empty()) throw DataError("cannot train a network on an empty dataset");
    auto data = encode(d);
    auto sizes = default_layer_sizes(d, data.encoding, cfg);
    return train_network(data.inputs, data.targets, std::move(sizes), cfg, data.encoding, on_epoch);
}

void to_json(nlohmann::json& j, const MlpConfig& cfg) {
    j = {{"learning_rate", cfg.learning_rate}, {"momentum", cfg.momentum}, {"epochs", cfg.epochs},
         {"seed", cfg.seed},                   {"init_range", cfg.init_range}};
    j["hidden_sizes"] = cfg.hidden_sizes ? nlohmann::json(*cfg.hidden_sizes) : nlohmann::json("auto");
}

void from_json(const nlohmann::json& j, MlpConfig& cfg) {
    j.at("learning_rate").get_to(cfg.learning_rate);
    j.at("momentum").get_to(cfg.momentum);
    j.at("epochs").get_to(cfg.epochs);
    j.at("seed").get_to(cfg.seed);
    j.at("init_range").get_to(cfg.init_range);
    const auto& h = j.at("hidden_sizes");
    if (h.is_array())
        cfg.hidden_sizes = h.get<std::vector<std::size_t>>();
    else
        cfg.hidden_sizes.reset();
}

void to_json(nlohmann::json& j, const Encoding& e) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : e.columns_) {
        nlohmann::json col{{"attribute", c.attribute}, {"offset", c.offset}, {"width", c.width}};
        if (c.numeric) {
            col["min"] = c.min;
            col["max"] = c.max;
            col["constant"] = c.constant;
        }
        cols.push_back(std::move(col));
    }
    j = {{"input_width", e.input_width_}, {"output_width", e.output_width_}, {"columns", std::move(cols)}};
}

void to_json(nlohmann::json& j, const MlpModel& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : m.layers()) {
        std::vector<double> w(l.weights.data(), l.weights.data() + l.weights.size());
        std::vector<double> b(l.biases.data(), l.biases.data() + l.biases.size());
        layers.push_back({{"rows", l.weights.rows()}, {"cols", l.weights.cols()}, {"weights_col_major", w}, {"biases", b}});
    }
    j = {{"layer_sizes", m.layer_sizes()}, {"activation", "logistic"}, {"layers", std::move(layers)}};
    if (m.encoding()) j["encoding"] = *m.encoding();
}

}  // namespace postop
