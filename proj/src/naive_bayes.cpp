#include "postop/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace postop {

NaiveBayesModel train_nb(const Dataset& d) {
    if (d.empty()) throw DataError("cannot train naive Bayes on an empty dataset");
    if (d.has_missing_predictors()) throw DataError("naive Bayes training requires imputed data");

    NaiveBayesModel m;
    m.schema_ = d.schema();
    m.class_index_ = d.class_index();
    const std::size_t k = d.num_classes();
    const auto counts = class_counts(d);

    m.priors_.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        m.priors_[c] = (static_cast<double>(counts[c]) + 1.0) / (static_cast<double>(d.size()) + static_cast<double>(k));

    m.nominal_.assign(d.num_attributes(), {});
    m.gaussian_.assign(d.num_attributes(), {});
    for (std::size_t j = 0; j < d.num_attributes(); ++j) {
        if (j == d.class_index()) continue;
        const auto& attr = d.attribute(j);
        if (attr.is_nominal()) {
            const std::size_t v = attr.domain.size();
            std::vector<std::vector<double>> freq(k, std::vector<double>(v, 0.0));
            for (std::size_t i = 0; i < d.size(); ++i) freq[d.class_of(i)][d.instance(i)[j].symbol_index()] += 1.0;
            for (std::size_t c = 0; c < k; ++c)
                for (auto& f : freq[c])
                    f = (f + 1.0) / (static_cast<double>(counts[c]) + static_cast<double>(v));
            m.nominal_[j] = std::move(freq);
            continue;
        }

        // Two-pass mean/variance per class; an empty class borrows the pooled
        // statistics so its density stays well defined.
        std::vector<double> sum(k + 1, 0.0);
        std::vector<double> n(k + 1, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double x = d.instance(i)[j].real_value();
            sum[d.class_of(i)] += x;
            sum[k] += x;
            n[d.class_of(i)] += 1.0;
            n[k] += 1.0;
        }
        std::vector<double> mean(k + 1), sq(k + 1, 0.0);
        for (std::size_t c = 0; c <= k; ++c) mean[c] = n[c] > 0 ? sum[c] / n[c] : 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            double x = d.instance(i)[j].real_value();
            double a = x - mean[d.class_of(i)];
            double b = x - mean[k];
            sq[d.class_of(i)] += a * a;
            sq[k] += b * b;
        }
        std::vector<GaussianParams> params(k);
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t src = n[c] > 0 ? c : k;
            double var = sq[src] / n[src];
            params[c] = {mean[src], std::max(var, NaiveBayesModel::kVarianceFloor)};
        }
        m.gaussian_[j] = std::move(params);
    }
    return m;
}

std::vector<double> NaiveBayesModel::predict(const Instance& x) const {
    if (x.size() != schema_.size()) throw DataError("instance arity does not match the naive Bayes model");
    const std::size_t k = priors_.size();
    std::vector<double> logp(k);
    for (std::size_t c = 0; c < k; ++c) logp[c] = std::log(priors_[c]);

    for (std::size_t j = 0; j < schema_.size(); ++j) {
        if (j == class_index_ || x[j].is_missing()) continue;
        if (schema_[j].is_nominal()) {
            auto v = x[j].symbol_index();
            for (std::size_t c = 0; c < k; ++c) logp[c] += std::log(nominal_[j][c].at(v));
        } else {
            double value = x[j].real_value();
            for (std::size_t c = 0; c < k; ++c) {
                const auto& g = gaussian_[j][c];
                double z = value - g.mean;
                logp[c] += -0.5 * std::log(2.0 * std::numbers::pi * g.variance) - z * z / (2.0 * g.variance);
            }
        }
    }

    double top = *std::max_element(logp.begin(), logp.end());
    std::vector<double> post(k);
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) total += post[c] = std::exp(logp[c] - top);
    for (auto& p : post) p /= total;
    return post;
}

void to_json(nlohmann::json& j, const NaiveBayesModel& m) {
    const auto& classes = m.schema_[m.class_index_].domain;
    j = nlohmann::json::object();
    j["classes"] = classes;
    j["priors"] = m.priors_;
    nlohmann::json attrs = nlohmann::json::array();
    for (std::size_t a = 0; a < m.schema_.size(); ++a) {
        if (a == m.class_index_) continue;
        nlohmann::json entry{{"name", m.schema_[a].name}};
        if (m.schema_[a].is_nominal()) {
            entry["kind"] = "nominal";
            entry["values"] = m.schema_[a].domain;
            entry["conditionals"] = m.nominal_[a];
        } else {
            entry["kind"] = "numeric";
            nlohmann::json g = nlohmann::json::array();
            for (const auto& p : m.gaussian_[a]) g.push_back({{"mean", p.mean}, {"variance", p.variance}});
            entry["gaussian"] = g;
        }
        attrs.push_back(std::move(entry));
    }
    j["attributes"] = std::move(attrs);
}

}  // namespace postop
