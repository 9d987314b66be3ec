#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "postop/dataset.hpp"

namespace postop {

struct GaussianParams {
    double mean = 0.0;
    double variance = 0.0;
};

/// Trained naive Bayes tables. Nominal conditionals are add-one smoothed;
/// numeric attributes use per-class Gaussians with a variance floor.
class NaiveBayesModel {
public:
    static constexpr double kVarianceFloor = 1e-6;

    const std::vector<Attribute>& schema() const { return schema_; }
    std::size_t class_index() const { return class_index_; }
    std::size_t num_classes() const { return priors_.size(); }

    const std::vector<double>& priors() const { return priors_; }
    /// P(attribute = value | class), indexed [class][value]. Empty for
    /// numeric attributes and the class attribute.
    const std::vector<std::vector<double>>& nominal_table(std::size_t attribute) const { return nominal_.at(attribute); }
    /// Indexed [class]. Empty for nominal attributes and the class attribute.
    const std::vector<GaussianParams>& gaussian(std::size_t attribute) const { return gaussian_.at(attribute); }

    /// Normalised posterior over classes, computed in log space. Missing
    /// predictor values are skipped.
    std::vector<double> predict(const Instance& x) const;

    friend NaiveBayesModel train_nb(const Dataset& d);
    friend void to_json(nlohmann::json& j, const NaiveBayesModel& m);

private:
    std::vector<Attribute> schema_;
    std::size_t class_index_ = 0;
    std::vector<double> priors_;
    std::vector<std::vector<std::vector<double>>> nominal_;
    std::vector<std::vector<GaussianParams>> gaussian_;
};

NaiveBayesModel train_nb(const Dataset& d);

inline std::vector<double> nb_predict(const NaiveBayesModel& m, const Instance& x) { return m.predict(x); }

void to_json(nlohmann::json& j, const NaiveBayesModel& m);

}  // namespace postop
