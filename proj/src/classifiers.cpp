#include "postop/classifiers.hpp"

#include "postop/naive_bayes.hpp"

namespace postop {

namespace {

template <class Model>
class Trained final : public Classifier {
public:
    explicit Trained(Model m) : model_(std::move(m)) {}
    std::vector<double> predict(const Instance& x) const override { return model_.predict(x); }

private:
    Model model_;
};

}  // namespace

ClassifierSpec mlp_spec(const MlpConfig& cfg) {
    cfg.validate();
    nlohmann::json j = cfg;
    j.erase("seed");
    return {"mlp", "MLP", std::move(j), [cfg](const Dataset& d, std::uint64_t seed) -> std::unique_ptr<Classifier> {
                MlpConfig c = cfg;
                c.seed = seed;
                return std::make_unique<Trained<MlpModel>>(train_mlp(d, c));
            }};
}

ClassifierSpec j48_spec(const TreeConfig& cfg) {
    cfg.validate();
    nlohmann::json j = {{"min_leaf_instances", cfg.min_leaf_instances},
                        {"pruning_confidence", cfg.pruning_confidence},
                        {"prune", cfg.prune}};
    return {"j48", "J48", std::move(j), [cfg](const Dataset& d, std::uint64_t) -> std::unique_ptr<Classifier> {
                return std::make_unique<Trained<DecisionTree>>(train_tree(d, cfg));
            }};
}

ClassifierSpec nb_spec() {
    return {"nb", "Naive Bayes", nlohmann::json::object(),
            [](const Dataset& d, std::uint64_t) -> std::unique_ptr<Classifier> {
                return std::make_unique<Trained<NaiveBayesModel>>(train_nb(d));
            }};
}

const std::vector<std::string>& known_classifiers() {
    static const std::vector<std::string> ids{"mlp", "j48", "nb"};
    return ids;
}

}  // namespace postop
