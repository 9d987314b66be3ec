#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "postop/dataset.hpp"

namespace postop {

struct TreeConfig {
    std::size_t min_leaf_instances = 2;
    double pruning_confidence = 0.25;
    bool prune = true;

    void validate() const;
};

/// Test at an internal node. Numeric: child 0 takes value <= threshold,
/// child 1 takes value > threshold. Nominal: `branch_of_value[v]` names
/// the child for domain value v; values that had no training instances
/// share the child with the largest training mass.
struct NodeTest {
    std::size_t attribute = 0;
    std::optional<double> threshold;
    std::vector<std::size_t> branch_of_value;

    bool is_numeric() const { return threshold.has_value(); }
};

struct TreeNode {
    std::vector<double> class_counts;
    std::size_t predicted_class = 0;
    std::optional<NodeTest> test;
    std::vector<TreeNode> children;

    bool is_leaf() const { return !test.has_value(); }
    std::size_t leaf_count() const;
    std::size_t node_count() const;
    double total() const;

    static TreeNode leaf(std::vector<double> counts);
};

/// A trained tree together with the schema it routes over.
class DecisionTree {
public:
    DecisionTree(std::vector<Attribute> schema, std::size_t class_index, TreeNode root);

    const TreeNode& root() const { return root_; }
    const std::vector<Attribute>& schema() const { return schema_; }
    std::size_t class_index() const { return class_index_; }
    std::size_t num_classes() const { return schema_[class_index_].domain.size(); }

    /// Leaf reached by x. Missing or unseen values follow the child with
    /// the largest training mass.
    const TreeNode& route(const Instance& x) const;

    /// Laplace-corrected distribution (count + 1) / (total + classes) at
    /// the leaf reached by x.
    std::vector<double> predict(const Instance& x) const;

private:
    std::vector<Attribute> schema_;
    std::size_t class_index_;
    TreeNode root_;
};

/// Gain, split information and gain ratio of one candidate split.
struct SplitScore {
    std::size_t attribute = 0;
    double gain = 0.0;
    double split_info = 0.0;
    double gain_ratio = 0.0;
    std::optional<double> threshold;
};

/// Scores splitting `rows` of d on `attribute`. For numeric attributes the
/// threshold is the midpoint between adjacent distinct values that
/// maximises information gain (ties: lower threshold). Returns nullopt when
/// the split is not admissible: fewer than two branches hold at least
/// `min_leaf` rows, or split information is zero.
std::optional<SplitScore> score_split(const Dataset& d, std::span<const std::size_t> rows, std::size_t attribute,
                                      std::size_t min_leaf = 1);

/// Gain ratio over the whole dataset; nullopt means "not splittable".
/// Throws std::invalid_argument for the class attribute.
std::optional<double> gain_ratio(const Dataset& d, std::size_t attribute);

/// Upper-confidence-bound error count C4.5 adds to `errors` observed among
/// `n` instances at confidence `cf`.
double pessimistic_extra_errors(double n, double errors, double cf);

DecisionTree train_tree(const Dataset& d, const TreeConfig& cfg = {});

inline std::vector<double> tree_predict(const DecisionTree& t, const Instance& x) { return t.predict(x); }

/// One conjunct of a rule. Nominal: value in `values`. Numeric: value in
/// (lower, upper], either bound optional.
struct Condition {
    std::size_t attribute = 0;
    std::vector<std::size_t> values;
    std::optional<double> lower;
    std::optional<double> upper;

    bool matches(const Value& v) const;
    bool operator==(const Condition&) const = default;
};

struct Rule {
    std::vector<Condition> antecedent;
    std::size_t consequent = 0;

    bool matches(const Instance& x) const;
    bool operator==(const Rule&) const = default;
};

/// One rule per leaf, in depth-first order; conjuncts on the same attribute
/// are merged.
std::vector<Rule> tree_to_rules(const DecisionTree& t);

/// Class of the first rule matching x, if any.
std::optional<std::size_t> classify_by_rules(std::span<const Rule> rules, const Instance& x);

/// "(S1, v11) ∩ (S2, v21) ⇒ (d = 1)"
std::string format_rule(const Rule& r, const std::vector<Attribute>& schema, std::size_t class_index);

/// Indented tree listing, one node per line.
std::string format_tree(const DecisionTree& t);

void to_json(nlohmann::json& j, const DecisionTree& t);

}  // namespace postop
