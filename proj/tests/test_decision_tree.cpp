#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "postop/decision_tree.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace postop;
using postop::testing::all_nominal_inputs;
using postop::testing::branching_table;
using postop::testing::entropy_gain_ratio;

namespace {

Dataset random_table(Rng& rng) {
    std::vector<Attribute> s{Attribute::nominal("a", {"x", "y", "z"}), Attribute::numeric("b"),
                             Attribute::nominal("c", {"p", "q"}), Attribute::nominal("d", {"1", "0"})};
    std::size_t rows = 2 + uniform_index(rng, 14);
    std::vector<Instance> inst;
    for (std::size_t r = 0; r < rows; ++r)
        inst.push_back(Instance{{Value::symbol(uniform_index(rng, 3)), Value::real(static_cast<double>(uniform_index(rng, 6))),
                                 Value::symbol(uniform_index(rng, 2)), Value::symbol(r < 2 ? r : uniform_index(rng, 2))}});
    return Dataset("t", s, 3, inst);
}

std::size_t argmax(const std::vector<double>& p) {
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

TEST(GainRatio, PerfectBinaryPredictor) {
    std::vector<Attribute> s{Attribute::nominal("a", {"p", "q"}), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (std::size_t i = 0; i < 8; ++i) rows.push_back(Instance{{Value::symbol(i % 2), Value::symbol(i % 2)}});
    auto g = gain_ratio(Dataset("p", s, 1, rows), 0);
    ASSERT_TRUE(g);
    EXPECT_NEAR(*g, 1.0, 1e-15);
}

TEST(GainRatio, ConstantAttributeIsNotSplittable) {
    std::vector<Attribute> s{Attribute::nominal("a", {"p", "q"}), Attribute::numeric("x"), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (std::size_t i = 0; i < 6; ++i) rows.push_back(Instance{{Value::symbol(1), Value::real(4.0), Value::symbol(i % 2)}});
    Dataset d("c", s, 2, rows);
    EXPECT_FALSE(gain_ratio(d, 0));
    EXPECT_FALSE(gain_ratio(d, 1));
    EXPECT_THROW(gain_ratio(d, 2), std::invalid_argument);
}

TEST(GainRatio, EightRowTableByHand) {
    // a: x -> {1,1,1,0}, y -> {0,0,0,1}
    std::vector<Attribute> s{Attribute::nominal("a", {"x", "y"}), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (std::size_t c : {0, 0, 0, 1}) rows.push_back(Instance{{Value::symbol(0), Value::symbol(c)}});
    for (std::size_t c : {1, 1, 1, 0}) rows.push_back(Instance{{Value::symbol(1), Value::symbol(c)}});
    double h_child = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
    auto g = gain_ratio(Dataset("h", s, 1, rows), 0);
    ASSERT_TRUE(g);
    EXPECT_NEAR(*g, 1.0 - h_child, 1e-12);
}

TEST(GainRatio, MatchesEntropyOracleOnRandomTables) {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        auto d = random_table(rng);
        for (std::size_t a = 0; a < 3; ++a) {
            auto got = gain_ratio(d, a);
            auto want = entropy_gain_ratio(d, a);
            ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial << " attribute " << a;
            if (got) EXPECT_NEAR(*got, *want, 1e-10) << "trial " << trial << " attribute " << a;
        }
    }
}

TEST(GainRatio, NumericThresholdIsAMidpoint) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (double v : {1.0, 2.0, 3.0}) rows.push_back(Instance{{Value::real(v), Value::symbol(0)}});
    for (double v : {5.0, 6.0}) rows.push_back(Instance{{Value::real(v), Value::symbol(1)}});
    Dataset d("m", s, 1, rows);
    std::vector<std::size_t> all{0, 1, 2, 3, 4};
    auto sc = score_split(d, all, 0);
    ASSERT_TRUE(sc);
    EXPECT_EQ(*sc->threshold, 4.0);
    EXPECT_NEAR(sc->gain_ratio, 1.0, 1e-15);
}

TEST(Tree, PureDataGivesOneLeaf) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (int i = 0; i < 5; ++i) rows.push_back(Instance{{Value::real(i), Value::symbol(1)}});
    auto t = train_tree(Dataset("pure", s, 1, rows));
    EXPECT_TRUE(t.root().is_leaf());
    EXPECT_EQ(t.root().predicted_class, 1u);
    auto rules = tree_to_rules(t);
    ASSERT_EQ(rules.size(), 1u);
    EXPECT_TRUE(rules[0].antecedent.empty());
}

TEST(Tree, BranchingStructureYieldsFiveRules) {
    for (bool prune : {false, true}) {
        auto d = branching_table(4);
        auto t = train_tree(d, TreeConfig{2, 0.25, prune});
        auto rules = tree_to_rules(t);
        std::vector<std::string> text;
        for (const auto& r : rules) text.push_back(format_rule(r, d.schema(), d.class_index()));
        EXPECT_EQ(text, (std::vector<std::string>{
                            "(S1, v11) ∩ (S2, v21) ⇒ (d = 1)",
                            "(S1, v11) ∩ (S2, v22) ⇒ (d = 0)",
                            "(S1, v12) ∩ (S3, v31) ⇒ (d = 1)",
                            "(S1, v12) ∩ (S3, v32) ⇒ (d = 0)",
                            "(S1, v13) ⇒ (d = 1)",
                        }))
            << format_tree(t);
    }
}

TEST(Tree, RulesAgreeWithPredictionEverywhere) {
    auto d = branching_table(3);
    auto t = train_tree(d);
    auto rules = tree_to_rules(t);
    for (const auto& x : all_nominal_inputs(d)) {
        auto by_rule = classify_by_rules(rules, x);
        ASSERT_TRUE(by_rule);
        EXPECT_EQ(*by_rule, argmax(t.predict(x)));
    }

    Rng rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        auto m = postop::testing::random_mixed_dataset(rng, 20 + uniform_index(rng, 60));
        auto n = postop::testing::random_nominal_dataset(rng, 3, 30);
        for (const auto& data : {m, n}) {
            auto tree = train_tree(data, TreeConfig{1, 0.25, trial % 2 == 0});
            auto rs = tree_to_rules(tree);
            EXPECT_EQ(rs.size(), tree.root().leaf_count());
            for (int probe = 0; probe < 50; ++probe) {
                Instance x = data.instance(uniform_index(rng, data.size()));
                for (std::size_t j = 0; j < x.size(); ++j) {
                    if (j == data.class_index()) continue;
                    if (data.attribute(j).is_numeric())
                        x[j] = Value::real(uniform_real(rng, -4.0, 12.0));
                    else
                        x[j] = Value::symbol(uniform_index(rng, data.attribute(j).domain.size()));
                }
                auto by_rule = classify_by_rules(rs, x);
                ASSERT_TRUE(by_rule);
                EXPECT_EQ(*by_rule, argmax(tree.predict(x)));
            }
        }
    }
}

TEST(Tree, StumpOverThreeValuesGivesThreeRules) {
    std::vector<Attribute> s{Attribute::nominal("a", {"x", "y", "z"}), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (std::size_t i = 0; i < 12; ++i) rows.push_back(Instance{{Value::symbol(i % 3), Value::symbol(i % 3 == 1 ? 1 : 0)}});
    for (std::size_t i = 0; i < 3; ++i) rows.push_back(Instance{{Value::symbol(i), Value::symbol(i % 3 == 1 ? 1 : 0)}});
    auto t = train_tree(Dataset("stump", s, 1, rows), TreeConfig{1, 0.25, false});
    EXPECT_EQ(tree_to_rules(t).size(), 3u);
}

TEST(Tree, TrainingRowsLandInLeavesThatCountedThem) {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        auto d = postop::testing::random_mixed_dataset(rng, 10 + uniform_index(rng, 80));
        auto t = train_tree(d, TreeConfig{1 + uniform_index(rng, 3), 0.25, false});
        std::map<const TreeNode*, std::vector<double>> seen;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const TreeNode* leaf = &t.route(d.instance(i));
            auto& c = seen[leaf];
            c.resize(2, 0.0);
            c[d.class_of(i)] += 1;
            ASSERT_GE(leaf->class_counts[d.class_of(i)], 1.0);
        }
        for (const auto& [leaf, counts] : seen) EXPECT_EQ(counts, leaf->class_counts);
        std::size_t leaves_with_rows = seen.size();
        EXPECT_EQ(leaves_with_rows, t.root().leaf_count());
    }
}

TEST(Tree, PruningNeverAddsLeaves) {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        auto d = postop::testing::random_mixed_dataset(rng, 30 + uniform_index(rng, 120));
        auto full = train_tree(d, TreeConfig{2, 0.25, false});
        auto pruned = train_tree(d, TreeConfig{2, 0.25, true});
        EXPECT_LE(pruned.root().leaf_count(), full.root().leaf_count());
    }
}

TEST(Tree, LaplaceCorrectedLeaf) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("d", {"T", "F"})};
    DecisionTree t(s, 1, TreeNode::leaf({8.0, 2.0}));
    auto p = t.predict(Instance{{Value::real(0.0), Value::symbol(0)}});
    EXPECT_DOUBLE_EQ(p[0], 9.0 / 12.0);
    EXPECT_DOUBLE_EQ(p[1], 3.0 / 12.0);

    DecisionTree empty(s, 1, TreeNode::leaf({0.0, 0.0}));
    auto u = empty.predict(Instance{{Value::real(0.0), Value::symbol(0)}});
    EXPECT_DOUBLE_EQ(u[0], 0.5);
    EXPECT_DOUBLE_EQ(u[1], 0.5);
}

TEST(Tree, ManualTraceThroughDepthTwo) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("c", {"p", "q"}), Attribute::nominal("d", {"T", "F"})};
    TreeNode inner;
    inner.class_counts = {4, 4};
    inner.test = NodeTest{1, std::nullopt, {0, 1}};
    inner.children = {TreeNode::leaf({3, 1}), TreeNode::leaf({1, 3})};
    TreeNode root;
    root.class_counts = {9, 5};
    root.test = NodeTest{0, 2.5, {}};
    root.children = {TreeNode::leaf({5, 1}), inner};
    DecisionTree t(s, 2, root);

    // x = 4 > 2.5 goes right, c = q takes the second leaf {1, 3}
    auto p = t.predict(Instance{{Value::real(4.0), Value::symbol(1), Value::symbol(0)}});
    EXPECT_DOUBLE_EQ(p[0], 2.0 / 6.0);
    EXPECT_DOUBLE_EQ(p[1], 4.0 / 6.0);
    auto rules = tree_to_rules(t);
    ASSERT_EQ(rules.size(), 3u);
    EXPECT_EQ(format_rule(rules[2], s, 2), "(x > 2.5) ∩ (c, q) ⇒ (d = F)");
}

TEST(Tree, NumericConjunctsMergeIntoIntervals) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("d", {"T", "F"})};
    TreeNode inner;
    inner.class_counts = {2, 2};
    inner.test = NodeTest{0, 7.0, {}};
    inner.children = {TreeNode::leaf({2, 0}), TreeNode::leaf({0, 2})};
    TreeNode root;
    root.class_counts = {5, 2};
    root.test = NodeTest{0, 3.0, {}};
    root.children = {TreeNode::leaf({3, 0}), inner};
    DecisionTree t(s, 1, root);
    auto rules = tree_to_rules(t);
    ASSERT_EQ(rules.size(), 3u);
    EXPECT_EQ(rules[1].antecedent.size(), 1u);
    EXPECT_EQ(format_rule(rules[1], s, 1), "(3 < x ≤ 7) ⇒ (d = T)");
}

TEST(Tree, PessimisticErrorMatchesKnownValues) {
    // C4.5 reference points at CF = 0.25
    EXPECT_NEAR(pessimistic_extra_errors(6, 0, 0.25), 6 * (1 - std::pow(0.25, 1.0 / 6)), 1e-12);
    // Wilson upper bound with z = 0.6745 and a half-error continuity term
    const double z = 0.6744897501960817, n = 14, e = 5, f = (e + 0.5) / n;
    const double upper = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
    EXPECT_NEAR(pessimistic_extra_errors(n, e, 0.25), upper * n - e, 1e-9);
    EXPECT_LT(pessimistic_extra_errors(100, 5, 0.25), pessimistic_extra_errors(100, 5, 0.1));
    EXPECT_NEAR(pessimistic_extra_errors(2, 2, 0.25), 0.0, 1e-12);
}

TEST(Tree, SeparatesTheSyntheticStandIn) {
    auto d = postop::testing::synthetic_thoracic();
    auto t = train_tree(d);
    EXPECT_GE(t.root().leaf_count(), 1u);
    std::size_t right = 0;
    for (std::size_t i = 0; i < d.size(); ++i) right += argmax(t.predict(d.instance(i))) == d.class_of(i);
    EXPECT_GE(right, 400u);
}

TEST(Tree, RejectsBadConfig) {
    auto d = branching_table(1);
    EXPECT_THROW(train_tree(d, TreeConfig{0, 0.25, true}), std::invalid_argument);
    EXPECT_THROW(train_tree(d, TreeConfig{2, 1.0, true}), std::invalid_argument);
}
