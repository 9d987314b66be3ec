#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "postop/naive_bayes.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace postop;

namespace {

Dataset one_attribute_toy() {
    std::vector<Attribute> s{Attribute::nominal("S", {"a", "b", "c"}), Attribute::nominal("d", {"1", "0"})};
    auto row = [](std::size_t v, std::size_t c) { return Instance{{Value::symbol(v), Value::symbol(c)}}; };
    return Dataset("toy", s, 1, {row(0, 0), row(0, 0), row(1, 1), row(2, 0)});
}

}  // namespace

TEST(NaiveBayes, HandCountedTablesOnFourRows) {
    auto m = train_nb(one_attribute_toy());
    // 3 rows of class "1", 1 row of class "0", two classes
    EXPECT_DOUBLE_EQ(m.priors()[0], 4.0 / 6.0);
    EXPECT_DOUBLE_EQ(m.priors()[1], 2.0 / 6.0);
    const auto& t = m.nominal_table(0);
    EXPECT_DOUBLE_EQ(t[0][0], 3.0 / 6.0);
    EXPECT_DOUBLE_EQ(t[0][1], 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(t[0][2], 2.0 / 6.0);
    EXPECT_DOUBLE_EQ(t[1][0], 1.0 / 4.0);
    EXPECT_DOUBLE_EQ(t[1][1], 2.0 / 4.0);
    EXPECT_DOUBLE_EQ(t[1][2], 1.0 / 4.0);

    // S = a: (4/6 * 3/6) vs (2/6 * 1/4)
    auto p = m.predict(Instance{{Value::symbol(0), Value::symbol(0)}});
    EXPECT_NEAR(p[0], (2.0 / 6.0) / (2.0 / 6.0 + 1.0 / 12.0), 1e-12);
}

TEST(NaiveBayes, MatchesDirectCountingOnRandomNominalData) {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        auto d = postop::testing::random_nominal_dataset(rng, 1 + uniform_index(rng, 4), 2 + uniform_index(rng, 12));
        auto m = train_nb(d);
        for (int probe = 0; probe < 10; ++probe) {
            Instance x;
            for (std::size_t j = 0; j < d.num_attributes(); ++j)
                x.values.push_back(Value::symbol(uniform_index(rng, d.attribute(j).domain.size())));
            auto got = m.predict(x);
            auto want = postop::testing::counted_posterior(d, x);
            for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(got[c], want[c], 1e-12);
        }
    }
}

TEST(NaiveBayes, SingleClassDominates) {
    std::vector<Attribute> s{Attribute::nominal("a", {"p", "q"}), Attribute::numeric("x"), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> rows;
    for (int i = 0; i < 6; ++i) rows.push_back(Instance{{Value::symbol(i % 2), Value::real(i), Value::symbol(1)}});
    Dataset d("one", s, 2, rows);
    auto m = train_nb(d);
    EXPECT_GT(m.priors()[1], m.priors()[0]);
    for (const auto& x : d.instances()) {
        auto p = m.predict(x);
        EXPECT_GT(p[1], p[0]);
    }
}

TEST(NaiveBayes, ConstantNumericGetsTheVarianceFloor) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("d", {"1", "0"})};
    Dataset d("c", s, 1,
              {Instance{{Value::real(3.5), Value::symbol(0)}}, Instance{{Value::real(3.5), Value::symbol(0)}},
               Instance{{Value::real(-1.0), Value::symbol(1)}}, Instance{{Value::real(-1.0), Value::symbol(1)}}});
    auto m = train_nb(d);
    EXPECT_EQ(m.gaussian(0)[0].mean, 3.5);
    EXPECT_EQ(m.gaussian(0)[0].variance, NaiveBayesModel::kVarianceFloor);
    EXPECT_EQ(m.gaussian(0)[1].mean, -1.0);
    EXPECT_EQ(m.gaussian(0)[1].variance, NaiveBayesModel::kVarianceFloor);
    auto p = m.predict(Instance{{Value::real(3.5), Value::symbol(0)}});
    EXPECT_TRUE(std::isfinite(p[0]));
    EXPECT_NEAR(p[0], 1.0, 1e-12);
}

TEST(NaiveBayes, GaussianUsesPopulationVariance) {
    std::vector<Attribute> s{Attribute::numeric("x"), Attribute::nominal("d", {"1", "0"})};
    Dataset d("g", s, 1,
              {Instance{{Value::real(1), Value::symbol(0)}}, Instance{{Value::real(3), Value::symbol(0)}},
               Instance{{Value::real(0), Value::symbol(1)}}, Instance{{Value::real(4), Value::symbol(1)}}});
    auto m = train_nb(d);
    EXPECT_DOUBLE_EQ(m.gaussian(0)[0].mean, 2.0);
    EXPECT_DOUBLE_EQ(m.gaussian(0)[0].variance, 1.0);
    EXPECT_DOUBLE_EQ(m.gaussian(0)[1].variance, 4.0);
}

TEST(NaiveBayes, SymmetricModelGivesEvenOdds) {
    std::vector<Attribute> s{Attribute::nominal("a", {"p", "q"}), Attribute::nominal("d", {"1", "0"})};
    auto row = [](std::size_t v, std::size_t c) { return Instance{{Value::symbol(v), Value::symbol(c)}}; };
    Dataset d("sym", s, 1, {row(0, 0), row(1, 0), row(0, 1), row(1, 1)});
    auto p = train_nb(d).predict(row(0, 0));
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(NaiveBayes, MissingValuesAreSkippedAtPrediction) {
    auto d = one_attribute_toy();
    auto m = train_nb(d);
    auto p = m.predict(Instance{{Value::missing(), Value::symbol(0)}});
    EXPECT_NEAR(p[0], m.priors()[0], 1e-12);
}

TEST(NaiveBayes, PosteriorsSumToOne) {
    auto d = postop::testing::synthetic_thoracic();
    auto m = train_nb(d);
    for (const auto& x : d.instances()) {
        auto p = m.predict(x);
        EXPECT_NEAR(p[0] + p[1], 1.0, 1e-9);
    }
}

TEST(NaiveBayes, RejectsEmptyOrIncompleteData) {
    auto d = one_attribute_toy();
    EXPECT_THROW(train_nb(d.with_instances({})), DataError);
    auto rows = d.instances();
    rows[0][0] = Value::missing();
    EXPECT_THROW(train_nb(d.with_instances(rows)), DataError);
}
