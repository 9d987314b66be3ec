#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "postop/dataset.hpp"
#include "postop/random.hpp"

namespace postop::testing {

/// Synthetic stand-in with the thoracic schema and 70 T / 400 F. Not the
/// clinical data: values are drawn from plausible ranges with a mild class
/// signal so classifiers have something to learn.
Dataset synthetic_thoracic(std::uint64_t seed = 20240601);

/// Same generator, ARFF text.
std::string synthetic_thoracic_arff(std::uint64_t seed = 20240601);

/// A handful of rows in the thoracic layout, as ARFF.
std::string thoracic_sample_arff();

/// All-nominal dataset: `attributes` predictors with 2..4 values each plus a
/// binary class, `rows` instances, both classes present.
Dataset random_nominal_dataset(Rng& rng, std::size_t attributes, std::size_t rows);

/// Mixed numeric/nominal dataset without missing values.
Dataset random_mixed_dataset(Rng& rng, std::size_t rows);

}  // namespace postop::testing

namespace postop::testing {

/// Rows of `resampled` left over after removing one copy of every row of
/// `original`. Empty optional when some original row is absent.
std::optional<std::vector<Instance>> extra_rows(const Dataset& original, const Dataset& resampled);

/// True when some ordered pair (x, n) of `parents` brackets every numeric
/// coordinate of s, with a single interpolation factor, and s carries x's
/// nominal values.
bool lies_between_parents(const Dataset& d, const Instance& s, std::span<const Instance> parents);

}  // namespace postop::testing
