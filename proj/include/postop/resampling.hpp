#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "postop/dataset.hpp"

namespace postop {

struct SmoteConfig {
    std::size_t k_neighbors = 5;
    /// Total synthetic growth in percent; must be a multiple of 100.
    unsigned percent = 700;
    std::uint64_t seed = 0;

    void validate() const;
};

/// What a resampling step did, for the run report.
struct ResampleRecord {
    std::string method = "none";
    std::vector<std::string> classes;
    std::vector<std::size_t> original_counts;
    std::vector<std::size_t> final_counts;
    std::size_t minority_class = 0;
    std::size_t synthetic_created = 0;
    SmoteConfig config;
    unsigned applications = 0;
    bool within_folds = false;
};

struct ResampleResult {
    Dataset data;
    ResampleRecord record;
};

/// SMOTE over mixed nominal/numeric predictors.
///
/// Each original minority instance x yields percent/100 synthetic instances.
/// For each, a neighbour n is drawn uniformly from x's k nearest minority
/// neighbours (Euclidean over min-max normalised numerics, plus 1 per nominal
/// mismatch; ties by index). Numerics become x + lambda * (n - x) with a
/// single lambda ~ U[0,1] per synthetic instance. A nominal field takes the
/// majority value of {x, n}; with two voters and ties going to x, that is
/// always x's value. Output is originals then synthetics, shuffled.
ResampleResult smote(const Dataset& d, std::size_t minority_class, const SmoteConfig& cfg);

/// Applies smote `applications` times in sequence, each pass seeing the
/// previous pass's synthetics as minority members (100% three times takes a
/// class from 70 to 560).
ResampleResult smote_repeated(const Dataset& d, std::size_t minority_class, const SmoteConfig& cfg,
                              unsigned applications);

/// Grows the minority class to target_count by drawing originals with
/// replacement. Duplicates are appended after the original rows.
Dataset random_oversample(const Dataset& d, std::size_t minority_class, std::size_t target_count,
                          std::uint64_t seed);

/// Shrinks the majority class to target_count, sampling without
/// replacement. Row order of retained instances is preserved.
Dataset random_undersample(const Dataset& d, std::size_t majority_class, std::size_t target_count,
                           std::uint64_t seed);

/// Smallest class by count; ties go to the first declared class.
std::size_t minority_class_of(const Dataset& d);

void to_json(nlohmann::json& j, const SmoteConfig& cfg);
void from_json(const nlohmann::json& j, SmoteConfig& cfg);
void to_json(nlohmann::json& j, const ResampleRecord& r);
void from_json(const nlohmann::json& j, ResampleRecord& r);

}  // namespace postop
