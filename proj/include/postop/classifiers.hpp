#pragma once

#include <string>
#include <vector>

#include "postop/decision_tree.hpp"
#include "postop/evaluation.hpp"
#include "postop/mlp.hpp"

namespace postop {

/// `cfg.seed` is ignored; each training call uses the seed it is handed.
ClassifierSpec mlp_spec(const MlpConfig& cfg);
ClassifierSpec j48_spec(const TreeConfig& cfg);
ClassifierSpec nb_spec();

/// Ids accepted by the harness, in report column order.
const std::vector<std::string>& known_classifiers();

}  // namespace postop
