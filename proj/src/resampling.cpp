#include "postop/resampling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "postop/random.hpp"

namespace postop {

void SmoteConfig::validate() const {
    if (k_neighbors < 1) throw std::invalid_argument("SMOTE k_neighbors must be at least 1");
    if (percent % 100 != 0) throw std::invalid_argument("SMOTE percent must be a multiple of 100");
}

namespace {

void check_class(const Dataset& d, std::size_t c) {
    if (c >= d.num_classes()) throw DataError("class index " + std::to_string(c) + " out of range");
}

std::vector<std::size_t> indices_of_class(const Dataset& d, std::size_t c) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d.class_of(i) == c) out.push_back(i);
    return out;
}

/// Heterogeneous distance: min-max normalised numerics, 0/1 nominal mismatch.
class MixedDistance {
public:
    explicit MixedDistance(const Dataset& d) : d_(d), lo_(d.num_attributes(), 0.0), span_(d.num_attributes(), 0.0) {
        for (std::size_t j = 0; j < d.num_attributes(); ++j) {
            if (j == d.class_index() || !d.attribute(j).is_numeric() || d.empty()) continue;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto& x : d.instances()) {
                lo = std::min(lo, x[j].real_value());
                hi = std::max(hi, x[j].real_value());
            }
            lo_[j] = lo;
            span_[j] = hi - lo;
        }
    }

    double squared(const Instance& a, const Instance& b) const {
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (j == d_.class_index()) continue;
            if (d_.attribute(j).is_numeric()) {
                if (span_[j] > 0.0) {
                    double t = (a[j].real_value() - b[j].real_value()) / span_[j];
                    s += t * t;
                }
            } else if (a[j] != b[j]) {
                s += 1.0;
            }
        }
        return s;
    }

private:
    const Dataset& d_;
    std::vector<double> lo_;
    std::vector<double> span_;
};

Instance interpolate(const Dataset& d, const Instance& x, const Instance& n, double lambda) {
    Instance out = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (j == d.class_index() || !d.attribute(j).is_numeric()) continue;
        double a = x[j].real_value();
        double b = n[j].real_value();
        // rounding in a + lambda*(b - a) can step just outside [a, b]
        double v = std::clamp(a + lambda * (b - a), std::min(a, b), std::max(a, b));
        out[j] = Value::real(v);
    }
    return out;
}

}  // namespace

std::size_t minority_class_of(const Dataset& d) {
    auto counts = class_counts(d);
    return static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
}

ResampleResult smote(const Dataset& d, std::size_t minority_class, const SmoteConfig& cfg) {
    cfg.validate();
    check_class(d, minority_class);
    if (d.has_missing_predictors()) throw DataError("SMOTE requires a dataset without missing values");

    ResampleRecord record;
    record.method = "smote";
    record.classes = d.class_attribute().domain;
    record.original_counts = class_counts(d);
    record.minority_class = minority_class;
    record.config = cfg;
    record.applications = 1;

    auto minority = indices_of_class(d, minority_class);
    if (minority.empty())
        throw DataError("minority class '" + d.class_attribute().domain[minority_class] + "' has no instances");
    if (cfg.k_neighbors >= minority.size())
        throw DataError("k_neighbors (" + std::to_string(cfg.k_neighbors) + ") must be below the minority count (" +
                        std::to_string(minority.size()) + ")");

    if (cfg.percent == 0) {
        record.final_counts = record.original_counts;
        return {d, record};
    }

    MixedDistance dist(d);
    const std::size_t m = minority.size();
    std::vector<std::vector<std::size_t>> neighbours(m);
    std::vector<std::pair<double, std::size_t>> scratch;
    for (std::size_t a = 0; a < m; ++a) {
        scratch.clear();
        for (std::size_t b = 0; b < m; ++b)
            if (a != b) scratch.emplace_back(dist.squared(d.instance(minority[a]), d.instance(minority[b])), b);
        std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(cfg.k_neighbors),
                          scratch.end());
        for (std::size_t r = 0; r < cfg.k_neighbors; ++r) neighbours[a].push_back(minority[scratch[r].second]);
    }

    Rng rng(cfg.seed);
    const std::size_t per_instance = cfg.percent / 100;
    std::vector<Instance> rows = d.instances();
    rows.reserve(d.size() + m * per_instance);
    for (std::size_t a = 0; a < m; ++a) {
        const auto& x = d.instance(minority[a]);
        for (std::size_t r = 0; r < per_instance; ++r) {
            const auto& n = d.instance(neighbours[a][uniform_index(rng, cfg.k_neighbors)]);
            rows.push_back(interpolate(d, x, n, uniform_unit(rng)));
        }
    }
    shuffle(std::span<Instance>(rows), rng);

    record.synthetic_created = m * per_instance;
    Dataset out = d.with_instances(std::move(rows));
    record.final_counts = class_counts(out);
    return {std::move(out), std::move(record)};
}

ResampleResult smote_repeated(const Dataset& d, std::size_t minority_class, const SmoteConfig& cfg,
                              unsigned applications) {
    if (applications == 0) throw std::invalid_argument("SMOTE repeat count must be at least 1");
    ResampleResult current{d, {}};
    std::size_t synthetic = 0;
    for (unsigned pass = 0; pass < applications; ++pass) {
        SmoteConfig step = cfg;
        step.seed = derive_seed(cfg.seed, "smote-pass", pass);
        auto next = smote(current.data, minority_class, step);
        synthetic += next.record.synthetic_created;
        current.data = std::move(next.data);
    }
    ResampleRecord record;
    record.method = "smote-repeat";
    record.classes = d.class_attribute().domain;
    record.original_counts = class_counts(d);
    record.final_counts = class_counts(current.data);
    record.minority_class = minority_class;
    record.synthetic_created = synthetic;
    record.config = cfg;
    record.applications = applications;
    current.record = std::move(record);
    return current;
}

Dataset random_oversample(const Dataset& d, std::size_t minority_class, std::size_t target_count,
                          std::uint64_t seed) {
    check_class(d, minority_class);
    auto minority = indices_of_class(d, minority_class);
    if (minority.empty()) throw DataError("cannot oversample an empty class");
    if (target_count < minority.size())
        throw DataError("oversampling target " + std::to_string(target_count) + " is below the current count " +
                        std::to_string(minority.size()));
    Rng rng(seed);
    std::vector<Instance> rows = d.instances();
    for (std::size_t extra = target_count - minority.size(); extra > 0; --extra)
        rows.push_back(d.instance(minority[uniform_index(rng, minority.size())]));
    return d.with_instances(std::move(rows));
}

Dataset random_undersample(const Dataset& d, std::size_t majority_class, std::size_t target_count,
                           std::uint64_t seed) {
    check_class(d, majority_class);
    auto majority = indices_of_class(d, majority_class);
    if (target_count > majority.size())
        throw DataError("undersampling target " + std::to_string(target_count) + " exceeds the current count " +
                        std::to_string(majority.size()));
    Rng rng(seed);
    shuffle(std::span<std::size_t>(majority), rng);
    std::vector<bool> drop(d.size(), false);
    for (std::size_t r = target_count; r < majority.size(); ++r) drop[majority[r]] = true;
    std::vector<Instance> rows;
    rows.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!drop[i]) rows.push_back(d.instance(i));
    return d.with_instances(std::move(rows));
}

void to_json(nlohmann::json& j, const SmoteConfig& cfg) {
    j = {{"k_neighbors", cfg.k_neighbors}, {"percent", cfg.percent}, {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, SmoteConfig& cfg) {
    j.at("k_neighbors").get_to(cfg.k_neighbors);
    j.at("percent").get_to(cfg.percent);
    j.at("seed").get_to(cfg.seed);
}

void to_json(nlohmann::json& j, const ResampleRecord& r) {
    auto counts = [&](const std::vector<std::size_t>& c) {
        nlohmann::json o = nlohmann::json::object();
        for (std::size_t i = 0; i < r.classes.size() && i < c.size(); ++i) o[r.classes[i]] = c[i];
        return o;
    };
    j = {{"method", r.method},
         {"classes", r.classes},
         {"minority_class", r.classes.empty() ? "" : r.classes.at(r.minority_class)},
         {"original_counts", counts(r.original_counts)},
         {"final_counts", counts(r.final_counts)},
         {"synthetic_created", r.synthetic_created},
         {"config", r.config},
         {"applications", r.applications},
         {"within_folds", r.within_folds}};
}

void from_json(const nlohmann::json& j, ResampleRecord& r) {
    j.at("method").get_to(r.method);
    j.at("classes").get_to(r.classes);
    auto counts = [&](const nlohmann::json& o) {
        std::vector<std::size_t> c;
        for (const auto& name : r.classes) c.push_back(o.value(name, std::size_t{0}));
        return c;
    };
    r.original_counts = counts(j.at("original_counts"));
    r.final_counts = counts(j.at("final_counts"));
    auto minority = j.at("minority_class").get<std::string>();
    auto it = std::find(r.classes.begin(), r.classes.end(), minority);
    r.minority_class = it == r.classes.end() ? 0 : static_cast<std::size_t>(it - r.classes.begin());
    j.at("synthetic_created").get_to(r.synthetic_created);
    j.at("config").get_to(r.config);
    j.at("applications").get_to(r.applications);
    j.at("within_folds").get_to(r.within_folds);
}

}  // namespace postop
