#include "postop/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace postop {

Attribute Attribute::nominal(std::string name, std::vector<std::string> domain) {
    return Attribute{std::move(name), AttributeKind::nominal, std::move(domain), AttributeRole::predictor};
}

Attribute Attribute::numeric(std::string name) {
    return Attribute{std::move(name), AttributeKind::numeric, {}, AttributeRole::predictor};
}

std::optional<std::size_t> Attribute::index_of(std::string_view symbol) const {
    auto it = std::find(domain.begin(), domain.end(), symbol);
    if (it == domain.end()) return std::nullopt;
    return static_cast<std::size_t>(it - domain.begin());
}

Value::Value(double x) : v_(x) {
    if (!std::isfinite(x)) throw DataError("non-finite numeric value");
}

std::size_t Value::symbol_index() const {
    if (auto s = std::get_if<Symbol>(&v_)) return s->index;
    throw DataError(is_missing() ? "expected a nominal value, found missing" : "expected a nominal value, found a number");
}

double Value::real_value() const {
    if (auto x = std::get_if<double>(&v_)) return *x;
    throw DataError(is_missing() ? "expected a numeric value, found missing" : "expected a numeric value, found a symbol");
}

namespace {

void validate_schema(const std::vector<Attribute>& schema, std::size_t class_index) {
    if (schema.empty()) throw DataError("schema has no attributes");
    if (class_index >= schema.size()) throw DataError("class attribute index out of range");
    std::set<std::string> names;
    for (const auto& a : schema) {
        if (a.name.empty()) throw DataError("attribute with empty name");
        if (!names.insert(a.name).second) throw DataError("duplicate attribute name '" + a.name + "'");
        if (a.is_nominal()) {
            if (a.domain.empty()) throw DataError("nominal attribute '" + a.name + "' has an empty domain");
            std::set<std::string> seen(a.domain.begin(), a.domain.end());
            if (seen.size() != a.domain.size())
                throw DataError("nominal attribute '" + a.name + "' has duplicate values");
        } else if (!a.domain.empty()) {
            throw DataError("numeric attribute '" + a.name + "' carries a domain");
        }
    }
    const auto& cls = schema[class_index];
    if (!cls.is_nominal() || cls.domain.size() != 2)
        throw DataError("class attribute '" + cls.name + "' must be nominal with exactly two values");
}

void validate_instance(const std::vector<Attribute>& schema, std::size_t class_index, const Instance& x,
                       std::size_t row) {
    if (x.size() != schema.size()) {
        std::ostringstream msg;
        msg << "instance " << row << " has " << x.size() << " values, schema has " << schema.size();
        throw DataError(msg.str());
    }
    for (std::size_t j = 0; j < schema.size(); ++j) {
        const auto& v = x[j];
        if (v.is_missing()) {
            if (j == class_index) throw DataError("instance " + std::to_string(row) + " has a missing class value");
            continue;
        }
        if (schema[j].is_nominal()) {
            if (!v.is_symbol() || v.symbol_index() >= schema[j].domain.size())
                throw DataError("instance " + std::to_string(row) + ": bad value for nominal attribute '" +
                                schema[j].name + "'");
        } else if (!v.is_real()) {
            throw DataError("instance " + std::to_string(row) + ": bad value for numeric attribute '" +
                            schema[j].name + "'");
        }
    }
}

}  // namespace

Dataset::Dataset(std::string relation, std::vector<Attribute> schema, std::size_t class_index,
                 std::vector<Instance> instances)
    : relation_(std::move(relation)),
      schema_(std::move(schema)),
      class_index_(class_index),
      instances_(std::move(instances)) {
    validate_schema(schema_, class_index_);
    for (std::size_t j = 0; j < schema_.size(); ++j)
        schema_[j].role = j == class_index_ ? AttributeRole::target : AttributeRole::predictor;
    for (std::size_t i = 0; i < instances_.size(); ++i) validate_instance(schema_, class_index_, instances_[i], i);
}

std::optional<std::size_t> Dataset::attribute_index(std::string_view name) const {
    for (std::size_t j = 0; j < schema_.size(); ++j)
        if (schema_[j].name == name) return j;
    return std::nullopt;
}

Dataset Dataset::with_instances(std::vector<Instance> instances) const {
    return Dataset(relation_, schema_, class_index_, std::move(instances));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Instance> rows;
    rows.reserve(indices.size());
    for (auto i : indices) rows.push_back(instances_.at(i));
    return with_instances(std::move(rows));
}

Dataset Dataset::with_class(std::string_view name) const {
    auto idx = attribute_index(name);
    if (!idx) throw DataError("no attribute named '" + std::string(name) + "'");
    return Dataset(relation_, schema_, *idx, instances_);
}

bool Dataset::operator==(const Dataset& other) const {
    return class_index_ == other.class_index_ && schema_ == other.schema_ && instances_ == other.instances_;
}

bool Dataset::has_missing_predictors() const {
    for (const auto& x : instances_)
        for (std::size_t j = 0; j < x.size(); ++j)
            if (j != class_index_ && x[j].is_missing()) return true;
    return false;
}

std::vector<std::size_t> class_counts(const Dataset& d) {
    std::vector<std::size_t> counts(d.num_classes(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) ++counts[d.class_of(i)];
    return counts;
}

std::string format_class_counts(const Dataset& d, std::span<const std::size_t> counts) {
    std::ostringstream out;
    out << '{';
    const auto& domain = d.class_attribute().domain;
    for (std::size_t c = 0; c < domain.size(); ++c) {
        if (c) out << ", ";
        out << domain[c] << ':' << (c < counts.size() ? counts[c] : 0);
    }
    out << '}';
    return out.str();
}

Dataset impute_missing(const Dataset& d, ImputeStrategy strategy) {
    if (!d.has_missing_predictors()) return d;

    if (strategy == ImputeStrategy::drop_instance) {
        std::vector<Instance> kept;
        for (const auto& x : d.instances()) {
            bool complete = std::none_of(x.values.begin(), x.values.end(),
                                         [](const Value& v) { return v.is_missing(); });
            if (complete) kept.push_back(x);
        }
        return d.with_instances(std::move(kept));
    }

    std::vector<Value> fill(d.num_attributes());
    for (std::size_t j = 0; j < d.num_attributes(); ++j) {
        if (j == d.class_index()) continue;
        const auto& attr = d.attribute(j);
        std::size_t present = 0;
        if (attr.is_numeric()) {
            double sum = 0.0;
            for (const auto& x : d.instances())
                if (!x[j].is_missing()) {
                    sum += x[j].real_value();
                    ++present;
                }
            if (present) fill[j] = Value::real(sum / static_cast<double>(present));
        } else {
            std::vector<std::size_t> freq(attr.domain.size(), 0);
            for (const auto& x : d.instances())
                if (!x[j].is_missing()) {
                    ++freq[x[j].symbol_index()];
                    ++present;
                }
            // first-declared value wins ties
            auto mode = std::max_element(freq.begin(), freq.end()) - freq.begin();
            if (present) fill[j] = Value::symbol(static_cast<std::size_t>(mode));
        }
        if (!present && d.size() > 0) {
            bool needed = std::any_of(d.instances().begin(), d.instances().end(),
                                      [j](const Instance& x) { return x[j].is_missing(); });
            if (needed) throw DataError("attribute '" + attr.name + "' has no observed values to impute from");
        }
    }

    std::vector<Instance> rows = d.instances();
    for (auto& x : rows)
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j].is_missing()) x[j] = fill[j];
    return d.with_instances(std::move(rows));
}

std::vector<Attribute> thoracic_schema() {
    const std::vector<std::string> tf{"T", "F"};
    return {
        Attribute::nominal("DGN", {"DGN3", "DGN2", "DGN4", "DGN6", "DGN5", "DGN8", "DGN1"}),
        Attribute::numeric("PRE4"),
        Attribute::numeric("PRE5"),
        Attribute::nominal("PRE6", {"PRZ2", "PRZ1", "PRZ0"}),
        Attribute::nominal("PRE7", tf),
        Attribute::nominal("PRE8", tf),
        Attribute::nominal("PRE9", tf),
        Attribute::nominal("PRE10", tf),
        Attribute::nominal("PRE11", tf),
        Attribute::nominal("PRE14", {"OC11", "OC14", "OC12", "OC13"}),
        Attribute::nominal("PRE17", tf),
        Attribute::nominal("PRE19", tf),
        Attribute::nominal("PRE25", tf),
        Attribute::nominal("PRE30", tf),
        Attribute::nominal("PRE32", tf),
        Attribute::numeric("AGE"),
        Attribute::nominal("Risk1Yr", tf),
    };
}

}  // namespace postop
