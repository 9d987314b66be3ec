#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace postop {

/// Raised for schema violations and malformed data (bad values, arity, etc).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AttributeKind { nominal, numeric };
enum class AttributeRole { predictor, target };

/// One column of the decision table. Nominal attributes carry an ordered,
/// duplicate-free domain; a value refers to a domain entry by index.
struct Attribute {
    std::string name;
    AttributeKind kind = AttributeKind::numeric;
    std::vector<std::string> domain;
    AttributeRole role = AttributeRole::predictor;

    static Attribute nominal(std::string name, std::vector<std::string> domain);
    static Attribute numeric(std::string name);

    bool is_nominal() const { return kind == AttributeKind::nominal; }
    bool is_numeric() const { return kind == AttributeKind::numeric; }
    std::optional<std::size_t> index_of(std::string_view symbol) const;

    bool operator==(const Attribute&) const = default;
};

/// Index into a nominal attribute's domain.
struct Symbol {
    std::uint32_t index = 0;
    bool operator==(const Symbol&) const = default;
};

struct Missing {
    bool operator==(const Missing&) const = default;
};

/// A single cell: nominal symbol, finite real, or missing.
class Value {
public:
    Value() = default;
    Value(Symbol s) : v_(s) {}
    Value(double x);
    Value(Missing) {}

    static Value symbol(std::size_t index) { return Value(Symbol{static_cast<std::uint32_t>(index)}); }
    static Value real(double x) { return Value(x); }
    static Value missing() { return Value(); }

    bool is_missing() const { return std::holds_alternative<Missing>(v_); }
    bool is_symbol() const { return std::holds_alternative<Symbol>(v_); }
    bool is_real() const { return std::holds_alternative<double>(v_); }

    /// Throws DataError when the cell does not hold the requested alternative.
    std::size_t symbol_index() const;
    double real_value() const;

    bool operator==(const Value&) const = default;

private:
    std::variant<Missing, Symbol, double> v_;
};

struct Instance {
    std::vector<Value> values;

    const Value& operator[](std::size_t i) const { return values[i]; }
    Value& operator[](std::size_t i) { return values[i]; }
    std::size_t size() const { return values.size(); }

    bool operator==(const Instance&) const = default;
};

/// The decision table: a schema with exactly one binary nominal class
/// attribute, plus instances conforming to it. Immutable once built.
class Dataset {
public:
    /// Validates the schema and every instance. The attribute at
    /// `class_index` gets role = target; all others become predictors.
    Dataset(std::string relation, std::vector<Attribute> schema, std::size_t class_index,
            std::vector<Instance> instances);

    const std::string& relation() const { return relation_; }
    const std::vector<Attribute>& schema() const { return schema_; }
    const Attribute& attribute(std::size_t i) const { return schema_.at(i); }
    std::size_t num_attributes() const { return schema_.size(); }
    std::optional<std::size_t> attribute_index(std::string_view name) const;

    std::size_t class_index() const { return class_index_; }
    const Attribute& class_attribute() const { return schema_[class_index_]; }
    std::size_t num_classes() const { return class_attribute().domain.size(); }

    const std::vector<Instance>& instances() const { return instances_; }
    const Instance& instance(std::size_t i) const { return instances_.at(i); }
    std::size_t size() const { return instances_.size(); }
    bool empty() const { return instances_.empty(); }

    /// Class symbol of instance i.
    std::size_t class_of(std::size_t i) const { return instances_[i][class_index_].symbol_index(); }

    /// Same schema, different rows.
    Dataset with_instances(std::vector<Instance> instances) const;
    Dataset subset(std::span<const std::size_t> indices) const;
    /// Re-designates the class attribute by name.
    Dataset with_class(std::string_view name) const;

    bool has_missing_predictors() const;

    /// Relation name is metadata and does not take part in equality.
    bool operator==(const Dataset& other) const;

private:
    std::string relation_;
    std::vector<Attribute> schema_;
    std::size_t class_index_;
    std::vector<Instance> instances_;
};

/// Per-class instance counts, indexed by class symbol.
std::vector<std::size_t> class_counts(const Dataset& d);

/// Renders counts as "{T:70, F:400}" in class declaration order.
std::string format_class_counts(const Dataset& d, std::span<const std::size_t> counts);

enum class ImputeStrategy { mean_or_mode, drop_instance };

/// Replaces (mean_or_mode) or removes (drop_instance) missing predictor
/// values. Throws DataError when an attribute is missing everywhere under
/// mean_or_mode.
Dataset impute_missing(const Dataset& d, ImputeStrategy strategy);

/// The Thoracic Surgery schema as published with the UCI file; the class
/// attribute Risk1Yr is last with domain {T, F}.
std::vector<Attribute> thoracic_schema();

}  // namespace postop
