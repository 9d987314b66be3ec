#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "postop/io.hpp"

namespace postop::testing {

namespace {

std::size_t pick(Rng& rng, std::initializer_list<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform_unit(rng) * total;
    std::size_t i = 0;
    for (double w : weights) {
        if (u < w) return i;
        u -= w;
        ++i;
    }
    return weights.size() - 1;
}

Value flag(Rng& rng, double p_true) { return Value::symbol(uniform_unit(rng) < p_true ? 0 : 1); }

double rounded(double x, double step) { return std::round(x / step) * step; }

Instance make_row(Rng& rng, bool died) {
    const double s = died ? 1.0 : 0.0;
    std::vector<Value> v;
    // DGN{DGN3,DGN2,DGN4,DGN6,DGN5,DGN8,DGN1}
    v.push_back(Value::symbol(died ? pick(rng, {0.65, 0.12, 0.10, 0.02, 0.08, 0.02, 0.01})
                                   : pick(rng, {0.75, 0.11, 0.10, 0.01, 0.02, 0.005, 0.005})));
    v.push_back(Value::real(rounded(uniform_real(rng, 1.8, 5.4) - 0.3 * s, 0.01)));   // PRE4
    v.push_back(Value::real(rounded(uniform_real(rng, 1.2, 4.2) - 0.2 * s, 0.01)));   // PRE5
    v.push_back(Value::symbol(died ? pick(rng, {0.2, 0.6, 0.2}) : pick(rng, {0.1, 0.6, 0.3})));  // PRE6
    v.push_back(flag(rng, 0.06 + 0.06 * s));  // PRE7
    v.push_back(flag(rng, 0.15 + 0.05 * s));  // PRE8
    v.push_back(flag(rng, 0.05 + 0.12 * s));  // PRE9
    v.push_back(flag(rng, 0.65 + 0.15 * s));  // PRE10
    v.push_back(flag(rng, 0.15 + 0.08 * s));  // PRE11
    v.push_back(Value::symbol(died ? pick(rng, {0.45, 0.08, 0.35, 0.12}) : pick(rng, {0.6, 0.03, 0.3, 0.07})));
    v.push_back(flag(rng, 0.06 + 0.08 * s));  // PRE17
    v.push_back(flag(rng, 0.01));             // PRE19
    v.push_back(flag(rng, 0.02 + 0.03 * s));  // PRE25
    v.push_back(flag(rng, 0.80 + 0.10 * s));  // PRE30
    v.push_back(flag(rng, 0.01));             // PRE32
    v.push_back(Value::real(std::round(uniform_real(rng, 40.0, 80.0) + 3.0 * s)));  // AGE
    v.push_back(Value::symbol(died ? 0 : 1));
    return Instance{std::move(v)};
}

}  // namespace

Dataset synthetic_thoracic(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Instance> rows;
    // interleave so the class is not sorted
    for (std::size_t i = 0; i < 470; ++i) rows.push_back(make_row(rng, i % 47 < 7));
    auto schema = thoracic_schema();
    return Dataset("synthetic-thoracic", schema, schema.size() - 1, std::move(rows));
}

std::string synthetic_thoracic_arff(std::uint64_t seed) { return to_arff(synthetic_thoracic(seed)); }

std::string thoracic_sample_arff() {
    return R"(@relation 'Thoracic_Surgery_Data'

@attribute DGN {DGN3,DGN2,DGN4,DGN6,DGN5,DGN8,DGN1}
@attribute PRE4 numeric
@attribute PRE5 numeric
@attribute PRE6 {PRZ2,PRZ1,PRZ0}
@attribute PRE7 {T,F}
@attribute PRE8 {T,F}
@attribute PRE9 {T,F}
@attribute PRE10 {T,F}
@attribute PRE11 {T,F}
@attribute PRE14 {OC11,OC14,OC12,OC13}
@attribute PRE17 {T,F}
@attribute PRE19 {T,F}
@attribute PRE25 {T,F}
@attribute PRE30 {T,F}
@attribute PRE32 {T,F}
@attribute AGE numeric
@attribute Risk1Yr {T,F}

@data
DGN2,2.88,2.16,PRZ1,F,F,F,T,T,OC14,F,F,F,T,F,60,F
DGN3,3.4,1.88,PRZ0,F,F,F,F,F,OC12,F,F,F,T,F,51,F
DGN3,2.76,2.08,PRZ1,F,F,F,T,F,OC11,F,F,F,T,F,59,F
DGN3,3.68,3.04,PRZ0,F,F,F,F,F,OC11,F,F,F,F,F,54,F
DGN3,2.44,0.96,PRZ2,F,T,F,T,T,OC11,F,F,F,T,F,73,T
DGN2,2.48,1.88,PRZ1,F,F,F,T,F,OC11,F,F,F,F,F,51,F
)";
}

Dataset random_nominal_dataset(Rng& rng, std::size_t attributes, std::size_t rows) {
    std::vector<Attribute> schema;
    for (std::size_t a = 0; a < attributes; ++a) {
        std::size_t width = 2 + uniform_index(rng, 3);
        std::vector<std::string> domain;
        for (std::size_t v = 0; v < width; ++v) domain.push_back("v" + std::to_string(v));
        schema.push_back(Attribute::nominal("a" + std::to_string(a), domain));
    }
    schema.push_back(Attribute::nominal("d", {"1", "0"}));
    std::vector<Instance> inst;
    for (std::size_t r = 0; r < rows; ++r) {
        Instance x;
        for (std::size_t a = 0; a < attributes; ++a) x.values.push_back(Value::symbol(uniform_index(rng, schema[a].domain.size())));
        x.values.push_back(Value::symbol(r < 2 ? r : uniform_index(rng, 2)));
        inst.push_back(std::move(x));
    }
    return Dataset("random-nominal", schema, attributes, std::move(inst));
}

Dataset random_mixed_dataset(Rng& rng, std::size_t rows) {
    std::vector<Attribute> schema{Attribute::numeric("x"), Attribute::nominal("c", {"p", "q", "r"}),
                                  Attribute::numeric("y"), Attribute::nominal("d", {"1", "0"})};
    std::vector<Instance> inst;
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t cls = r < 2 ? r : uniform_index(rng, 2);
        inst.push_back(Instance{{Value::real(uniform_real(rng, -2.0, 2.0) + static_cast<double>(cls)),
                                 Value::symbol(uniform_index(rng, 3)), Value::real(std::round(uniform_real(rng, 0, 10))),
                                 Value::symbol(cls)}});
    }
    return Dataset("random-mixed", schema, 3, std::move(inst));
}

}  // namespace postop::testing

namespace postop::testing {

namespace {

bool row_less(const Instance& a, const Instance& b) {
    for (std::size_t j = 0; j < a.size(); ++j) {
        const auto &x = a[j], &y = b[j];
        if (x == y) continue;
        if (x.is_missing() != y.is_missing()) return x.is_missing();
        if (x.is_symbol()) return x.symbol_index() < y.symbol_index();
        return x.real_value() < y.real_value();
    }
    return false;
}

}  // namespace

std::optional<std::vector<Instance>> extra_rows(const Dataset& original, const Dataset& resampled) {
    auto a = original.instances();
    auto b = resampled.instances();
    std::sort(a.begin(), a.end(), row_less);
    std::sort(b.begin(), b.end(), row_less);
    std::vector<Instance> extra;
    std::size_t i = 0;
    for (const auto& row : b) {
        if (i < a.size() && row == a[i]) ++i;
        else extra.push_back(row);
    }
    if (i != a.size()) return std::nullopt;
    return extra;
}

bool lies_between_parents(const Dataset& d, const Instance& s, std::span<const Instance> parents) {
    for (const auto& x : parents) {
        bool nominal_ok = true;
        for (std::size_t j = 0; j < s.size() && nominal_ok; ++j)
            if (d.attribute(j).is_nominal() && j != d.class_index()) nominal_ok = s[j] == x[j];
        if (!nominal_ok) continue;
        for (const auto& n : parents) {
            bool inside = true;
            std::optional<double> lambda;
            for (std::size_t j = 0; j < s.size() && inside; ++j) {
                if (!d.attribute(j).is_numeric()) continue;
                double a = x[j].real_value(), b = n[j].real_value(), v = s[j].real_value();
                inside = std::min(a, b) <= v && v <= std::max(a, b);
                if (!inside || a == b) continue;
                double l = (v - a) / (b - a);
                if (!lambda) lambda = l;
                else inside = std::abs(*lambda - l) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)) / std::abs(b - a);
            }
            if (inside) return true;
        }
    }
    return false;
}

}  // namespace postop::testing
