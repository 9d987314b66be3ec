#include "postop/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace postop {

void TreeConfig::validate() const {
    if (min_leaf_instances < 1) throw std::invalid_argument("min_leaf_instances must be at least 1");
    if (!(pruning_confidence > 0.0 && pruning_confidence < 1.0))
        throw std::invalid_argument("pruning_confidence must lie in (0, 1)");
}

TreeNode TreeNode::leaf(std::vector<double> counts) {
    TreeNode n;
    n.predicted_class =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    n.class_counts = std::move(counts);
    return n;
}

std::size_t TreeNode::leaf_count() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& c : children) n += c.leaf_count();
    return n;
}

std::size_t TreeNode::node_count() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
}

double TreeNode::total() const { return std::accumulate(class_counts.begin(), class_counts.end(), 0.0); }

namespace {

double entropy(std::span<const double> counts) {
    double n = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (n <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= (c / n) * std::log2(c / n);
    return h;
}

std::size_t largest_child(const TreeNode& node) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < node.children.size(); ++c)
        if (node.children[c].total() > node.children[best].total()) best = c;
    return best;
}

std::vector<double> counts_of(const Dataset& d, std::span<const std::size_t> rows) {
    std::vector<double> counts(d.num_classes(), 0.0);
    for (auto i : rows) counts[d.class_of(i)] += 1.0;
    return counts;
}

std::optional<SplitScore> score_nominal(const Dataset& d, std::span<const std::size_t> rows, std::size_t attribute,
                                        std::size_t min_leaf) {
    const std::size_t values = d.attribute(attribute).domain.size();
    const std::size_t k = d.num_classes();
    std::vector<std::vector<double>> branch(values, std::vector<double>(k, 0.0));
    std::vector<double> parent(k, 0.0);
    for (auto i : rows) {
        branch[d.instance(i)[attribute].symbol_index()][d.class_of(i)] += 1.0;
        parent[d.class_of(i)] += 1.0;
    }
    const double n = static_cast<double>(rows.size());
    std::size_t big_branches = 0;
    double remainder = 0.0;
    std::vector<double> sizes;
    for (const auto& b : branch) {
        double size = std::accumulate(b.begin(), b.end(), 0.0);
        if (size >= static_cast<double>(min_leaf)) ++big_branches;
        if (size > 0.0) {
            remainder += size / n * entropy(b);
            sizes.push_back(size);
        }
    }
    double split_info = entropy(sizes);
    if (big_branches < 2 || split_info <= 0.0) return std::nullopt;
    double gain = std::max(0.0, entropy(parent) - remainder);
    return SplitScore{attribute, gain, split_info, gain / split_info, std::nullopt};
}

std::optional<SplitScore> score_numeric(const Dataset& d, std::span<const std::size_t> rows, std::size_t attribute,
                                        std::size_t min_leaf) {
    const std::size_t k = d.num_classes();
    std::vector<std::pair<double, std::size_t>> sorted;
    sorted.reserve(rows.size());
    for (auto i : rows) sorted.emplace_back(d.instance(i)[attribute].real_value(), d.class_of(i));
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> left(k, 0.0), right(k, 0.0);
    for (const auto& [v, c] : sorted) right[c] += 1.0;
    const double parent_h = entropy(right);
    const double n = static_cast<double>(sorted.size());

    std::optional<SplitScore> best;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left[sorted[i].second] += 1.0;
        right[sorted[i].second] -= 1.0;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf)) continue;
        double gain = std::max(0.0, parent_h - (nl / n) * entropy(left) - (nr / n) * entropy(right));
        if (!best || gain > best->gain) {
            double split_info = entropy(std::vector<double>{nl, nr});
            double threshold = sorted[i].first + (sorted[i + 1].first - sorted[i].first) / 2.0;
            best = SplitScore{attribute, gain, split_info, gain / split_info, threshold};
        }
    }
    return best;
}

struct Builder {
    const Dataset& d;
    const TreeConfig& cfg;

    TreeNode build(std::vector<std::size_t> rows, std::vector<bool>& used_nominal) {
        TreeNode node = TreeNode::leaf(counts_of(d, rows));
        const double n = static_cast<double>(rows.size());
        bool pure = node.class_counts[node.predicted_class] == n;
        if (pure || rows.size() < 2 * cfg.min_leaf_instances) return node;

        std::vector<SplitScore> candidates;
        for (std::size_t a = 0; a < d.num_attributes(); ++a) {
            if (a == d.class_index() || used_nominal[a]) continue;
            if (auto s = score_split(d, rows, a, cfg.min_leaf_instances)) candidates.push_back(*s);
        }
        if (candidates.empty()) return node;

        double mean_gain = 0.0;
        for (const auto& s : candidates) mean_gain += s.gain;
        mean_gain /= static_cast<double>(candidates.size());

        const SplitScore* best = nullptr;
        for (const auto& s : candidates) {
            if (s.gain < mean_gain - 1e-12) continue;
            if (!best || s.gain_ratio > best->gain_ratio) best = &s;
        }
        if (!best || best->gain <= 0.0) return node;

        NodeTest test;
        test.attribute = best->attribute;
        test.threshold = best->threshold;
        std::vector<std::vector<std::size_t>> parts;
        if (test.is_numeric()) {
            parts.resize(2);
            for (auto i : rows) parts[d.instance(i)[test.attribute].real_value() <= *test.threshold ? 0 : 1].push_back(i);
        } else {
            const std::size_t values = d.attribute(test.attribute).domain.size();
            std::vector<std::vector<std::size_t>> by_value(values);
            for (auto i : rows) by_value[d.instance(i)[test.attribute].symbol_index()].push_back(i);
            test.branch_of_value.assign(values, 0);
            std::vector<std::size_t> empty_values;
            for (std::size_t v = 0; v < values; ++v) {
                if (by_value[v].empty()) {
                    empty_values.push_back(v);
                    continue;
                }
                test.branch_of_value[v] = parts.size();
                parts.push_back(std::move(by_value[v]));
            }
            std::size_t biggest = 0;
            for (std::size_t c = 1; c < parts.size(); ++c)
                if (parts[c].size() > parts[biggest].size()) biggest = c;
            for (auto v : empty_values) test.branch_of_value[v] = biggest;
        }

        bool nominal = !test.is_numeric();
        if (nominal) used_nominal[test.attribute] = true;
        for (auto& part : parts) node.children.push_back(build(std::move(part), used_nominal));
        if (nominal) used_nominal[test.attribute] = false;
        node.test = std::move(test);
        return node;
    }

    /// Subtree replacement, bottom-up. Returns the estimated error count of
    /// the (possibly pruned) subtree.
    double prune(TreeNode& node) const {
        const double n = node.total();
        const double errors = n - node.class_counts[node.predicted_class];
        const double as_leaf = errors + pessimistic_extra_errors(n, errors, cfg.pruning_confidence);
        if (node.is_leaf()) return as_leaf;

        double as_subtree = 0.0;
        for (auto& child : node.children) as_subtree += prune(child);
        if (as_leaf <= as_subtree + 1e-9) {
            node.test.reset();
            node.children.clear();
            return as_leaf;
        }
        return as_subtree;
    }
};

/// Inverse of the standard normal CDF by bisection on erfc.
double normal_quantile(double p) {
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double pessimistic_extra_errors(double n, double errors, double cf) {
    if (n <= 0.0) return 0.0;
    if (errors < 1.0) {
        double base = n * (1.0 - std::pow(cf, 1.0 / n));
        if (errors == 0.0) return base;
        return base + errors * (pessimistic_extra_errors(n, 1.0, cf) - base);
    }
    if (errors + 0.5 >= n) return std::max(n - errors, 0.0);
    const double z = normal_quantile(1.0 - cf);
    const double f = (errors + 0.5) / n;
    const double r = (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
                     (1.0 + z * z / n);
    return r * n - errors;
}

std::optional<SplitScore> score_split(const Dataset& d, std::span<const std::size_t> rows, std::size_t attribute,
                                      std::size_t min_leaf) {
    if (attribute >= d.num_attributes()) throw std::invalid_argument("attribute index out of range");
    if (attribute == d.class_index()) throw std::invalid_argument("the class attribute is not a split candidate");
    if (rows.empty()) return std::nullopt;
    return d.attribute(attribute).is_nominal() ? score_nominal(d, rows, attribute, min_leaf)
                                               : score_numeric(d, rows, attribute, min_leaf);
}

std::optional<double> gain_ratio(const Dataset& d, std::size_t attribute) {
    std::vector<std::size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), 0);
    auto s = score_split(d, rows, attribute, 1);
    if (!s) return std::nullopt;
    return s->gain_ratio;
}

DecisionTree train_tree(const Dataset& d, const TreeConfig& cfg) {
    cfg.validate();
    if (d.empty()) throw DataError("cannot train a decision tree on an empty dataset");
    if (d.has_missing_predictors()) throw DataError("decision tree training requires imputed data");
    std::vector<std::size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<bool> used(d.num_attributes(), false);
    Builder builder{d, cfg};
    TreeNode root = builder.build(std::move(rows), used);
    if (cfg.prune) builder.prune(root);
    return DecisionTree(d.schema(), d.class_index(), std::move(root));
}

DecisionTree::DecisionTree(std::vector<Attribute> schema, std::size_t class_index, TreeNode root)
    : schema_(std::move(schema)), class_index_(class_index), root_(std::move(root)) {}

const TreeNode& DecisionTree::route(const Instance& x) const {
    const TreeNode* node = &root_;
    while (!node->is_leaf()) {
        const auto& test = *node->test;
        const auto& v = x[test.attribute];
        std::size_t next;
        if (v.is_missing())
            next = largest_child(*node);
        else if (test.is_numeric())
            next = v.real_value() <= *test.threshold ? 0 : 1;
        else
            next = test.branch_of_value.at(v.symbol_index());
        node = &node->children[next];
    }
    return *node;
}

std::vector<double> DecisionTree::predict(const Instance& x) const {
    if (x.size() != schema_.size()) throw DataError("instance arity does not match the tree schema");
    const auto& leaf = route(x);
    const double k = static_cast<double>(num_classes());
    const double total = leaf.total();
    std::vector<double> p(num_classes());
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = (leaf.class_counts[c] + 1.0) / (total + k);
    return p;
}

bool Condition::matches(const Value& v) const {
    if (v.is_missing()) return false;
    if (v.is_symbol()) return std::find(values.begin(), values.end(), v.symbol_index()) != values.end();
    double x = v.real_value();
    return (!lower || x > *lower) && (!upper || x <= *upper);
}

bool Rule::matches(const Instance& x) const {
    return std::all_of(antecedent.begin(), antecedent.end(),
                       [&](const Condition& c) { return c.matches(x[c.attribute]); });
}

namespace {

void collect_rules(const TreeNode& node, std::vector<Condition>& path, std::vector<Rule>& out) {
    if (node.is_leaf()) {
        out.push_back(Rule{path, node.predicted_class});
        return;
    }
    const auto& test = *node.test;
    for (std::size_t c = 0; c < node.children.size(); ++c) {
        auto saved = path;
        auto it = std::find_if(path.begin(), path.end(),
                               [&](const Condition& k) { return k.attribute == test.attribute; });
        if (it == path.end()) {
            path.push_back(Condition{test.attribute, {}, std::nullopt, std::nullopt});
            it = path.end() - 1;
        }
        if (test.is_numeric()) {
            if (c == 0)
                it->upper = it->upper ? std::min(*it->upper, *test.threshold) : *test.threshold;
            else
                it->lower = it->lower ? std::max(*it->lower, *test.threshold) : *test.threshold;
        } else {
            it->values.clear();
            for (std::size_t v = 0; v < test.branch_of_value.size(); ++v)
                if (test.branch_of_value[v] == c) it->values.push_back(v);
        }
        collect_rules(node.children[c], path, out);
        path = std::move(saved);
    }
}

std::string format_number(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

std::string format_condition(const Condition& c, const std::vector<Attribute>& schema) {
    const auto& attr = schema[c.attribute];
    std::ostringstream s;
    s << '(';
    if (attr.is_nominal()) {
        if (c.values.size() == 1) {
            s << attr.name << ", " << attr.domain[c.values[0]];
        } else {
            s << attr.name << " ∈ {";
            for (std::size_t i = 0; i < c.values.size(); ++i) s << (i ? ", " : "") << attr.domain[c.values[i]];
            s << '}';
        }
    } else if (c.lower && c.upper) {
        s << format_number(*c.lower) << " < " << attr.name << " ≤ " << format_number(*c.upper);
    } else if (c.upper) {
        s << attr.name << " ≤ " << format_number(*c.upper);
    } else if (c.lower) {
        s << attr.name << " > " << format_number(*c.lower);
    } else {
        s << attr.name << " any";
    }
    s << ')';
    return s.str();
}

std::string edge_label(const TreeNode& node, std::size_t child, const std::vector<Attribute>& schema) {
    const auto& test = *node.test;
    const auto& attr = schema[test.attribute];
    if (test.is_numeric()) return attr.name + (child == 0 ? " <= " : " > ") + format_number(*test.threshold);
    std::string label = attr.name + " = ";
    bool first = true;
    for (std::size_t v = 0; v < test.branch_of_value.size(); ++v) {
        if (test.branch_of_value[v] != child) continue;
        label += (first ? "" : "|") + attr.domain[v];
        first = false;
    }
    return label;
}

void print_node(std::ostream& out, const TreeNode& node, const std::vector<Attribute>& schema,
                std::size_t class_index, std::size_t depth) {
    for (std::size_t c = 0; c < node.children.size(); ++c) {
        const auto& child = node.children[c];
        for (std::size_t i = 0; i < depth; ++i) out << "|   ";
        out << edge_label(node, c, schema);
        if (child.is_leaf()) {
            double total = child.total();
            double wrong = total - child.class_counts[child.predicted_class];
            out << ": " << schema[class_index].domain[child.predicted_class] << " (" << format_number(total);
            if (wrong > 0) out << '/' << format_number(wrong);
            out << ")\n";
        } else {
            out << '\n';
            print_node(out, child, schema, class_index, depth + 1);
        }
    }
}

nlohmann::json node_json(const TreeNode& node, const std::vector<Attribute>& schema) {
    nlohmann::json j{{"class_counts", node.class_counts}, {"predicted_class", node.predicted_class}};
    if (node.is_leaf()) return j;
    const auto& test = *node.test;
    j["attribute"] = schema[test.attribute].name;
    if (test.is_numeric())
        j["threshold"] = *test.threshold;
    else
        j["branch_of_value"] = test.branch_of_value;
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : node.children) kids.push_back(node_json(c, schema));
    j["children"] = std::move(kids);
    return j;
}

}  // namespace

std::vector<Rule> tree_to_rules(const DecisionTree& t) {
    std::vector<Rule> rules;
    std::vector<Condition> path;
    collect_rules(t.root(), path, rules);
    return rules;
}

std::optional<std::size_t> classify_by_rules(std::span<const Rule> rules, const Instance& x) {
    for (const auto& r : rules)
        if (r.matches(x)) return r.consequent;
    return std::nullopt;
}

std::string format_rule(const Rule& r, const std::vector<Attribute>& schema, std::size_t class_index) {
    std::string out;
    for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
        if (i) out += " ∩ ";
        out += format_condition(r.antecedent[i], schema);
    }
    if (r.antecedent.empty()) out += "(true)";
    const auto& cls = schema[class_index];
    out += " ⇒ (" + cls.name + " = " + cls.domain[r.consequent] + ")";
    return out;
}

std::string format_tree(const DecisionTree& t) {
    std::ostringstream out;
    const auto& root = t.root();
    if (root.is_leaf()) {
        out << ": " << t.schema()[t.class_index()].domain[root.predicted_class] << " (" << format_number(root.total())
            << ")\n";
    } else {
        print_node(out, root, t.schema(), t.class_index(), 0);
    }
    out << "\nNumber of leaves: " << root.leaf_count() << "\nSize of the tree: " << root.node_count() << '\n';
    return out.str();
}

void to_json(nlohmann::json& j, const DecisionTree& t) {
    j = {{"classes", t.schema()[t.class_index()].domain}, {"root", node_json(t.root(), t.schema())}};
}

}  // namespace postop
