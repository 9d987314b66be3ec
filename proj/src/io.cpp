#include "postop/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace postop {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : DataError([&] {
          std::ostringstream msg;
          msg << "line " << line;
          if (column) msg << ", column " << column;
          msg << ": " << what;
          return msg.str();
      }()),
      line_(line),
      column_(column) {}

namespace {

constexpr std::string_view kWhitespace = " \t\r\n";

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(kWhitespace);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(kWhitespace);
    return s.substr(b, e - b + 1);
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

/// Strips a trailing '%' comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '%') {
            return line.substr(0, i);
        }
    }
    return line;
}

struct Field {
    std::string_view text;
    std::size_t column;  // 1-based, of the trimmed token
};

std::vector<Field> split_fields(std::string_view line) {
    std::vector<Field> out;
    std::size_t start = 0;
    char quote = 0;
    auto push = [&](std::size_t end) {
        auto raw = line.substr(start, end - start);
        auto lead = raw.find_first_not_of(kWhitespace);
        std::size_t col = start + (lead == std::string_view::npos ? 0 : lead) + 1;
        out.push_back({trim(raw), col});
    };
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == ',') {
            push(i);
            start = i + 1;
        }
    }
    push(line.size());
    return out;
}

Value parse_cell(const Field& f, const Attribute& attr, std::size_t line) {
    auto tok = unquote(f.text);
    if (f.text == "?") return Value::missing();
    if (attr.is_nominal()) {
        auto idx = attr.index_of(trim(tok));
        if (!idx)
            throw ParseError("unknown value '" + std::string(tok) + "' for nominal attribute '" + attr.name + "'", line,
                             f.column);
        return Value::symbol(*idx);
    }
    auto num = trim(tok);
    if (!num.empty() && num.front() == '+') num.remove_prefix(1);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), x);
    if (num.empty() || ec != std::errc() || ptr != num.data() + num.size())
        throw ParseError("invalid numeric literal '" + std::string(tok) + "' for attribute '" + attr.name + "'", line,
                         f.column);
    if (!std::isfinite(x))
        throw ParseError("non-finite numeric literal '" + std::string(tok) + "' for attribute '" + attr.name + "'",
                         line, f.column);
    return Value::real(x);
}

Instance parse_row(std::string_view line, std::size_t lineno, const std::vector<Attribute>& schema,
                   std::size_t class_index) {
    auto fields = split_fields(line);
    if (fields.size() != schema.size())
        throw ParseError("expected " + std::to_string(schema.size()) + " values, found " +
                             std::to_string(fields.size()),
                         lineno);
    Instance x;
    x.values.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) x.values.push_back(parse_cell(fields[j], schema[j], lineno));
    if (x[class_index].is_missing())
        throw ParseError("missing class value", lineno, fields[class_index].column);
    return x;
}

std::size_t resolve_class(const std::vector<Attribute>& schema, std::optional<std::string_view> class_name) {
    if (schema.empty()) throw DataError("no attributes declared");
    if (!class_name) return schema.size() - 1;
    for (std::size_t j = 0; j < schema.size(); ++j)
        if (schema[j].name == *class_name) return j;
    throw DataError("class attribute '" + std::string(*class_name) + "' is not declared");
}

std::string_view next_word(std::string_view& rest) {
    rest = trim(rest);
    if (rest.empty()) return {};
    std::size_t end = 0;
    if (rest.front() == '\'' || rest.front() == '"') {
        end = rest.find(rest.front(), 1);
        end = end == std::string_view::npos ? rest.size() : end + 1;
    } else {
        end = rest.find_first_of(" \t{");
        if (end == std::string_view::npos) end = rest.size();
    }
    auto word = rest.substr(0, end);
    rest.remove_prefix(end);
    return word;
}

Attribute parse_attribute(std::string_view rest, std::size_t lineno, std::size_t line_start_col) {
    auto name_tok = next_word(rest);
    if (name_tok.empty()) throw ParseError("@attribute without a name", lineno, line_start_col);
    std::string name(unquote(name_tok));
    rest = trim(rest);
    if (rest.empty()) throw ParseError("@attribute '" + name + "' has no type", lineno);
    if (rest.front() == '{') {
        auto close = rest.find('}');
        if (close == std::string_view::npos) throw ParseError("unterminated nominal domain for '" + name + "'", lineno);
        if (!trim(rest.substr(close + 1)).empty())
            throw ParseError("unexpected text after nominal domain of '" + name + "'", lineno);
        std::vector<std::string> domain;
        for (const auto& f : split_fields(rest.substr(1, close - 1))) {
            auto v = trim(unquote(f.text));
            if (v.empty()) throw ParseError("empty value in nominal domain of '" + name + "'", lineno);
            if (std::find(domain.begin(), domain.end(), v) != domain.end())
                throw ParseError("duplicate value '" + std::string(v) + "' in domain of '" + name + "'", lineno);
            domain.emplace_back(v);
        }
        return Attribute::nominal(std::move(name), std::move(domain));
    }
    auto type = next_word(rest);
    if (iequals(type, "numeric") || iequals(type, "real") || iequals(type, "integer")) {
        if (!trim(rest).empty()) throw ParseError("unexpected text after type of '" + name + "'", lineno);
        return Attribute::numeric(std::move(name));
    }
    throw ParseError("unsupported attribute type '" + std::string(type) + "' for '" + name + "'", lineno);
}

void write_token(std::ostream& out, std::string_view s) {
    bool needs_quotes = s.empty() || s.find_first_of(" \t,{}%'\"") != std::string_view::npos;
    if (needs_quotes)
        out << '\'' << s << '\'';
    else
        out << s;
}

void write_value(std::ostream& out, const Value& v, const Attribute& attr) {
    if (v.is_missing()) {
        out << '?';
    } else if (attr.is_nominal()) {
        write_token(out, attr.domain[v.symbol_index()]);
    } else {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v.real_value());
        out.write(buf, ptr - buf);
    }
}

void write_rows(std::ostream& out, const Dataset& d) {
    for (const auto& x : d.instances()) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j) out << ',';
            write_value(out, x[j], d.attribute(j));
        }
        out << '\n';
    }
}

}  // namespace

Dataset parse_arff(std::istream& in, std::optional<std::string_view> class_name) {
    std::string relation;
    std::vector<Attribute> schema;
    std::vector<Instance> rows;
    std::size_t class_index = 0;
    bool in_data = false;
    bool seen_relation = false;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (in_data) {
            if (line.front() == '{') throw ParseError("sparse ARFF rows are not supported", lineno, 1);
            rows.push_back(parse_row(line, lineno, schema, class_index));
            continue;
        }

        std::size_t col = raw.find_first_not_of(kWhitespace) + 1;
        if (line.front() != '@') throw ParseError("expected a header declaration", lineno, col);
        std::string_view rest = line;
        auto keyword = next_word(rest);
        if (iequals(keyword, "@relation")) {
            relation = std::string(unquote(trim(rest)));
            seen_relation = true;
        } else if (iequals(keyword, "@attribute")) {
            if (!seen_relation) throw ParseError("@attribute before @relation", lineno, col);
            auto attr = parse_attribute(rest, lineno, col);
            for (const auto& a : schema)
                if (a.name == attr.name) throw ParseError("duplicate attribute '" + attr.name + "'", lineno, col);
            schema.push_back(std::move(attr));
        } else if (iequals(keyword, "@data")) {
            if (schema.empty()) throw ParseError("@data before any @attribute", lineno, col);
            class_index = resolve_class(schema, class_name);
            in_data = true;
        } else {
            throw ParseError("unknown declaration '" + std::string(keyword) + "'", lineno, col);
        }
    }
    if (!in_data) throw ParseError("missing @data section", lineno + 1);
    return Dataset(std::move(relation), std::move(schema), class_index, std::move(rows));
}

Dataset parse_arff(std::string_view text, std::optional<std::string_view> class_name) {
    std::istringstream in{std::string(text)};
    return parse_arff(in, class_name);
}

Dataset parse_csv(std::istream& in, const std::vector<Attribute>& schema,
                  std::optional<std::string_view> class_name) {
    std::string raw;
    std::size_t lineno = 0;
    bool have_header = false;
    std::vector<Instance> rows;
    auto class_index = resolve_class(schema, class_name);

    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty()) continue;
        if (!have_header) {
            auto names = split_fields(line);
            bool ok = names.size() == schema.size();
            for (std::size_t j = 0; ok && j < names.size(); ++j) ok = unquote(names[j].text) == schema[j].name;
            if (!ok) {
                std::string expected;
                for (const auto& a : schema) expected += (expected.empty() ? "" : ",") + a.name;
                throw ParseError("header mismatch; expected '" + expected + "'", lineno);
            }
            have_header = true;
            continue;
        }
        rows.push_back(parse_row(line, lineno, schema, class_index));
    }
    if (!have_header) throw ParseError("missing CSV header row", lineno + 1);
    return Dataset("", schema, class_index, std::move(rows));
}

Dataset parse_csv(std::string_view text, const std::vector<Attribute>& schema,
                  std::optional<std::string_view> class_name) {
    std::istringstream in{std::string(text)};
    return parse_csv(in, schema, class_name);
}

void write_arff(std::ostream& out, const Dataset& d) {
    out << "@relation ";
    write_token(out, d.relation());
    out << "\n\n";
    for (const auto& a : d.schema()) {
        out << "@attribute ";
        write_token(out, a.name);
        if (a.is_nominal()) {
            out << " {";
            for (std::size_t v = 0; v < a.domain.size(); ++v) {
                if (v) out << ',';
                write_token(out, a.domain[v]);
            }
            out << "}\n";
        } else {
            out << " numeric\n";
        }
    }
    out << "\n@data\n";
    write_rows(out, d);
}

void write_csv(std::ostream& out, const Dataset& d) {
    for (std::size_t j = 0; j < d.num_attributes(); ++j) out << (j ? "," : "") << d.attribute(j).name;
    out << '\n';
    write_rows(out, d);
}

std::string to_arff(const Dataset& d) {
    std::ostringstream out;
    write_arff(out, d);
    return out.str();
}

std::string to_csv(const Dataset& d) {
    std::ostringstream out;
    write_csv(out, d);
    return out.str();
}

Dataset load_dataset(const std::string& path, DataFormat format, std::optional<std::string_view> class_name,
                     const std::vector<Attribute>* csv_schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    if (format == DataFormat::arff) return parse_arff(in, class_name);
    auto schema = csv_schema ? *csv_schema : thoracic_schema();
    return parse_csv(in, schema, class_name);
}

}  // namespace postop
