#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "postop/dataset.hpp"

namespace postop {

/// Syntax or value error while reading a dataset. Line and column are
/// 1-based; column is 0 when it is not meaningful (e.g. arity errors).
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Reads the dense ARFF subset: @relation, @attribute (nominal braces or
/// numeric/real/integer), @data, '%' comments, '?' missing. The class
/// attribute is the last declared one unless `class_name` names another.
Dataset parse_arff(std::istream& in, std::optional<std::string_view> class_name = std::nullopt);
Dataset parse_arff(std::string_view text, std::optional<std::string_view> class_name = std::nullopt);

/// Reads a headed CSV against an externally supplied schema. The header
/// must list the schema names in order.
Dataset parse_csv(std::istream& in, const std::vector<Attribute>& schema,
                  std::optional<std::string_view> class_name = std::nullopt);
Dataset parse_csv(std::string_view text, const std::vector<Attribute>& schema,
                  std::optional<std::string_view> class_name = std::nullopt);

/// Writers emit numbers in shortest round-trip form, so re-parsing gives
/// back the identical dataset.
void write_arff(std::ostream& out, const Dataset& d);
void write_csv(std::ostream& out, const Dataset& d);
std::string to_arff(const Dataset& d);
std::string to_csv(const Dataset& d);

enum class DataFormat { arff, csv };

/// Loads a file by path. CSV needs a schema; when none is given the
/// Thoracic Surgery schema is assumed.
Dataset load_dataset(const std::string& path, DataFormat format,
                     std::optional<std::string_view> class_name = std::nullopt,
                     const std::vector<Attribute>* csv_schema = nullptr);

}  // namespace postop
