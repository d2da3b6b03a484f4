#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mgower {

enum class Kind { BinarySymmetric, BinaryAsymmetric, Nominal, Ordinal, Numeric };

std::string_view to_string(Kind kind);
Kind parse_kind(std::string_view text);

// Measurement scale of a variable. Nominal and Ordinal carry their declared
// categories; for Ordinal the declaration order is the total order.
struct VariableKind {
  Kind kind = Kind::Numeric;
  std::vector<std::string> categories;

  static VariableKind numeric() { return {Kind::Numeric, {}}; }
  static VariableKind binary(bool asymmetric) {
    return {asymmetric ? Kind::BinaryAsymmetric : Kind::BinarySymmetric, {}};
  }
  static VariableKind nominal(std::vector<std::string> cats) { return {Kind::Nominal, std::move(cats)}; }
  static VariableKind ordinal(std::vector<std::string> cats) { return {Kind::Ordinal, std::move(cats)}; }

  bool is_binary() const { return kind == Kind::BinarySymmetric || kind == Kind::BinaryAsymmetric; }
  bool is_categorical() const { return kind != Kind::Numeric; }
  bool has_categories() const { return kind == Kind::Nominal || kind == Kind::Ordinal; }

  friend bool operator==(const VariableKind&, const VariableKind&) = default;
};

// One variable. Cells are stored as doubles: the value itself for Numeric,
// 0/1 for binaries and the 0-based index into `kind.categories` for
// Nominal/Ordinal. A missing cell holds NaN.
struct Column {
  std::string name;
  VariableKind kind;
  std::vector<double> values;
  std::string missing_token;

  Column() = default;
  Column(std::string name_, VariableKind kind_, std::vector<double> values_, std::string missing_token_ = {})
      : name(std::move(name_)), kind(std::move(kind_)), values(std::move(values_)),
        missing_token(std::move(missing_token_)) {}

  std::size_t size() const { return values.size(); }
  bool is_missing(std::size_t row) const { return std::isnan(values[row]); }
  std::optional<double> cell(std::size_t row) const {
    return is_missing(row) ? std::nullopt : std::optional<double>(values[row]);
  }
  std::size_t n_observed() const;
  std::vector<double> observed() const;
  std::vector<std::uint8_t> missing_mask() const;

  // Text form of a cell as it appears in CSV (category label, 0/1, number or
  // the missing token).
  std::string render(std::size_t row) const;

  // Throws DataError if some non-missing cell does not conform to `kind`.
  void validate() const;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Typed columnar table. Immutable after construction; the constructor
// enforces equal lengths, unique names, cell conformity and the rule that
// no row may be missing on every variable.
class Dataset {
 public:
  Dataset() = default;
  // `row_ids` defaults to the 0-based row index rendered as text.
  explicit Dataset(std::vector<Column> columns, std::vector<std::string> row_ids = {},
                   std::string id_column = {}, std::size_t id_position = 0);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  const Column& column(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;

  const std::vector<std::string>& row_ids() const { return row_ids_; }
  // Name of the identifier column in the source CSV, empty when ids are positional.
  const std::string& id_column() const { return id_column_; }
  // Position of the id column among the CSV fields.
  std::size_t id_position() const { return id_position_; }

  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset select_columns(std::span<const std::string> names) const;
  Dataset replace_column(const Column& column) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<Column> columns_;
  std::vector<std::string> row_ids_;
  std::string id_column_;
  std::size_t id_position_ = 0;
  std::size_t n_rows_ = 0;
};

struct ColumnSchema {
  VariableKind kind;
  std::string missing_token;
  bool is_id = false;
};

// Maps column name -> {kind, categories, missing_token}. JSON form:
//   { "sex": {"kind": "nominal", "categories": ["M", "F"]},
//     "age": {"kind": "numeric", "missing_token": "NA"},
//     "id":  {"kind": "id"} }
// kinds: binary_symmetric | binary_asymmetric | nominal | ordinal | numeric | id
struct Schema {
  std::map<std::string, ColumnSchema> columns;

  static Schema from_json(std::string_view text);
  static Schema from_file(const std::string& path);
  static Schema of(const Dataset& data);
  std::string to_json() const;
};

Dataset load_dataset(std::istream& csv, const Schema& schema);
Dataset load_dataset(std::string_view csv_text, const Schema& schema);
Dataset load_dataset_file(const std::string& csv_path, const Schema& schema);

// Writes the header and every row; the id column keeps its original position.
void write_dataset(std::ostream& out, const Dataset& data);
std::string to_csv(const Dataset& data);

// Which value plays max(o) in the (o - 1) / (max(o) - 1) ordinal transform.
enum class OrdinalScale { DeclaredCategories, ObservedMax };

// Ordinal -> [0,1] by category position.
Column ordinal_to_ratio(const Column& col, OrdinalScale scale = OrdinalScale::DeclaredCategories);

// Ordinal -> midranks over the non-missing cells (ties share the average rank).
Column ordinal_to_midrank(const Column& col);

// Nominal (or binary) -> one BinaryAsymmetric dummy per category.
std::vector<Column> dummy_encode(const Column& col);

}  // namespace mgower
