#include "core/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"

namespace mgower {

namespace {

constexpr std::pair<Kind, std::string_view> kKindNames[] = {
    {Kind::BinarySymmetric, "binary_symmetric"},
    {Kind::BinaryAsymmetric, "binary_asymmetric"},
    {Kind::Nominal, "nominal"},
    {Kind::Ordinal, "ordinal"},
    {Kind::Numeric, "numeric"},
};

bool same_cell(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::optional<double> parse_number(std::string_view token) {
  // from_chars rejects a leading '+'; accept it like strtod does.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string_view to_string(Kind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

Kind parse_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  throw SchemaError("unknown variable kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Column

std::size_t Column::n_observed() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](double v) { return !std::isnan(v); }));
}

std::vector<double> Column::observed() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

std::vector<std::uint8_t> Column::missing_mask() const {
  std::vector<std::uint8_t> mask(values.size());
  std::transform(values.begin(), values.end(), mask.begin(),
                 [](double v) { return static_cast<std::uint8_t>(std::isnan(v)); });
  return mask;
}

std::string Column::render(std::size_t row) const {
  const double v = values.at(row);
  if (std::isnan(v)) return missing_token;
  if (kind.has_categories()) return kind.categories.at(static_cast<std::size_t>(v));
  if (kind.is_binary()) return v == 0.0 ? "0" : "1";
  return csv::format_roundtrip(v);
}

void Column::validate() const {
  if (kind.has_categories()) {
    if (kind.categories.size() < 2) {
      throw SchemaError("column '" + name + "': nominal/ordinal needs at least 2 categories");
    }
    std::set<std::string> seen(kind.categories.begin(), kind.categories.end());
    if (seen.size() != kind.categories.size()) {
      throw SchemaError("column '" + name + "': duplicate category label");
    }
  }
  const double n_cat = static_cast<double>(kind.categories.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    const double v = values[r];
    if (std::isnan(v)) continue;
    bool ok = std::isfinite(v);
    if (kind.is_binary()) {
      ok = v == 0.0 || v == 1.0;
    } else if (kind.has_categories()) {
      ok = ok && v >= 0.0 && v < n_cat && v == std::floor(v);
    }
    if (!ok) {
      throw DataError("column '" + name + "', row " + std::to_string(r) +
                      ": value does not conform to kind " + std::string(to_string(kind.kind)));
    }
  }
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<Column> columns, std::vector<std::string> row_ids, std::string id_column,
                 std::size_t id_position)
    : columns_(std::move(columns)),
      row_ids_(std::move(row_ids)),
      id_column_(std::move(id_column)),
      id_position_(id_position) {
  if (columns_.empty()) throw DataError("dataset has no variables");
  n_rows_ = columns_.front().size();

  std::set<std::string_view> names;
  for (const auto& col : columns_) {
    if (col.size() != n_rows_) {
      throw DataError("column '" + col.name + "' has " + std::to_string(col.size()) +
                      " rows, expected " + std::to_string(n_rows_));
    }
    if (!names.insert(col.name).second) throw DataError("duplicate column name '" + col.name + "'");
    col.validate();
  }
  if (!id_column_.empty() && names.count(id_column_)) {
    throw DataError("duplicate column name '" + id_column_ + "'");
  }

  if (row_ids_.empty()) {
    row_ids_.reserve(n_rows_);
    for (std::size_t r = 0; r < n_rows_; ++r) row_ids_.push_back(std::to_string(r));
  } else if (row_ids_.size() != n_rows_) {
    throw DataError("row id count does not match row count");
  }
  std::set<std::string_view> ids(row_ids_.begin(), row_ids_.end());
  if (ids.size() != row_ids_.size()) throw DataError("row ids are not unique");

  for (std::size_t r = 0; r < n_rows_; ++r) {
    const bool all_missing = std::all_of(columns_.begin(), columns_.end(),
                                         [r](const Column& c) { return c.is_missing(r); });
    if (all_missing) {
      throw DataError("all-missing row: row " + row_ids_[r] + " has every variable missing");
    }
  }
}

const Column& Dataset::column(std::string_view name) const {
  if (auto idx = find(name)) return columns_[*idx];
  throw UsageError("no column named '" + std::string(name) + "'");
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column out(c.name, c.kind, {}, c.missing_token);
    out.values.reserve(rows.size());
    for (std::size_t r : rows) out.values.push_back(c.values.at(r));
    cols.push_back(std::move(out));
  }
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) ids.push_back(row_ids_.at(r));
  return Dataset(std::move(cols), std::move(ids), id_column_, id_position_);
}

Dataset Dataset::select_columns(std::span<const std::string> names) const {
  std::vector<Column> cols;
  for (const auto& n : names) cols.push_back(column(n));
  return Dataset(std::move(cols), row_ids_, id_column_, id_position_);
}

Dataset Dataset::replace_column(const Column& column) const {
  auto cols = columns_;
  auto idx = find(column.name);
  if (!idx) throw UsageError("no column named '" + column.name + "'");
  cols[*idx] = column;
  return Dataset(std::move(cols), row_ids_, id_column_, id_position_);
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.n_rows_ != b.n_rows_ || a.columns_.size() != b.columns_.size() || a.row_ids_ != b.row_ids_ ||
      a.id_column_ != b.id_column_) {
    return false;
  }
  for (std::size_t i = 0; i < a.columns_.size(); ++i) {
    const auto& x = a.columns_[i];
    const auto& y = b.columns_[i];
    if (x.name != y.name || x.kind != y.kind || x.missing_token != y.missing_token) return false;
    if (!std::equal(x.values.begin(), x.values.end(), y.values.begin(), same_cell)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Schema

Schema Schema::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("schema must be a JSON object");

  Schema schema;
  std::size_t n_ids = 0;
  for (const auto& [name, spec] : doc.items()) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
      throw SchemaError("schema entry '" + name + "' needs a string 'kind'");
    }
    ColumnSchema cs;
    const auto kind = spec["kind"].get<std::string>();
    if (spec.contains("missing_token")) {
      if (!spec["missing_token"].is_string()) {
        throw SchemaError("schema entry '" + name + "': missing_token must be a string");
      }
      cs.missing_token = spec["missing_token"].get<std::string>();
    }
    if (kind == "id") {
      cs.is_id = true;
      ++n_ids;
    } else {
      cs.kind.kind = parse_kind(kind);
      if (cs.kind.has_categories()) {
        if (!spec.contains("categories") || !spec["categories"].is_array()) {
          throw SchemaError("schema entry '" + name + "' needs a 'categories' array");
        }
        for (const auto& c : spec["categories"]) {
          if (!c.is_string()) throw SchemaError("schema entry '" + name + "': categories must be strings");
          cs.kind.categories.push_back(c.get<std::string>());
        }
        if (cs.kind.categories.size() < 2) {
          throw SchemaError("schema entry '" + name + "' declares fewer than 2 categories");
        }
        std::set<std::string> uniq(cs.kind.categories.begin(), cs.kind.categories.end());
        if (uniq.size() != cs.kind.categories.size()) {
          throw SchemaError("schema entry '" + name + "' repeats a category");
        }
      }
    }
    schema.columns.emplace(name, std::move(cs));
  }
  if (n_ids > 1) throw SchemaError("schema declares more than one id column");
  return schema;
}

Schema Schema::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open schema file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Schema Schema::of(const Dataset& data) {
  Schema schema;
  for (const auto& c : data.columns()) schema.columns[c.name] = ColumnSchema{c.kind, c.missing_token, false};
  if (!data.id_column().empty()) schema.columns[data.id_column()] = ColumnSchema{{}, {}, true};
  return schema;
}

std::string Schema::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [name, cs] : columns) {
    nlohmann::json entry;
    entry["kind"] = cs.is_id ? std::string("id") : std::string(to_string(cs.kind.kind));
    if (cs.kind.has_categories()) entry["categories"] = cs.kind.categories;
    if (!cs.missing_token.empty()) entry["missing_token"] = cs.missing_token;
    doc[name] = entry;
  }
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// CSV load / save

Dataset load_dataset(std::string_view csv_text, const Schema& schema) {
  const auto rows = csv::read(csv_text);
  if (rows.empty()) throw DataError("csv has no header row");
  const auto& header = rows.front();

  std::set<std::string> seen;
  for (const auto& raw : header) {
    const auto name = trim(raw);
    if (!seen.insert(name).second) throw SchemaError("duplicate column name '" + name + "' in csv header");
    if (!schema.columns.count(name)) throw SchemaError("csv column '" + name + "' is not in the schema");
  }
  for (const auto& [name, cs] : schema.columns) {
    if (!seen.count(name)) throw SchemaError("schema column '" + name + "' is absent from the csv");
  }

  const std::size_t n_rows = rows.size() - 1;
  std::vector<Column> columns;
  std::vector<std::size_t> field_of_column;
  std::optional<std::size_t> id_field;
  std::vector<std::unordered_map<std::string, double>> code_maps;
  for (std::size_t f = 0; f < header.size(); ++f) {
    const auto name = trim(header[f]);
    const auto& cs = schema.columns.at(name);
    if (cs.is_id) {
      id_field = f;
      continue;
    }
    Column col(name, cs.kind, {}, cs.missing_token);
    col.values.reserve(n_rows);
    columns.push_back(std::move(col));
    field_of_column.push_back(f);
    std::unordered_map<std::string, double> codes;
    for (std::size_t k = 0; k < cs.kind.categories.size(); ++k) codes[cs.kind.categories[k]] = double(k);
    code_maps.push_back(std::move(codes));
  }

  std::vector<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty() && header.size() > 1) continue;  // blank line
    if (row.size() != header.size()) {
      throw DataError("csv line " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    if (id_field) ids.push_back(row[*id_field]);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      auto& col = columns[c];
      const auto& token = row[field_of_column[c]];
      if (token == col.missing_token) {
        col.values.push_back(kMissing);
        continue;
      }
      auto where = [&] { return "column '" + col.name + "', csv line " + std::to_string(r + 1); };
      if (col.kind.has_categories()) {
        auto it = code_maps[c].find(token);
        if (it == code_maps[c].end()) throw DataError("unknown category '" + token + "' in " + where());
        col.values.push_back(it->second);
      } else if (col.kind.is_binary()) {
        const auto t = trim(token);
        if (t != "0" && t != "1") throw DataError("binary value must be 0 or 1, got '" + token + "' in " + where());
        col.values.push_back(t == "1" ? 1.0 : 0.0);
      } else {
        auto v = parse_number(trim(token));
        if (!v) throw DataError("non-numeric token '" + token + "' in " + where());
        col.values.push_back(*v);
      }
    }
  }
  std::string id_name;
  std::size_t id_pos = 0;
  if (id_field) {
    id_name = trim(header[*id_field]);
    id_pos = *id_field;
  }
  return Dataset(std::move(columns), std::move(ids), std::move(id_name), id_pos);
}

Dataset load_dataset(std::istream& csv, const Schema& schema) {
  std::string text{std::istreambuf_iterator<char>(csv), std::istreambuf_iterator<char>()};
  return load_dataset(std::string_view(text), schema);
}

Dataset load_dataset_file(const std::string& csv_path, const Schema& schema) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw UsageError("cannot open data file '" + csv_path + "'");
  return load_dataset(in, schema);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const bool has_id = !data.id_column().empty();
  const std::size_t id_pos = std::min(data.id_position(), data.n_cols());
  auto emit = [&](auto&& field_for_column, auto&& id_field) {
    csv::Row row;
    for (std::size_t c = 0; c <= data.n_cols(); ++c) {
      if (has_id && c == id_pos) row.push_back(id_field());
      if (c < data.n_cols()) row.push_back(field_for_column(c));
    }
    csv::write_row(out, row);
  };
  emit([&](std::size_t c) { return data.column(c).name; }, [&] { return data.id_column(); });
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    emit([&](std::size_t c) { return data.column(c).render(r); }, [&] { return data.row_ids()[r]; });
  }
}

std::string to_csv(const Dataset& data) {
  std::ostringstream out;
  write_dataset(out, data);
  return out.str();
}

// ---------------------------------------------------------------------------
// Ordinal and nominal transforms

Column ordinal_to_ratio(const Column& col, OrdinalScale scale) {
  if (col.kind.kind != Kind::Ordinal) throw UsageError("ordinal_to_ratio: column '" + col.name + "' is not ordinal");
  double top = static_cast<double>(col.kind.categories.size());  // max position, 1-based
  if (scale == OrdinalScale::ObservedMax) {
    top = 1.0;
    for (double v : col.values) {
      if (!std::isnan(v)) top = std::max(top, v + 1.0);
    }
  }
  Column out(col.name, VariableKind::numeric(), col.values, col.missing_token);
  for (double& v : out.values) {
    if (std::isnan(v)) continue;
    v = top > 1.0 ? v / (top - 1.0) : 0.0;  // (o - 1) / (max(o) - 1) with o = code + 1
  }
  return out;
}

Column ordinal_to_midrank(const Column& col) {
  if (col.kind.kind != Kind::Ordinal) throw UsageError("ordinal_to_midrank: column '" + col.name + "' is not ordinal");
  const std::size_t n_cat = col.kind.categories.size();
  std::vector<std::size_t> counts(n_cat, 0);
  for (double v : col.values) {
    if (!std::isnan(v)) ++counts[static_cast<std::size_t>(v)];
  }
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 0) {
    throw DataError("ordinal_to_midrank: empty column '" + col.name + "'");
  }
  // Category k occupies ranks below+1 .. below+count; its midrank is the average.
  std::vector<double> midrank(n_cat, 0.0);
  std::size_t below = 0;
  for (std::size_t k = 0; k < n_cat; ++k) {
    midrank[k] = static_cast<double>(below) + (static_cast<double>(counts[k]) + 1.0) / 2.0;
    below += counts[k];
  }
  Column out(col.name, VariableKind::numeric(), col.values, col.missing_token);
  for (double& v : out.values) {
    if (!std::isnan(v)) v = midrank[static_cast<std::size_t>(v)];
  }
  return out;
}

std::vector<Column> dummy_encode(const Column& col) {
  std::vector<std::string> labels;
  if (col.kind.is_binary()) {
    labels = {"0", "1"};
  } else if (col.kind.has_categories()) {
    labels = col.kind.categories;
  } else {
    throw UsageError("dummy_encode: column '" + col.name + "' is not categorical");
  }
  std::vector<Column> out;
  out.reserve(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    Column d(col.name + "_" + labels[k], VariableKind::binary(true), {}, col.missing_token);
    d.values.reserve(col.size());
    for (double v : col.values) {
      d.values.push_back(std::isnan(v) ? kMissing : (static_cast<std::size_t>(v) == k ? 1.0 : 0.0));
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace mgower
