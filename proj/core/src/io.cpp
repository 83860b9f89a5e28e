#include "elpd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <regex>
#include <span>
#include <vector>

#include "elpd/error.hpp"
#include "json.hpp"

namespace elpd::io {
namespace {

using RowFn = std::function<void(std::span<const double> values, const std::string& chain)>;

[[noreturn]] void parse_failure(Errc code, const std::filesystem::path& path, std::size_t line,
                                const std::string& what) {
  Error err(code, path.string() + ":" + std::to_string(line) + ": " + what);
  err.line = line;
  throw err;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return value;
}

bool skippable(std::string_view line) {
  const std::string_view t = trim(line);
  return t.empty() || t.front() == '#';
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open " + path.string());
  return in;
}

void check_finite(const std::filesystem::path& path, std::size_t line, std::size_t draw,
                  std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) {
      Error err(Errc::non_finite, path.string() + ":" + std::to_string(line) + ": entry (" +
                                      std::to_string(draw) + ", " + std::to_string(j) +
                                      ") is not finite");
      err.line = line;
      err.row = draw;
      err.column = j;
      throw err;
    }
  }
}

std::size_t visit_matrix_csv(const std::filesystem::path& path, const RowFn& fn) {
  std::ifstream in = open(path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::size_t draws = 0;
  bool first = true;
  std::vector<double> row;
  const std::string no_chain;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    row.clear();
    bool numeric = true;
    for (std::string_view f : fields) {
      const auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        // Header row.
        first = false;
        width = fields.size();
        continue;
      }
      parse_failure(Errc::parse, path, line_no, "non-numeric field");
    }
    if (width == 0) width = row.size();
    first = false;
    if (row.size() != width) {
      parse_failure(Errc::non_rectangular, path, line_no,
                    "expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()));
    }
    check_finite(path, line_no, draws, row);
    fn(row, no_chain);
    ++draws;
  }
  return width;
}

struct DrawsColumns {
  std::vector<std::size_t> field_of_point;
  std::optional<std::size_t> chain_field;
  std::size_t width = 0;
};

DrawsColumns select_columns(const std::filesystem::path& path, std::size_t line_no,
                            std::string_view header, std::string_view prefix) {
  const auto names = split_fields(header);
  std::string escaped;
  for (char c : prefix) {
    if (std::string_view(".^$|()[]{}*+?\\").find(c) != std::string_view::npos) escaped += '\\';
    escaped += c;
  }
  const std::regex pattern("^" + escaped + R"((?:\.(\d+)|\[(\d+)\])$)");
  std::map<long long, std::size_t> by_index;
  DrawsColumns out;
  out.width = names.size();
  for (std::size_t f = 0; f < names.size(); ++f) {
    const std::string name(unquote(names[f]));
    std::smatch match;
    if (std::regex_match(name, match, pattern)) {
      const std::string digits = match[1].matched ? match[1].str() : match[2].str();
      const long long index = std::stoll(digits);
      if (!by_index.emplace(index, f).second) {
        parse_failure(Errc::parse, path, line_no, "column " + name + " appears twice");
      }
    } else if (name == "chain" || name == "chain__" || name == ".chain") {
      out.chain_field = f;
    }
  }
  if (by_index.empty()) {
    fail(Errc::no_matching_columns,
         path.string() + ": no columns named " + std::string(prefix) + ".N or " + std::string(prefix) + "[N]");
  }
  for (const auto& [index, field] : by_index) out.field_of_point.push_back(field);
  return out;
}

std::size_t visit_draws_csv(const std::filesystem::path& path, std::string_view prefix, const RowFn& fn) {
  std::ifstream in = open(path);
  std::string line;
  std::size_t line_no = 0;
  std::optional<DrawsColumns> columns;
  std::size_t draws = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    if (!columns) {
      columns = select_columns(path, line_no, line, prefix);
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != columns->width) {
      parse_failure(Errc::non_rectangular, path, line_no,
                    "expected " + std::to_string(columns->width) + " fields, found " +
                        std::to_string(fields.size()));
    }
    row.clear();
    for (std::size_t f : columns->field_of_point) {
      const auto v = parse_number(fields[f]);
      if (!v) parse_failure(Errc::parse, path, line_no, "non-numeric value '" + std::string(fields[f]) + "'");
      row.push_back(*v);
    }
    check_finite(path, line_no, draws, row);
    const std::string chain = columns->chain_field ? std::string(fields[*columns->chain_field]) : std::string();
    fn(row, chain);
    ++draws;
  }
  if (!columns) parse_failure(Errc::parse, path, line_no, "missing header row");
  return columns->field_of_point.size();
}

std::size_t visit_ndjson(const std::filesystem::path& path, std::string_view prefix, const RowFn& fn) {
  std::ifstream in = open(path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::size_t draws = 0;
  std::vector<double> row;
  const std::string key(prefix);
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      parse_failure(Errc::parse, path, line_no, e.what());
    }
    if (!doc.is_object()) parse_failure(Errc::parse, path, line_no, "expected a JSON object");
    const auto field = doc.find(key);
    if (field == doc.end()) {
      if (draws == 0) fail(Errc::no_matching_columns, path.string() + ": no field named " + key);
      parse_failure(Errc::parse, path, line_no, "missing field " + key);
    }
    if (!field->is_array()) parse_failure(Errc::parse, path, line_no, "field " + key + " is not an array");
    row.clear();
    for (const auto& v : *field) {
      if (!v.is_number()) parse_failure(Errc::parse, path, line_no, "non-numeric entry in " + key);
      row.push_back(v.get<double>());
    }
    if (draws == 0) width = row.size();
    if (row.size() != width) {
      parse_failure(Errc::non_rectangular, path, line_no,
                    "expected " + std::to_string(width) + " values, found " + std::to_string(row.size()));
    }
    check_finite(path, line_no, draws, row);
    std::string chain;
    if (const auto c = doc.find("chain"); c != doc.end()) {
      chain = c->is_string() ? c->get<std::string>() : c->dump();
    }
    fn(row, chain);
    ++draws;
  }
  return width;
}

std::size_t visit(const InputSpec& spec, const RowFn& fn) {
  switch (spec.format) {
    case InputFormat::matrix_csv: return visit_matrix_csv(spec.path, fn);
    case InputFormat::draws_csv: return visit_draws_csv(spec.path, spec.column_prefix, fn);
    case InputFormat::ndjson: return visit_ndjson(spec.path, spec.column_prefix, fn);
  }
  return 0;
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "matrix_csv") return InputFormat::matrix_csv;
  if (name == "draws_csv") return InputFormat::draws_csv;
  if (name == "ndjson") return InputFormat::ndjson;
  return std::nullopt;
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::matrix_csv: return "matrix_csv";
    case InputFormat::draws_csv: return "draws_csv";
    case InputFormat::ndjson: return "ndjson";
  }
  return "unknown";
}

MatrixShape scan_shape(const InputSpec& spec) {
  MatrixShape shape;
  shape.points = visit(spec, [&](std::span<const double>, const std::string&) { ++shape.draws; });
  if (shape.draws < 2 || shape.points < 1) {
    fail(Errc::empty_matrix, spec.path.string() + ": need at least 2 draws and 1 point, got " +
                                 std::to_string(shape.draws) + " x " + std::to_string(shape.points));
  }
  return shape;
}

LogLikMatrix read_columns(const InputSpec& spec, std::size_t first, std::size_t count) {
  std::vector<std::vector<double>> columns(count);
  std::vector<std::string> chains;
  bool any_chain = false;
  visit(spec, [&](std::span<const double> row, const std::string& chain) {
    if (first + count > row.size()) {
      fail(Errc::invalid_argument, "requested columns beyond the input width");
    }
    for (std::size_t c = 0; c < count; ++c) columns[c].push_back(row[first + c]);
    chains.push_back(chain);
    any_chain = any_chain || !chain.empty();
  });
  const std::size_t draws = chains.size();
  if (draws < 2 || count == 0) {
    fail(Errc::empty_matrix, spec.path.string() + ": need at least 2 draws and 1 point, got " +
                                 std::to_string(draws) + " x " + std::to_string(count));
  }
  std::vector<double> values;
  values.reserve(draws * count);
  for (auto& column : columns) values.insert(values.end(), column.begin(), column.end());
  if (!any_chain) chains.clear();
  return LogLikMatrix::from_columns(draws, std::move(values), std::move(chains));
}

LogLikMatrix read_input(const InputSpec& spec) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> chains;
  bool any_chain = false;
  visit(spec, [&](std::span<const double> row, const std::string& chain) {
    rows.emplace_back(row.begin(), row.end());
    chains.push_back(chain);
    any_chain = any_chain || !chain.empty();
  });
  if (!any_chain) chains.clear();
  try {
    return LogLikMatrix::from_rows(rows, std::move(chains));
  } catch (const Error& e) {
    Error err(e.code(), spec.path.string() + ": " + e.what());
    err.row = e.row;
    err.column = e.column;
    throw err;
  }
}

LogLikMatrix parse_matrix_csv(const std::filesystem::path& path) {
  return read_input({path, InputFormat::matrix_csv, "log_lik"});
}

LogLikMatrix parse_draws_csv(const std::filesystem::path& path, std::string_view column_prefix) {
  return read_input({path, InputFormat::draws_csv, std::string(column_prefix)});
}

LogLikMatrix parse_ndjson(const std::filesystem::path& path, std::string_view column_prefix) {
  return read_input({path, InputFormat::ndjson, std::string(column_prefix)});
}

void write_matrix_csv(std::ostream& out, const LogLikMatrix& m, bool header) {
  if (header) {
    for (std::size_t j = 0; j < m.points(); ++j) out << (j ? "," : "") << 'p' << (j + 1);
    out << '\n';
  }
  char buffer[32];
  for (std::size_t s = 0; s < m.draws(); ++s) {
    for (std::size_t j = 0; j < m.points(); ++j) {
      const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, m.at(s, j),
                                           std::chars_format::general, 17);
      if (j) out << ',';
      out.write(buffer, ptr - buffer);
    }
    out << '\n';
  }
}

}  // namespace elpd::io
