#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "elpd/loglik.hpp"

namespace elpd::io {

enum class InputFormat {
  // Rows are draws, columns are points; optional header row; '#' comments.
  matrix_csv,
  // Sampler output with a header; columns named prefix.N or prefix[N] are
  // selected and ordered by N; '#' comments.
  draws_csv,
  // One JSON object per draw holding an array under the prefix key.
  ndjson,
};

std::optional<InputFormat> parse_input_format(std::string_view name);
std::string_view to_string(InputFormat format);

struct InputSpec {
  std::filesystem::path path;
  InputFormat format = InputFormat::matrix_csv;
  std::string column_prefix = "log_lik";
};

// Parse failures carry the path and 1-based line in the message and in
// Error::line.
LogLikMatrix parse_matrix_csv(const std::filesystem::path& path);
LogLikMatrix parse_draws_csv(const std::filesystem::path& path, std::string_view column_prefix = "log_lik");
LogLikMatrix parse_ndjson(const std::filesystem::path& path, std::string_view column_prefix = "log_lik");

LogLikMatrix read_input(const InputSpec& spec);

struct MatrixShape {
  std::size_t draws = 0;
  std::size_t points = 0;
};

// Validates the whole file without keeping it in memory.
MatrixShape scan_shape(const InputSpec& spec);

// Columns [first, first + count) of the input; the file is re-read and only
// the requested columns are kept.
LogLikMatrix read_columns(const InputSpec& spec, std::size_t first, std::size_t count);

// Draws as rows, 17 significant digits, optional "p1,p2,..." header.
void write_matrix_csv(std::ostream& out, const LogLikMatrix& m, bool header = true);

}  // namespace elpd::io
