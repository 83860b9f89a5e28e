#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace elpd {

enum class Errc {
  // Input/validation failures.
  non_finite,
  empty_matrix,
  empty_input,
  parse,
  non_rectangular,
  no_matching_columns,
  length_mismatch,
  coverage,
  invalid_argument,
  // Estimator failures.
  invalid_probability,
  out_of_support,
  insufficient_tail,
  non_positive_exceedance,
  degenerate_sample_size,
  invalid_replicates,
  invalid_k,
};

std::string_view to_string(Errc code);

// True for errors caused by malformed or invalid input data, as opposed to
// errors raised by an estimator on otherwise well-formed data.
bool is_input_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

  // 0-based draw/point position for non_finite errors.
  std::optional<std::size_t> row;
  std::optional<std::size_t> column;
  // 1-based source line for parse errors.
  std::optional<std::size_t> line;

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace elpd
