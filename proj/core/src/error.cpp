#include "elpd/error.hpp"

namespace elpd {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::non_finite: return "NonFinite";
    case Errc::empty_matrix: return "EmptyMatrix";
    case Errc::empty_input: return "EmptyInput";
    case Errc::parse: return "ParseError";
    case Errc::non_rectangular: return "NonRectangular";
    case Errc::no_matching_columns: return "NoMatchingColumns";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::coverage: return "CoverageError";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_probability: return "InvalidProbability";
    case Errc::out_of_support: return "OutOfSupport";
    case Errc::insufficient_tail: return "InsufficientTail";
    case Errc::non_positive_exceedance: return "NonPositiveExceedance";
    case Errc::degenerate_sample_size: return "DegenerateSampleSize";
    case Errc::invalid_replicates: return "InvalidReplicates";
    case Errc::invalid_k: return "InvalidK";
  }
  return "Unknown";
}

bool is_input_error(Errc code) {
  switch (code) {
    case Errc::non_finite:
    case Errc::empty_matrix:
    case Errc::empty_input:
    case Errc::parse:
    case Errc::non_rectangular:
    case Errc::no_matching_columns:
    case Errc::length_mismatch:
    case Errc::coverage:
    case Errc::invalid_argument:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace elpd
