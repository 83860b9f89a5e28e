#include "elpd/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "elpd/error.hpp"
#include "elpd/oracle.hpp"
#include "reference.hpp"

namespace elpd::io {
namespace {

std::filesystem::path write_file(const std::string& name, const std::string& contents) {
  const auto path = testing::temp_dir() / name;
  std::ofstream(path) << contents;
  return path;
}

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(Errc::invalid_argument, "none");
}

TEST(MatrixCsv, TwoLines) {
  const LogLikMatrix m = parse_matrix_csv(write_file("two.csv", "-1.0,-2.0\n-1.5,-2.5\n"));
  ASSERT_EQ(m.draws(), 2u);
  ASSERT_EQ(m.points(), 2u);
  EXPECT_EQ(m.at(0, 0), -1.0);
  EXPECT_EQ(m.at(0, 1), -2.0);
  EXPECT_EQ(m.at(1, 0), -1.5);
  EXPECT_EQ(m.at(1, 1), -2.5);
}

TEST(MatrixCsv, HeaderAndCommentsSkipped) {
  const LogLikMatrix m =
      parse_matrix_csv(write_file("header.csv", "# exported\np1,p2\n-1,-2\n\n# mid\n-3,-4\r\n"));
  EXPECT_EQ(m.draws(), 2u);
  EXPECT_EQ(m.at(1, 1), -4.0);
}

TEST(MatrixCsv, Errors) {
  const Error ragged = error_of([] { parse_matrix_csv(write_file("ragged.csv", "1,2\n3\n")); });
  EXPECT_EQ(ragged.code(), Errc::non_rectangular);
  EXPECT_EQ(ragged.line, 2u);

  const Error text = error_of([] { parse_matrix_csv(write_file("text.csv", "1,2\n3,abc\n")); });
  EXPECT_EQ(text.code(), Errc::parse);
  EXPECT_EQ(text.line, 2u);
  EXPECT_NE(std::string(text.what()).find("text.csv:2"), std::string::npos);

  const Error inf = error_of([] { parse_matrix_csv(write_file("inf.csv", "1,2\n3,inf\n")); });
  EXPECT_EQ(inf.code(), Errc::non_finite);

  const Error one = error_of([] { parse_matrix_csv(write_file("one.csv", "1,2\n")); });
  EXPECT_EQ(one.code(), Errc::empty_matrix);

  EXPECT_EQ(error_of([] { parse_matrix_csv(testing::temp_dir() / "missing.csv"); }).code(), Errc::parse);
}

TEST(DrawsCsv, DotIndexSelection) {
  const LogLikMatrix m =
      parse_draws_csv(write_file("dots.csv", "lp__,log_lik.1,log_lik.2\n-5,-1,-2\n-6,-3,-4\n"));
  ASSERT_EQ(m.points(), 2u);
  EXPECT_EQ(m.at(0, 0), -1.0);
  EXPECT_EQ(m.at(1, 1), -4.0);
}

TEST(DrawsCsv, BracketIndexReordered) {
  const auto path = write_file("brackets.csv", "# sampler comment\nlog_lik[2],log_lik[1]\n-2,-1\n-4,-3\n");
  const LogLikMatrix m = parse_draws_csv(path);
  EXPECT_EQ(m.at(0, 0), -1.0);
  EXPECT_EQ(m.at(0, 1), -2.0);
  EXPECT_EQ(error_of([&] { parse_draws_csv(path, "loglik"); }).code(), Errc::no_matching_columns);
}

TEST(DrawsCsv, NumericOrderingAndChainColumn) {
  const auto path = write_file("chains.csv",
                               "chain__,ll.10,ll.2,ll.1,other\n1,-10,-2,-1,0\n2,-20,-4,-3,0\n");
  const LogLikMatrix m = parse_draws_csv(path, "ll");
  ASSERT_EQ(m.points(), 3u);
  EXPECT_EQ(m.at(0, 0), -1.0);
  EXPECT_EQ(m.at(0, 1), -2.0);
  EXPECT_EQ(m.at(0, 2), -10.0);
  EXPECT_EQ(m.chain_ids(), (std::vector<std::string>{"1", "2"}));
}

TEST(Ndjson, Parses) {
  const auto path =
      write_file("draws.ndjson", "{\"log_lik\": [-1, -2], \"chain\": 1}\n{\"log_lik\": [-3, -4], \"chain\": 2}\n");
  const LogLikMatrix m = parse_ndjson(path);
  EXPECT_EQ(m.at(1, 0), -3.0);
  EXPECT_EQ(m.points(), 2u);
  EXPECT_EQ(error_of([&] { parse_ndjson(path, "other"); }).code(), Errc::no_matching_columns);

  const Error bad = error_of([] { parse_ndjson(write_file("bad.ndjson", "{\"log_lik\": [1]}\n{oops\n")); });
  EXPECT_EQ(bad.code(), Errc::parse);
  EXPECT_EQ(bad.line, 2u);
  const Error ragged =
      error_of([] { parse_ndjson(write_file("rag.ndjson", "{\"log_lik\": [1]}\n{\"log_lik\": [1, 2]}\n")); });
  EXPECT_EQ(ragged.code(), Errc::non_rectangular);
}

TEST(InputFormat, Names) {
  for (InputFormat f : {InputFormat::matrix_csv, InputFormat::draws_csv, InputFormat::ndjson}) {
    EXPECT_EQ(parse_input_format(to_string(f)), f);
  }
  EXPECT_FALSE(parse_input_format("xml").has_value());
}

TEST(RoundTrip, FullPrecisionThroughCsv) {
  const auto data = oracle::simulate(7, 1.0, 0.0, 1.0, oracle::DataScheme::common_mean, 2);
  const LogLikMatrix m = oracle::sample_loglik(data.model, 60, 3);
  std::ostringstream text;
  write_matrix_csv(text, m);
  const auto path = write_file("roundtrip.csv", text.str());
  const LogLikMatrix back = read_input({path, InputFormat::matrix_csv, "log_lik"});
  EXPECT_TRUE(std::equal(m.column_major().begin(), m.column_major().end(), back.column_major().begin(),
                         back.column_major().end()));
}

TEST(Streaming, ShapeAndColumnSlices) {
  const auto data = oracle::simulate(9, 1.0, 0.0, 1.0, oracle::DataScheme::common_mean, 2);
  const LogLikMatrix m = oracle::sample_loglik(data.model, 20, 3);
  std::ostringstream text;
  write_matrix_csv(text, m, false);
  const InputSpec spec{write_file("stream.csv", text.str()), InputFormat::matrix_csv, "log_lik"};
  const MatrixShape shape = scan_shape(spec);
  EXPECT_EQ(shape.draws, 20u);
  EXPECT_EQ(shape.points, 9u);
  const LogLikMatrix slice = read_columns(spec, 4, 3);
  ASSERT_EQ(slice.points(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t s = 0; s < 20; ++s) EXPECT_EQ(slice.at(s, j), m.at(s, 4 + j));
  }
  EXPECT_THROW(read_columns(spec, 8, 2), Error);
}

}  // namespace
}  // namespace elpd::io
