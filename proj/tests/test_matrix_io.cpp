#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kcontract/matrix_io.hpp"

using namespace kcontract;

TEST(MatrixIo, CsvRoundTripIsExact) {
  std::mt19937 rng(41);
  std::normal_distribution<double> g(0.0, 1e3);
  Matrix m(3, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng) / 7.0;
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  EXPECT_EQ(read_matrix_csv(ss), m);
}

TEST(MatrixIo, JsonRoundTripIsExact) {
  Matrix m(2, 2);
  m << 1.0 / 3.0, -2.5, 1e17, 0.1;
  std::stringstream ss;
  write_matrix_json(ss, m);
  EXPECT_EQ(read_matrix_json(ss), m);
  std::stringstream again(ss.str());
  EXPECT_EQ(read_matrix(again), m);
}

TEST(MatrixIo, FormatsSeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5), "-2.5");
}

TEST(MatrixIo, RejectsMalformedCsv) {
  for (const char* bad : {"1,2\n3\n", "1,2,\n3,4\n", "1,x\n", "", "1,nan\n", "1,inf\n"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(read_matrix_csv(ss), ParseError) << bad;
  }
}

TEST(MatrixIo, RejectsMalformedJson) {
  for (const char* bad : {"{\"rows\":2,\"cols\":2,\"entries\":[1,2,3]}", "{\"rows\":1}", "{not json",
                          "{\"rows\":1,\"cols\":1,\"entries\":[\"a\"]}"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(read_matrix_json(ss), ParseError) << bad;
  }
}

TEST(MatrixIo, SniffsFormat) {
  std::stringstream csv("1,2\n3,4\n");
  std::stringstream json("  {\"rows\":1,\"cols\":2,\"entries\":[5,6]}");
  EXPECT_EQ(read_matrix(csv).rows(), 2);
  EXPECT_EQ(read_matrix(json).cols(), 2);
}

TEST(MatrixIo, JsonWriterUsesRoundTripFloats) {
  std::stringstream ss;
  write_json(ss, nlohmann::json{{"x", 0.1}, {"v", {1.0, 2.0}}});
  EXPECT_NE(ss.str().find("0.10000000000000001"), std::string::npos);
}
