#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <sstream>

#include "nlwave/io.hpp"
#include "nlwave/rng.hpp"

using namespace nlwave;

TEST(Rng, SplitmixReferenceValue) {
  // first output of the reference splitmix64 generator seeded with 0
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformRangeAndMoments) {
  Rng rng(7);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(Rng, GaussianMoments) {
  Rng rng(8);
  const Eigen::VectorXd g = rng.gaussian_vector(200000);
  const double mean = g.mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR((g.array() - mean).square().mean(), 1.0, 0.01);
  EXPECT_TRUE(g.allFinite());
}

TEST(Io, NumberRoundTripIsExact) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.gaussian() * std::pow(10.0, rng.uniform(-30, 30));
    EXPECT_EQ(io::parse_number(io::format_number(x)), x);
  }
  EXPECT_EQ(io::format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(std::isinf(io::parse_number("-inf")));
  EXPECT_TRUE(std::isnan(io::parse_number(io::format_number(std::nan("")))));
  EXPECT_EQ(io::format_number(0.5), "0.5");
}

TEST(Io, CsvRoundTrip) {
  io::CsvTable t{{"t", "v"}, {{0.0, 0.5, 1.0}, {1.25, -std::numeric_limits<double>::infinity(), 3e-300}}};
  std::stringstream ss;
  io::write_csv(ss, t);
  EXPECT_EQ(ss.str().substr(0, 4), "t,v\n");
  const io::CsvTable back = io::read_csv(ss);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.columns.size(), 2u);
  EXPECT_EQ(back.columns[0], t.columns[0]);
  EXPECT_EQ(back.columns[1], t.columns[1]);
}

TEST(Io, MatrixRoundTrip) {
  Rng rng(10);
  const Matrix m = rng.gaussian_matrix(4, 3);
  std::stringstream ss;
  io::write_matrix(ss, m);
  EXPECT_EQ(io::read_matrix(ss), m);
}

TEST(Io, Fnv1aReferenceVectors) {
  EXPECT_EQ(io::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(io::fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(io::hex64(0xabcULL), "0000000000000abc");
}

TEST(Io, FileDigestMatchesBytes) {
  const auto path = std::filesystem::temp_directory_path() / "nlwave_io_digest.txt";
  io::write_text_file(path, "foobar");
  EXPECT_EQ(io::read_text_file(path), "foobar");
  EXPECT_EQ(io::fnv1a64_file(path), io::fnv1a64("foobar"));
  std::filesystem::remove(path);
}
