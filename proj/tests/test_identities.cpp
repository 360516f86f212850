#include <gtest/gtest.h>

#include "nlwave/identities.hpp"

using namespace nlwave;

TEST(Identities, SuitePassesAndIsSeeded) {
  const auto a = identities::run_suite(1);
  const auto b = identities::run_suite(1);
  ASSERT_GE(a.size(), 7u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].passed) << a[i].name << " " << a[i].max_error;
    EXPECT_GE(a[i].instances, 1000);
    EXPECT_LE(a[i].max_error, identities::kIdentityTol);
    EXPECT_EQ(a[i].max_error, b[i].max_error);
  }
  const std::string text = identities::format_suite(a);
  EXPECT_NE(text.find("all_pass=true"), std::string::npos);
}
