#include <sstream>

#include <gtest/gtest.h>

#include "hei/config.hpp"
#include "hei/errors.hpp"

using namespace hei;

TEST(Config, ParsesFileWithComments) {
  std::istringstream in(
      "# suite settings\n"
      "function = camel3\n"
      "methods = EI_OK, HEI_DSD   # two methods\n"
      "\n"
      "n_tot = 30\n"
      "seed=17\n"
      "replications = 2\n"
      "stability = off\n");
  CliConfig c;
  load_config_stream(in, c, "test.cfg");
  EXPECT_EQ(c.function, "camel3");
  ASSERT_EQ(c.methods.size(), 2u);
  EXPECT_EQ(c.methods[1], "HEI_DSD");
  EXPECT_EQ(c.n_tot, 30);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_FALSE(c.stability);
  EXPECT_NO_THROW(c.validate());
  const RunConfig rc = c.run_config(Method::HEI_DSD, 3);
  EXPECT_EQ(rc.n_tot, 30);
  EXPECT_FALSE(rc.record_stability);
  EXPECT_EQ(*rc.f_min, 0.0);
}

TEST(Config, ErrorsCarryLineNumbers) {
  std::istringstream in("function = camel3\nbogus = 1\n");
  CliConfig c;
  try {
    load_config_stream(in, c, "x.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos);
  }
  std::istringstream no_eq("function camel3\n");
  EXPECT_THROW(load_config_stream(no_eq, c, "y.cfg"), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/dir/hei.cfg", c), ConfigError);
}

TEST(Config, RejectsBadValues) {
  CliConfig c;
  EXPECT_THROW(c.set("n_tot", "12x"), ConfigError);
  EXPECT_THROW(c.set("f_min", "abc"), ConfigError);
  EXPECT_THROW(c.set("stability", "maybe"), ConfigError);
}

TEST(Config, ValidationRules) {
  CliConfig c;
  EXPECT_THROW(c.validate(), ConfigError);  // no objective
  c.function = "camel3";
  EXPECT_NO_THROW(c.validate());
  c.command = "cat";
  EXPECT_THROW(c.validate(), ConfigError);  // both sources
  c.function.clear();
  EXPECT_THROW(c.validate(), ConfigError);  // external without bounds
  c.set("lower", "-2,-2");
  c.set("upper", "2 2");
  EXPECT_NO_THROW(c.validate());
  c.set("methods", "");
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("methods", "HEI_DSD,NOPE");
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("methods", "EI_UK");
  c.set("trend", "2");
  c.set("n_ini", "8");
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("n_ini", "10");
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.run_config(Method::EI_UK, 1).trend_order, 2);
  EXPECT_EQ(c.run_config(Method::EI_OK, 1).trend_order, 0);
  c.set("kernel", "cubic");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, EveryKeyIsSettable) {
  for (const auto& k : config_keys()) {
    CliConfig c;
    const std::string v = k == "lower" || k == "upper" ? "0,1"
                          : k == "stability"           ? "true"
                          : k == "method" || k == "methods" ? "EI_OK"
                          : k == "kernel"              ? "matern32"
                          : k == "trend"               ? "bic"
                          : k == "function" || k == "command" || k == "output" ? "x"
                                                                               : "3";
    EXPECT_NO_THROW(c.set(k, v)) << k;
  }
}
