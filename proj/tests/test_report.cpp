#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwellflux/report.hpp"

using namespace dwell;

TEST_CASE("key-value config") {
  const auto c = RunConfig::parse("# packet\nalpha = 0.5\nk0: 2\ndk=0.4\nx0 = -400 # start\nx1 = 0\nx2 = 50\n");
  CHECK(c.number("k0") == 2.0);
  CHECK(c.number("x0") == -400.0);
  CHECK(c.region().width() == 50.0);
  CHECK(c.units().hbar == 1.0);
  const auto p = c.packet();
  CHECK(p.dk == 0.4);
  CHECK(p.norm > 0.0);
  CHECK(c.packet_with_dk(0.1).dk == 0.1);
}

TEST_CASE("JSON config") {
  const auto c = RunConfig::parse(R"({"alpha": 0.5, "k0": 2, "dk_list": [0.4, 0.2], "hbar": 2, "mass": 3})");
  CHECK(c.list("dk_list") == std::vector<double>{0.4, 0.2});
  CHECK(c.units().mass == 3.0);
  CHECK(c.integer_or("tau_points", 7) == 7);
}

TEST_CASE("config errors") {
  const auto c = RunConfig::parse("k0 = abc\n");
  CHECK_THROWS_AS(c.number("k0"), ConfigError);
  CHECK_THROWS_AS(c.number("dk"), ConfigError);
  CHECK_THROWS_AS(c.region(), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("just a line\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("numbers round-trip with 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(linspace(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("csv writer") {
  const auto path = std::filesystem::temp_directory_path() / "dwellflux_report_test.csv";
  {
    CsvWriter w(path.string(), {"a", "b"});
    w.row({0.1, 2.0});
    CHECK_THROWS(w.row({1.0}));
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n0.10000000000000001,2\n");
  std::filesystem::remove(path);
}
