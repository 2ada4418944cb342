#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"

using namespace msd;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "msdlab_csv_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("format_double is shortest and round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
  CHECK(format_double(0.0) == "0");
  for (const double v : {1.0 / 3.0, 6.02e23, 1e-300, -7.123456789012345e-5,
                          123456789.123456789, 2.2250738585072014e-308}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv writer enforces the header width and writes verbatim") {
  const auto path = temp_file("basic.csv");
  {
    CsvWriter out(path.string(), {"a", "b"});
    out.row({"x", "y"});
    out.row_values({0.25, -3.0});
    CHECK_THROWS_AS(out.row({"only-one"}), ValidationError);
  }
  CHECK(slurp(path) == "a,b\nx,y\n0.25,-3\n");
}

TEST_CASE("csv writer fails loudly on unwritable paths") {
  CHECK_THROWS_AS(CsvWriter("/nonexistent-dir/x.csv", {"a"}), IoError);
}

TEST_CASE("key=value files preserve insertion order") {
  const auto path = temp_file("kv.txt");
  write_key_values(path.string(), {{"zeta", "1"}, {"alpha", "0.5"}});
  CHECK(slurp(path) == "zeta=1\nalpha=0.5\n");
}

TEST_CASE("split_csv_line handles empty fields and CR endings") {
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("a,,c\r") == std::vector<std::string>{"a", "", "c"});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
  CHECK(split_csv_line("x,") == std::vector<std::string>{"x", ""});
}
