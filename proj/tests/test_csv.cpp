#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lens/csv.hpp"

namespace fs = std::filesystem;
using namespace lens;

namespace {
std::string tmp_path(const char* name) {
  return (fs::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("reader parses header and rows") {
  std::string path = tmp_path("lens_csv_read.csv");
  {
    std::ofstream out(path);
    out << "a,b,c\n1,2,3\n\n4,5,6\n";
  }
  csv::Reader reader(path);
  CHECK(reader.header() == std::vector<std::string>{"a", "b", "c"});
  CHECK(reader.column("b") == 1);
  CHECK_THROWS(reader.column("missing"));
  auto r1 = reader.next();
  REQUIRE(r1.has_value());
  CHECK(r1->fields == std::vector<std::string>{"1", "2", "3"});
  auto r2 = reader.next();  // blank line skipped
  REQUIRE(r2.has_value());
  CHECK(r2->fields == std::vector<std::string>{"4", "5", "6"});
  CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("atomic writer commits on close only") {
  std::string path = tmp_path("lens_csv_write.csv");
  fs::remove(path);
  {
    csv::AtomicWriter w(path);
    w.write_row({"x", "y"});
    CHECK_FALSE(fs::exists(path));  // still staged in the temp file
    w.close();
  }
  CHECK(fs::exists(path));
  CHECK_FALSE(fs::exists(path + ".tmp"));
  csv::Reader reader(path);
  CHECK(reader.header() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("abandoned writer leaves no partial output") {
  std::string path = tmp_path("lens_csv_abandon.csv");
  fs::remove(path);
  {
    csv::AtomicWriter w(path);
    w.write_row({"x"});
    // destroyed without close(): simulated crash mid-write
  }
  CHECK_FALSE(fs::exists(path));
  CHECK_FALSE(fs::exists(path + ".tmp"));
}

TEST_CASE("split_line keeps empty fields and strips CR") {
  CHECK(csv::split_line("a,,c\r") == std::vector<std::string>{"a", "", "c"});
  CHECK(csv::split_line("") == std::vector<std::string>{""});
}
