#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lens::csv {

struct Row {
  std::size_t line_number = 0;  // 1-based, header included
  std::vector<std::string> fields;
};

// Minimal CSV: comma-separated, no quoting (field values in this pipeline
// never contain commas), mandatory header row.
class Reader {
 public:
  explicit Reader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  // Index of a header column; throws if absent.
  std::size_t column(const std::string& name) const;
  // Reads the next data row; nullopt at EOF.
  std::optional<Row> next();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  std::vector<std::string> header_;
};

std::vector<std::string> split_line(const std::string& line);

// Writes rows to a temp file and renames into place on close, so partial
// outputs are never left behind.
class AtomicWriter {
 public:
  explicit AtomicWriter(const std::string& path);
  ~AtomicWriter();

  void write_row(const std::vector<std::string>& fields);
  void write_raw(const std::string& line);
  void close();  // commit; throws on I/O failure

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace lens::csv
