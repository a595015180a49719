#include "lens/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace lens::csv {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

struct Reader::Impl {
  std::ifstream in;
  std::size_t line_number = 0;
};

Reader::Reader(const std::string& path) : impl_(std::make_shared<Impl>()) {
  impl_->in.open(path);
  if (!impl_->in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(impl_->in, line)) throw std::runtime_error("missing header in " + path);
  impl_->line_number = 1;
  header_ = split_line(line);
}

std::size_t Reader::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw std::runtime_error("missing column '" + name + "'");
}

std::optional<Row> Reader::next() {
  std::string line;
  while (std::getline(impl_->in, line)) {
    ++impl_->line_number;
    if (line.empty()) continue;
    return Row{impl_->line_number, split_line(line)};
  }
  return std::nullopt;
}

struct AtomicWriter::Impl {
  std::string final_path;
  std::string tmp_path;
  std::ofstream out;
  bool committed = false;

  ~Impl() {
    if (!committed) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp_path, ec);
    }
  }
};

AtomicWriter::AtomicWriter(const std::string& path) : impl_(std::make_shared<Impl>()) {
  impl_->final_path = path;
  impl_->tmp_path = path + ".tmp";
  impl_->out.open(impl_->tmp_path, std::ios::trunc);
  if (!impl_->out) throw std::runtime_error("cannot open " + impl_->tmp_path + " for writing");
}

AtomicWriter::~AtomicWriter() = default;

void AtomicWriter::write_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += fields[i];
  }
  line.push_back('\n');
  impl_->out << line;
}

void AtomicWriter::write_raw(const std::string& line) { impl_->out << line << '\n'; }

void AtomicWriter::close() {
  impl_->out.flush();
  if (!impl_->out) throw std::runtime_error("write failed for " + impl_->tmp_path);
  impl_->out.close();
  std::filesystem::rename(impl_->tmp_path, impl_->final_path);
  impl_->committed = true;
}

}  // namespace lens::csv
