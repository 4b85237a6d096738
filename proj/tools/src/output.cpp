#include "bubbly_cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bubbly::cli {

std::string format_number(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : file_(std::fopen(path.c_str(), "wb")), columns_(header.size()), path_(path) {
  if (!file_) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(file_, i ? ",%s" : "%s", header[i].c_str());
  std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) std::fputc(',', file_);
    std::fputs(format_number(values[i]).c_str(), file_);
  }
  std::fputc('\n', file_);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

nlohmann::json to_json(const Vec2& v) { return nlohmann::json::array({v.x(), v.y()}); }

}  // namespace bubbly::cli
