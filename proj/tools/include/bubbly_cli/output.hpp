#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bubbly/types.hpp"

namespace bubbly::cli {

/// Formats a value as %.12e; non-finite values print as nan.
std::string format_number(double x);

/// Header row plus numeric rows, comma separated, newline terminated.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);

 private:
  std::FILE* file_;
  std::size_t columns_;
  std::filesystem::path path_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json to_json(cplx z);
nlohmann::json to_json(const Vec2& v);

}  // namespace bubbly::cli
