#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace rmt {

// 17 significant digits: round-trip exact for doubles.
std::string fmt17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

// Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rmt
