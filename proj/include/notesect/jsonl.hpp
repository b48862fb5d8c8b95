#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace notesect {

// Line iterator that skips blank and '#' comment lines and tracks the
// 1-based line number for error messages.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  // Next payload line, or nullopt at EOF.
  std::optional<std::string> next();
  std::size_t line_number() const { return line_number_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

// "# <tool> <version> <subcommand> key=value ..." provenance line.
std::string header_line(const std::string& subcommand,
                        const std::vector<std::pair<std::string, std::string>>& config);

std::string fixed6(double v);
std::string fixed4(double v);

// Minimal JSON string escaping (quote, backslash, control chars).
std::string json_escape(const std::string& s);
std::string json_string(const std::string& s);
std::string json_string_array(const std::vector<std::string>& items);

}  // namespace notesect
