#include "notesect/jsonl.hpp"

#include <cstdio>
#include <stdexcept>

#include "notesect/version.hpp"

namespace notesect {

LineReader::LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw std::runtime_error("cannot open " + path.string());
}

std::optional<std::string> LineReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    return line;
  }
  return std::nullopt;
}

std::string header_line(const std::string& subcommand,
                        const std::vector<std::pair<std::string, std::string>>& config) {
  std::string out = "# notesect " NOTESECT_VERSION " ";
  out += subcommand;
  for (const auto& [k, v] : config) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

static std::string fixed(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string fixed6(double v) { return fixed(v, "%.6f"); }
std::string fixed4(double v) { return fixed(v, "%.4f"); }

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += char(c);
        }
    }
  }
  return out;
}

std::string json_string(const std::string& s) { return '"' + json_escape(s) + '"'; }

std::string json_string_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += json_string(items[i]);
  }
  out += ']';
  return out;
}

}  // namespace notesect
