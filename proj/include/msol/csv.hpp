#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace msol {

/// 17 significant digits, '.' decimal separator (C locale formatting).
inline std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// RFC 4180 writer: CRLF records, fields quoted when they hold a comma,
/// quote, CR or LF.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ += ',';
      out_ += quote(fields[i]);
    }
    out_ += "\r\n";
  }

  const std::string& str() const noexcept { return out_; }

  static std::string quote(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

 private:
  std::string out_;
};

}  // namespace msol
