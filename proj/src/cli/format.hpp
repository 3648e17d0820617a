#pragma once

#include <string>
#include <vector>

namespace eitsim::cli {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Comma-separated numeric CSV with a header row and '\n' line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace eitsim::cli
