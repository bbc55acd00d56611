#pragma once

#include <string>
#include <vector>

namespace ifnet {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Full-precision decimal form (17 significant digits, '.' separator);
// round-trips every finite double.
std::string format_full(double x);

// CSV writer with fixed column order, '\n' line endings and a leading
// version comment. Cells are written with format_full.
class CsvWriter {
  public:
    CsvWriter(std::string schema_name, std::vector<std::string> columns);

    void add_row(const std::vector<double>& row);
    void add_row_raw(const std::vector<std::string>& cells);
    std::string str() const;
    void write_file(const std::string& path) const;

  private:
    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

}  // namespace ifnet
