#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace branchfront::io {

/** RFC 4180 CSV writer: CRLF line endings, quoting only when needed. */
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& cells);
    void close();

  private:
    void* fp_ = nullptr;
};

std::string format_num(double v);

uint64_t fnv1a_file(const std::string& path);

// simple line plot: one polyline per series over shared x
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& x,
                    const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& labels);

// scatter with a fitted line y = slope*x + intercept
void write_svg_scatter(const std::string& path, const std::string& title,
                       const std::vector<double>& x, const std::vector<double>& y,
                       double slope, double intercept);

void ensure_dir(const std::string& path);

}  // namespace branchfront::io
