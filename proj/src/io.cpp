#include "branchfront/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace branchfront::io {

CsvWriter::CsvWriter(const std::string& path) {
    fp_ = std::fopen(path.c_str(), "wb");
    if (!fp_) throw std::runtime_error("cannot open " + path);
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
    if (fp_) {
        std::fclose((std::FILE*)fp_);
        fp_ = nullptr;
    }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    auto* fp = (std::FILE*)fp_;
    for (size_t k = 0; k < cells.size(); ++k) {
        const std::string& s = cells[k];
        const bool quote = s.find_first_of(",\"\r\n") != std::string::npos;
        if (quote) {
            std::fputc('"', fp);
            for (char c : s) {
                if (c == '"') std::fputc('"', fp);
                std::fputc(c, fp);
            }
            std::fputc('"', fp);
        } else {
            std::fwrite(s.data(), 1, s.size(), fp);
        }
        if (k + 1 < cells.size()) std::fputc(',', fp);
    }
    std::fputs("\r\n", fp);
}

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_num(v));
    row(s);
}

uint64_t fnv1a_file(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    uint64_t h = 1469598103934665603ull;
    unsigned char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, fp)) > 0)
        for (size_t k = 0; k < n; ++k) {
            h ^= buf[k];
            h *= 1099511628211ull;
        }
    std::fclose(fp);
    return h;
}

namespace {
struct Box {
    double xmin, xmax, ymin, ymax;
    double px(double x) const { return 60 + 560 * (x - xmin) / (xmax - xmin); }
    double py(double y) const { return 380 - 330 * (y - ymin) / (ymax - ymin); }
};

Box fit_box(const std::vector<double>& x, const std::vector<double>& y) {
    Box b{1e300, -1e300, 1e300, -1e300};
    for (double v : x) { b.xmin = std::min(b.xmin, v); b.xmax = std::max(b.xmax, v); }
    for (double v : y) { b.ymin = std::min(b.ymin, v); b.ymax = std::max(b.ymax, v); }
    if (b.xmax <= b.xmin) b.xmax = b.xmin + 1;
    if (b.ymax <= b.ymin) b.ymax = b.ymin + 1;
    return b;
}

void svg_header(std::FILE* fp, const std::string& title, const Box& b) {
    std::fprintf(fp, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"660\" height=\"430\">\n");
    std::fprintf(fp, "<rect width=\"660\" height=\"430\" fill=\"white\"/>\n");
    std::fprintf(fp, "<text x=\"330\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n",
                 title.c_str());
    std::fprintf(fp, "<line x1=\"60\" y1=\"380\" x2=\"620\" y2=\"380\" stroke=\"black\"/>\n");
    std::fprintf(fp, "<line x1=\"60\" y1=\"50\" x2=\"60\" y2=\"380\" stroke=\"black\"/>\n");
    std::fprintf(fp, "<text x=\"58\" y=\"395\" text-anchor=\"end\" font-size=\"11\">%.4g</text>\n", b.xmin);
    std::fprintf(fp, "<text x=\"620\" y=\"395\" text-anchor=\"end\" font-size=\"11\">%.4g</text>\n", b.xmax);
    std::fprintf(fp, "<text x=\"55\" y=\"383\" text-anchor=\"end\" font-size=\"11\">%.4g</text>\n", b.ymin);
    std::fprintf(fp, "<text x=\"55\" y=\"55\" text-anchor=\"end\" font-size=\"11\">%.4g</text>\n", b.ymax);
}
}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& x,
                    const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& labels) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    std::vector<double> ally;
    for (auto& s : series) ally.insert(ally.end(), s.begin(), s.end());
    const Box b = fit_box(x, ally);
    svg_header(fp, title, b);
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (size_t s = 0; s < series.size(); ++s) {
        std::fprintf(fp, "<polyline fill=\"none\" stroke=\"%s\" points=\"", colors[s % 5]);
        for (size_t k = 0; k < x.size() && k < series[s].size(); ++k)
            std::fprintf(fp, "%.1f,%.1f ", b.px(x[k]), b.py(series[s][k]));
        std::fprintf(fp, "\"/>\n");
        if (s < labels.size())
            std::fprintf(fp, "<text x=\"70\" y=\"%zu\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                         60 + 16 * s, colors[s % 5], labels[s].c_str());
    }
    std::fprintf(fp, "</svg>\n");
    std::fclose(fp);
}

void write_svg_scatter(const std::string& path, const std::string& title,
                       const std::vector<double>& x, const std::vector<double>& y,
                       double slope, double intercept) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    const Box b = fit_box(x, y);
    svg_header(fp, title, b);
    for (size_t k = 0; k < x.size() && k < y.size(); ++k)
        std::fprintf(fp, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.5\" fill=\"#1f77b4\"/>\n",
                     b.px(x[k]), b.py(y[k]));
    std::fprintf(fp, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#d62728\"/>\n",
                 b.px(b.xmin), b.py(slope * b.xmin + intercept), b.px(b.xmax),
                 b.py(slope * b.xmax + intercept));
    std::fprintf(fp, "</svg>\n");
    std::fclose(fp);
}

void ensure_dir(const std::string& path) {
    std::filesystem::create_directories(path);
}

}  // namespace branchfront::io
