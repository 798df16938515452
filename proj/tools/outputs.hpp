#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gwpath/harness.hpp"

namespace gwpath::cli {

struct Polyline {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG with axes, tick labels and one polyline per series.
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Polyline>& lines);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string series_csv(const Series& series);

// report.json plus one CSV and one SVG per series; returns the files written.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir);

std::string summary_text(const Report& report);

}  // namespace gwpath::cli
