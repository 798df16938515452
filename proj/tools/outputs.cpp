#include "outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gwpath/errors.hpp"

namespace gwpath::cli {

namespace {

constexpr double kWidth = 640.0, kHeight = 400.0, kMargin = 56.0;
constexpr const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Polyline>& lines) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& l : lines) {
    for (double v : l.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : l.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x0 < x1)) x0 -= 0.5, x1 += 0.5;
  if (!(y0 < y1)) y0 -= 0.5, y1 += 0.5;
  const double w = kWidth - 2 * kMargin, h = kHeight - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - x0) / (x1 - x0) * w; };
  auto py = [&](double v) { return kHeight - kMargin - (v - y0) / (y1 - y0) * h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << escape(title)
     << "</text>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
     << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
     << "</text>\n";
  os << "<text x=\"14\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kHeight / 2
     << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const char* colour = kColours[i % std::size(kColours)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < std::min(l.x.size(), l.y.size()); ++k) {
      os << num(px(l.x[k])) << ',' << num(py(l.y[k])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin + 14 * i << "\" text-anchor=\"end\" fill=\"" << colour
       << "\">" << escape(l.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
}

std::string series_csv(const Series& series) {
  std::ostringstream os;
  os << series.x_label << ',' << series.y_label << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < std::min(series.x.size(), series.y.size()); ++i) {
    os << series.x[i] << ',' << series.y[i] << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  files.push_back(dir / "report.json");
  write_text(files.back(), report_to_json(report));
  for (const auto& s : report.series) {
    const std::string stem = safe_name(s.name);
    files.push_back(dir / (stem + ".csv"));
    write_text(files.back(), series_csv(s));
    files.push_back(dir / (stem + ".svg"));
    write_text(files.back(), render_svg(s.name, s.x_label, s.y_label, {{s.name, s.x, s.y}}));
  }
  return files;
}

std::string summary_text(const Report& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    os << (c.pass ? "PASS " : (c.gating ? "FAIL " : "INFO ")) << c.name;
    for (const auto& m : c.metrics) os << ' ' << m.key << '=' << num(m.value);
    if (!c.note.empty()) os << " (" << c.note << ')';
    os << '\n';
  }
  os << report.experiment << ": " << (report.pass() ? "all gating checks passed" : "gating checks failed") << '\n';
  return os.str();
}

}  // namespace gwpath::cli
