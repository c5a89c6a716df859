/**
 * @file io.hpp
 * @brief Tables written as CSV or JSON with fixed 17-significant-digit numbers,
 * and a static SVG scatter/polyline emitter.
 */
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace penner::io {

/// Empty cells stand for values that were not computed (flagged rows).
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_field(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<std::string>(c)) {
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return "";
}

// Non-finite numbers have no JSON literal and are written as null.
inline std::string json_value(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    return std::isfinite(v) ? format_number(v) : "null";
  }
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<std::string>(c)) return nlohmann::json(std::get<std::string>(c)).dump();
  return "null";
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << detail::csv_field(row[i]);
    os << "\n";
  }
}

/// Array of records keyed by the CSV headers, in column order.
inline void write_json(std::ostream& os, const Table& t) {
  os << "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << (r ? ",\n " : "\n ") << "{";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const Cell& c = i < t.rows[r].size() ? t.rows[r][i] : Cell{};
      os << (i ? ", " : "") << nlohmann::json(t.columns[i]).dump() << ": " << detail::json_value(c);
    }
    os << "}";
  }
  os << (t.rows.empty() ? "]\n" : "\n]\n");
}

/// Static figure: polylines drawn first, then scatter points on top.
struct Figure {
  struct Polyline {
    std::vector<std::complex<double>> points;
    std::string color = "#1f77b4";
  };
  std::string title;
  std::vector<Polyline> lines;
  std::vector<std::complex<double>> scatter;
  std::string scatter_color = "#d62728";
};

inline void write_svg(std::ostream& os, const Figure& fig, int width = 640, int height = 640) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto grow = [&](std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  };
  for (const auto& l : fig.lines)
    for (auto z : l.points) grow(z);
  for (auto z : fig.scatter) grow(z);
  if (!(x1 >= x0)) x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  // equal aspect ratio with a 5% margin
  const double span = std::max({x1 - x0, y1 - y0, 1e-9}) * 1.1;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double scale = std::min(width, height) / span;
  auto pixel = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  auto px = [&](double x) { return pixel(0.5 * width + (x - cx) * scale); };
  auto py = [&](double y) { return pixel(0.5 * height - (y - cy) * scale); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
     << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!fig.title.empty()) {
    std::string esc;
    for (char ch : fig.title) esc += ch == '<' ? "&lt;" : ch == '>' ? "&gt;" : ch == '&' ? "&amp;" : std::string(1, ch);
    os << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << esc << "</text>\n";
  }
  // axes through the origin when it is in view
  os << "<g stroke=\"#bbbbbb\" stroke-width=\"0.5\">";
  os << "<line x1=\"0\" y1=\"" << py(0) << "\" x2=\"" << width << "\" y2=\"" << py(0) << "\"/>";
  os << "<line x1=\"" << px(0) << "\" y1=\"0\" x2=\"" << px(0) << "\" y2=\"" << height << "\"/></g>\n";
  for (const auto& l : fig.lines) {
    os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < l.points.size(); ++i)
      os << (i ? " " : "") << px(l.points[i].real()) << "," << py(l.points[i].imag());
    os << "\"/>\n";
  }
  for (auto z : fig.scatter)
    os << "<circle cx=\"" << px(z.real()) << "\" cy=\"" << py(z.imag()) << "\" r=\"2.5\" fill=\"" << fig.scatter_color
       << "\"/>\n";
  os << "</svg>\n";
}

}  // namespace penner::io
