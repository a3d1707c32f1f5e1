// Copyright 2026 The adgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adgb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace adgb {

namespace {
constexpr double kMarginLeft = 58, kMarginRight = 16, kMarginTop = 34, kMarginBottom = 44;

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

SvgPlot::SvgPlot(int width, int height, std::string title)
    : width_(width), height_(height), title_(std::move(title)) {}

void SvgPlot::set_axes(double xmin, double xmax, double ymin, double ymax, std::string xlabel,
                       std::string ylabel) {
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  xmin_ = xmin;
  xmax_ = xmax;
  ymin_ = ymin;
  ymax_ = ymax;
  xlabel_ = std::move(xlabel);
  ylabel_ = std::move(ylabel);
}

double SvgPlot::px(double x) const {
  return kMarginLeft + (x - xmin_) / (xmax_ - xmin_) * (width_ - kMarginLeft - kMarginRight);
}

double SvgPlot::py(double y) const {
  return height_ - kMarginBottom -
         (y - ymin_) / (ymax_ - ymin_) * (height_ - kMarginTop - kMarginBottom);
}

void SvgPlot::polyline(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, double stroke, const std::string& dash) {
  if (x.size() != y.size() || x.empty()) return;
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\"";
  if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
  os << " points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) os << num(px(x[i])) << "," << num(py(y[i])) << " ";
  os << "\"/>";
  body_.push_back(os.str());
}

void SvgPlot::band(const std::vector<double>& x, const std::vector<double>& ylo,
                   const std::vector<double>& yhi, const std::string& color, double opacity) {
  if (x.size() != ylo.size() || x.size() != yhi.size() || x.empty()) return;
  std::ostringstream os;
  os << "<polygon fill=\"" << color << "\" fill-opacity=\"" << opacity << "\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) os << num(px(x[i])) << "," << num(py(yhi[i])) << " ";
  for (std::size_t i = x.size(); i-- > 0;) os << num(px(x[i])) << "," << num(py(ylo[i])) << " ";
  os << "\"/>";
  body_.push_back(os.str());
}

void SvgPlot::scatter(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& color, double radius) {
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    std::ostringstream os;
    os << "<circle cx=\"" << num(px(x[i])) << "\" cy=\"" << num(py(y[i])) << "\" r=\"" << radius
       << "\" fill=\"" << color << "\"/>";
    body_.push_back(os.str());
  }
}

void SvgPlot::marker(double x, double y, const std::string& color, double radius) {
  std::ostringstream os;
  os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << radius
     << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2.5\"/>";
  body_.push_back(os.str());
}

void SvgPlot::heatmap(const Matrix& values, double xmin, double xmax, double ymin, double ymax) {
  if (values.size() == 0) return;
  double lo = values.minCoeff(), hi = values.maxCoeff();
  if (!(hi > lo)) hi = lo + 1;
  const int rows = static_cast<int>(values.rows()), cols = static_cast<int>(values.cols());
  double cw = (xmax - xmin) / cols, ch = (ymax - ymin) / rows;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double t = (values(r, c) - lo) / (hi - lo);
      int red = static_cast<int>(255 * t);
      int blue = static_cast<int>(255 * (1 - t));
      double x0 = xmin + c * cw, y0 = ymin + r * ch;
      std::ostringstream os;
      os << "<rect x=\"" << num(px(x0)) << "\" y=\"" << num(py(y0 + ch)) << "\" width=\""
         << num(px(x0 + cw) - px(x0)) << "\" height=\"" << num(py(y0) - py(y0 + ch))
         << "\" fill=\"rgb(" << red << ",60," << blue << ")\"/>";
      body_.push_back(os.str());
    }
}

void SvgPlot::hline(double y, const std::string& color, const std::string& dash) {
  std::ostringstream os;
  os << "<line x1=\"" << num(px(xmin_)) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(px(xmax_))
     << "\" y2=\"" << num(py(y)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"" << dash
     << "\"/>";
  body_.push_back(os.str());
}

void SvgPlot::legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  double x = kMarginLeft + 10, y = kMarginTop + 6;
  for (const auto& [label, color] : entries) {
    std::ostringstream os;
    os << "<rect x=\"" << x << "\" y=\"" << y - 8 << "\" width=\"14\" height=\"4\" fill=\"" << color
       << "\"/><text x=\"" << x + 20 << "\" y=\"" << y - 2
       << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape_xml(label) << "</text>";
    body_.push_back(os.str());
    y += 16;
  }
}

std::string SvgPlot::render() const {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
     << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
        "font-family=\"sans-serif\">"
     << escape_xml(title_) << "</text>\n";
  // frame
  os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
     << width_ - kMarginLeft - kMarginRight << "\" height=\"" << height_ - kMarginTop - kMarginBottom
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  // ticks
  for (int i = 0; i <= 4; ++i) {
    double xv = xmin_ + (xmax_ - xmin_) * i / 4;
    double yv = ymin_ + (ymax_ - ymin_) * i / 4;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << height_ - kMarginBottom + 16
       << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << num(xv)
       << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(py(yv) + 3)
       << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 10
     << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
     << escape_xml(xlabel_) << "</text>\n";
  os << "<text x=\"14\" y=\"" << height_ / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" transform=\"rotate(-90 "
        "14 "
     << height_ / 2 << ")\">" << escape_xml(ylabel_) << "</text>\n";
  for (const std::string& b : body_) os << b << '\n';
  os << "</svg>\n";
  return os.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("SvgPlot: cannot open " + path);
  out << render();
  if (!out) throw IoError("SvgPlot: write failed for " + path);
}

}  // namespace adgb
