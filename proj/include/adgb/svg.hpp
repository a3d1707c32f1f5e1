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

#pragma once

#include <string>
#include <vector>

#include "adgb/types.hpp"

namespace adgb {

// Minimal static-SVG line/scatter/heatmap plotter; output is valid XML.
class SvgPlot {
 public:
  SvgPlot(int width, int height, std::string title);

  void set_axes(double xmin, double xmax, double ymin, double ymax, std::string xlabel,
                std::string ylabel);
  void polyline(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, double stroke = 1.5, const std::string& dash = "");
  void band(const std::vector<double>& x, const std::vector<double>& ylo,
            const std::vector<double>& yhi, const std::string& color, double opacity = 0.25);
  void scatter(const std::vector<double>& x, const std::vector<double>& y,
               const std::string& color, double radius = 3.0);
  void marker(double x, double y, const std::string& color, double radius = 5.0);
  // Uniform cells covering [xmin,xmax] x [ymin,ymax]; values row-major over
  // (rows = y bins bottom-up).
  void heatmap(const Matrix& values, double xmin, double xmax, double ymin, double ymax);
  void hline(double y, const std::string& color, const std::string& dash = "4,3");
  void legend(const std::vector<std::pair<std::string, std::string>>& entries);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  double px(double x) const;
  double py(double y) const;

  int width_, height_;
  std::string title_;
  double xmin_ = 0, xmax_ = 1, ymin_ = 0, ymax_ = 1;
  std::string xlabel_, ylabel_;
  std::vector<std::string> body_;
};

}  // namespace adgb
