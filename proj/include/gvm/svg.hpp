#pragma once

#include <string>
#include <vector>

namespace gvm {

// Minimal static line-chart writer used by the command line front end. One
// chart holds any number of named series drawn over shared axes with ticks,
// labels, and a legend. Output is a self-contained SVG document.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  // Series must be non-empty and x/y equally sized; points are connected in
  // the order given.
  void add_series(std::string name, std::vector<double> x, std::vector<double> y);

  std::string render(int width = 800, int height = 480) const;
  void save(const std::string& path, int width = 800, int height = 480) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

}  // namespace gvm
