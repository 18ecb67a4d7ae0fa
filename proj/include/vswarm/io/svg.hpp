#ifndef VSWARM_IO_SVG_HPP
#define VSWARM_IO_SVG_HPP

#include <ostream>
#include <string>
#include <vector>

namespace vswarm::io {

struct Series
{
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart
{
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Polylines on a pair of labelled axes with a legend. Empty series are skipped.
void write_svg(std::ostream& os, const Chart& chart);

}  // namespace vswarm::io

#endif  // VSWARM_IO_SVG_HPP
