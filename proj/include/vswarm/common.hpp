#ifndef VSWARM_COMMON_HPP
#define VSWARM_COMMON_HPP

#include <compare>
#include <stdexcept>
#include <string>

namespace vswarm {

/// 1-based cell coordinates in a moving grid. Rows count rearward to forward,
/// columns count right to left (column 1 is the rightmost lane).
struct CellIndex
{
  int row = 1;
  int col = 1;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// A position fell outside the footprint of a moving grid.
class OutOfGridError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A closed-loop run hit an unrecoverable condition (infeasible plan, collision).
class SimulationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace vswarm

#endif  // VSWARM_COMMON_HPP
