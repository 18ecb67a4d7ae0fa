#ifndef VSWARM_PLANNER_SOLVER_HPP
#define VSWARM_PLANNER_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "vswarm/planner/program.hpp"

namespace vswarm::planner {

struct SolveLimits
{
  std::int64_t max_nodes = 50'000'000;
  double max_seconds = 300.0;
};

struct SolveStats
{
  std::int64_t nodes = 0;
  std::int64_t memo_prunes = 0;
  double seconds = 0.0;
  double root_bound = 0.0;
};

class InfeasibleError : public std::runtime_error
{
public:
  InfeasibleError(Family family, const std::string& what) : std::runtime_error(what), family_(family) {}
  Family family() const { return family_; }

private:
  Family family_;
};

class BudgetExhaustedError : public std::runtime_error
{
public:
  BudgetExhaustedError(const std::string& what, std::optional<double> incumbent)
      : std::runtime_error(what), incumbent_(incumbent)
  {
  }
  /// Best objective found before the budget ran out, if any. The
  /// corresponding plan is deliberately not returned.
  std::optional<double> incumbent() const { return incumbent_; }

private:
  std::optional<double> incumbent_;
};

/// Exact branch-and-bound over the occupancy program.
///
/// Branching assigns each (CAV, step) one-hot block in (step, CAV) order,
/// which fixes the row and column indicators together. Single-CAV rows are
/// compiled into per-CAV transition tables and propagated forward by a
/// single-CAV dynamic program; the same program gives an admissible
/// cost-to-go (the relaxation without inter-CAV rows). Inter-CAV rows are
/// checked as soon as their last block is assigned. Nodes are expanded in
/// bound order with ties broken by cell index, and only strictly better
/// incumbents replace the current one, so the result is deterministic.
///
/// Throws InfeasibleError when no assignment satisfies the rows and
/// BudgetExhaustedError when the limits stop the search before optimality
/// is proven.
OccupancyPlan solve(const BinaryProgram& program, const SolveLimits& limits = {}, SolveStats* stats = nullptr);

}  // namespace vswarm::planner

#endif  // VSWARM_PLANNER_SOLVER_HPP
