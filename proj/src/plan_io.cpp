#include "vswarm/planner/plan_io.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace vswarm::planner {

using nlohmann::json;

std::string plan_to_json(const OccupancyPlan& plan, int indent)
{
  json j;
  j["n_steps"] = plan.n_steps;
  j["objective"] = plan.objective_value;
  json cavs = json::array();
  for (int i = 1; i <= plan.n_cav(); ++i) {
    json cells = json::array();
    for (int k = 1; k <= plan.n_steps; ++k) {
      const auto c = plan.at(i, k);
      cells.push_back({{"k", k}, {"row", c.row}, {"col", c.col}});
    }
    cavs.push_back({{"id", i}, {"cells", std::move(cells)}});
  }
  j["cavs"] = std::move(cavs);
  return j.dump(indent) + "\n";
}

OccupancyPlan plan_from_json(const std::string& text)
{
  const json j = json::parse(text);
  OccupancyPlan plan;
  plan.n_steps = j.at("n_steps").get<int>();
  plan.objective_value = j.value("objective", 0.0);
  for (const auto& cav : j.at("cavs")) {
    std::vector<CellIndex> cells(static_cast<std::size_t>(plan.n_steps));
    for (const auto& c : cav.at("cells")) {
      const int k = c.at("k").get<int>();
      if (k < 1 || k > plan.n_steps) throw std::invalid_argument("plan json: step out of range");
      cells[static_cast<std::size_t>(k - 1)] = {c.at("row").get<int>(), c.at("col").get<int>()};
    }
    plan.cells.push_back(std::move(cells));
  }
  return plan;
}

void print_plan_table(std::ostream& os, const OccupancyPlan& plan)
{
  os << std::setw(4) << "k";
  for (int i = 1; i <= plan.n_cav(); ++i) os << std::setw(9) << ("cav" + std::to_string(i));
  os << '\n';
  for (int k = 1; k <= plan.n_steps; ++k) {
    os << std::setw(4) << k;
    for (int i = 1; i <= plan.n_cav(); ++i) {
      const auto c = plan.at(i, k);
      os << std::setw(9) << ("(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")");
    }
    os << '\n';
  }
}

}  // namespace vswarm::planner
