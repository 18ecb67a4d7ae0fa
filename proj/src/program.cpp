#include "vswarm/planner/program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

namespace vswarm::planner {

std::string_view to_string(Family f)
{
  switch (f) {
    case Family::Occupancy: return "occupancy";
    case Family::RowTransition: return "row-transition";
    case Family::ColTransition: return "column-transition";
    case Family::Cornerwise: return "cornerwise";
    case Family::CavCollision: return "cav-collision";
    case Family::HvExclusion: return "hv-exclusion";
    case Family::SpaceMakingLane: return "space-making-lane";
    case Family::SpaceMakingBand: return "space-making-band";
    case Family::InitialCondition: return "initial-condition";
    case Family::SwapBan: return "swap-ban";
    case Family::VacatedCellBan: return "vacated-cell-ban";
    case Family::AuxLink: return "aux-link";
  }
  return "unknown";
}

int BinaryProgram::row_var(int cav, int k, int p) const
{
  return ((cav - 1) * n_steps + (k - 1)) * (n_rows + n_cols) + (p - 1);
}

int BinaryProgram::col_var(int cav, int k, int q) const
{
  return ((cav - 1) * n_steps + (k - 1)) * (n_rows + n_cols) + n_rows + (q - 1);
}

int PlanningScene::front_row(int k) const
{
  if (!forecast.front_hv) return 0;
  const auto c = forecast.cell(*forecast.front_hv, k);
  return c ? c->row : 0;
}

int compute_delta(const std::vector<CellIndex>& init_cells, const HvForecast& forecast,
                  const MovingGrid& grid, int l_index)
{
  if (l_index < 1 || l_index > grid.n_cols) throw std::invalid_argument("compute_delta: l_index out of range");
  if (!forecast.front_hv || forecast.n_steps < 1) throw std::invalid_argument("compute_delta: forecast has no front HV");
  const auto front = forecast.cell(*forecast.front_hv, 1);
  if (!front) throw std::invalid_argument("compute_delta: front HV is outside the grid");
  for (const auto& c : init_cells)
    if (c.col == front->col && c.row <= front->row) return 1;
  return 0;
}

EpsilonResult compute_epsilon(const HvForecast& forecast, int k, const std::vector<CellIndex>& init_cells)
{
  if (k < 1 || k > forecast.n_steps) throw std::out_of_range("compute_epsilon: step outside the horizon");
  std::vector<LaneEvent> events;
  for (const auto& e : forecast.detected_lane_events)
    if (e.k == k) events.push_back(e);
  EpsilonResult out;
  if (events.empty()) return out;
  if (events.size() > init_cells.size())
    throw std::invalid_argument("compute_epsilon: more detected HVs than CAVs available to block them");

  std::stable_sort(events.begin(), events.end(), [](const LaneEvent& a, const LaneEvent& b) {
    if (a.cell.row != b.cell.row) return a.cell.row > b.cell.row;
    return a.cell.col > b.cell.col;
  });
  std::vector<int> order(init_cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return init_cells[static_cast<std::size_t>(a)].row > init_cells[static_cast<std::size_t>(b)].row;
  });

  out.epsilon = 1;
  for (std::size_t n = 0; n < events.size(); ++n) {
    const int cav = order[n];
    const auto& e = events[n];
    out.assignments.push_back(
        {k, cav + 1, e.hv, e.cell.col, e.cell.row, init_cells[static_cast<std::size_t>(cav)].row});
  }
  return out;
}

PlanningScene make_scene(const MovingGrid& grid, const std::vector<CellIndex>& init_cells,
                         const HvForecast& forecast, const PlannerWeights& weights, int n_steps)
{
  if (n_steps < 1) throw std::invalid_argument("planner: horizon must be at least one step");
  if (init_cells.empty()) throw std::invalid_argument("planner: no CAVs");
  if (forecast.n_steps < n_steps) throw std::invalid_argument("planner: forecast shorter than the horizon");
  for (const auto& h : forecast.hvs)
    if (static_cast<int>(h.cells.size()) < n_steps)
      throw std::invalid_argument("planner: HV track shorter than the horizon");
  if (weights.l_index < 1 || weights.l_index > grid.n_cols)
    throw std::invalid_argument("planner: l_index out of range");
  if (weights.w_tar < 0 || weights.w_lon < 0 || weights.w_lat < 0)
    throw std::invalid_argument("planner: weights must be non-negative");
  if (weights.delta != 0 && weights.delta != 1) throw std::invalid_argument("planner: delta must be 0 or 1");

  std::set<CellIndex> seen;
  for (const auto& c : init_cells) {
    if (!grid.in_bounds(c)) throw std::invalid_argument("planner: initial cell outside the grid");
    if (!seen.insert(c).second) throw std::invalid_argument("planner: two CAVs share an initial cell");
  }

  PlanningScene scene;
  scene.n_rows = grid.n_rows;
  scene.n_cols = grid.n_cols;
  scene.n_steps = n_steps;
  scene.init_cells = init_cells;
  scene.forecast = forecast;
  scene.weights = weights;
  for (int k = 1; k < n_steps; ++k) {
    auto eps = compute_epsilon(forecast, k, init_cells);
    for (auto& a : eps.assignments) scene.blocking.push_back(a);
  }
  return scene;
}

namespace {

class ProgramBuilder
{
public:
  explicit ProgramBuilder(const PlanningScene& scene) : scene_(scene)
  {
    p_.n_cav = scene.n_cav();
    p_.n_steps = scene.n_steps;
    p_.n_rows = scene.n_rows;
    p_.n_cols = scene.n_cols;
    const int n_occ = p_.occupancy_var_count();
    p_.vars.resize(static_cast<std::size_t>(n_occ));
    p_.objective.assign(static_cast<std::size_t>(n_occ), 0.0);
    for (int i = 1; i <= p_.n_cav; ++i)
      for (int k = 1; k <= p_.n_steps; ++k) {
        for (int p = 1; p <= p_.n_rows; ++p) meta(p_.row_var(i, k, p)) = {VarRole::Row, i, k, p};
        for (int q = 1; q <= p_.n_cols; ++q) meta(p_.col_var(i, k, q)) = {VarRole::Col, i, k, q};
      }
  }

  BinaryProgram build()
  {
    objective();
    occupancy();
    transitions();
    cornerwise();
    collisions();
    hv_exclusion();
    space_making();
    initial_condition();
    swap_and_vacated();
    return std::move(p_);
  }

private:
  VarMeta& meta(int v) { return p_.vars[static_cast<std::size_t>(v)]; }
  int r(int i, int k, int p) const { return p_.row_var(i, k, p); }
  int c(int i, int k, int q) const { return p_.col_var(i, k, q); }

  int add_aux(VarMeta m, double weight)
  {
    p_.vars.push_back(m);
    p_.objective.push_back(weight);
    return static_cast<int>(p_.vars.size()) - 1;
  }

  void add_row(std::vector<Term> terms, Sense sense, double rhs, Family family)
  {
    p_.rows.push_back({std::move(terms), sense, rhs, family});
  }

  // |a - b| for binaries, exact at the optimum because the weight is non-negative.
  void abs_diff(int a, int b, VarMeta m, double weight)
  {
    const int d = add_aux(m, weight);
    add_row({{a, 1.0}, {b, -1.0}, {d, -1.0}}, Sense::LessEqual, 0.0, Family::AuxLink);
    add_row({{b, 1.0}, {a, -1.0}, {d, -1.0}}, Sense::LessEqual, 0.0, Family::AuxLink);
  }

  void objective()
  {
    const auto& w = scene_.weights;
    const int n = p_.n_cav;
    const int N = p_.n_steps;
    const int target_rows = p_.n_rows - n;
    for (int i = 1; i <= n; ++i)
      for (int k = 1; k <= N; ++k)
        for (int p = 1; p <= target_rows; ++p) p_.objective[static_cast<std::size_t>(r(i, k, p))] += w.w_tar;

    for (int i = 1; i <= n; ++i)
      for (int k = 1; k < N; ++k) {
        for (int p = 1; p <= p_.n_rows; ++p)
          abs_diff(r(i, k + 1, p), r(i, k, p), {VarRole::RowMove, i, k, p}, w.w_lon);
        for (int q = 1; q <= p_.n_cols; ++q)
          abs_diff(c(i, k + 1, q), c(i, k, q), {VarRole::ColMove, i, k, q}, w.delta * w.w_lat);
      }

    // Regrouping pull towards l_index, (l_index - q)^2 per step spent in column q,
    // terminal step included so the last cell is not free.
    // While the swarm is impeded it only applies once a CAV has passed the front HV.
    for (int i = 1; i <= n; ++i)
      for (int k = 1; k <= N; ++k) {
        const int front = scene_.front_row(k);
        for (int q = 1; q <= p_.n_cols; ++q) {
          const double weight = w.w_lat * (w.l_index - q) * (w.l_index - q);
          if (weight == 0.0) continue;
          if (w.delta == 0 || front == 0) {
            p_.objective[static_cast<std::size_t>(c(i, k, q))] += weight;
            continue;
          }
          if (front >= p_.n_rows) continue;
          const int g = add_aux({VarRole::Regroup, i, k, q}, weight);
          std::vector<Term> terms{{c(i, k, q), 1.0}};
          for (int p = front + 1; p <= p_.n_rows; ++p) terms.push_back({r(i, k, p), 1.0});
          terms.push_back({g, -1.0});
          add_row(std::move(terms), Sense::LessEqual, 1.0, Family::AuxLink);
        }
      }
  }

  void occupancy()
  {
    for (int i = 1; i <= p_.n_cav; ++i)
      for (int k = 1; k <= p_.n_steps; ++k) {
        std::vector<Term> rows_sum, cols_sum;
        for (int p = 1; p <= p_.n_rows; ++p) rows_sum.push_back({r(i, k, p), 1.0});
        for (int q = 1; q <= p_.n_cols; ++q) cols_sum.push_back({c(i, k, q), 1.0});
        add_row(std::move(rows_sum), Sense::Equal, 1.0, Family::Occupancy);
        add_row(std::move(cols_sum), Sense::Equal, 1.0, Family::Occupancy);
      }
  }

  void transitions()
  {
    for (int i = 1; i <= p_.n_cav; ++i)
      for (int k = 1; k < p_.n_steps; ++k) {
        for (int p1 = 1; p1 <= p_.n_rows; ++p1)
          for (int p2 = 1; p2 <= p_.n_rows; ++p2)
            if (std::abs(p1 - p2) >= 2)
              add_row({{r(i, k, p1), 1.0}, {r(i, k + 1, p2), 1.0}}, Sense::LessEqual, 1.0, Family::RowTransition);
        for (int q1 = 1; q1 <= p_.n_cols; ++q1)
          for (int q2 = 1; q2 <= p_.n_cols; ++q2)
            if (std::abs(q1 - q2) >= 2)
              add_row({{c(i, k, q1), 1.0}, {c(i, k + 1, q2), 1.0}}, Sense::LessEqual, 1.0, Family::ColTransition);
      }
  }

  void cornerwise()
  {
    for (int i = 1; i <= p_.n_cav; ++i)
      for (int k = 1; k < p_.n_steps; ++k)
        for (int p = 1; p < p_.n_rows; ++p)
          for (int q = 1; q < p_.n_cols; ++q) {
            auto four = [&](int pa, int pb, int qa, int qb) {
              add_row({{r(i, k, pa), 1.0}, {r(i, k + 1, pb), 1.0}, {c(i, k, qa), 1.0}, {c(i, k + 1, qb), 1.0}},
                      Sense::LessEqual, 3.0, Family::Cornerwise);
            };
            four(p, p + 1, q, q + 1);
            four(p + 1, p, q + 1, q);
            four(p + 1, p, q, q + 1);
            four(p, p + 1, q + 1, q);
          }
  }

  void collisions()
  {
    for (int k = 2; k <= p_.n_steps; ++k)
      for (int i1 = 1; i1 <= p_.n_cav; ++i1)
        for (int i2 = i1 + 1; i2 <= p_.n_cav; ++i2)
          for (int p = 1; p <= p_.n_rows; ++p)
            for (int q = 1; q <= p_.n_cols; ++q)
              add_row({{r(i1, k, p), 1.0}, {r(i2, k, p), 1.0}, {c(i1, k, q), 1.0}, {c(i2, k, q), 1.0}},
                      Sense::LessEqual, 3.0, Family::CavCollision);
  }

  void hv_exclusion()
  {
    const auto& f = scene_.forecast;
    for (int k = 2; k <= p_.n_steps; ++k)
      for (int j = 0; j < static_cast<int>(f.hvs.size()); ++j) {
        const auto cell = f.cell(j, k);
        if (!cell) continue;
        for (int i = 1; i <= p_.n_cav; ++i)
          add_row({{r(i, k, cell->row), 1.0}, {c(i, k, cell->col), 1.0}}, Sense::LessEqual, 1.0, Family::HvExclusion);
      }
  }

  void space_making()
  {
    for (const auto& a : scene_.blocking) {
      const int k = a.k;
      if (k + 1 > p_.n_steps) continue;
      const int i = a.cav;
      add_row({{c(i, k + 1, a.target_col), -1.0}}, Sense::LessEqual, -1.0, Family::SpaceMakingLane);
      if (k == 1) {
        std::vector<Term> band;
        for (int p = std::max(1, a.row_lo); p <= std::min(p_.n_rows, a.row_hi); ++p) band.push_back({r(i, 2, p), 1.0});
        add_row(std::move(band), Sense::Equal, 1.0, Family::SpaceMakingBand);
      } else {
        // The CAV's own row at step k is a decision variable here, so the band
        // [row_lo, row(k)] is written with row indices as coefficients.
        std::vector<Term> upper, lower;
        for (int p = 1; p <= p_.n_rows; ++p) {
          upper.push_back({r(i, k + 1, p), static_cast<double>(p)});
          upper.push_back({r(i, k, p), -static_cast<double>(p)});
          lower.push_back({r(i, k + 1, p), -static_cast<double>(p)});
        }
        add_row(std::move(upper), Sense::LessEqual, 0.0, Family::SpaceMakingBand);
        add_row(std::move(lower), Sense::LessEqual, -static_cast<double>(a.row_lo), Family::SpaceMakingBand);
      }
    }
  }

  void initial_condition()
  {
    for (int i = 1; i <= p_.n_cav; ++i) {
      const auto cell = scene_.init_cells[static_cast<std::size_t>(i - 1)];
      for (int p = 1; p <= p_.n_rows; ++p)
        add_row({{r(i, 1, p), 1.0}}, Sense::Equal, p == cell.row ? 1.0 : 0.0, Family::InitialCondition);
      for (int q = 1; q <= p_.n_cols; ++q)
        add_row({{c(i, 1, q), 1.0}}, Sense::Equal, q == cell.col ? 1.0 : 0.0, Family::InitialCondition);
    }
  }

  void swap_and_vacated()
  {
    const int n = p_.n_cav;
    for (int k = 1; k < p_.n_steps; ++k)
      for (int i1 = 1; i1 <= n; ++i1)
        for (int i2 = 1; i2 <= n; ++i2) {
          if (i1 == i2) continue;
          for (int p = 1; p <= p_.n_rows; ++p)
            for (int q = 1; q <= p_.n_cols; ++q) {
              // i2 takes over the cell i1 held at step k; only allowed as a
              // straight follow-on within the same column.
              std::vector<Term> base{{r(i1, k, p), 1.0}, {c(i1, k, q), 1.0}, {r(i2, k + 1, p), 1.0},
                                     {c(i2, k + 1, q), 1.0}};
              auto leave = base;
              leave.push_back({c(i1, k + 1, q), -1.0});
              add_row(std::move(leave), Sense::LessEqual, 3.0, Family::VacatedCellBan);
              auto enter = std::move(base);
              enter.push_back({c(i2, k, q), -1.0});
              add_row(std::move(enter), Sense::LessEqual, 3.0, Family::VacatedCellBan);
              if (p < p_.n_rows)
                add_row({{r(i1, k, p), 1.0}, {r(i1, k + 1, p + 1), 1.0}, {r(i2, k, p + 1), 1.0},
                         {r(i2, k + 1, p), 1.0}, {c(i1, k, q), 1.0}, {c(i2, k, q), 1.0}},
                        Sense::LessEqual, 5.0, Family::SwapBan);
            }
        }
  }

  const PlanningScene& scene_;
  BinaryProgram p_;
};

}  // namespace

BinaryProgram build_program(const PlanningScene& scene) { return ProgramBuilder(scene).build(); }

BinaryProgram build_program(const MovingGrid& grid, const std::vector<CellIndex>& init_cells,
                            const HvForecast& forecast, const PlannerWeights& weights, int n_steps)
{
  return build_program(make_scene(grid, init_cells, forecast, weights, n_steps));
}

double plan_objective(const PlanningScene& scene, const OccupancyPlan& plan)
{
  const auto& w = scene.weights;
  const int n = scene.n_cav();
  const int N = scene.n_steps;
  double cost = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int k = 1; k <= N; ++k)
      if (plan.at(i, k).row <= scene.n_rows - n) cost += w.w_tar;
    for (int k = 1; k <= N; ++k) {
      const auto a = plan.at(i, k);
      if (k < N) {
        const auto b = plan.at(i, k + 1);
        // (x' - x)^2 summed over one-hot indicators is 2 per change.
        if (a.row != b.row) cost += 2.0 * w.w_lon;
        if (a.col != b.col) cost += 2.0 * w.delta * w.w_lat;
      }
      const int front = scene.front_row(k);
      const bool active = w.delta == 0 || front == 0 || a.row > front;
      if (active) cost += w.w_lat * (w.l_index - a.col) * (w.l_index - a.col);
    }
  }
  return cost;
}

double evaluate_objective(const BinaryProgram& program, const std::vector<double>& x)
{
  double v = program.objective_constant;
  for (std::size_t j = 0; j < program.objective.size(); ++j) v += program.objective[j] * x[j];
  return v;
}

std::vector<double> assignment_from_plan(const BinaryProgram& program, const OccupancyPlan& plan)
{
  std::vector<double> x(program.vars.size(), 0.0);
  for (int i = 1; i <= program.n_cav; ++i)
    for (int k = 1; k <= program.n_steps; ++k) {
      const auto cell = plan.at(i, k);
      x[static_cast<std::size_t>(program.row_var(i, k, cell.row))] = 1.0;
      x[static_cast<std::size_t>(program.col_var(i, k, cell.col))] = 1.0;
    }
  const int n_occ = program.occupancy_var_count();
  for (const auto& row : program.rows) {
    if (row.family != Family::AuxLink) continue;
    double act = 0.0;
    int aux = -1;
    for (const auto& t : row.terms) {
      if (t.var >= n_occ)
        aux = t.var;
      else
        act += t.coef * x[static_cast<std::size_t>(t.var)];
    }
    if (aux >= 0) x[static_cast<std::size_t>(aux)] = std::max(x[static_cast<std::size_t>(aux)], act - row.rhs);
  }
  return x;
}

std::optional<int> first_violated_row(const BinaryProgram& program, const std::vector<double>& x)
{
  constexpr double tol = 1e-9;
  for (std::size_t n = 0; n < program.rows.size(); ++n) {
    const auto& row = program.rows[n];
    double act = 0.0;
    for (const auto& t : row.terms) act += t.coef * x[static_cast<std::size_t>(t.var)];
    const bool ok = row.sense == Sense::Equal ? std::abs(act - row.rhs) <= tol : act <= row.rhs + tol;
    if (!ok) return static_cast<int>(n);
  }
  return std::nullopt;
}

bool should_replan(int executed_steps, int plan_len, bool new_hv_entered)
{
  if (executed_steps < 0 || executed_steps > plan_len)
    throw std::invalid_argument("should_replan: executed steps outside [0, plan length]");
  return new_hv_entered || executed_steps == plan_len;
}

std::string var_name(const VarMeta& m)
{
  const char* prefix = "r";
  switch (m.role) {
    case VarRole::Row: prefix = "r"; break;
    case VarRole::Col: prefix = "c"; break;
    case VarRole::RowMove: prefix = "dr"; break;
    case VarRole::ColMove: prefix = "dc"; break;
    case VarRole::Regroup: prefix = "g"; break;
  }
  return std::string(prefix) + "_" + std::to_string(m.cav) + "_" + std::to_string(m.step) + "_" +
         std::to_string(m.index);
}

void write_lp(std::ostream& os, const BinaryProgram& program)
{
  auto term = [&](double coef, int var, bool first) {
    if (coef < 0)
      os << " - ";
    else if (!first)
      os << " + ";
    const double a = std::abs(coef);
    if (a != 1.0) os << a << ' ';
    os << var_name(program.vars[static_cast<std::size_t>(var)]);
  };
  os << "\\ " << program.n_cav << " CAVs, " << program.n_steps << " steps, " << program.n_rows << "x"
     << program.n_cols << " grid\n";
  os << "Minimize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < program.objective.size(); ++j) {
    if (program.objective[j] == 0.0) continue;
    term(program.objective[j], static_cast<int>(j), first);
    first = false;
  }
  if (program.objective_constant != 0.0) os << " + " << program.objective_constant;
  os << "\nSubject To\n";
  for (std::size_t n = 0; n < program.rows.size(); ++n) {
    const auto& row = program.rows[n];
    os << ' ' << to_string(row.family) << '_' << n << ':';
    bool f = true;
    for (const auto& t : row.terms) {
      term(t.coef, t.var, f);
      f = false;
    }
    if (row.terms.empty()) os << " 0";
    os << (row.sense == Sense::Equal ? " = " : " <= ") << row.rhs << '\n';
  }
  os << "Binary\n";
  for (const auto& m : program.vars) os << ' ' << var_name(m) << '\n';
  os << "End\n";
}

}  // namespace vswarm::planner
