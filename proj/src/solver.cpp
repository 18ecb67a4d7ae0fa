#include "vswarm/planner/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

namespace vswarm::planner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

// A row term resolved to the (CAV, step) block it reads.
struct BlockTerm
{
  int unit;
  bool is_row;
  int index;  // 0-based row or column
  double coef;
};

struct CompiledRow
{
  std::vector<BlockTerm> terms;
  Sense sense;
  double rhs;
  Family family;
};

struct Aux
{
  double weight = 0.0;
  std::vector<CompiledRow> rows;  // aux-free part of each defining row
  std::vector<int> units;
};

struct JointKey
{
  std::vector<std::uint16_t> cells;
  bool operator==(const JointKey&) const = default;
};

struct JointKeyHash
{
  std::size_t operator()(const JointKey& k) const noexcept
  {
    std::size_t h = 1469598103934665603ull;
    for (auto c : k.cells) h = (h ^ c) * 1099511628211ull;
    return h;
  }
};

class Search
{
public:
  Search(const BinaryProgram& p, const SolveLimits& limits) : p_(p), limits_(limits)
  {
    n_ = p.n_cav;
    N_ = p.n_steps;
    R_ = p.n_rows;
    C_ = p.n_cols;
    cells_ = R_ * C_;
    if (n_ < 1 || N_ < 1 || R_ < 1 || C_ < 1) throw std::invalid_argument("solve: empty program");
    if (cells_ > std::numeric_limits<std::uint16_t>::max()) throw std::invalid_argument("solve: grid too large");
    compile();
  }

  OccupancyPlan run(SolveStats* stats)
  {
    start_ = std::chrono::steady_clock::now();
    for (const auto& fam : constant_violations_)
      throw InfeasibleError(fam, "infeasible program: a " + std::string(to_string(fam)) + " row can never hold");

    build_tables(std::nullopt, unary_, pair_, h_);
    for (int i = 0; i < n_; ++i) {
      double best = kInf;
      for (int c = 0; c < cells_; ++c) best = std::min(best, unary_at(unary_, i, 0, c) + h_at(h_, i, 0, c));
      if (best == kInf) diagnose_single(i);
    }

    cell_of_.assign(static_cast<std::size_t>(n_ * N_), -1);
    // Start every CAV "before" step 1: its bound contribution is the best
    // first-step entry.
    root_h_.assign(static_cast<std::size_t>(n_), 0.0);
    double h_total = 0.0;
    for (int i = 0; i < n_; ++i) {
      double best = kInf;
      for (int c = 0; c < cells_; ++c) best = std::min(best, unary_at(unary_, i, 0, c) + h_at(h_, i, 0, c));
      root_h_[static_cast<std::size_t>(i)] = best;
      h_total += best;
    }
    root_bound_ = h_total;
    dfs(0, 0.0, h_total);

    if (stats) {
      stats->nodes = nodes_;
      stats->memo_prunes = memo_prunes_;
      stats->seconds = elapsed();
      stats->root_bound = root_bound_ + p_.objective_constant;
    }
    if (budget_hit_)
      throw BudgetExhaustedError("branch-and-bound budget exhausted after " + std::to_string(nodes_) + " nodes",
                                 best_ < kInf ? std::optional<double>(best_ + p_.objective_constant) : std::nullopt);
    if (best_ == kInf) diagnose_coupled();

    OccupancyPlan plan;
    plan.n_steps = N_;
    plan.cells.assign(static_cast<std::size_t>(n_), std::vector<CellIndex>(static_cast<std::size_t>(N_)));
    for (int k = 0; k < N_; ++k)
      for (int i = 0; i < n_; ++i) {
        const int c = best_cells_[static_cast<std::size_t>(unit(i, k))];
        plan.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = {c / C_ + 1, c % C_ + 1};
      }
    plan.objective_value = best_ + p_.objective_constant;

    const auto x = assignment_from_plan(p_, plan);
    if (auto bad = first_violated_row(p_, x))
      throw std::logic_error("solve: decoded plan violates a " +
                             std::string(to_string(p_.rows[static_cast<std::size_t>(*bad)].family)) + " row");
    return plan;
  }

private:
  int unit(int i, int k) const { return k * n_ + i; }
  int unit_cav(int u) const { return u % n_; }
  int unit_step(int u) const { return u / n_; }

  double& unary_at(std::vector<double>& t, int i, int k, int c) const
  {
    return t[(static_cast<std::size_t>(i) * N_ + k) * cells_ + c];
  }
  double unary_at(const std::vector<double>& t, int i, int k, int c) const
  {
    return t[(static_cast<std::size_t>(i) * N_ + k) * cells_ + c];
  }
  double& pair_at(std::vector<double>& t, int i, int k, int a, int b) const
  {
    return t[((static_cast<std::size_t>(i) * N_ + k) * cells_ + a) * cells_ + b];
  }
  double pair_at(const std::vector<double>& t, int i, int k, int a, int b) const
  {
    return t[((static_cast<std::size_t>(i) * N_ + k) * cells_ + a) * cells_ + b];
  }
  double& h_at(std::vector<double>& t, int i, int k, int c) const { return unary_at(t, i, k, c); }
  double h_at(const std::vector<double>& t, int i, int k, int c) const { return unary_at(t, i, k, c); }

  BlockTerm resolve(int var, double coef) const
  {
    const int stride = R_ + C_;
    const int block = var / stride;
    const int off = var % stride;
    const int cav = block / N_;
    const int step = block % N_;
    return {unit(cav, step), off < R_, off < R_ ? off : off - R_, coef};
  }

  void compile()
  {
    const int n_occ = p_.occupancy_var_count();
    if (static_cast<int>(p_.objective.size()) != p_.var_count())
      throw std::invalid_argument("solve: objective size mismatch");
    for (int v = 0; v < n_occ; ++v) {
      const double w = p_.objective[static_cast<std::size_t>(v)];
      if (w != 0.0) linear_.push_back(resolve(v, w));
    }
    aux_of_var_.assign(static_cast<std::size_t>(p_.var_count()), -1);
    for (int v = n_occ; v < p_.var_count(); ++v) {
      aux_of_var_[static_cast<std::size_t>(v)] = static_cast<int>(aux_.size());
      Aux a;
      a.weight = p_.objective[static_cast<std::size_t>(v)];
      if (a.weight < 0.0) throw std::invalid_argument("solve: auxiliaries must carry non-negative weight");
      aux_.push_back(std::move(a));
    }

    const int n_units = n_ * N_;
    attached_.assign(static_cast<std::size_t>(n_units), {});
    for (const auto& row : p_.rows) {
      CompiledRow cr{{}, row.sense, row.rhs, row.family};
      int aux = -1;
      for (const auto& t : row.terms) {
        if (t.var < 0 || t.var >= p_.var_count()) throw std::invalid_argument("solve: row references unknown variable");
        if (t.var >= n_occ) {
          if (aux >= 0 || t.coef != -1.0 || row.sense != Sense::LessEqual)
            throw std::invalid_argument("solve: unsupported auxiliary row");
          aux = aux_of_var_[static_cast<std::size_t>(t.var)];
        } else {
          cr.terms.push_back(resolve(t.var, t.coef));
        }
      }
      std::vector<int> units;
      for (const auto& t : cr.terms) units.push_back(t.unit);
      std::sort(units.begin(), units.end());
      units.erase(std::unique(units.begin(), units.end()), units.end());

      if (aux >= 0) {
        auto& a = aux_[static_cast<std::size_t>(aux)];
        a.units.insert(a.units.end(), units.begin(), units.end());
        a.rows.push_back(std::move(cr));
        continue;
      }
      if (units.empty()) {
        if (!holds(0.0, cr)) constant_violations_.push_back(row.family);
        continue;
      }
      check_span(units);
      const int cav = unit_cav(units.front());
      const bool single = std::all_of(units.begin(), units.end(), [&](int u) { return unit_cav(u) == cav; });
      if (single)
        single_rows_[{cav, unit_step(units.front())}].push_back(std::move(cr));
      else
        attached_[static_cast<std::size_t>(units.back())].push_back(std::move(cr));
    }
    for (auto& a : aux_) {
      std::sort(a.units.begin(), a.units.end());
      a.units.erase(std::unique(a.units.begin(), a.units.end()), a.units.end());
      if (a.units.empty()) {
        // Constant lower bound.
        double v = 0.0;
        for (const auto& r : a.rows) v = std::max(v, -r.rhs);
        const_cost_ += a.weight * v;
        continue;
      }
      check_span(a.units);
      const int cav = unit_cav(a.units.front());
      for (int u : a.units)
        if (unit_cav(u) != cav) throw std::invalid_argument("solve: auxiliary spans several CAVs");
      single_aux_[{cav, unit_step(a.units.front())}].push_back(&a);
    }
    for (const auto& t : linear_) linear_by_unit_[t.unit].push_back(t);
    index_attached();
  }

  double contribution(const CompiledRow& r, int u, int c) const
  {
    double v = 0.0;
    for (const auto& t : r.terms)
      if (t.unit == u && (t.is_row ? c / C_ : c % C_) == t.index) v += t.coef;
    return v;
  }

  // For every block and cell, the inter-CAV rows that the cell can push
  // over their bound given the most adverse placement of the other blocks.
  void index_attached()
  {
    triggers_.assign(attached_.size(), {});
    for (std::size_t u = 0; u < attached_.size(); ++u) {
      auto& by_cell = triggers_[u];
      by_cell.assign(static_cast<std::size_t>(cells_), {});
      for (std::size_t n = 0; n < attached_[u].size(); ++n) {
        const auto& r = attached_[u][n];
        std::vector<int> others;
        for (const auto& t : r.terms)
          if (t.unit != static_cast<int>(u) && std::find(others.begin(), others.end(), t.unit) == others.end())
            others.push_back(t.unit);
        double worst_other = 0.0;
        for (int o : others) {
          double m = -kInf;
          for (int c = 0; c < cells_; ++c) m = std::max(m, contribution(r, o, c));
          worst_other += m;
        }
        for (int c = 0; c < cells_; ++c)
          if (r.sense == Sense::Equal || contribution(r, static_cast<int>(u), c) + worst_other > r.rhs + kTol)
            by_cell[static_cast<std::size_t>(c)].push_back(static_cast<int>(n));
      }
    }
  }

  void check_span(const std::vector<int>& units) const
  {
    int lo = N_, hi = -1;
    for (int u : units) {
      lo = std::min(lo, unit_step(u));
      hi = std::max(hi, unit_step(u));
    }
    if (hi - lo > 1) throw std::invalid_argument("solve: rows may only couple consecutive steps");
  }

  static bool holds(double act, const CompiledRow& r)
  {
    return r.sense == Sense::Equal ? std::abs(act - r.rhs) <= kTol : act <= r.rhs + kTol;
  }

  double activity(const CompiledRow& r) const
  {
    double act = 0.0;
    for (const auto& t : r.terms) {
      const int c = cell_of_[static_cast<std::size_t>(t.unit)];
      const int idx = t.is_row ? c / C_ : c % C_;
      if (idx == t.index) act += t.coef;
    }
    return act;
  }

  double aux_value(const Aux& a) const
  {
    double v = 0.0;
    for (const auto& r : a.rows) v = std::max(v, activity(r) - r.rhs);
    return v;
  }

  // Per-CAV tables: unary[i][k][c], pair[i][k][a][b] (step k -> k+1) and the
  // exact single-CAV cost-to-go h[i][k][c] (excluding the unary at k).
  void build_tables(std::optional<Family> skip, std::vector<double>& unary, std::vector<double>& pair,
                    std::vector<double>& h)
  {
    const std::size_t nc = static_cast<std::size_t>(cells_);
    unary.assign(static_cast<std::size_t>(n_) * N_ * nc, 0.0);
    pair.assign(static_cast<std::size_t>(n_) * N_ * nc * nc, kInf);
    h.assign(static_cast<std::size_t>(n_) * N_ * nc, kInf);
    cell_of_.assign(static_cast<std::size_t>(n_ * N_), -1);

    auto rows_at = [&](int i, int k) -> const std::vector<CompiledRow>* {
      auto it = single_rows_.find({i, k});
      return it == single_rows_.end() ? nullptr : &it->second;
    };
    auto aux_at = [&](int i, int k) -> const std::vector<Aux*>* {
      auto it = single_aux_.find({i, k});
      return it == single_aux_.end() ? nullptr : &it->second;
    };
    auto spans = [&](const std::vector<BlockTerm>& terms, int k) {
      for (const auto& t : terms)
        if (unit_step(t.unit) != k) return true;
      return false;
    };

    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < N_; ++k) {
        const int u = unit(i, k);
        const auto* rows = rows_at(i, k);
        const auto* auxes = aux_at(i, k);
        for (int c = 0; c < cells_; ++c) {
          cell_of_[static_cast<std::size_t>(u)] = c;
          double cost = 0.0;
          bool ok = true;
          if (rows)
            for (const auto& r : *rows) {
              if (spans(r.terms, k) || (skip && r.family == *skip)) continue;
              if (!holds(activity(r), r)) {
                ok = false;
                break;
              }
            }
          if (ok) {
            if (auto it = linear_by_unit_.find(u); it != linear_by_unit_.end())
              for (const auto& t : it->second) {
                const int idx = t.is_row ? c / C_ : c % C_;
                if (idx == t.index) cost += t.coef;
              }
            if (auxes)
              for (const Aux* a : *auxes)
                if (a->units.size() == 1) cost += a->weight * aux_value(*a);
          }
          unary_at(unary, i, k, c) = ok ? cost : kInf;
        }
        cell_of_[static_cast<std::size_t>(u)] = -1;
      }
      for (int k = 0; k + 1 < N_; ++k) {
        const int u0 = unit(i, k);
        const int u1 = unit(i, k + 1);
        const auto* rows = rows_at(i, k);
        const auto* auxes = aux_at(i, k);
        for (int a = 0; a < cells_; ++a) {
          if (unary_at(unary, i, k, a) == kInf) continue;
          cell_of_[static_cast<std::size_t>(u0)] = a;
          for (int b = 0; b < cells_; ++b) {
            if (unary_at(unary, i, k + 1, b) == kInf) continue;
            cell_of_[static_cast<std::size_t>(u1)] = b;
            bool ok = true;
            if (rows)
              for (const auto& r : *rows) {
                if (!spans(r.terms, k) || (skip && r.family == *skip)) continue;
                if (!holds(activity(r), r)) {
                  ok = false;
                  break;
                }
              }
            double cost = 0.0;
            if (ok && auxes)
              for (const Aux* x : *auxes)
                if (x->units.size() > 1) cost += x->weight * aux_value(*x);
            pair_at(pair, i, k, a, b) = ok ? cost : kInf;
          }
          cell_of_[static_cast<std::size_t>(u1)] = -1;
        }
        cell_of_[static_cast<std::size_t>(u0)] = -1;
      }
      for (int c = 0; c < cells_; ++c)
        if (unary_at(unary, i, N_ - 1, c) < kInf) h_at(h, i, N_ - 1, c) = 0.0;
      for (int k = N_ - 2; k >= 0; --k)
        for (int a = 0; a < cells_; ++a) {
          if (unary_at(unary, i, k, a) == kInf) continue;
          double best = kInf;
          for (int b = 0; b < cells_; ++b) {
            const double pc = pair_at(pair, i, k, a, b);
            if (pc == kInf) continue;
            best = std::min(best, pc + unary_at(unary, i, k + 1, b) + h_at(h, i, k + 1, b));
          }
          h_at(h, i, k, a) = best;
        }
    }
  }

  [[noreturn]] void diagnose_single(int i)
  {
    static constexpr std::array families{Family::Occupancy,       Family::InitialCondition, Family::RowTransition,
                                         Family::ColTransition,   Family::Cornerwise,       Family::HvExclusion,
                                         Family::SpaceMakingLane, Family::SpaceMakingBand};
    std::vector<double> u, pr, h;
    for (Family f : families) {
      build_tables(f, u, pr, h);
      for (int c = 0; c < cells_; ++c)
        if (unary_at(u, i, 0, c) + h_at(h, i, 0, c) < kInf)
          throw InfeasibleError(f, "infeasible program: CAV " + std::to_string(i + 1) + " cannot satisfy its " +
                                       std::string(to_string(f)) + " rows");
    }
    throw InfeasibleError(Family::Occupancy,
                          "infeasible program: CAV " + std::to_string(i + 1) + " has no feasible cell sequence");
  }

  [[noreturn]] void diagnose_coupled()
  {
    Family worst = Family::CavCollision;
    std::int64_t count = -1;
    for (const auto& [f, n] : violations_)
      if (n > count) {
        worst = f;
        count = n;
      }
    throw InfeasibleError(worst, "infeasible program: CAV plans conflict through " + std::string(to_string(worst)) +
                                     " rows");
  }

  double elapsed() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool out_of_budget()
  {
    if (budget_hit_) return true;
    if (nodes_ >= limits_.max_nodes) budget_hit_ = true;
    if ((nodes_ & 0xfff) == 0 && elapsed() > limits_.max_seconds) budget_hit_ = true;
    return budget_hit_;
  }

  struct Candidate
  {
    double bound;
    int cell;
    double g;
    double h;
  };

  void dfs(int u, double g, double h_total)
  {
    if (u == n_ * N_) {
      if (g < best_ - kTol) {
        best_ = g;
        best_cells_ = cell_of_;
      }
      return;
    }
    ++nodes_;
    if (out_of_budget()) return;

    const int i = unit_cav(u);
    const int k = unit_step(u);
    const int prev = k > 0 ? cell_of_[static_cast<std::size_t>(unit(i, k - 1))] : -1;
    const double h_prev = k > 0 ? h_at(h_, i, k - 1, prev) : root_h_[static_cast<std::size_t>(i)];

    std::vector<Candidate> cands;
    cands.reserve(8);
    for (int c = 0; c < cells_; ++c) {
      const double uc = unary_at(unary_, i, k, c);
      if (uc == kInf) continue;
      const double hc = h_at(h_, i, k, c);
      if (hc == kInf) continue;
      double step = uc;
      if (k > 0) {
        const double pc = pair_at(pair_, i, k - 1, prev, c);
        if (pc == kInf) continue;
        step += pc;
      }
      const double g2 = g + step;
      const double h2 = h_total - h_prev + hc;
      cands.push_back({g2 + h2, c, g2, h2});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.cell < b.cell;
    });

    for (const auto& cand : cands) {
      if (cand.bound >= best_ - kTol) break;
      cell_of_[static_cast<std::size_t>(u)] = cand.cell;
      bool ok = true;
      const auto& rows = attached_[static_cast<std::size_t>(u)];
      for (int n : triggers_[static_cast<std::size_t>(u)][static_cast<std::size_t>(cand.cell)]) {
        const auto& r = rows[static_cast<std::size_t>(n)];
        if (!holds(activity(r), r)) {
          ++violations_[r.family];
          ok = false;
          break;
        }
      }
      if (ok && i == n_ - 1 && k + 1 < N_) {
        JointKey key;
        key.cells.reserve(static_cast<std::size_t>(n_ + 1));
        key.cells.push_back(static_cast<std::uint16_t>(k));
        for (int j = 0; j < n_; ++j)
          key.cells.push_back(static_cast<std::uint16_t>(cell_of_[static_cast<std::size_t>(unit(j, k))]));
        auto [it, inserted] = memo_.try_emplace(std::move(key), cand.g);
        if (!inserted) {
          if (it->second <= cand.g + kTol) {
            ++memo_prunes_;
            ok = false;
          } else {
            it->second = cand.g;
          }
        }
      }
      if (ok) dfs(u + 1, cand.g, cand.h);
      cell_of_[static_cast<std::size_t>(u)] = -1;
      if (budget_hit_) return;
    }
  }

  const BinaryProgram& p_;
  SolveLimits limits_;
  int n_ = 0, N_ = 0, R_ = 0, C_ = 0, cells_ = 0;

  std::vector<BlockTerm> linear_;
  std::map<int, std::vector<BlockTerm>> linear_by_unit_;
  std::vector<Aux> aux_;
  std::vector<int> aux_of_var_;
  std::map<std::pair<int, int>, std::vector<CompiledRow>> single_rows_;  // keyed by (cav, first step)
  std::map<std::pair<int, int>, std::vector<Aux*>> single_aux_;
  std::vector<std::vector<CompiledRow>> attached_;
  std::vector<std::vector<std::vector<int>>> triggers_;
  std::vector<Family> constant_violations_;
  double const_cost_ = 0.0;

  std::vector<double> unary_, pair_, h_, root_h_;
  std::vector<int> cell_of_, best_cells_;
  std::unordered_map<JointKey, double, JointKeyHash> memo_;
  std::map<Family, std::int64_t> violations_;

  double best_ = kInf;
  double root_bound_ = 0.0;
  std::int64_t nodes_ = 0;
  std::int64_t memo_prunes_ = 0;
  bool budget_hit_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

OccupancyPlan solve(const BinaryProgram& program, const SolveLimits& limits, SolveStats* stats)
{
  Search search(program, limits);
  return search.run(stats);
}

}  // namespace vswarm::planner
