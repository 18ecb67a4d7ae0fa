#include "vswarm/trajgen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "vswarm/io/csv.hpp"

namespace vswarm {

std::vector<Waypoint> generate_waypoints(const std::vector<CellIndex>& cells, const MovingGrid& grid, double dt_b)
{
  if (cells.empty()) throw std::invalid_argument("generate_waypoints: empty plan");
  if (!(dt_b > 0.0)) throw std::invalid_argument("generate_waypoints: behaviour step must be positive");
  std::vector<Waypoint> out;
  out.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto w = cell_to_world(grid, static_cast<int>(k), cells[k], dt_b);
    out.push_back({w.t, w.s, w.y});
  }
  return out;
}

ClampedSpline::ClampedSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
{
  const auto n = static_cast<Eigen::Index>(x_.size());
  if (n < 2 || y_.size() != x_.size()) throw std::invalid_argument("spline: need at least two matching knots");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline: knots must be strictly increasing");

  // Moment equations with zero end slopes.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  auto h = [&](Eigen::Index i) { return x_[i + 1] - x_[i]; };
  auto d = [&](Eigen::Index i) { return (y_[i + 1] - y_[i]) / h(i); };
  A(0, 0) = 2 * h(0);
  A(0, 1) = h(0);
  b(0) = 6 * d(0);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    A(i, i - 1) = h(i - 1);
    A(i, i) = 2 * (h(i - 1) + h(i));
    A(i, i + 1) = h(i);
    b(i) = 6 * (d(i) - d(i - 1));
  }
  A(n - 1, n - 2) = h(n - 2);
  A(n - 1, n - 1) = 2 * h(n - 2);
  b(n - 1) = -6 * d(n - 2);
  Eigen::VectorXd m = A.partialPivLu().solve(b);
  m_.assign(m.data(), m.data() + n);
}

std::size_t ClampedSpline::segment(double x) const
{
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double ClampedSpline::value(double x) const
{
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double ClampedSpline::slope(double x) const
{
  if (x <= x_.front() || x >= x_.back()) return 0.0;
  const auto i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h + ((1 - 3 * a * a) * m_[i] + (3 * b * b - 1) * m_[i + 1]) * h / 6.0;
}

double ClampedSpline::second(double x) const
{
  if (x < x_.front() || x > x_.back()) return 0.0;
  const auto i = segment(x);
  const double h = x_[i + 1] - x_[i];
  return ((x_[i + 1] - x) * m_[i] + (x - x_[i]) * m_[i + 1]) / h;
}

ReferencePath::ReferencePath(std::vector<Waypoint> waypoints, double ds) : waypoints_(std::move(waypoints)), ds_(ds)
{
  if (waypoints_.size() < 2) throw std::invalid_argument("reference path: need at least two waypoints");
  if (!(ds > 0.0)) throw std::invalid_argument("reference path: sample spacing must be positive");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (i > 0 && !(waypoints_[i].t > waypoints_[i - 1].t))
      throw std::invalid_argument("reference path: waypoint times must be strictly increasing");
    x.push_back(waypoints_[i].s);
    y.push_back(waypoints_[i].y);
  }
  spline_ = ClampedSpline(x, y);

  // March along the arc with dx/dsigma = 1 / sqrt(1 + y'^2).
  auto dx = [&](double xx) {
    const double p = spline_.slope(xx);
    return 1.0 / std::sqrt(1.0 + p * p);
  };
  double xx = x.front();
  double sigma = 0.0;
  while (true) {
    samples_.push_back({sigma, xx, y_at(xx), heading_at(xx), kappa_at(xx)});
    if (xx >= x.back()) break;
    const double k1 = dx(xx);
    const double k2 = dx(xx + 0.5 * ds * k1);
    const double k3 = dx(xx + 0.5 * ds * k2);
    const double k4 = dx(xx + ds * k3);
    const double next = xx + ds * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    if (next < x.back()) {
      xx = next;
      sigma += ds;
      continue;
    }
    // Short final piece: Simpson on the arc-length integrand over x.
    auto dsig = [&](double u) {
      const double p = spline_.slope(u);
      return std::sqrt(1.0 + p * p);
    };
    const double a = xx, b = x.back();
    sigma += (b - a) / 6.0 * (dsig(a) + 4 * dsig(0.5 * (a + b)) + dsig(b));
    xx = b;
  }
}

double ReferencePath::y_at(double x) const { return spline_.value(x); }

double ReferencePath::heading_at(double x) const { return std::atan(spline_.slope(x)); }

double ReferencePath::kappa_at(double x) const
{
  const double p = spline_.slope(x);
  return spline_.second(x) / std::pow(1.0 + p * p, 1.5);
}

double ReferencePath::sigma_at(double x) const
{
  const auto& s = samples_;
  if (x <= s.front().x) return s.front().sigma - (s.front().x - x);
  if (x >= s.back().x) return s.back().sigma + (x - s.back().x);
  auto it = std::upper_bound(s.begin(), s.end(), x, [](double v, const PathSample& p) { return v < p.x; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (x - a.x) / (b.x - a.x);
  return a.sigma + w * (b.sigma - a.sigma);
}

double ReferencePath::kappa_at_sigma(double sigma) const
{
  const auto& s = samples_;
  if (sigma <= s.front().sigma || sigma >= s.back().sigma) return 0.0;
  const auto i = static_cast<std::size_t>(sigma / ds_);
  if (i + 1 >= s.size()) return s.back().kappa;
  const double w = (sigma - s[i].sigma) / (s[i + 1].sigma - s[i].sigma);
  return (1 - w) * s[i].kappa + w * s[i + 1].kappa;
}

std::size_t ReferencePath::time_segment(double t) const
{
  const auto& w = waypoints_;
  if (t >= w.back().t) return w.size() - 2;
  if (t <= w.front().t) return 0;
  const auto it = std::upper_bound(w.begin(), w.end(), t, [](double v, const Waypoint& p) { return v < p.t; });
  return static_cast<std::size_t>(it - w.begin()) - 1;
}

double ReferencePath::s_des(double t) const
{
  const auto i = time_segment(t);
  return waypoints_[i].s + v_des(t) * (t - waypoints_[i].t);
}

double ReferencePath::v_des(double t) const
{
  const auto i = time_segment(t);
  const auto& a = waypoints_[i];
  const auto& b = waypoints_[i + 1];
  return (b.s - a.s) / (b.t - a.t);
}

ReferencePath build_reference_path(const std::vector<Waypoint>& waypoints, double ds)
{
  return ReferencePath(waypoints, ds);
}

void write_waypoints_csv(std::ostream& os, int cav_id, const std::vector<Waypoint>& w, bool header)
{
  io::CsvWriter csv(os);
  if (header) csv.header({"cav_id", "t", "s", "y"});
  for (const auto& p : w) csv.row(cav_id, p.t, p.s, p.y);
}

void write_path_csv(std::ostream& os, const ReferencePath& path)
{
  io::CsvWriter csv(os);
  csv.header({"sigma", "x", "y", "heading", "kappa"});
  for (const auto& p : path.samples()) csv.row(p.sigma, p.x, p.y, p.heading, p.kappa);
}

}  // namespace vswarm
