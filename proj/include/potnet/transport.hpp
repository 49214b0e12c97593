#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "potnet/detail/assignment.hpp"
#include "potnet/detail/network_simplex.hpp"
#include "potnet/errors.hpp"
#include "potnet/rng.hpp"
#include "potnet/tensor.hpp"

namespace potnet {

// Empirical measure: n points in R^d with nonnegative weights summing to 1.
struct WeightedPointCloud {
  Tensor2 points;                // n x d
  std::vector<double> weights;   // n entries

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }

  static WeightedPointCloud uniform(Tensor2 pts) {
    WeightedPointCloud c;
    const std::size_t n = pts.rows();
    c.points = std::move(pts);
    c.weights.assign(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    return c;
  }

  bool has_uniform_weights(double tol = 1e-12) const {
    if (weights.empty()) return false;
    const double w = 1.0 / static_cast<double>(weights.size());
    for (double wi : weights)
      if (std::abs(wi - w) > tol) return false;
    return true;
  }

  void validate() const {
    if (size() == 0) throw validation_error("point cloud: empty");
    if (weights.size() != size())
      throw validation_error("point cloud: weight count != point count");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw validation_error("point cloud: weights must be nonnegative and finite");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw validation_error("point cloud: weights sum to " + std::to_string(sum) +
                             ", expected 1 within 1e-9");
    if (!points.all_finite()) throw validation_error("point cloud: non-finite coordinate");
  }
};

struct PlanEntry {
  std::size_t i, j;
  double mass;
};

// Coupling realizing an exact W1 solve. Stored sparsely (optimal bases have
// at most n+m-1 entries); dense() materializes the full matrix.
struct TransportPlan {
  std::size_t n = 0, m = 0;
  std::vector<PlanEntry> entries;  // sorted by (i, j)
  double cost = 0.0;

  Tensor2 dense() const {
    Tensor2 g(n, m, 0.0);
    for (const auto& e : entries) g(e.i, e.j) += e.mass;
    return g;
  }
  std::vector<double> row_sums() const {
    std::vector<double> s(n, 0.0);
    for (const auto& e : entries) s[e.i] += e.mass;
    return s;
  }
  std::vector<double> col_sums() const {
    std::vector<double> s(m, 0.0);
    for (const auto& e : entries) s[e.j] += e.mass;
    return s;
  }
};

struct TransportOptions {
  std::size_t size_cap = 4096;
};

inline double euclidean(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

namespace detail {

inline std::vector<double> pairwise_costs(const WeightedPointCloud& src,
                                          const WeightedPointCloud& dst) {
  const std::size_t n = src.size(), m = dst.size(), d = src.dim();
  std::vector<double> c(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = src.points.row_ptr(i);
    for (std::size_t j = 0; j < m; ++j) c[i * m + j] = euclidean(x, dst.points.row_ptr(j), d);
  }
  return c;
}

}  // namespace detail

// Exact primal W1 between two weighted clouds (Euclidean ground cost).
// Uniform equal-size marginals take the assignment fast path; everything
// else runs the transportation network simplex.
inline TransportPlan w1_exact(const WeightedPointCloud& src, const WeightedPointCloud& dst,
                              const TransportOptions& opt = {}) {
  src.validate();
  dst.validate();
  if (src.dim() != dst.dim())
    throw validation_error("w1_exact: dimension mismatch " + std::to_string(src.dim()) + " vs " +
                           std::to_string(dst.dim()));
  if (src.size() > opt.size_cap || dst.size() > opt.size_cap)
    throw validation_error("w1_exact: cloud size exceeds cap " + std::to_string(opt.size_cap));

  const std::size_t n = src.size(), m = dst.size();
  TransportPlan plan;
  plan.n = n;
  plan.m = m;
  std::vector<double> costs = detail::pairwise_costs(src, dst);

  if (n == m && src.has_uniform_weights() && dst.has_uniform_weights()) {
    const auto row_to_col = detail::solve_assignment(costs, n);
    const double w = 1.0 / static_cast<double>(n);
    plan.entries.reserve(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plan.entries.push_back({i, row_to_col[i], w});
      total += w * costs[i * m + row_to_col[i]];
    }
    plan.cost = total;
    return plan;
  }

  detail::TransportSimplex simplex(src.weights, dst.weights, std::move(costs));
  switch (simplex.run()) {
    case detail::TransportSimplex::Status::optimal:
      break;
    case detail::TransportSimplex::Status::infeasible:
      throw validation_error("w1_exact: infeasible marginals");
    case detail::TransportSimplex::Status::unbounded:
      throw numeric_error("w1_exact: unbounded (solver invariant broken)");
    case detail::TransportSimplex::Status::iteration_limit:
      throw numeric_error("w1_exact: pivot limit reached");
  }
  simplex.for_each_positive_flow(
      [&](std::size_t i, std::size_t j, double f) { plan.entries.push_back({i, j, f}); });
  plan.cost = simplex.total_cost();
  return plan;
}

// 1D uniform-weight fast path: cost = mean |sort(xs)_i - sort(ys)_i|.
inline double w1_1d(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty()) throw validation_error("w1_1d: empty input");
  if (xs.size() != ys.size())
    throw validation_error("w1_1d: size mismatch (uniform fast path needs equal sizes)");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::abs(xs[i] - ys[i]);
  return s / static_cast<double>(xs.size());
}

// Sorting path with the gradient of the cost w.r.t. ys (original order).
// Ties are broken by index, zero differences give the zero subgradient.
struct W1dResult {
  double cost = 0.0;
  std::vector<double> grad_ys;
};

inline W1dResult w1_1d_with_grad(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) throw validation_error("w1_1d: empty input");
  if (xs.size() != ys.size()) throw validation_error("w1_1d: size mismatch");
  const std::size_t n = xs.size();
  std::vector<std::size_t> ox(n), oy(n);
  std::iota(ox.begin(), ox.end(), 0);
  std::iota(oy.begin(), oy.end(), 0);
  std::sort(ox.begin(), ox.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] != xs[b] ? xs[a] < xs[b] : a < b;
  });
  std::sort(oy.begin(), oy.end(), [&](std::size_t a, std::size_t b) {
    return ys[a] != ys[b] ? ys[a] < ys[b] : a < b;
  });
  W1dResult r;
  r.grad_ys.assign(n, 0.0);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double diff = ys[oy[k]] - xs[ox[k]];
    r.cost += std::abs(diff);
    if (diff > 0.0)
      r.grad_ys[oy[k]] = inv;
    else if (diff < 0.0)
      r.grad_ys[oy[k]] = -inv;
  }
  r.cost *= inv;
  return r;
}

// Envelope gradient of the W1 cost w.r.t. dst points, the plan held fixed:
// grad(y_j) = sum_i pi_ij (y_j - x_i)/|y_j - x_i|; coincident pairs
// contribute the zero subgradient.
inline Tensor2 w1_grad_dst(const TransportPlan& plan, const WeightedPointCloud& src,
                           const WeightedPointCloud& dst) {
  if (plan.n != src.size() || plan.m != dst.size())
    throw shape_error("w1_grad_dst: plan does not match clouds");
  if (src.dim() != dst.dim()) throw shape_error("w1_grad_dst: dimension mismatch");
  const std::size_t d = src.dim();
  Tensor2 grad(dst.size(), d, 0.0);
  for (const auto& e : plan.entries) {
    const double* x = src.points.row_ptr(e.i);
    const double* y = dst.points.row_ptr(e.j);
    const double dist = euclidean(x, y, d);
    if (dist < 1e-12) continue;
    const double scale = e.mass / dist;
    double* g = grad.row_ptr(e.j);
    for (std::size_t k = 0; k < d; ++k) g[k] += scale * (y[k] - x[k]);
  }
  return grad;
}

// Monte Carlo sliced W1: average of 1D distances over uniform unit
// directions drawn from the caller's stream.
inline double sliced_w1(const WeightedPointCloud& src, const WeightedPointCloud& dst,
                        std::size_t n_projections, Rng& rng) {
  src.validate();
  dst.validate();
  if (src.dim() != dst.dim()) throw validation_error("sliced_w1: dimension mismatch");
  if (n_projections == 0) throw validation_error("sliced_w1: n_projections must be >= 1");
  const std::size_t d = src.dim();
  const bool fast = src.size() == dst.size() && src.has_uniform_weights() &&
                    dst.has_uniform_weights();
  std::vector<double> dir(d), px(src.size()), py(dst.size());
  double total = 0.0;
  for (std::size_t p = 0; p < n_projections; ++p) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dir[k] = rng.normal();
        norm += dir[k] * dir[k];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (std::size_t k = 0; k < d; ++k) dir[k] /= norm;
    auto project = [&](const WeightedPointCloud& c, std::vector<double>& out) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double* r = c.points.row_ptr(i);
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += r[k] * dir[k];
        out[i] = s;
      }
    };
    project(src, px);
    project(dst, py);
    if (fast) {
      total += w1_1d(px, py);
    } else {
      WeightedPointCloud a, b;
      a.points = Tensor2(px.size(), 1, px);
      a.weights = src.weights;
      b.points = Tensor2(py.size(), 1, py);
      b.weights = dst.weights;
      total += w1_exact(a, b).cost;
    }
  }
  return total / static_cast<double>(n_projections);
}

}  // namespace potnet
