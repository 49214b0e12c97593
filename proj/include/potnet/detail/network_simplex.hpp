#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "potnet/errors.hpp"

namespace potnet::detail {

// Network simplex specialized to the dense bipartite transportation
// polytope (uncapacitated, equality marginals), the classic spanning-tree
// formulation with a block-search pivot rule. Tree bookkeeping follows the
// standard parent/thread/rev-thread/succ-count layout used by LEMON-style
// solvers. Deterministic: fixed arc scan order, strict improvement, fixed
// leaving-arc tie-breaking.
//
// Nodes: sources 0..n-1, sinks n..n+m-1, artificial root n+m.
// Real arc ids: a = i*m + j  (source i -> sink j). Artificial arcs follow.
class TransportSimplex {
public:
  enum class Status { optimal, infeasible, unbounded, iteration_limit };

  TransportSimplex(std::vector<double> supplies, std::vector<double> demands,
                   std::vector<double> costs)
      : n_(supplies.size()), m_(demands.size()), cost_(std::move(costs)) {
    node_num_ = static_cast<Index>(n_ + m_);
    arc_num_ = static_cast<Index>(n_ * m_);
    supply_.assign(node_num_ + 1, 0.0);
    for (std::size_t i = 0; i < n_; ++i) supply_[i] = supplies[i];
    for (std::size_t j = 0; j < m_; ++j) supply_[n_ + j] = -demands[j];
  }

  Status run(std::uint64_t max_pivots = 0) {
    if (n_ == 0 || m_ == 0) return Status::infeasible;
    if (max_pivots == 0)
      max_pivots = std::max<std::uint64_t>(200000, std::uint64_t(node_num_) * 4096);

    const Index all_arc_num = arc_num_ + node_num_;
    const Index root = node_num_;
    flow_.assign(all_arc_num, 0.0);
    pi_.assign(node_num_ + 1, 0.0);
    parent_.assign(node_num_ + 1, 0);
    pred_.assign(node_num_ + 1, 0);
    thread_.assign(node_num_ + 1, 0);
    rev_thread_.assign(node_num_ + 1, 0);
    succ_num_.assign(node_num_ + 1, 0);
    last_succ_.assign(node_num_ + 1, 0);
    forward_.assign(node_num_ + 1, false);
    state_.assign(all_arc_num, kStateLower);
    cost_.resize(all_arc_num, 0.0);
    source_.assign(all_arc_num, 0);
    target_.assign(all_arc_num, 0);
    for (Index a = 0; a < arc_num_; ++a) {
      source_[a] = a / static_cast<Index>(m_);
      target_[a] = static_cast<Index>(n_) + a % static_cast<Index>(m_);
    }

    double sum_supply = 0.0, max_cost = 0.0;
    for (Index u = 0; u < node_num_; ++u) sum_supply += supply_[u];
    for (Index a = 0; a < arc_num_; ++a) max_cost = std::max(max_cost, std::abs(cost_[a]));
    if (std::abs(sum_supply) > 1e-9) return Status::infeasible;
    const double art_cost = (max_cost + 1.0) * node_num_;

    // initial basis: every node connected to the root by an artificial arc
    parent_[root] = -1;
    pred_[root] = -1;
    thread_[root] = 0;
    rev_thread_[0] = root;
    succ_num_[root] = node_num_ + 1;
    last_succ_[root] = root - 1;
    supply_[root] = -sum_supply;
    pi_[root] = 0.0;
    for (Index u = 0, e = arc_num_; u < node_num_; ++u, ++e) {
      parent_[u] = root;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (supply_[u] >= 0) {
        forward_[u] = true;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root;
        flow_[e] = supply_[u];
        cost_[e] = 0.0;
      } else {
        forward_[u] = false;
        pi_[u] = art_cost;
        source_[e] = root;
        target_[e] = u;
        flow_[e] = -supply_[u];
        cost_[e] = art_cost;
      }
    }

    next_arc_ = 0;
    block_size_ = std::max<Index>(
        static_cast<Index>(std::sqrt(static_cast<double>(arc_num_))), 16);

    initial_pivots();

    std::uint64_t pivots = 0;
    while (find_entering_arc()) {
      if (++pivots > max_pivots) return Status::iteration_limit;
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ >= kInf) return Status::unbounded;
      change_flow(change);
      if (change) {
        update_tree();
        update_potentials();
      }
    }

    // artificial arcs must end up (numerically) empty
    for (Index e = arc_num_; e < all_arc_num; ++e) {
      if (flow_[e] != 0.0) {
        if (std::abs(flow_[e]) > 1e-9) return Status::infeasible;
        flow_[e] = 0.0;
      }
    }
    return Status::optimal;
  }

  // coupling mass on real arc i*m + j
  double flow(std::size_t i, std::size_t j) const { return flow_[i * m_ + j]; }

  double total_cost() const {
    double c = 0.0;
    for (Index a = 0; a < arc_num_; ++a) c += flow_[a] * cost_[a];
    return c;
  }

  template <typename Fn>
  void for_each_positive_flow(Fn&& fn) const {
    for (Index a = 0; a < arc_num_; ++a)
      if (flow_[a] > 0.0)
        fn(static_cast<std::size_t>(a / static_cast<Index>(m_)),
           static_cast<std::size_t>(a % static_cast<Index>(m_)), flow_[a]);
  }

private:
  using Index = std::int64_t;
  static constexpr char kStateLower = 1;
  static constexpr char kStateTree = 0;
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kEpsEntering = 64.0 * std::numeric_limits<double>::epsilon();

  double reduced_cost(Index e) const {
    return state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
  }

  bool accept_candidate(double min, Index arc) const {
    const double a = std::max({1.0, std::abs(pi_[source_[arc]]),
                               std::abs(pi_[target_[arc]]), std::abs(cost_[arc])});
    return min < -kEpsEntering * a;
  }

  bool find_entering_arc() {
    double min = 0.0;
    Index e = next_arc_;
    Index cnt = block_size_;
    for (Index ind = 0; ind < arc_num_; ++ind, ++e) {
      if (e == arc_num_) e -= arc_num_;
      const double c = reduced_cost(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
      }
      if (--cnt == 0) {
        if (min < 0.0 && accept_candidate(min, in_arc_)) {
          next_arc_ = e;
          return true;
        }
        cnt = block_size_;
      }
    }
    if (min < 0.0 && accept_candidate(min, in_arc_)) {
      next_arc_ = e;
      return true;
    }
    return false;
  }

  // cheap warm start: best incoming arc per sink
  void initial_pivots() {
    for (Index v = static_cast<Index>(n_); v < node_num_; ++v) {
      double min_cost = kInf;
      Index min_arc = -1;
      const Index j = v - static_cast<Index>(n_);
      for (Index i = 0; i < static_cast<Index>(n_); ++i) {
        const Index a = i * static_cast<Index>(m_) + j;
        if (cost_[a] < min_cost) {
          min_cost = cost_[a];
          min_arc = a;
        }
      }
      if (min_arc < 0) continue;
      in_arc_ = min_arc;
      if (reduced_cost(in_arc_) >= 0.0) continue;
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ >= kInf) continue;
      change_flow(change);
      if (change) {
        update_tree();
        update_potentials();
      }
    }
  }

  void find_join_node() {
    Index u = source_[in_arc_], v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    Index first, second;
    if (state_[in_arc_] == kStateLower) {
      first = source_[in_arc_];
      second = target_[in_arc_];
    } else {
      first = target_[in_arc_];
      second = source_[in_arc_];
    }
    delta_ = kInf;
    char result = 0;
    for (Index u = first; u != join_; u = parent_[u]) {
      const double d = forward_[u] ? flow_[pred_[u]] : kInf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (Index u = second; u != join_; u = parent_[u]) {
      const double d = forward_[u] ? kInf : flow_[pred_[u]];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow(bool change) {
    if (delta_ > 0.0) {
      const double val = state_[in_arc_] * delta_;
      flow_[in_arc_] += val;
      for (Index u = source_[in_arc_]; u != join_; u = parent_[u])
        flow_[pred_[u]] += forward_[u] ? -val : val;
      for (Index u = target_[in_arc_]; u != join_; u = parent_[u])
        flow_[pred_[u]] += forward_[u] ? val : -val;
    }
    if (change) {
      state_[in_arc_] = kStateTree;
      state_[pred_[u_out_]] = kStateLower;
      flow_[pred_[u_out_]] = 0.0;
    } else {
      state_[in_arc_] = -state_[in_arc_];
    }
  }

  void update_tree() {
    Index w, u = last_succ_[u_in_];
    const Index old_rev_thread = rev_thread_[u_out_];
    const Index old_succ_num = succ_num_[u_out_];
    const Index old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];
    Index right = thread_[u];
    Index last = (old_rev_thread == v_in_) ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    thread_[v_in_] = u_in_;
    Index stem = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    Index par_stem = v_in_;
    while (stem != u_out_) {
      const Index new_stem = parent_[stem];
      thread_[u] = new_stem;
      dirty_revs_.push_back(u);

      w = rev_thread_[stem];
      thread_[w] = right;
      rev_thread_[right] = w;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = new_stem;

      u = (last_succ_[stem] == last_succ_[par_stem]) ? rev_thread_[par_stem] : last_succ_[stem];
      right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = right;
      rev_thread_[right] = old_rev_thread;
    }
    for (Index d : dirty_revs_) rev_thread_[thread_[d]] = d;

    Index tmp_sc = 0, tmp_ls = last_succ_[u_out_];
    u = u_out_;
    while (u != u_in_) {
      w = parent_[u];
      pred_[u] = pred_[w];
      forward_[u] = !forward_[w];
      tmp_sc += succ_num_[u] - succ_num_[w];
      succ_num_[u] = tmp_sc;
      last_succ_[w] = tmp_ls;
      u = w;
    }
    pred_[u_in_] = in_arc_;
    forward_[u_in_] = (u_in_ == source_[in_arc_]);
    succ_num_[u_in_] = old_succ_num;

    Index up_limit_in = -1, up_limit_out = -1;
    if (last_succ_[join_] == v_in_)
      up_limit_out = join_;
    else
      up_limit_in = join_;

    for (u = v_in_; u != up_limit_in && last_succ_[u] == v_in_; u = parent_[u])
      last_succ_[u] = last_succ_[u_out_];

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_[u_out_];
    }

    for (u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potentials() {
    const double sigma = forward_[u_in_]
                             ? pi_[v_in_] - pi_[u_in_] - cost_[pred_[u_in_]]
                             : pi_[v_in_] - pi_[u_in_] + cost_[pred_[u_in_]];
    const Index end = thread_[last_succ_[u_in_]];
    for (Index u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  std::size_t n_, m_;
  Index node_num_ = 0, arc_num_ = 0;
  std::vector<double> cost_, supply_, flow_, pi_;
  std::vector<Index> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, source_, target_;
  std::vector<bool> forward_;
  std::vector<char> state_;
  std::vector<Index> dirty_revs_;

  Index next_arc_ = 0, block_size_ = 0;
  Index in_arc_ = 0, join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  double delta_ = 0.0;
};

}  // namespace potnet::detail
