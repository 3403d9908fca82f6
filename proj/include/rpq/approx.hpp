#pragma once

// q(D)-approximations: a subset of q(D) covering every source and every
// target that occurs in q(D), computed by two BFS passes over the product in
// linear time and enumerable with constant delay.

#include <memory>
#include <unordered_set>
#include <vector>

#include "rpq/enumerate.hpp"

namespace rpq {

struct Approximation {
  std::vector<NodePair> pairs;
};

/// Forward BFS from a super-source propagates a representative source per
/// product node (array S'), a backward BFS on the reversed product propagates
/// a representative target (array T'); the approximation pairs every live
/// source with its target representative and vice versa. Representatives are
/// deterministic: seeds enter the queues in node order, values propagate on
/// first discovery.
inline Approximation compute_approximation(const GraphDatabase& d, const Nfa& m,
                                           DelayMeter* meter = nullptr) {
  auto charge = [&](std::uint64_t c) {
    if (meter) meter->charge(c);
  };
  ProductGraph pg = build_product(d, m);
  charge(pg.graph.size() + pg.graph.node_count());
  const std::size_t n = pg.db_nodes;

  auto propagate = [&](const SigmaGraph& g, std::vector<NodeId>& rep,
                       auto&& seed_of) {
    std::vector<NodeId> queue;
    queue.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
      NodeId s = seed_of(i);
      rep[s] = i;
      queue.push_back(s);
      charge(2);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeId w = queue[head];
      charge(1);
      for (LabelId x = 0; x < g.label_count(); ++x)
        for (NodeId t : g.successors(w, x)) {
          charge(1);
          if (rep[t] == kNoNode) {
            rep[t] = rep[w];
            queue.push_back(t);
            charge(2);
          }
        }
    }
  };

  std::vector<NodeId> source_rep(pg.graph.node_count(), kNoNode);
  propagate(pg.graph, source_rep, [&](NodeId i) { return pg.start_of(i); });

  SigmaGraph reversed = pg.graph.reversed();
  charge(reversed.size());
  std::vector<NodeId> target_rep(pg.graph.node_count(), kNoNode);
  propagate(reversed, target_rep, [&](NodeId i) { return pg.final_of(i); });

  Approximation a;
  std::unordered_set<std::uint64_t> seen;
  auto push = [&](NodeId u, NodeId v) {
    charge(1);
    if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) a.pairs.emplace_back(u, v);
  };
  for (NodeId i = 0; i < n; ++i) {
    NodeId t = target_rep[pg.start_of(i)];
    if (t != kNoNode) push(i, t);
  }
  for (NodeId i = 0; i < n; ++i) {
    NodeId s = source_rep[pg.final_of(i)];
    if (s != kNoNode) push(s, i);
  }
  return a;
}

/// Constant-delay enumeration of a q(D)-approximation; the two BFS passes are
/// the preprocessing. Rejects updates via the usual staleness signal.
class ApproxEnumerator final : public Enumerator {
 public:
  ApproxEnumerator(GraphDatabase&&, const Nfa&, DelayMeter* = nullptr) = delete;
  ApproxEnumerator(const GraphDatabase& d, const Nfa& m, DelayMeter* shared_meter = nullptr)
      : Enumerator(OrderContract::unordered, shared_meter), db_(&d), version_(d.version()) {
    approx_ = compute_approximation(d, m, &meter());
    begin_enumeration();
  }

 private:
  StepResult advance() override {
    if (db_->version() != version_) return {StreamState::stale};
    meter().charge(1);
    if (pos_ >= approx_.pairs.size()) return {StreamState::done};
    return {StreamState::item, approx_.pairs[pos_++]};
  }

  const GraphDatabase* db_;
  std::uint64_t version_;
  Approximation approx_;
  std::size_t pos_ = 0;
};

inline std::unique_ptr<ApproxEnumerator> enum_approx(const GraphDatabase& d, const Nfa& m) {
  return std::make_unique<ApproxEnumerator>(d, m);
}

}  // namespace rpq
