#pragma once

// The non-enumeration evaluation problems: Boole, Check, Witness, Eval and
// Count, the Boole <-> Check transformations, and an independent brute-force
// oracle (transitive closure over the product, shared with no BFS code).

#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rpq/product.hpp"

namespace rpq {

using NodePair = std::pair<NodeId, NodeId>;

/// q(D), sorted lexicographically in node order, duplicate-free.
struct EvalResult {
  std::vector<NodePair> pairs;

  bool operator==(const EvalResult& other) const { return pairs == other.pairs; }
  std::size_t size() const { return pairs.size(); }
};

inline bool check(const GraphDatabase& d, const Nfa& m, NodeId u, NodeId v) {
  return pair_reachable(build_product(d, m), u, v);
}

/// One BFS from a super-source over the product, propagating the array S of
/// originating database nodes (S[(u,p0)] = u); any final-level node with a
/// non-empty origin yields a witness.
inline std::optional<NodePair> witness(const GraphDatabase& d, const Nfa& m) {
  ProductGraph pg = build_product(d, m);
  std::vector<NodeId> origin(pg.node_count(), kNoNode);
  std::vector<NodeId> queue;
  queue.reserve(pg.db_nodes);
  // Super-source successors visited in node order: deterministic witness.
  for (NodeId u = 0; u < pg.db_nodes; ++u) {
    NodeId s = pg.start_of(u);
    origin[s] = u;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId w = queue[head];
    for (LabelId x = 0; x < pg.graph.label_count(); ++x)
      for (NodeId t : pg.graph.successors(w, x))
        if (origin[t] == kNoNode) {
          origin[t] = origin[w];
          queue.push_back(t);
        }
  }
  for (NodeId v = 0; v < pg.db_nodes; ++v)
    if (origin[pg.final_of(v)] != kNoNode) return NodePair{origin[pg.final_of(v)], v};
  return std::nullopt;
}

inline bool boole(const GraphDatabase& d, const Nfa& m) { return witness(d, m).has_value(); }

/// One BFS per source node in node order; output comes out sorted.
inline EvalResult eval_all(const GraphDatabase& d, const Nfa& m) {
  ProductGraph pg = build_product(d, m);
  EvalResult result;
  std::vector<NodeId> visited(pg.node_count(), kNoNode);  // stamped with the source
  std::vector<NodeId> queue;
  std::vector<char> row(pg.db_nodes, 0);
  for (NodeId u = 0; u < pg.db_nodes; ++u) {
    queue.clear();
    NodeId s = pg.start_of(u);
    visited[s] = u;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeId w = queue[head];
      if (pg.state(w) == pg.final_state) row[pg.db_node(w)] = 1;
      for (LabelId x = 0; x < pg.graph.label_count(); ++x)
        for (NodeId t : pg.graph.successors(w, x))
          if (visited[t] != u) {
            visited[t] = u;
            queue.push_back(t);
          }
    }
    for (NodeId v = 0; v < pg.db_nodes; ++v)
      if (row[v]) {
        result.pairs.emplace_back(u, v);
        row[v] = 0;
      }
  }
  return result;
}

/// |q(D)| via the same per-source sweep, counting instead of materialising.
inline std::size_t count(const GraphDatabase& d, const Nfa& m) {
  ProductGraph pg = build_product(d, m);
  std::size_t total = 0;
  std::vector<NodeId> visited(pg.node_count(), kNoNode);
  std::vector<NodeId> queue;
  std::vector<NodeId> row(pg.db_nodes, kNoNode);
  for (NodeId u = 0; u < pg.db_nodes; ++u) {
    queue.clear();
    NodeId s = pg.start_of(u);
    visited[s] = u;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeId w = queue[head];
      if (pg.state(w) == pg.final_state && row[pg.db_node(w)] != u) {
        row[pg.db_node(w)] = u;
        ++total;
      }
      for (LabelId x = 0; x < pg.graph.label_count(); ++x)
        for (NodeId t : pg.graph.successors(w, x))
          if (visited[t] != u) {
            visited[t] = u;
            queue.push_back(t);
          }
    }
  }
  return total;
}

// --- Boole <-> Check transformations ----------------------------------------

namespace detail {

inline std::string fresh_name(const GraphDatabase& d, std::string base) {
  while (d.find_node(base)) base.insert(base.begin(), '_');
  return base;
}

inline GraphDatabase copy_with_hash(const GraphDatabase& d) {
  if (d.alphabet().has('#')) throw Error("alphabet already contains the fresh symbol '#'");
  GraphDatabase out(d.alphabet().extended('#'));
  for (NodeId u = 0; u < d.node_count(); ++u) out.add_node(d.name(u));
  d.graph().for_each_arc([&](NodeId u, LabelId x, NodeId v) { out.insert_arc(u, x, v); });
  return out;
}

}  // namespace detail

/// Boole instance rewritten as a Check instance: fresh nodes u, v with
/// #-arcs u -> x and x -> v for every original node x, and query #q#.
struct CheckInstance {
  GraphDatabase database;
  std::string query;  // #q#
  std::string source, target;
};

inline CheckInstance boole_to_check(const GraphDatabase& d, const std::string& query_text) {
  CheckInstance inst;
  inst.database = detail::copy_with_hash(d);
  std::size_t original = d.node_count();
  inst.source = detail::fresh_name(d, "src");
  inst.target = detail::fresh_name(d, "dst");
  NodeId u = inst.database.add_node(inst.source);
  NodeId v = inst.database.add_node(inst.target);
  LabelId hash = inst.database.alphabet().label_of('#');
  for (NodeId x = 0; x < original; ++x) {
    inst.database.insert_arc(u, hash, x);
    inst.database.insert_arc(x, hash, v);
  }
  inst.query = "#(" + query_text + ")#";
  return inst;
}

/// Check instance rewritten as a Boole instance: fresh s, t with arcs
/// (s,#,u) and (v,#,t), and query #q#.
struct BooleInstance {
  GraphDatabase database;
  std::string query;  // #q#
};

inline BooleInstance check_to_boole(const GraphDatabase& d, const std::string& query_text,
                                    NodeId u, NodeId v) {
  if (u >= d.node_count() || v >= d.node_count()) throw Error("unknown node");
  BooleInstance inst;
  inst.database = detail::copy_with_hash(d);
  NodeId s = inst.database.add_node(detail::fresh_name(d, "src"));
  NodeId t = inst.database.add_node(detail::fresh_name(d, "dst"));
  LabelId hash = inst.database.alphabet().label_of('#');
  inst.database.insert_arc(s, hash, u);
  inst.database.insert_arc(v, hash, t);
  inst.query = "#(" + query_text + ")#";
  return inst;
}

// --- independent oracle ------------------------------------------------------

/// q(D) by Floyd-Warshall-style reflexive-transitive closure over the
/// product's underlying graph (bit rows), then filtering start/final pairs.
/// Deliberately shares no traversal code with eval_all.
inline EvalResult oracle_eval(const GraphDatabase& d, const Nfa& m,
                              std::size_t max_product_nodes = 4096) {
  ProductGraph pg = build_product(d, m);
  const std::size_t n = pg.node_count();
  if (n > max_product_nodes) throw Error("oracle_eval instance above the configured bound");
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> reach(n * words, 0);
  auto set_bit = [&](std::size_t i, std::size_t j) { reach[i * words + j / 64] |= 1ull << (j % 64); };
  auto get_bit = [&](std::size_t i, std::size_t j) {
    return (reach[i * words + j / 64] >> (j % 64)) & 1u;
  };
  for (std::size_t i = 0; i < n; ++i) set_bit(i, i);  // reflexive closure
  pg.graph.for_each_arc([&](NodeId a, LabelId, NodeId b) { set_bit(a, b); });
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (get_bit(i, k)) {
        const std::uint64_t* rk = &reach[k * words];
        std::uint64_t* ri = &reach[i * words];
        for (std::size_t w = 0; w < words; ++w) ri[w] |= rk[w];
      }
  EvalResult result;
  for (NodeId u = 0; u < pg.db_nodes; ++u)
    for (NodeId v = 0; v < pg.db_nodes; ++v)
      if (get_bit(pg.start_of(u), pg.final_of(v))) result.pairs.emplace_back(u, v);
  return result;
}

}  // namespace rpq
