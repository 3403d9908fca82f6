#pragma once

// Product graph of a database and an NFA, with the dense (u, p) <-> index
// bijection every evaluator and enumerator addresses its arrays by.

#include <vector>

#include "rpq/graph.hpp"
#include "rpq/query.hpp"

namespace rpq {

/// Graph on V_D x V_q: an arc ((u,p), x, (v,p')) exists iff (u,x,v) is a
/// database arc and (p,x,p') an NFA arc, plus epsilon arcs ((u,p), (u,p'))
/// for every NFA arc (p, eps, p'). Node (u, p) has dense index
/// u * state_count + p.
struct ProductGraph {
  SigmaGraph graph;
  std::size_t db_nodes = 0;
  std::size_t states = 0;
  NodeId start_state = kNoNode;
  NodeId final_state = kNoNode;

  NodeId index(NodeId u, NodeId p) const { return static_cast<NodeId>(u * states + p); }
  NodeId db_node(NodeId product_node) const { return static_cast<NodeId>(product_node / states); }
  NodeId state(NodeId product_node) const { return static_cast<NodeId>(product_node % states); }
  NodeId start_of(NodeId u) const { return index(u, start_state); }
  NodeId final_of(NodeId u) const { return index(u, final_state); }
  std::size_t node_count() const { return db_nodes * states; }
};

inline ProductGraph build_product(const GraphDatabase& d, const Nfa& m) {
  if (!(d.alphabet() == m.graph.alphabet()))
    throw Error("database and query alphabets differ");
  ProductGraph pg;
  pg.db_nodes = d.node_count();
  pg.states = m.state_count();
  pg.start_state = m.start;
  pg.final_state = m.final;
  pg.graph = SigmaGraph(d.alphabet());
  pg.graph.add_nodes(pg.node_count());

  const SigmaGraph& dg = d.graph();
  const SigmaGraph& qg = m.graph;
  const LabelId eps = qg.epsilon_label();
  for (NodeId u = 0; u < pg.db_nodes; ++u) {
    for (LabelId x = 0; x < d.alphabet().size(); ++x) {
      const auto& dsucc = dg.successors(u, x);
      if (dsucc.empty()) continue;
      for (NodeId p = 0; p < pg.states; ++p)
        for (NodeId pp : qg.successors(p, x))
          for (NodeId v : dsucc) pg.graph.add_arc(pg.index(u, p), x, pg.index(v, pp));
    }
    for (NodeId p = 0; p < pg.states; ++p)
      for (NodeId pp : qg.successors(p, eps))
        pg.graph.add_arc(pg.index(u, p), pg.graph.epsilon_label(), pg.index(u, pp));
  }
  return pg;
}

/// BFS over the underlying (unlabelled) graph from `from`; fills `visited`
/// (a node_count-sized array of 0/1). Starts are pre-marked by the caller.
inline void bfs_underlying(const SigmaGraph& g, std::vector<NodeId>& queue,
                           std::vector<char>& visited) {
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId w = queue[head];
    for (LabelId x = 0; x < g.label_count(); ++x)
      for (NodeId t : g.successors(w, x))
        if (!visited[t]) {
          visited[t] = 1;
          queue.push_back(t);
        }
  }
}

/// (u, v) is an answer iff (v, final) is in the reflexive-transitive closure
/// from (u, start).
inline bool pair_reachable(const ProductGraph& pg, NodeId u, NodeId v) {
  if (u >= pg.db_nodes || v >= pg.db_nodes) throw Error("unknown node");
  std::vector<char> visited(pg.node_count(), 0);
  std::vector<NodeId> queue;
  NodeId s = pg.start_of(u);
  visited[s] = 1;
  queue.push_back(s);
  bfs_underlying(pg.graph, queue, visited);
  return visited[pg.final_of(v)] != 0;
}

/// Debug dump in the edge-list format; product nodes are named "u.p" and
/// epsilon arcs carry the first free printable symbol.
inline std::string dump_product(const ProductGraph& pg) {
  char eps_sym = 0;
  for (char c : std::string_view{"e%_.~^"})
    if (!pg.graph.alphabet().has(c)) {
      eps_sym = c;
      break;
    }
  if (!eps_sym) throw Error("no free symbol for the epsilon arcs of the dump");
  GraphDatabase out(pg.graph.alphabet().extended(eps_sym));
  for (NodeId u = 0; u < pg.db_nodes; ++u)
    for (NodeId p = 0; p < pg.states; ++p)
      out.add_node(std::to_string(u + 1) + "." + std::to_string(p));
  const LabelId eps = pg.graph.epsilon_label();
  pg.graph.for_each_arc([&](NodeId a, LabelId x, NodeId b) {
    char sym = x == eps ? eps_sym : pg.graph.alphabet().symbol(x);
    out.insert_arc(a, out.alphabet().label_of(sym), b);
  });
  return save_edge_list(out);
}

}  // namespace rpq
