#pragma once

// Seeded random graph families for the benchmark sweeps, random reduction
// instances, and random query generation.

#include <algorithm>
#include <random>
#include <string>

#include "rpq/graph.hpp"
#include "rpq/query.hpp"
#include "rpq/reductions.hpp"

namespace rpq {

using Rng = std::mt19937_64;

namespace detail {

inline GraphDatabase fresh_database(std::size_t n, std::string_view alphabet) {
  GraphDatabase db{Alphabet(alphabet)};
  for (std::size_t i = 0; i < n; ++i) db.add_node(std::to_string(i + 1));
  return db;
}

}  // namespace detail

/// Constant average degree: `avg_out` arcs per node to uniform targets with
/// uniform labels (duplicates fold, so the realised degree can be lower).
inline GraphDatabase sparse_random(std::size_t n, std::size_t avg_out, std::string_view alphabet,
                                   Rng& rng) {
  GraphDatabase db = detail::fresh_database(n, alphabet);
  if (n == 0) return db;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  std::uniform_int_distribution<std::size_t> label(0, db.alphabet().size() - 1);
  for (NodeId u = 0; u < n; ++u)
    for (std::size_t k = 0; k < avg_out; ++k)
      db.insert_arc(u, static_cast<LabelId>(label(rng)), node(rng));
  return db;
}

/// Constant edge probability: every ordered pair carries an arc with
/// probability `prob`, labelled uniformly.
inline GraphDatabase dense_random(std::size_t n, double prob, std::string_view alphabet, Rng& rng) {
  GraphDatabase db = detail::fresh_database(n, alphabet);
  std::bernoulli_distribution arc(prob);
  std::uniform_int_distribution<std::size_t> label(0, db.alphabet().size() - 1);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (arc(rng)) db.insert_arc(u, static_cast<LabelId>(label(rng)), v);
  return db;
}

/// BMM-shaped: three layers of n nodes, a-arcs layer 1 -> 2 and 2 -> 3, each
/// present with probability `prob`.
inline GraphDatabase bipartite_random(std::size_t n, double prob, Rng& rng) {
  GraphDatabase db = detail::fresh_database(3 * n, "a");
  std::bernoulli_distribution arc(prob);
  LabelId a = db.alphabet().label_of('a');
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j) {
      if (arc(rng)) db.insert_arc(i, a, static_cast<NodeId>(n + j));
      if (arc(rng)) db.insert_arc(static_cast<NodeId>(n + i), a, static_cast<NodeId>(2 * n + j));
    }
  return db;
}

/// Every node gets exactly `delta` distinct successors (so the max degree is
/// `delta`), the first arcs covering each alphabet symbol once, the rest
/// labelled uniformly.
inline GraphDatabase bounded_degree_random(std::size_t n, std::size_t delta,
                                           std::string_view alphabet, Rng& rng) {
  GraphDatabase db = detail::fresh_database(n, alphabet);
  if (n <= 1) return db;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  std::uniform_int_distribution<std::size_t> label(0, db.alphabet().size() - 1);
  std::size_t want = std::min(delta, n - 1);
  std::vector<NodeId> targets;
  for (NodeId u = 0; u < n; ++u) {
    targets.clear();
    while (targets.size() < want) {
      NodeId v = node(rng);
      if (std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
      LabelId x = k < db.alphabet().size() ? static_cast<LabelId>(k)
                                           : static_cast<LabelId>(label(rng));
      db.insert_arc(u, x, targets[k]);
    }
  }
  return db;
}

/// Uniform random database for the oracle-equivalence sweeps: up to
/// `max_arcs` arcs over `n` nodes.
inline GraphDatabase random_database(std::size_t n, std::size_t max_arcs, std::string_view alphabet,
                                     Rng& rng) {
  GraphDatabase db = detail::fresh_database(n, alphabet);
  if (n == 0) return db;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  std::uniform_int_distribution<std::size_t> label(0, db.alphabet().size() - 1);
  std::uniform_int_distribution<std::size_t> arcs(0, max_arcs);
  std::size_t m = arcs(rng);
  for (std::size_t k = 0; k < m; ++k)
    db.insert_arc(node(rng), static_cast<LabelId>(label(rng)), node(rng));
  return db;
}

// --- random queries -----------------------------------------------------------

/// Renders an AST back to query syntax (fully parenthesised; reparsing yields
/// the identical tree).
inline std::string ast_to_string(const AstNode& n) {
  switch (n.kind) {
    case AstKind::literal:
      return std::string(1, n.symbol);
    case AstKind::epsilon:
      return "%";
    case AstKind::concat:
      return "(" + ast_to_string(*n.left) + ast_to_string(*n.right) + ")";
    case AstKind::alt:
      return "(" + ast_to_string(*n.left) + "|" + ast_to_string(*n.right) + ")";
    case AstKind::plus:
      return "(" + ast_to_string(*n.left) + ")+";
  }
  return {};
}

/// Random desugared AST of the given depth bound over the alphabet.
inline std::unique_ptr<AstNode> random_ast(std::size_t max_depth, const Alphabet& alphabet,
                                           Rng& rng) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
  int k = max_depth <= 1 ? kind(rng) % 2 : kind(rng);
  switch (k) {
    case 0:
      return AstNode::epsilon();
    case 1:
    case 2:
    case 3:
      return AstNode::literal(alphabet.symbol(sym(rng)));
    case 4:
    case 5:
      return AstNode::concat(random_ast(max_depth - 1, alphabet, rng),
                             random_ast(max_depth - 1, alphabet, rng));
    case 6:
    case 7:
      return AstNode::alt(random_ast(max_depth - 1, alphabet, rng),
                          random_ast(max_depth - 1, alphabet, rng));
    default:
      return AstNode::plus(random_ast(max_depth - 1, alphabet, rng));
  }
}

inline RegexAst random_query(std::size_t max_depth, const Alphabet& alphabet, Rng& rng) {
  RegexAst q;
  q.root = random_ast(max_depth, alphabet, rng);
  q.text = ast_to_string(*q.root);
  return q;
}

// --- random reduction instances -------------------------------------------------

inline BitVector random_bits(std::size_t d, double density, Rng& rng) {
  std::bernoulli_distribution bit(density);
  BitVector v(d);
  for (auto& b : v) b = bit(rng) ? 1 : 0;
  return v;
}

inline OvInstance random_ov(std::size_t n, std::size_t d, Rng& rng, double density = 0.5) {
  OvInstance inst{n, d, {}, {}};
  for (std::size_t i = 0; i < n; ++i) inst.a.push_back(random_bits(d, density, rng));
  for (std::size_t i = 0; i < n; ++i) inst.b.push_back(random_bits(d, density, rng));
  return inst;
}

inline BmmInstance random_bmm(std::size_t n, Rng& rng, double density = 0.4) {
  BmmInstance inst{n, {}, {}};
  for (std::size_t i = 0; i < n; ++i) inst.a.push_back(random_bits(n, density, rng));
  for (std::size_t i = 0; i < n; ++i) inst.b.push_back(random_bits(n, density, rng));
  return inst;
}

inline TriInstance random_tri(std::size_t n, Rng& rng, double density = 0.3) {
  TriInstance inst{n, BitMatrix(n, BitVector(n, 0))};
  std::bernoulli_distribution edge(density);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) inst.adj[i][j] = inst.adj[j][i] = 1;
  return inst;
}

inline OmvInstance random_omv(std::size_t n, Rng& rng, double density = 0.4) {
  OmvInstance inst{n, {}, {}};
  for (std::size_t i = 0; i < n; ++i) inst.m.push_back(random_bits(n, density, rng));
  for (std::size_t r = 0; r < n; ++r) inst.vectors.push_back(random_bits(n, density, rng));
  return inst;
}

}  // namespace rpq
