#pragma once

// Fine-grained reduction constructions packaged as instance generators and
// correctness oracles: orthogonal vectors, triangle detection, (sparse)
// Boolean matrix multiplication and online matrix-vector multiplication, each
// with a decoder from engine output back to the source problem and an
// independent brute-force solver.

#include <string>
#include <vector>

#include "rpq/eval.hpp"
#include "rpq/graph.hpp"

namespace rpq {

using BitVector = std::vector<std::uint8_t>;
using BitMatrix = std::vector<BitVector>;

struct OvInstance {
  std::size_t n = 0, d = 0;
  BitMatrix a, b;  // n vectors of dimension d each
};

struct BmmInstance {
  std::size_t n = 0;
  BitMatrix a, b;  // n x n
};

struct TriInstance {
  std::size_t n = 0;
  BitMatrix adj;  // symmetric, zero diagonal
};

struct OmvInstance {
  std::size_t n = 0;
  BitMatrix m;       // n x n
  BitMatrix vectors; // n rounds of n-dimensional vectors
};

// --- brute-force solvers -----------------------------------------------------

inline bool ov_brute(const OvInstance& inst) {
  for (const auto& a : inst.a)
    for (const auto& b : inst.b) {
      bool orthogonal = true;
      for (std::size_t k = 0; k < inst.d; ++k)
        if (a[k] && b[k]) {
          orthogonal = false;
          break;
        }
      if (orthogonal) return true;
    }
  return false;
}

inline bool tri_brute_at(const TriInstance& inst, std::size_t v) {
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = i + 1; j < inst.n; ++j)
      if (inst.adj[v][i] && inst.adj[v][j] && inst.adj[i][j]) return true;
  return false;
}

inline bool tri_brute(const TriInstance& inst) {
  for (std::size_t v = 0; v < inst.n; ++v)
    if (tri_brute_at(inst, v)) return true;
  return false;
}

/// Works for rectangular operands as well (rows(a) x cols(b)).
inline BitMatrix bmm_brute(const BitMatrix& a, const BitMatrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = rows == 0 ? 0 : a[0].size();
  const std::size_t cols = inner == 0 || b.empty() ? 0 : b[0].size();
  BitMatrix c(rows, BitVector(cols, 0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < cols; ++j)
          if (b[k][j]) c[i][j] = 1;
  return c;
}

inline BitMatrix bmm_brute(const BmmInstance& inst) { return bmm_brute(inst.a, inst.b); }

inline BitMatrix omv_brute(const OmvInstance& inst) {
  BitMatrix out(inst.vectors.size(), BitVector(inst.n, 0));
  for (std::size_t r = 0; r < inst.vectors.size(); ++r)
    for (std::size_t i = 0; i < inst.n; ++i)
      for (std::size_t j = 0; j < inst.n; ++j)
        if (inst.m[i][j] && inst.vectors[r][j]) {
          out[r][i] = 1;
          break;
        }
  return out;
}

// --- OV -> Check ---------------------------------------------------------------

/// One chain per A-vector over {0,1} where position j admits symbol 1 only
/// when the vector is 0 there; B's vectors become the words of the query
/// #(w1|...|wn)#. An orthogonal pair exists iff (s, t) is an answer.
struct OvCheckReduction {
  GraphDatabase database;
  std::string query;
  std::string source = "s", target = "t";
};

inline OvCheckReduction ov_to_check(const OvInstance& inst) {
  OvCheckReduction red;
  red.database = GraphDatabase(Alphabet("01#"));
  GraphDatabase& db = red.database;
  NodeId s = db.add_node("s");
  std::vector<std::vector<NodeId>> chain(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = 0; j <= inst.d; ++j)
      chain[i].push_back(db.add_node("v" + std::to_string(i + 1) + "_" + std::to_string(j)));
  NodeId t = db.add_node("t");
  LabelId zero = db.alphabet().label_of('0');
  LabelId one = db.alphabet().label_of('1');
  LabelId hash = db.alphabet().label_of('#');
  for (std::size_t i = 0; i < inst.n; ++i) {
    for (std::size_t j = 0; j < inst.d; ++j) {
      db.insert_arc(chain[i][j], zero, chain[i][j + 1]);
      if (inst.a[i][j] == 0) db.insert_arc(chain[i][j], one, chain[i][j + 1]);
    }
    db.insert_arc(s, hash, chain[i][0]);
    db.insert_arc(chain[i][inst.d], hash, t);
  }
  std::string words;
  for (std::size_t i = 0; i < inst.n; ++i) {
    if (i) words += '|';
    for (std::size_t j = 0; j < inst.d; ++j) words += inst.b[i][j] ? '1' : '0';
  }
  red.query = "#(" + words + ")#";
  return red;
}

// --- Triangle -> Boole ---------------------------------------------------------

/// Four vertex-copy layers joined by the graph's edges, an s-chain feeding
/// layer 0 and a t-chain collecting layer 3; every s'-t' path is labelled
/// # a^{i+n-j+4} #, so q = # a^{n+4} # is nonempty iff some i-i-path, i.e.
/// some triangle, exists.
struct TriBooleReduction {
  GraphDatabase database;
  std::string query;
};

namespace detail {

inline std::string layer_name(std::size_t v, std::size_t layer) {
  return "u" + std::to_string(v + 1) + "_" + std::to_string(layer);
}

// The shared four-layer part: ((u,i), a, (u',i+1)) for each undirected edge.
inline void add_layer_arcs(GraphDatabase& db, const TriInstance& inst) {
  LabelId a = db.alphabet().label_of('a');
  for (std::size_t u = 0; u < inst.n; ++u)
    for (std::size_t v = 0; v < inst.n; ++v)
      if (inst.adj[u][v])
        for (std::size_t layer = 0; layer < 3; ++layer)
          db.insert_arc(db.require_node(layer_name(u, layer)), a,
                        db.require_node(layer_name(v, layer + 1)));
}

}  // namespace detail

inline TriBooleReduction tri_to_boole(const TriInstance& inst) {
  TriBooleReduction red;
  red.database = GraphDatabase(Alphabet("a#"));
  GraphDatabase& db = red.database;
  const std::size_t n = inst.n;
  db.add_node("s'");
  for (std::size_t j = 0; j < n; ++j) db.add_node("s" + std::to_string(j + 1));
  for (std::size_t j = 0; j < n; ++j) db.add_node("t" + std::to_string(j + 1));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t layer = 0; layer <= 3; ++layer) db.add_node(detail::layer_name(v, layer));
  db.add_node("t'");

  LabelId a = db.alphabet().label_of('a');
  LabelId hash = db.alphabet().label_of('#');
  detail::add_layer_arcs(db, inst);
  if (n > 0) {
    db.insert_arc(db.require_node("s'"), hash, db.require_node("s1"));
    db.insert_arc(db.require_node("t" + std::to_string(n)), hash, db.require_node("t'"));
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    db.insert_arc(db.require_node("s" + std::to_string(j + 1)), a,
                  db.require_node("s" + std::to_string(j + 2)));
    db.insert_arc(db.require_node("t" + std::to_string(j + 1)), a,
                  db.require_node("t" + std::to_string(j + 2)));
  }
  for (std::size_t j = 0; j < n; ++j) {
    db.insert_arc(db.require_node("s" + std::to_string(j + 1)), a,
                  db.require_node(detail::layer_name(j, 0)));
    db.insert_arc(db.require_node(detail::layer_name(j, 3)), a,
                  db.require_node("t" + std::to_string(j + 1)));
  }
  red.query = "#" + std::string(n + 4, 'a') + "#";
  return red;
}

// --- BMM -> Eval ----------------------------------------------------------------

/// Three layers r_i -> m_k -> c_j with arcs at the matrices' 1-entries and
/// q = aa; the decoded answer matrix has C[i][j] = 1 iff (r_i, c_j) is in the
/// result. In sparse mode only nodes incident to a 1-entry exist; the decode
/// is unchanged.
struct BmmEvalReduction {
  GraphDatabase database;
  std::string query = "aa";
  std::size_t rows = 0, inner = 0, cols = 0;

  BitMatrix decode(const EvalResult& result) const {
    BitMatrix c(rows, BitVector(cols, 0));
    for (auto [u, v] : result.pairs) {
      const std::string& un = database.name(u);
      const std::string& vn = database.name(v);
      if (un.size() < 2 || vn.size() < 2 || un[0] != 'r' || vn[0] != 'c') continue;
      c[std::stoul(un.substr(1)) - 1][std::stoul(vn.substr(1)) - 1] = 1;
    }
    return c;
  }
};

namespace detail {

inline BmmEvalReduction bmm_layers(const BitMatrix& a, const BitMatrix& b, bool sparse) {
  BmmEvalReduction red;
  red.rows = a.size();
  red.inner = a.empty() ? 0 : a[0].size();
  red.cols = b.empty() ? 0 : b[0].size();
  red.database = GraphDatabase(Alphabet("a"));
  GraphDatabase& db = red.database;

  auto row_nonzero = [](const BitMatrix& m, std::size_t i) {
    for (std::uint8_t bit : m[i])
      if (bit) return true;
    return false;
  };
  auto col_nonzero = [](const BitMatrix& m, std::size_t j) {
    for (const auto& row : m)
      if (row[j]) return true;
    return false;
  };

  for (std::size_t i = 0; i < red.rows; ++i)
    if (!sparse || row_nonzero(a, i)) db.add_node("r" + std::to_string(i + 1));
  for (std::size_t k = 0; k < red.inner; ++k)
    if (!sparse || col_nonzero(a, k) || (k < b.size() && row_nonzero(b, k)))
      db.add_node("m" + std::to_string(k + 1));
  for (std::size_t j = 0; j < red.cols; ++j)
    if (!sparse || col_nonzero(b, j)) db.add_node("c" + std::to_string(j + 1));

  LabelId lab = db.alphabet().label_of('a');
  for (std::size_t i = 0; i < red.rows; ++i)
    for (std::size_t k = 0; k < red.inner; ++k)
      if (a[i][k])
        db.insert_arc(db.require_node("r" + std::to_string(i + 1)), lab,
                      db.require_node("m" + std::to_string(k + 1)));
  for (std::size_t k = 0; k < b.size(); ++k)
    for (std::size_t j = 0; j < red.cols; ++j)
      if (b[k][j])
        db.insert_arc(db.require_node("m" + std::to_string(k + 1)), lab,
                      db.require_node("c" + std::to_string(j + 1)));
  return red;
}

}  // namespace detail

inline BmmEvalReduction bmm_to_eval(const BmmInstance& inst) {
  return detail::bmm_layers(inst.a, inst.b, /*sparse=*/false);
}

inline BmmEvalReduction sbmm_to_eval(const BmmInstance& inst) {
  return detail::bmm_layers(inst.a, inst.b, /*sparse=*/true);
}

// --- OV -> Count -----------------------------------------------------------------

/// A's vectors as rows, B's vectors as columns, then the dense BMM layers;
/// the count equals n^2 minus the number of orthogonal pairs.
struct OvCountReduction {
  GraphDatabase database;
  std::string query = "aa";
  std::size_t n = 0;

  bool no_orthogonal_pair(std::size_t counted) const { return counted == n * n; }
  std::size_t orthogonal_pairs(std::size_t counted) const { return n * n - counted; }
};

inline OvCountReduction ov_to_count(const OvInstance& inst) {
  OvCountReduction red;
  red.n = inst.n;
  BitMatrix a_rows = inst.a;                                   // n x d
  BitMatrix b_cols(inst.d, BitVector(inst.n, 0));              // d x n
  for (std::size_t j = 0; j < inst.n; ++j)
    for (std::size_t k = 0; k < inst.d; ++k) b_cols[k][j] = inst.b[j][k];
  red.database = detail::bmm_layers(a_rows, b_cols, /*sparse=*/false).database;
  return red;
}

// --- update scripts ----------------------------------------------------------------

struct ScriptStep {
  enum class Kind { update, checkpoint };
  Kind kind;
  Update update{Update::Kind::insert_arc, "", '\0', ""};

  static ScriptStep of(Update u) { return {Kind::update, std::move(u)}; }
  static ScriptStep enumerate() { return {Kind::checkpoint, {}}; }
};

using UpdateScript = std::vector<ScriptStep>;

// --- OMv -> dynamic enumeration -----------------------------------------------------

/// Builds D_{M,v^1} from the empty database with O(n^2) updates, then swaps
/// only the changed vector arcs per round; after the checkpoint of round r,
/// the enumeration of q = aa decodes to M v^r via the pairs (u_i, w).
struct OmvDynamicReduction {
  GraphDatabase initial;  // empty database over {a}
  UpdateScript script;
  std::string query = "aa";
  std::size_t n = 0;

  BitVector decode_round(const GraphDatabase& db, const std::vector<NodePair>& pairs) const {
    BitVector out(n, 0);
    for (auto [u, v] : pairs) {
      const std::string& un = db.name(u);
      if (un.size() >= 2 && un[0] == 'u' && db.name(v) == "w") out[std::stoul(un.substr(1)) - 1] = 1;
    }
    return out;
  }
};

inline OmvDynamicReduction omv_to_dynamic_enum(const OmvInstance& inst) {
  OmvDynamicReduction red;
  red.n = inst.n;
  red.initial = GraphDatabase(Alphabet("a"));
  UpdateScript& s = red.script;
  auto u_name = [](std::size_t i) { return "u" + std::to_string(i + 1); };
  auto v_name = [](std::size_t j) { return "v" + std::to_string(j + 1); };
  for (std::size_t i = 0; i < inst.n; ++i) s.push_back(ScriptStep::of(Update::add_node_of(u_name(i))));
  for (std::size_t j = 0; j < inst.n; ++j) s.push_back(ScriptStep::of(Update::add_node_of(v_name(j))));
  s.push_back(ScriptStep::of(Update::add_node_of("w")));
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = 0; j < inst.n; ++j)
      if (inst.m[i][j]) s.push_back(ScriptStep::of(Update::insert_arc_of(u_name(i), 'a', v_name(j))));
  for (std::size_t j = 0; j < inst.n; ++j)
    if (inst.vectors[0][j]) s.push_back(ScriptStep::of(Update::insert_arc_of(v_name(j), 'a', "w")));
  s.push_back(ScriptStep::enumerate());
  for (std::size_t r = 1; r < inst.vectors.size(); ++r) {
    for (std::size_t j = 0; j < inst.n; ++j) {
      if (inst.vectors[r - 1][j] && !inst.vectors[r][j])
        s.push_back(ScriptStep::of(Update::delete_arc_of(v_name(j), 'a', "w")));
      else if (!inst.vectors[r - 1][j] && inst.vectors[r][j])
        s.push_back(ScriptStep::of(Update::insert_arc_of(v_name(j), 'a', "w")));
    }
    s.push_back(ScriptStep::enumerate());
  }
  return red;
}

// --- Triangle -> dynamic enumeration -------------------------------------------------

/// Four vertex-copy layers; round r keeps only the attachment arcs
/// s -> (v_r, 0) and (v_r, 3) -> t, so q = aaaaa is nonempty at the round's
/// checkpoint iff some triangle contains v_r.
struct TriDynamicReduction {
  GraphDatabase initial;  // D_{v_1}
  UpdateScript script;    // checkpoint per round, constant-size updates between
  std::string query = "aaaaa";
  std::size_t n = 0;

  bool decode_round(const std::vector<NodePair>& pairs) const { return !pairs.empty(); }
};

inline TriDynamicReduction tri_to_dynamic_enum(const TriInstance& inst) {
  TriDynamicReduction red;
  red.n = inst.n;
  red.initial = GraphDatabase(Alphabet("a"));
  GraphDatabase& db = red.initial;
  db.add_node("s");
  for (std::size_t v = 0; v < inst.n; ++v)
    for (std::size_t layer = 0; layer <= 3; ++layer) db.add_node(detail::layer_name(v, layer));
  db.add_node("t");
  detail::add_layer_arcs(db, inst);
  LabelId a = db.alphabet().label_of('a');
  if (inst.n > 0) {
    db.insert_arc(db.require_node("s"), a, db.require_node(detail::layer_name(0, 0)));
    db.insert_arc(db.require_node(detail::layer_name(0, 3)), a, db.require_node("t"));
  }
  red.script.push_back(ScriptStep::enumerate());
  for (std::size_t r = 1; r < inst.n; ++r) {
    red.script.push_back(
        ScriptStep::of(Update::delete_arc_of("s", 'a', detail::layer_name(r - 1, 0))));
    red.script.push_back(
        ScriptStep::of(Update::delete_arc_of(detail::layer_name(r - 1, 3), 'a', "t")));
    red.script.push_back(ScriptStep::of(Update::insert_arc_of("s", 'a', detail::layer_name(r, 0))));
    red.script.push_back(ScriptStep::of(Update::insert_arc_of(detail::layer_name(r, 3), 'a', "t")));
    red.script.push_back(ScriptStep::enumerate());
  }
  return red;
}

}  // namespace rpq
