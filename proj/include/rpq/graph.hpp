#pragma once

// Edge-labelled multigraphs (Sigma-graphs) stored as per-label adjacency
// lists, and graph databases (Sigma-graphs without epsilon arcs) whose node
// declaration order doubles as the enumeration order on nodes.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rpq {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite alphabet of single-character symbols. Epsilon is not a member; it
/// is addressed by the per-graph label index `SigmaGraph::epsilon_label()`.
class Alphabet {
 public:
  Alphabet() { index_.fill(-1); }

  explicit Alphabet(std::string_view symbols) : Alphabet() {
    for (char c : symbols) add(c);
  }

  void add(char symbol) {
    auto& slot = index_[static_cast<unsigned char>(symbol)];
    if (slot >= 0) throw Error(std::string("duplicate alphabet symbol '") + symbol + "'");
    slot = static_cast<int>(symbols_.size());
    symbols_.push_back(symbol);
  }

  bool has(char symbol) const { return index_[static_cast<unsigned char>(symbol)] >= 0; }

  LabelId label_of(char symbol) const {
    int i = index_[static_cast<unsigned char>(symbol)];
    if (i < 0) throw Error(std::string("symbol '") + symbol + "' not in alphabet");
    return static_cast<LabelId>(i);
  }

  char symbol(LabelId label) const { return symbols_.at(label); }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<char>& symbols() const { return symbols_; }

  /// Copy of this alphabet with one more symbol (for the fresh `#` of the
  /// Boole/Check transformations).
  Alphabet extended(char symbol) const {
    Alphabet a = *this;
    a.add(symbol);
    return a;
  }

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<char> symbols_;
  std::array<int, 256> index_{};
};

/// Directed edge-labelled multigraph over Sigma plus epsilon. Nodes are dense
/// indices; per node and per label we keep the ordered list of successors.
/// The same structure represents graph databases, NFAs and product graphs.
class SigmaGraph {
 public:
  SigmaGraph() = default;
  explicit SigmaGraph(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  const Alphabet& alphabet() const { return alphabet_; }

  /// Label index reserved for epsilon arcs.
  LabelId epsilon_label() const { return static_cast<LabelId>(alphabet_.size()); }
  std::size_t label_count() const { return alphabet_.size() + 1; }

  std::size_t node_count() const { return adj_.size(); }
  std::size_t arc_count() const { return arc_count_; }

  /// size(G) = max(|V|, |E|).
  std::size_t size() const { return std::max(node_count(), arc_count()); }

  NodeId add_node() {
    adj_.emplace_back(label_count());
    return static_cast<NodeId>(adj_.size() - 1);
  }

  void add_nodes(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) add_node();
  }

  void add_arc(NodeId u, LabelId label, NodeId v) {
    check_node(u);
    check_node(v);
    if (label >= label_count()) throw Error("label out of range");
    adj_[u][label].push_back(v);
    ++arc_count_;
  }

  void add_epsilon_arc(NodeId u, NodeId v) { add_arc(u, epsilon_label(), v); }

  const std::vector<NodeId>& successors(NodeId u, LabelId label) const {
    return adj_[u][label];
  }

  /// Removes one occurrence of (u, label, v); false if absent.
  bool remove_arc(NodeId u, LabelId label, NodeId v) {
    auto& list = adj_[u][label];
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] == v) {
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
        --arc_count_;
        return true;
      }
    }
    return false;
  }

  template <typename Fn>  // Fn(NodeId u, LabelId x, NodeId v)
  void for_each_arc(Fn&& fn) const {
    for (NodeId u = 0; u < adj_.size(); ++u)
      for (LabelId x = 0; x < label_count(); ++x)
        for (NodeId v : adj_[u][x]) fn(u, x, v);
  }

  /// Graph with every arc (u, x, v) flipped to (v, x, u); node order kept.
  /// Single pass over all adjacency lists.
  SigmaGraph reversed() const {
    SigmaGraph r(alphabet_);
    r.adj_.resize(adj_.size(), std::vector<std::vector<NodeId>>(label_count()));
    for_each_arc([&](NodeId u, LabelId x, NodeId v) { r.adj_[v][x].push_back(u); });
    r.arc_count_ = arc_count_;
    return r;
  }

  /// Out-degree counting distinct successors across all labels (epsilon
  /// included).
  std::size_t degree(NodeId u, std::vector<NodeId>& stamp, NodeId token) const {
    std::size_t d = 0;
    for (LabelId x = 0; x < label_count(); ++x)
      for (NodeId v : adj_[u][x])
        if (stamp[v] != token) {
          stamp[v] = token;
          ++d;
        }
    return d;
  }

 private:
  void check_node(NodeId u) const {
    if (u >= adj_.size()) throw Error("node id out of range");
  }

  Alphabet alphabet_;
  std::vector<std::vector<std::vector<NodeId>>> adj_;
  std::size_t arc_count_ = 0;
};

inline SigmaGraph reverse(const SigmaGraph& g) { return g.reversed(); }

/// Degree statistics of a graph database. The average is kept exact as
/// degree_sum / node_count.
struct DegreeStats {
  std::size_t max_degree = 0;
  std::size_t degree_sum = 0;  // numerator of the average degree
  std::size_t node_count = 0;  // its denominator
  std::size_t arc_count = 0;   // labelled arcs, multiplicity after dedup

  double avg_degree() const {
    return node_count == 0 ? 0.0 : static_cast<double>(degree_sum) / static_cast<double>(node_count);
  }

  /// ceil(avg degree), at least 1; the factor used by enumeration caps.
  std::size_t avg_degree_ceil() const {
    if (node_count == 0 || degree_sum == 0) return 1;
    return (degree_sum + node_count - 1) / node_count;
  }
};

struct Update {
  enum class Kind { insert_arc, delete_arc, add_isolated_node, delete_isolated_node };

  Kind kind;
  std::string u;       // arc source / node id
  char label = '\0';   // arc label (arc kinds only)
  std::string v;       // arc target (arc kinds only)

  static Update insert_arc_of(std::string u, char x, std::string v) {
    return {Kind::insert_arc, std::move(u), x, std::move(v)};
  }
  static Update delete_arc_of(std::string u, char x, std::string v) {
    return {Kind::delete_arc, std::move(u), x, std::move(v)};
  }
  static Update add_node_of(std::string u) { return {Kind::add_isolated_node, std::move(u), '\0', {}}; }
  static Update delete_node_of(std::string u) { return {Kind::delete_isolated_node, std::move(u), '\0', {}}; }
};

/// A Sigma-graph without epsilon arcs plus the node order (declaration order
/// of the node list). Node identifiers are opaque strings at the boundary and
/// dense indices internally; the dense index order is the node order.
///
/// Duplicate (u, x, v) triples are never stored: loading dedups silently,
/// apply_update treats a duplicate insertion as an error.
class GraphDatabase {
 public:
  GraphDatabase() = default;
  explicit GraphDatabase(Alphabet alphabet) : graph_(std::move(alphabet)) {}

  const SigmaGraph& graph() const { return graph_; }
  const Alphabet& alphabet() const { return graph_.alphabet(); }
  std::size_t node_count() const { return graph_.node_count(); }
  std::size_t arc_count() const { return graph_.arc_count(); }
  std::size_t size() const { return graph_.size(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(NodeId u) const { return names_.at(u); }

  std::optional<NodeId> find_node(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeId require_node(std::string_view name) const {
    auto u = find_node(name);
    if (!u) throw Error("unknown node '" + std::string(name) + "'");
    return *u;
  }

  NodeId add_node(std::string name) {
    if (index_.count(name)) throw Error("node '" + name + "' declared twice");
    NodeId id = graph_.add_node();
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    in_degree_.push_back(0);
    return id;
  }

  bool contains_arc(NodeId u, LabelId x, NodeId v) const { return arcs_.count(arc_key(u, x, v)) != 0; }

  /// Inserts the arc unless already present; returns whether it was added.
  bool insert_arc(NodeId u, LabelId x, NodeId v) {
    if (x >= graph_.alphabet().size()) throw Error("label out of range for database arc");
    if (!arcs_.insert(arc_key(u, x, v)).second) return false;
    graph_.add_arc(u, x, v);
    ++in_degree_[v];
    return true;
  }

  bool insert_arc(NodeId u, char symbol, NodeId v) { return insert_arc(u, alphabet().label_of(symbol), v); }

  /// Version counter bumped by apply_update; live enumerators compare it to
  /// detect a stale database.
  std::uint64_t version() const { return version_; }

  void apply_update(const Update& up) {
    switch (up.kind) {
      case Update::Kind::insert_arc: {
        NodeId u = require_node(up.u), v = require_node(up.v);
        LabelId x = alphabet().label_of(up.label);
        if (!insert_arc(u, x, v))
          throw Error("arc " + up.u + " -" + up.label + "-> " + up.v + " already present");
        break;
      }
      case Update::Kind::delete_arc: {
        NodeId u = require_node(up.u), v = require_node(up.v);
        LabelId x = alphabet().label_of(up.label);
        if (!arcs_.erase(arc_key(u, x, v)))
          throw Error("arc " + up.u + " -" + up.label + "-> " + up.v + " does not exist");
        graph_.remove_arc(u, x, v);
        --in_degree_[v];
        break;
      }
      case Update::Kind::add_isolated_node:
        add_node(up.u);
        break;
      case Update::Kind::delete_isolated_node: {
        NodeId u = require_node(up.u);
        if (in_degree_[u] != 0 || out_degree_raw(u) != 0)
          throw Error("node '" + up.u + "' is not isolated");
        erase_node(u);
        break;
      }
    }
    ++version_;
  }

  DegreeStats degree_stats() const {
    DegreeStats s;
    s.node_count = node_count();
    s.arc_count = graph_.arc_count();
    std::vector<NodeId> stamp(node_count(), kNoNode);
    for (NodeId u = 0; u < node_count(); ++u) {
      std::size_t d = graph_.degree(u, stamp, u);
      s.degree_sum += d;
      s.max_degree = std::max(s.max_degree, d);
    }
    return s;
  }

 private:
  static std::uint64_t arc_key(NodeId u, LabelId x, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 42) | (static_cast<std::uint64_t>(x) << 21) |
           static_cast<std::uint64_t>(v);
  }

  std::size_t out_degree_raw(NodeId u) const {
    std::size_t d = 0;
    for (LabelId x = 0; x < graph_.label_count(); ++x) d += graph_.successors(u, x).size();
    return d;
  }

  // Node deletion compacts the dense id space; arcs cannot reference the node
  // (it is isolated), so only ids above it shift.
  void erase_node(NodeId u) {
    SigmaGraph next(graph_.alphabet());
    next.add_nodes(graph_.node_count() - 1);
    auto shift = [u](NodeId w) { return w > u ? w - 1 : w; };
    std::unordered_set<std::uint64_t> arcs;
    graph_.for_each_arc([&](NodeId a, LabelId x, NodeId b) {
      next.add_arc(shift(a), x, shift(b));
      arcs.insert(arc_key(shift(a), x, shift(b)));
    });
    graph_ = std::move(next);
    arcs_ = std::move(arcs);
    index_.erase(names_[u]);
    names_.erase(names_.begin() + u);
    in_degree_.erase(in_degree_.begin() + u);
    for (auto& [name, id] : index_)
      if (id > u) --id;
  }

  SigmaGraph graph_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::unordered_set<std::uint64_t> arcs_;
  std::vector<std::uint32_t> in_degree_;
  std::uint64_t version_ = 0;
};

inline DegreeStats degree_stats(const GraphDatabase& d) { return d.degree_stats(); }

struct WellFormed {
  GraphDatabase database;       // node ids "1".."n", order = numeric order
  std::vector<std::string> iso; // iso[i] = original id of node i+1
};

/// Order-preserving relabelling to ids 1..n plus the isomorphism back to the
/// original identifiers (the arc structure is already dense internally).
inline WellFormed well_form(const GraphDatabase& d) {
  WellFormed w;
  w.database = GraphDatabase(d.alphabet());
  w.iso.reserve(d.node_count());
  for (NodeId u = 0; u < d.node_count(); ++u) {
    w.database.add_node(std::to_string(u + 1));
    w.iso.push_back(d.name(u));
  }
  d.graph().for_each_arc([&](NodeId u, LabelId x, NodeId v) { w.database.insert_arc(u, x, v); });
  return w;
}

// --- edge-list text format -------------------------------------------------
//
//   # comment
//   alphabet a b c
//   node <id>            (order defines the node order)
//   edge <src> <label> <dst>

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline GraphDatabase load_edge_list(std::string_view text) {
  GraphDatabase db;
  bool have_alphabet = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fail = [&](const std::string& msg) -> void {
      throw Error("line " + std::to_string(line_no) + ": " + msg);
    };
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') {
      if (pos > text.size()) break;
      continue;
    }
    if (!have_alphabet) {
      if (tokens[0] != "alphabet") fail("expected 'alphabet' header line");
      Alphabet a;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].size() != 1) fail("alphabet symbols are single characters");
        a.add(tokens[i][0]);
      }
      db = GraphDatabase(std::move(a));
      have_alphabet = true;
    } else if (tokens[0] == "node") {
      if (tokens.size() != 2) fail("expected 'node <id>'");
      db.add_node(std::string(tokens[1]));
    } else if (tokens[0] == "edge") {
      if (tokens.size() != 4) fail("expected 'edge <src> <label> <dst>'");
      if (tokens[2].size() != 1 || !db.alphabet().has(tokens[2][0]))
        fail("label '" + std::string(tokens[2]) + "' not declared in alphabet");
      auto u = db.find_node(tokens[1]);
      if (!u) fail("edge references undeclared node '" + std::string(tokens[1]) + "'");
      auto v = db.find_node(tokens[3]);
      if (!v) fail("edge references undeclared node '" + std::string(tokens[3]) + "'");
      db.insert_arc(*u, db.alphabet().label_of(tokens[2][0]), *v);  // duplicates fold
    } else {
      fail("unknown directive '" + std::string(tokens[0]) + "'");
    }
    if (pos > text.size()) break;
  }
  if (!have_alphabet) throw Error("empty input: missing alphabet header");
  return db;
}

/// Normalised form: nodes in declaration order, arcs grouped by source, then
/// by alphabet order, targets in list order. save(load(t)) is a fixpoint.
inline std::string save_edge_list(const GraphDatabase& db) {
  std::ostringstream out;
  out << "alphabet";
  for (char c : db.alphabet().symbols()) out << ' ' << c;
  out << '\n';
  for (NodeId u = 0; u < db.node_count(); ++u) out << "node " << db.name(u) << '\n';
  for (NodeId u = 0; u < db.node_count(); ++u)
    for (LabelId x = 0; x < db.alphabet().size(); ++x)
      for (NodeId v : db.graph().successors(u, x))
        out << "edge " << db.name(u) << ' ' << db.alphabet().symbol(x) << ' ' << db.name(v) << '\n';
  return out.str();
}

}  // namespace rpq
