#pragma once

// Regular path query syntax: parsing into an AST, the single-start /
// single-final NFA construction, and the syntactic classification used by the
// restricted enumerators.
//
// Grammar (lowest to highest precedence): alternation '|', concatenation by
// juxtaposition, postfix '+' and '*'; parentheses group; epsilon is written
// '%'. 'a*' is desugared to '(a+|%)' during parsing.

#include <cassert>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rpq/graph.hpp"

namespace rpq {

enum class AstKind { literal, epsilon, concat, alt, plus };

struct AstNode {
  AstKind kind;
  char symbol = '\0';  // literal only
  std::unique_ptr<AstNode> left;   // concat/alt left, plus child
  std::unique_ptr<AstNode> right;  // concat/alt right

  static std::unique_ptr<AstNode> literal(char c) {
    auto n = std::make_unique<AstNode>();
    n->kind = AstKind::literal;
    n->symbol = c;
    return n;
  }
  static std::unique_ptr<AstNode> epsilon() {
    auto n = std::make_unique<AstNode>();
    n->kind = AstKind::epsilon;
    return n;
  }
  static std::unique_ptr<AstNode> concat(std::unique_ptr<AstNode> l, std::unique_ptr<AstNode> r) {
    auto n = std::make_unique<AstNode>();
    n->kind = AstKind::concat;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
  }
  static std::unique_ptr<AstNode> alt(std::unique_ptr<AstNode> l, std::unique_ptr<AstNode> r) {
    auto n = std::make_unique<AstNode>();
    n->kind = AstKind::alt;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
  }
  static std::unique_ptr<AstNode> plus(std::unique_ptr<AstNode> child) {
    auto n = std::make_unique<AstNode>();
    n->kind = AstKind::plus;
    n->left = std::move(child);
    return n;
  }

  std::unique_ptr<AstNode> clone() const {
    auto n = std::make_unique<AstNode>();
    n->kind = kind;
    n->symbol = symbol;
    if (left) n->left = left->clone();
    if (right) n->right = right->clone();
    return n;
  }
};

inline std::size_t ast_node_count(const AstNode& n) {
  std::size_t c = 1;
  if (n.left) c += ast_node_count(*n.left);
  if (n.right) c += ast_node_count(*n.right);
  return c;
}

/// A parsed query: desugared AST plus the source text (whose length is the
/// |q| used for cost accounting).
struct RegexAst {
  std::unique_ptr<AstNode> root;
  std::string text;

  std::size_t expression_length() const { return text.size(); }
  std::size_t node_count() const { return root ? ast_node_count(*root) : 0; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)), position(position) {}
  std::size_t position;
};

namespace detail {

class RpqParser {
 public:
  RpqParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  std::unique_ptr<AstNode> parse() {
    auto node = parse_alt();
    if (pos_ != text_.size()) throw ParseError("unexpected character", pos_);
    return node;
  }

 private:
  std::unique_ptr<AstNode> parse_alt() {
    auto node = parse_concat();
    while (peek() == '|') {
      ++pos_;
      node = AstNode::alt(std::move(node), parse_concat());
    }
    return node;
  }

  std::unique_ptr<AstNode> parse_concat() {
    auto node = parse_postfix();
    while (starts_atom(peek())) node = AstNode::concat(std::move(node), parse_postfix());
    return node;
  }

  std::unique_ptr<AstNode> parse_postfix() {
    auto node = parse_atom();
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        node = AstNode::plus(std::move(node));
      } else if (c == '*') {
        ++pos_;
        // alpha* is shorthand for alpha+ | epsilon
        node = AstNode::alt(AstNode::plus(std::move(node)), AstNode::epsilon());
      } else {
        break;
      }
    }
    return node;
  }

  std::unique_ptr<AstNode> parse_atom() {
    char c = peek();
    if (c == '\0') throw ParseError("unexpected end of query", pos_);
    if (c == '(') {
      std::size_t open = pos_++;
      if (peek() == ')') throw ParseError("empty group ()", open);
      auto node = parse_alt();
      if (peek() != ')') throw ParseError("missing ')'", pos_);
      ++pos_;
      return node;
    }
    if (c == '%') {
      ++pos_;
      return AstNode::epsilon();
    }
    if (c == '|' || c == ')' || c == '+' || c == '*')
      throw ParseError(std::string("unexpected '") + c + "'", pos_);
    if (!alphabet_.has(c)) throw ParseError(std::string("literal '") + c + "' outside alphabet", pos_);
    ++pos_;
    return AstNode::literal(c);
  }

  bool starts_atom(char c) const {
    return c != '\0' && c != '|' && c != ')' && c != '+' && c != '*';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RegexAst parse_rpq(std::string_view text, const Alphabet& alphabet) {
  RegexAst ast;
  ast.root = detail::RpqParser(text, alphabet).parse();
  ast.text = std::string(text);
  return ast;
}

/// NFA over Sigma plus epsilon with a single start and a single final state.
struct Nfa {
  SigmaGraph graph;
  NodeId start = kNoNode;
  NodeId final = kNoNode;

  std::size_t state_count() const { return graph.node_count(); }
};

namespace detail {

// Each AST node t owns states enter(t) and exit(t); the gadget wiring adds a
// constant number of arcs per node, top-down.
inline void wire_nfa(const AstNode& t, SigmaGraph& g, NodeId enter, NodeId exit, NodeId& next_free) {
  switch (t.kind) {
    case AstKind::literal:
      g.add_arc(enter, g.alphabet().label_of(t.symbol), exit);
      return;
    case AstKind::epsilon:
      g.add_epsilon_arc(enter, exit);
      return;
    case AstKind::plus: {
      NodeId r1 = next_free++, r2 = next_free++;
      g.add_epsilon_arc(enter, r1);
      g.add_epsilon_arc(r2, exit);
      g.add_epsilon_arc(exit, enter);  // loop back for one more iteration
      wire_nfa(*t.left, g, r1, r2, next_free);
      return;
    }
    case AstKind::concat: {
      NodeId r1 = next_free++, r2 = next_free++;
      NodeId s1 = next_free++, s2 = next_free++;
      g.add_epsilon_arc(enter, r1);
      g.add_epsilon_arc(r2, s1);
      g.add_epsilon_arc(s2, exit);
      wire_nfa(*t.left, g, r1, r2, next_free);
      wire_nfa(*t.right, g, s1, s2, next_free);
      return;
    }
    case AstKind::alt: {
      NodeId r1 = next_free++, r2 = next_free++;
      NodeId s1 = next_free++, s2 = next_free++;
      g.add_epsilon_arc(enter, r1);
      g.add_epsilon_arc(enter, s1);
      g.add_epsilon_arc(r2, exit);
      g.add_epsilon_arc(s2, exit);
      wire_nfa(*t.left, g, r1, r2, next_free);
      wire_nfa(*t.right, g, s1, s2, next_free);
      return;
    }
  }
}

}  // namespace detail

/// Compiles the AST into an equivalent NFA with exactly two states per AST
/// node and out-degree at most two everywhere.
inline Nfa compile_nfa(const RegexAst& ast, const Alphabet& alphabet) {
  Nfa m;
  m.graph = SigmaGraph(alphabet);
  m.graph.add_nodes(2 * ast.node_count());
  NodeId next_free = 2;
  m.start = 0;
  m.final = 1;
  detail::wire_nfa(*ast.root, m.graph, m.start, m.final, next_free);
  assert(next_free == m.graph.node_count());
  return m;
}

/// Standard epsilon-closure simulation; the test oracle for compile_nfa.
inline bool nfa_accepts(const Nfa& m, std::string_view word) {
  const SigmaGraph& g = m.graph;
  std::vector<char> current(g.node_count(), 0), next(g.node_count(), 0);
  std::vector<NodeId> stack;

  auto close = [&](std::vector<char>& set) {
    stack.clear();
    for (NodeId s = 0; s < g.node_count(); ++s)
      if (set[s]) stack.push_back(s);
    while (!stack.empty()) {
      NodeId s = stack.back();
      stack.pop_back();
      for (NodeId t : g.successors(s, g.epsilon_label()))
        if (!set[t]) {
          set[t] = 1;
          stack.push_back(t);
        }
    }
  };

  current[m.start] = 1;
  close(current);
  for (char c : word) {
    LabelId x = g.alphabet().label_of(c);  // throws on a symbol outside Sigma
    std::fill(next.begin(), next.end(), 0);
    for (NodeId s = 0; s < g.node_count(); ++s)
      if (current[s])
        for (NodeId t : g.successors(s, x)) next[t] = 1;
    close(next);
    std::swap(current, next);
  }
  return current[m.final] != 0;
}

// --- syntactic classification ----------------------------------------------

/// The restricted classes of the sub-linear-delay enumerators. A basic
/// transitive query is (x1|...|xk)* or (x1|...|xk)+; a short query is
/// (x1|...|xk) or (x1|...|xk)(y1|...|yk'); a disjunction is a top-level
/// alternation of those.
struct QueryClass {
  enum class Kind { bt, s_single, s_double, disjunction, general };

  Kind kind = Kind::general;
  std::vector<char> labels;        // bt / s_single, and the xs of s_double
  std::vector<char> second_labels; // the ys of s_double
  bool reflexive = false;          // bt: * rather than +
  std::vector<QueryClass> members; // disjunction only
};

namespace detail {

// (x1|...|xk) with literal leaves only; collects the symbols.
inline bool collect_literal_alt(const AstNode& n, std::vector<char>& out) {
  if (n.kind == AstKind::literal) {
    out.push_back(n.symbol);
    return true;
  }
  if (n.kind == AstKind::alt)
    return collect_literal_alt(*n.left, out) && collect_literal_alt(*n.right, out);
  return false;
}

// Recognises one alternative; disjunction members must be bt/s_single/s_double.
inline QueryClass classify_member(const AstNode& n) {
  QueryClass c;
  // (x1|...|xk)+  — basic transitive, non-reflexive
  if (n.kind == AstKind::plus) {
    std::vector<char> labels;
    if (collect_literal_alt(*n.left, labels)) {
      c.kind = QueryClass::Kind::bt;
      c.labels = std::move(labels);
      return c;
    }
    return c;
  }
  // desugared star: (x1|...|xk)+ | epsilon — basic transitive, reflexive
  if (n.kind == AstKind::alt) {
    const AstNode *plus = nullptr, *eps = nullptr;
    if (n.left->kind == AstKind::plus && n.right->kind == AstKind::epsilon) {
      plus = n.left.get();
      eps = n.right.get();
    } else if (n.right->kind == AstKind::plus && n.left->kind == AstKind::epsilon) {
      plus = n.right.get();
      eps = n.left.get();
    }
    if (plus && eps) {
      std::vector<char> labels;
      if (collect_literal_alt(*plus->left, labels)) {
        c.kind = QueryClass::Kind::bt;
        c.labels = std::move(labels);
        c.reflexive = true;
        return c;
      }
    }
    // plain alternation of literals — short, single block
    std::vector<char> labels;
    if (collect_literal_alt(n, labels)) {
      c.kind = QueryClass::Kind::s_single;
      c.labels = std::move(labels);
    }
    return c;
  }
  if (n.kind == AstKind::literal) {
    c.kind = QueryClass::Kind::s_single;
    c.labels = {n.symbol};
    return c;
  }
  // (x1|...|xk)(y1|...|yk') — short, double block
  if (n.kind == AstKind::concat) {
    std::vector<char> xs, ys;
    if (collect_literal_alt(*n.left, xs) && collect_literal_alt(*n.right, ys)) {
      c.kind = QueryClass::Kind::s_double;
      c.labels = std::move(xs);
      c.second_labels = std::move(ys);
    }
    return c;
  }
  return c;
}

// Splits the top-level alternation chain, but keeps desugared stars (which
// are themselves Alt nodes) intact as single alternatives.
inline void split_alternatives(const AstNode& n, std::vector<const AstNode*>& out) {
  if (n.kind == AstKind::alt &&
      classify_member(n).kind == QueryClass::Kind::general) {
    split_alternatives(*n.left, out);
    split_alternatives(*n.right, out);
    return;
  }
  out.push_back(&n);
}

}  // namespace detail

/// Most specific class of the query; a top-level alternation whose
/// alternatives are all basic-transitive or short yields a disjunction.
inline QueryClass classify(const RegexAst& ast) {
  QueryClass direct = detail::classify_member(*ast.root);
  if (direct.kind != QueryClass::Kind::general) return direct;
  if (ast.root->kind != AstKind::alt) return direct;

  std::vector<const AstNode*> alternatives;
  detail::split_alternatives(*ast.root, alternatives);
  QueryClass c;
  c.kind = QueryClass::Kind::disjunction;
  for (const AstNode* a : alternatives) {
    QueryClass m = detail::classify_member(*a);
    if (m.kind == QueryClass::Kind::general || m.kind == QueryClass::Kind::disjunction)
      return QueryClass{};  // general
    c.members.push_back(std::move(m));
  }
  return c;
}

}  // namespace rpq
