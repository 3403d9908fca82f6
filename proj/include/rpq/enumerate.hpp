#pragma once

// Enumeration framework and the two product-graph enumerators.
//
// Cost model of the DelayMeter (all delay bounds are stated in these steps):
// one step per adjacency-list entry visited, per per-node array cell read or
// written, and per queue push/pop; ordered-buffer operations cost
// ceil(log2(K+1)) steps each, where K caps the buffer size.

#include <bit>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "rpq/eval.hpp"
#include "rpq/product.hpp"

namespace rpq {

class DelayMeter {
 public:
  void charge(std::uint64_t n = 1) { steps_ += n; }
  std::uint64_t steps() const { return steps_; }

 private:
  std::uint64_t steps_ = 0;
};

/// ceil(log2(cap + 1)): the charge of one ordered-buffer operation.
inline std::uint64_t log_cost(std::size_t cap) {
  return std::max<std::uint64_t>(1, std::bit_width(cap));
}

/// Gap statistics of one enumeration run. `max_gap` is the largest gap
/// between two consecutive outputs; the boundary gaps (before the first
/// output, after the last) are reported separately. Preprocessing metered
/// before the enumeration phase starts is in `prep_steps`.
struct DelaySummary {
  std::uint64_t outputs = 0;
  std::uint64_t prep_steps = 0;
  std::uint64_t first_gap = 0;
  std::uint64_t max_gap = 0;
  std::uint64_t last_gap = 0;
  std::uint64_t total_steps = 0;
};

enum class OrderContract { sorted, semi_sorted, unordered };

enum class StreamState { item, done, stale };

struct StepResult {
  StreamState state;
  NodePair pair{};  // valid when state == item
};

/// Pull-based stream of node pairs. Each pair of the target set is emitted
/// exactly once, then Done forever; Stale signals that the database was
/// updated underneath the enumeration.
class Enumerator {
 public:
  explicit Enumerator(OrderContract order, DelayMeter* shared_meter = nullptr)
      : order_(order), meter_(shared_meter ? shared_meter : &own_meter_) {
    last_event_ = meter_->steps();
    summary_.prep_steps = meter_->steps();
  }
  virtual ~Enumerator() = default;
  Enumerator(const Enumerator&) = delete;
  Enumerator& operator=(const Enumerator&) = delete;

  StepResult next() {
    if (live_ == Live::done) return {StreamState::done};
    if (live_ == Live::stale) return {StreamState::stale};
    StepResult r = advance();
    std::uint64_t now = meter_->steps();
    summary_.total_steps = now - run_base_;
    std::uint64_t gap = now - last_event_;
    switch (r.state) {
      case StreamState::item:
        if (summary_.outputs == 0)
          summary_.first_gap = gap;
        else
          summary_.max_gap = std::max(summary_.max_gap, gap);
        ++summary_.outputs;
        last_event_ = now;
        break;
      case StreamState::done:
        if (summary_.outputs == 0) summary_.first_gap = gap;
        summary_.last_gap = gap;
        live_ = Live::done;
        break;
      case StreamState::stale:
        live_ = Live::stale;
        break;
    }
    return r;
  }

  /// Drains the stream; throws on Stale.
  std::vector<NodePair> drain() {
    std::vector<NodePair> out;
    for (;;) {
      StepResult r = next();
      if (r.state == StreamState::done) return out;
      if (r.state == StreamState::stale) throw Error("enumerator is stale");
      out.push_back(r.pair);
    }
  }

  OrderContract order() const { return order_; }
  DelayMeter& meter() { return *meter_; }
  const DelaySummary& summary() const { return summary_; }

 protected:
  virtual StepResult advance() = 0;

  /// Closes the preprocessing phase: earlier charges count as prep_steps,
  /// gaps are measured from here on.
  void begin_enumeration() {
    summary_.prep_steps = meter_->steps() - run_base_;
    last_event_ = meter_->steps();
  }

  /// A fresh run starts (used by the baseline's update hook).
  void restart_stream() {
    run_base_ = meter_->steps();
    summary_ = {};
    live_ = Live::running;
    last_event_ = meter_->steps();
  }

  std::uint64_t steps_since_last_output() const { return meter_->steps() - last_event_; }

 private:
  enum class Live { running, done, stale };

  OrderContract order_;
  DelayMeter own_meter_;
  DelayMeter* meter_;
  DelaySummary summary_;
  std::uint64_t last_event_ = 0;
  std::uint64_t run_base_ = 0;
  Live live_ = Live::running;
};

// --- baseline enumerator -----------------------------------------------------

/// Sorted enumeration with the whole preprocessing embedded in the first
/// delay: build the product, add a super-sink below all (i, final), mark by a
/// backward BFS which sources can reach it, then per live source run a
/// forward BFS and sweep the boolean output row in node order. Updates are
/// O(1): note the new database version and redo everything on the next pull.
class BaselineEnumerator final : public Enumerator {
 public:
  BaselineEnumerator(const GraphDatabase& d, const Nfa& m, DelayMeter* shared_meter = nullptr)
      : Enumerator(OrderContract::sorted, shared_meter), db_(&d), nfa_(&m) {
    seen_version_ = d.version();
  }
  // The enumerator keeps references; temporaries would dangle.
  BaselineEnumerator(GraphDatabase&&, const Nfa&, DelayMeter* = nullptr) = delete;
  BaselineEnumerator(const GraphDatabase&, Nfa&&, DelayMeter* = nullptr) = delete;

  /// Constant-time update hook (record-and-invalidate). The next pull runs
  /// the preprocessing against the updated database.
  void refresh() {
    meter().charge(1);
    seen_version_ = db_->version();
    prepared_ = false;
    stage_ = Stage::scan_source;
    restart_stream();
  }

 private:
  enum class Stage { scan_source, sweep };

  StepResult advance() override {
    if (db_->version() != seen_version_) return {StreamState::stale};
    if (!prepared_) prepare();
    const std::size_t n = db_nodes_;
    for (;;) {
      if (stage_ == Stage::scan_source) {
        if (i_ >= n) return {StreamState::done};
        meter().charge(1);  // source flag check
        if (!source_live_[i_]) {
          ++i_;
          continue;
        }
        run_row_bfs(static_cast<NodeId>(i_));
        j_ = 0;
        stage_ = Stage::sweep;
      }
      while (j_ < n) {
        meter().charge(1);  // row cell
        NodeId j = static_cast<NodeId>(j_++);
        if (row_[j]) return {StreamState::item, {static_cast<NodeId>(i_), j}};
      }
      std::fill(row_.begin(), row_.end(), 0);
      meter().charge(n);
      ++i_;
      stage_ = Stage::scan_source;
    }
  }

  void prepare() {
    pg_ = build_product(*db_, *nfa_);
    db_nodes_ = pg_.db_nodes;
    meter().charge(pg_.graph.size() + pg_.graph.node_count());
    // Super-sink below every (i, final); the backward BFS from it marks the
    // sources that produce at least one output.
    sink_ = pg_.graph.add_node();
    for (NodeId i = 0; i < db_nodes_; ++i)
      pg_.graph.add_epsilon_arc(pg_.final_of(i), sink_);
    meter().charge(db_nodes_);
    SigmaGraph reversed = pg_.graph.reversed();
    meter().charge(reversed.size());

    source_live_.assign(db_nodes_, 0);
    std::vector<char> visited(reversed.node_count(), 0);
    std::vector<NodeId> queue;
    visited[sink_] = 1;
    queue.push_back(sink_);
    meter().charge(1);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeId w = queue[head];
      meter().charge(1);  // pop
      if (w != sink_ && pg_.state(w) == pg_.start_state) source_live_[pg_.db_node(w)] = 1;
      for (LabelId x = 0; x < reversed.label_count(); ++x)
        for (NodeId t : reversed.successors(w, x)) {
          meter().charge(1);
          if (!visited[t]) {
            visited[t] = 1;
            queue.push_back(t);
            meter().charge(2);
          }
        }
    }
    row_.assign(db_nodes_, 0);
    meter().charge(db_nodes_);
    visited_.assign(pg_.graph.node_count(), kNoNode);
    prepared_ = true;
    i_ = 0;
    stage_ = Stage::scan_source;
  }

  void run_row_bfs(NodeId i) {
    queue_.clear();
    NodeId s = pg_.start_of(i);
    visited_[s] = i;
    queue_.push_back(s);
    meter().charge(2);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      NodeId w = queue_[head];
      meter().charge(1);
      if (w != sink_ && pg_.state(w) == pg_.final_state) {
        row_[pg_.db_node(w)] = 1;
        meter().charge(1);
      }
      for (LabelId x = 0; x < pg_.graph.label_count(); ++x)
        for (NodeId t : pg_.graph.successors(w, x)) {
          meter().charge(1);
          if (visited_[t] != i) {
            visited_[t] = i;
            queue_.push_back(t);
            meter().charge(2);
          }
        }
    }
  }

  const GraphDatabase* db_;
  const Nfa* nfa_;
  std::uint64_t seen_version_;
  bool prepared_ = false;

  ProductGraph pg_;
  std::size_t db_nodes_ = 0;
  NodeId sink_ = kNoNode;
  std::vector<char> source_live_;
  std::vector<char> row_;
  std::vector<NodeId> visited_;
  std::vector<NodeId> queue_;
  std::size_t i_ = 0, j_ = 0;
  Stage stage_ = Stage::scan_source;
};

inline std::unique_ptr<BaselineEnumerator> enum_baseline(const GraphDatabase& d, const Nfa& m) {
  return std::make_unique<BaselineEnumerator>(d, m);
}
std::unique_ptr<BaselineEnumerator> enum_baseline(GraphDatabase&&, const Nfa&) = delete;
std::unique_ptr<BaselineEnumerator> enum_baseline(const GraphDatabase&, Nfa&&) = delete;

// --- strongly connected components -------------------------------------------

/// SCC partition of a Sigma-graph plus the condensation DAG. Components are
/// numbered in Tarjan pop order, which is a reverse topological sorting: every
/// condensation arc (j, j') satisfies j' < j.
struct SccDag {
  std::vector<NodeId> component;           // node -> component id
  std::size_t count = 0;                   // number of components
  std::vector<std::vector<NodeId>> dag;    // condensation arcs j -> j', j' < j
};

inline SccDag tarjan_scc(const SigmaGraph& g, DelayMeter* meter = nullptr) {
  const std::size_t n = g.node_count();
  auto charge = [&](std::uint64_t c) {
    if (meter) meter->charge(c);
  };
  // One flat successor list per node keeps the iterative DFS cursors simple.
  std::vector<std::vector<NodeId>> flat(n);
  g.for_each_arc([&](NodeId u, LabelId, NodeId v) { flat[u].push_back(v); });
  charge(g.size() + n);

  SccDag out;
  out.component.assign(n, kNoNode);
  std::vector<NodeId> index(n, kNoNode), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  std::vector<std::pair<NodeId, std::size_t>> work;  // node, next child offset
  NodeId counter = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kNoNode) continue;
    work.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    charge(2);
    while (!work.empty()) {
      auto& [v, child] = work.back();
      if (child < flat[v].size()) {
        NodeId w = flat[v][child++];
        charge(1);
        if (index[w] == kNoNode) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          work.emplace_back(w, 0);
          charge(2);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        NodeId v_done = v;
        work.pop_back();
        charge(1);
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[v_done]);
        if (low[v_done] == index[v_done]) {
          NodeId comp = static_cast<NodeId>(out.count++);
          for (;;) {
            NodeId w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            out.component[w] = comp;
            charge(1);
            if (w == v_done) break;
          }
        }
      }
    }
  }

  // Condensation arcs deduplicated with a per-component stamp array.
  out.dag.resize(out.count);
  std::vector<std::vector<NodeId>> members(out.count);
  for (NodeId v = 0; v < n; ++v) members[out.component[v]].push_back(v);
  charge(n);
  std::vector<NodeId> seen(out.count, kNoNode);
  for (NodeId j = 0; j < out.count; ++j)
    for (NodeId v : members[j])
      for (NodeId w : flat[v]) {
        charge(1);
        NodeId jj = out.component[w];
        if (jj != j && seen[jj] != j) {
          seen[jj] = j;
          out.dag[j].push_back(jj);
          charge(1);
        }
      }
  return out;
}

// --- sublinear-delay enumerator (super-linear preprocessing) ------------------

enum class SublinearMode { sorted_tree, lazy_unsorted };

/// Preprocessed structures of the O(|V_D|)-delay enumerator: the product, its
/// SCC DAG in reverse topological numbering, and per-component buffers of the
/// smallest database indices whose final-level copy the component reaches,
/// capped at K. In sorted-tree mode each buffer holds exactly the K smallest
/// such indices (or the full set when fewer), sorted; in lazy mode it holds
/// an arbitrary subset collected with O(1)-membership lazily initialised
/// arrays, unsorted.
struct SublinearState {
  ProductGraph product;
  SccDag scc;
  SublinearMode mode = SublinearMode::sorted_tree;
  std::size_t cap = 1;
  std::vector<std::vector<NodeId>> buffers;
  std::vector<char> nonempty;
  const GraphDatabase* db = nullptr;
  std::uint64_t db_version = 0;
  DelayMeter prep_meter;
};

namespace detail {

// Lazily initialised membership array: the unsorted item list doubles as the
// validation stack, so the position array never needs to be cleared.
class LazyBuffer {
 public:
  void attach(std::size_t universe) {
    if (!pos_) pos_ = std::make_unique_for_overwrite<NodeId[]>(universe);
  }
  bool contains(NodeId v, const std::vector<NodeId>& items) const {
    NodeId p = pos_[v];
    return p < items.size() && items[p] == v;
  }
  void insert(NodeId v, std::vector<NodeId>& items) {
    pos_[v] = static_cast<NodeId>(items.size());
    items.push_back(v);
  }

 private:
  std::unique_ptr<NodeId[]> pos_;
};

}  // namespace detail

SublinearState sublinear_prepare(GraphDatabase&&, const Nfa&, SublinearMode,
                                 std::optional<std::size_t> = std::nullopt) = delete;
inline SublinearState sublinear_prepare(const GraphDatabase& d, const Nfa& m, SublinearMode mode,
                                        std::optional<std::size_t> cap_override = std::nullopt) {
  SublinearState st;
  st.db = &d;
  st.db_version = d.version();
  st.mode = mode;
  DelayMeter& mt = st.prep_meter;

  st.product = build_product(d, m);
  mt.charge(st.product.graph.size() + st.product.graph.node_count());
  DegreeStats deg = d.degree_stats();
  mt.charge(d.size());
  st.cap = std::max<std::size_t>(
      1, cap_override.value_or(deg.avg_degree_ceil() * m.state_count()));

  st.scc = tarjan_scc(st.product.graph, &mt);
  const std::size_t comps = st.scc.count;
  const std::size_t n = st.product.db_nodes;
  const std::uint64_t tree_op = log_cost(st.cap);

  // Reversed condensation: arcs go from lower to higher component numbers, so
  // a sweep in increasing order sees each buffer complete before pushing it on.
  std::vector<std::vector<NodeId>> rev(comps);
  for (NodeId j = 0; j < comps; ++j)
    for (NodeId jj : st.scc.dag[j]) rev[jj].push_back(j);
  mt.charge(comps);

  st.buffers.assign(comps, {});
  st.nonempty.assign(comps, 0);

  if (mode == SublinearMode::sorted_tree) {
    std::vector<std::set<NodeId>> trees(comps);
    auto insert_capped = [&](std::set<NodeId>& tree, NodeId v) {
      mt.charge(tree_op);
      if (!tree.insert(v).second) return;
      if (tree.size() > st.cap) {
        tree.erase(std::prev(tree.end()));
        mt.charge(tree_op);
      }
    };
    for (NodeId i = 0; i < n; ++i)
      insert_capped(trees[st.scc.component[st.product.final_of(i)]], i);
    for (NodeId j = 0; j < comps; ++j)
      for (NodeId target : rev[j]) {
        mt.charge(1);
        for (NodeId v : trees[j]) insert_capped(trees[target], v);
      }
    for (NodeId j = 0; j < comps; ++j) {
      if (trees[j].empty()) continue;
      st.nonempty[j] = 1;
      st.buffers[j].assign(trees[j].begin(), trees[j].end());  // extract-min order
      mt.charge(tree_op * trees[j].size());
    }
  } else {
    std::vector<detail::LazyBuffer> lazy(comps);
    auto insert_capped = [&](NodeId j, NodeId v) {
      mt.charge(1);
      auto& items = st.buffers[j];
      if (items.size() >= st.cap) return;
      lazy[j].attach(n);
      if (!lazy[j].contains(v, items)) lazy[j].insert(v, items);
    };
    for (NodeId i = 0; i < n; ++i)
      insert_capped(st.scc.component[st.product.final_of(i)], i);
    for (NodeId j = 0; j < comps; ++j)
      for (NodeId target : rev[j]) {
        mt.charge(1);
        for (NodeId v : st.buffers[j]) insert_capped(target, v);
      }
    for (NodeId j = 0; j < comps; ++j)
      if (!st.buffers[j].empty()) st.nonempty[j] = 1;
  }
  return st;
}

/// Enumeration over a prepared SublinearState. Phases run in node order; a
/// phase whose buffer is below the cap streams the buffer directly, otherwise
/// the buffer pays for a forward BFS: one buffered pair is emitted whenever
/// |V_D| * |states| meter steps passed since the last output, and the output
/// row is swept after the BFS for the rest. Sorted in sorted-tree mode,
/// semi-sorted in lazy mode.
class SublinearEnumerator final : public Enumerator {
 public:
  explicit SublinearEnumerator(SublinearState&&, DelayMeter* = nullptr) = delete;
  explicit SublinearEnumerator(const SublinearState& st, DelayMeter* shared_meter = nullptr)
      : Enumerator(st.mode == SublinearMode::sorted_tree ? OrderContract::sorted
                                                         : OrderContract::semi_sorted,
                   shared_meter),
        st_(&st) {
    meter().charge(st.prep_meter.steps());
    n_ = st.product.db_nodes;
    row_.assign(n_, 0);
    visited_.assign(st.product.graph.node_count(), kNoNode);
    meter().charge(n_);
    payment_interval_ = static_cast<std::uint64_t>(n_) * st.product.states;
    begin_enumeration();
  }

 private:
  enum class Stage { next_phase, emit_buffer, bfs, sweep };

  StepResult advance() override {
    if (st_->db->version() != st_->db_version) return {StreamState::stale};
    for (;;) {
      switch (stage_) {
        case Stage::next_phase: {
          if (i_ >= n_) return {StreamState::done};
          meter().charge(2);  // component lookup + flag
          NodeId comp = st_->scc.component[st_->product.start_of(static_cast<NodeId>(i_))];
          if (!st_->nonempty[comp]) {
            ++i_;
            continue;
          }
          buffer_ = &st_->buffers[comp];
          k_ = 0;
          if (buffer_->size() < st_->cap) {
            stage_ = Stage::emit_buffer;
          } else {
            bfs_start(static_cast<NodeId>(i_));
            stage_ = Stage::bfs;
          }
          continue;
        }
        case Stage::emit_buffer: {
          if (k_ < buffer_->size()) {
            meter().charge(1);
            NodeId j = (*buffer_)[k_++];
            return {StreamState::item, {static_cast<NodeId>(i_), j}};
          }
          ++i_;
          stage_ = Stage::next_phase;
          continue;
        }
        case Stage::bfs: {
          while (bfs_step()) {
            if (k_ < buffer_->size() && steps_since_last_output() >= payment_interval_) {
              NodeId j = (*buffer_)[k_++];
              if (st_->mode == SublinearMode::lazy_unsorted) {
                row_[j] = 2;  // already produced; the sweep must skip it
                meter().charge(1);
              }
              return {StreamState::item, {static_cast<NodeId>(i_), j}};
            }
          }
          if (st_->mode == SublinearMode::sorted_tree) {
            // Buffered entries below position k_ are already out; everything
            // from Z[k_] upward is still marked in the row.
            sweep_ = k_ < buffer_->size() ? (*buffer_)[k_] : (*buffer_)[buffer_->size() - 1] + 1;
          } else {
            sweep_ = 0;
          }
          stage_ = Stage::sweep;
          continue;
        }
        case Stage::sweep: {
          while (sweep_ < n_) {
            meter().charge(1);
            NodeId j = static_cast<NodeId>(sweep_++);
            if (row_[j] == 1) return {StreamState::item, {static_cast<NodeId>(i_), j}};
          }
          std::fill(row_.begin(), row_.end(), 0);
          meter().charge(n_);
          ++i_;
          stage_ = Stage::next_phase;
          continue;
        }
      }
    }
  }

  void bfs_start(NodeId i) {
    queue_.clear();
    head_ = 0;
    cur_ = kNoNode;
    NodeId s = st_->product.start_of(i);
    visited_[s] = i;
    token_ = i;
    queue_.push_back(s);
    meter().charge(2);
  }

  // One unit of BFS work; false once the traversal is exhausted.
  bool bfs_step() {
    const SigmaGraph& g = st_->product.graph;
    for (;;) {
      if (cur_ == kNoNode) {
        if (head_ >= queue_.size()) return false;
        cur_ = queue_[head_++];
        lab_ = 0;
        off_ = 0;
        meter().charge(1);  // pop
        if (st_->product.state(cur_) == st_->product.final_state) {
          NodeId j = st_->product.db_node(cur_);
          meter().charge(1);
          if (row_[j] == 0) row_[j] = 1;
        }
        return true;
      }
      while (lab_ < g.label_count()) {
        const auto& list = g.successors(cur_, lab_);
        if (off_ < list.size()) {
          NodeId w = list[off_++];
          meter().charge(1);
          if (visited_[w] != token_) {
            visited_[w] = token_;
            queue_.push_back(w);
            meter().charge(2);
          }
          return true;
        }
        ++lab_;
        off_ = 0;
      }
      cur_ = kNoNode;
    }
  }

  const SublinearState* st_;
  std::size_t n_ = 0;
  std::uint64_t payment_interval_ = 0;
  Stage stage_ = Stage::next_phase;
  std::size_t i_ = 0;
  const std::vector<NodeId>* buffer_ = nullptr;
  std::size_t k_ = 0;
  std::size_t sweep_ = 0;
  std::vector<std::uint8_t> row_;  // 0 unseen, 1 to sweep, 2 already produced
  std::vector<NodeId> visited_;
  NodeId token_ = kNoNode;
  std::vector<NodeId> queue_;
  std::size_t head_ = 0;
  NodeId cur_ = kNoNode;
  LabelId lab_ = 0;
  std::size_t off_ = 0;
};

inline std::unique_ptr<SublinearEnumerator> enum_sublinear(const SublinearState& st) {
  return std::make_unique<SublinearEnumerator>(st);
}
std::unique_ptr<SublinearEnumerator> enum_sublinear(SublinearState&&) = delete;

}  // namespace rpq
