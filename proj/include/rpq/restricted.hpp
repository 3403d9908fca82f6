#pragma once

// Sub-linear-delay enumerators for the restricted query classes: basic
// transitive queries (label-restricted transitive closure, delay O(max
// degree)), short queries (one or two alternation blocks), and disjunctions
// of those, merged phase-by-phase without duplicates.

#include <memory>
#include <vector>

#include "rpq/enumerate.hpp"
#include "rpq/query.hpp"

namespace rpq {

class UnsupportedQueryClass : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::vector<LabelId> to_label_ids(const GraphDatabase& d, const std::vector<char>& labels) {
  std::vector<LabelId> ids;
  ids.reserve(labels.size());
  for (char c : labels) ids.push_back(d.alphabet().label_of(c));
  return ids;
}

}  // namespace detail

/// (x1|...|xk)+ / (x1|...|xk)*: per row a BFS over the label-restricted arcs
/// where every dequeued node is emitted immediately and then its neighbourhood
/// (at most max-degree entries) is scanned, so intra-row gaps are O(degree).
/// Rows with no restricted out-arc are skipped in O(1) using a pre-scan done
/// inside the first delay. Reflexive mode emits (i, i) first in every row; in
/// plus mode (i, i) is emitted when some scanned arc rediscovers the row's
/// root.
class BtEnumerator final : public Enumerator {
 public:
  BtEnumerator(GraphDatabase&&, const std::vector<char>&, bool, DelayMeter* = nullptr) = delete;
  BtEnumerator(const GraphDatabase& d, const std::vector<char>& labels, bool reflexive,
               DelayMeter* shared_meter = nullptr)
      : Enumerator(OrderContract::semi_sorted, shared_meter),
        db_(&d),
        version_(d.version()),
        labels_(detail::to_label_ids(d, labels)),
        reflexive_(reflexive) {
    n_ = d.node_count();
    visited_.assign(n_, kNoNode);
    if (!reflexive_) {
      active_.assign(n_, 0);
      for (NodeId u = 0; u < n_; ++u) {
        meter().charge(1);
        for (LabelId x : labels_)
          if (!d.graph().successors(u, x).empty()) {
            active_[u] = 1;
            break;
          }
      }
    }
  }

 private:
  enum class Stage { phase_start, traverse };

  StepResult advance() override {
    if (db_->version() != version_) return {StreamState::stale};
    const SigmaGraph& g = db_->graph();
    for (;;) {
      if (stage_ == Stage::phase_start) {
        if (i_ >= n_) return {StreamState::done};
        meter().charge(1);  // row activity check
        if (!reflexive_ && !active_[i_]) {
          ++i_;
          continue;
        }
        NodeId root = static_cast<NodeId>(i_);
        visited_[root] = root;
        queue_.clear();
        queue_.push_back(root);
        head_ = 0;
        cur_ = kNoNode;
        root_emitted_ = reflexive_;
        meter().charge(2);
        stage_ = Stage::traverse;
        if (reflexive_) return {StreamState::item, {root, root}};
      }
      NodeId root = static_cast<NodeId>(i_);
      for (;;) {
        if (cur_ == kNoNode) {
          if (head_ >= queue_.size()) {
            ++i_;
            stage_ = Stage::phase_start;
            break;  // row done
          }
          cur_ = queue_[head_++];
          lab_ = 0;
          off_ = 0;
          meter().charge(1);  // pop
          if (cur_ != root) return {StreamState::item, {root, cur_}};
          continue;
        }
        bool emitted_root = false;
        NodePair root_pair{root, root};
        while (lab_ < labels_.size() && !emitted_root) {
          const auto& list = g.successors(cur_, labels_[lab_]);
          while (off_ < list.size()) {
            NodeId w = list[off_++];
            meter().charge(1);
            if (w == root && !root_emitted_) {
              root_emitted_ = true;
              emitted_root = true;  // a cycle through the root was found
              break;
            }
            if (visited_[w] != root) {
              visited_[w] = root;
              queue_.push_back(w);
              meter().charge(2);
            }
          }
          if (!emitted_root) {
            ++lab_;
            off_ = 0;
          }
        }
        if (emitted_root) return {StreamState::item, root_pair};
        cur_ = kNoNode;
      }
    }
  }

  const GraphDatabase* db_;
  std::uint64_t version_;
  std::vector<LabelId> labels_;
  bool reflexive_;
  std::size_t n_ = 0;
  std::vector<char> active_;
  std::vector<NodeId> visited_;
  std::vector<NodeId> queue_;
  std::size_t head_ = 0;
  NodeId cur_ = kNoNode;
  std::size_t lab_ = 0, off_ = 0;
  std::size_t i_ = 0;
  Stage stage_ = Stage::phase_start;
  bool root_emitted_ = false;
};

inline std::unique_ptr<BtEnumerator> enum_bt(const GraphDatabase& d, const std::vector<char>& labels,
                                             bool reflexive) {
  return std::make_unique<BtEnumerator>(d, labels, reflexive);
}

/// (x1|...|xk): the result is the deduplicated restricted arc set, grouped by
/// source in node order; materialised during preprocessing and streamed with
/// constant delay.
class SSingleEnumerator final : public Enumerator {
 public:
  SSingleEnumerator(GraphDatabase&&, const std::vector<char>&, DelayMeter* = nullptr) = delete;
  SSingleEnumerator(const GraphDatabase& d, const std::vector<char>& labels,
                    DelayMeter* shared_meter = nullptr)
      : Enumerator(OrderContract::semi_sorted, shared_meter), db_(&d), version_(d.version()) {
    auto ids = detail::to_label_ids(d, labels);
    std::vector<NodeId> stamp(d.node_count(), kNoNode);
    for (NodeId u = 0; u < d.node_count(); ++u) {
      meter().charge(1);
      for (LabelId x : ids)
        for (NodeId v : d.graph().successors(u, x)) {
          meter().charge(1);
          if (stamp[v] != u) {
            stamp[v] = u;
            pairs_.emplace_back(u, v);
            meter().charge(1);
          }
        }
    }
    begin_enumeration();
  }

 private:
  StepResult advance() override {
    if (db_->version() != version_) return {StreamState::stale};
    meter().charge(1);
    if (pos_ >= pairs_.size()) return {StreamState::done};
    return {StreamState::item, pairs_[pos_++]};
  }

  const GraphDatabase* db_;
  std::uint64_t version_;
  std::vector<NodePair> pairs_;
  std::size_t pos_ = 0;
};

inline std::unique_ptr<SSingleEnumerator> enum_s_single(const GraphDatabase& d,
                                                        const std::vector<char>& labels) {
  return std::make_unique<SSingleEnumerator>(d, labels);
}

/// (x1|...|xk)(y1|...|yk'): a trimmed three-layer product (middle nodes need
/// an incoming x-arc and an outgoing y-arc). Per source, the two-level
/// neighbourhood exploration buffers freshly discovered third-layer nodes in
/// a queue; once max-degree steps passed since the last output, one queued
/// pair is emitted after the current middle neighbourhood completes, and the
/// queue is drained at the end of the phase.
class SDoubleEnumerator final : public Enumerator {
 public:
  SDoubleEnumerator(GraphDatabase&&, const std::vector<char>&, const std::vector<char>&,
                    DelayMeter* = nullptr) = delete;
  SDoubleEnumerator(const GraphDatabase& d, const std::vector<char>& xs, const std::vector<char>& ys,
                    DelayMeter* shared_meter = nullptr)
      : Enumerator(OrderContract::semi_sorted, shared_meter), db_(&d), version_(d.version()) {
    n_ = d.node_count();
    auto x_ids = detail::to_label_ids(d, xs);
    auto y_ids = detail::to_label_ids(d, ys);
    const SigmaGraph& g = d.graph();

    first_.assign(n_, {});
    second_.assign(n_, {});
    std::vector<NodeId> stamp(n_, kNoNode);
    std::vector<char> has_in(n_, 0);
    for (NodeId u = 0; u < n_; ++u) {
      meter().charge(1);
      for (LabelId x : x_ids)
        for (NodeId v : g.successors(u, x)) {
          meter().charge(1);
          if (stamp[v] != u) {
            stamp[v] = u;
            first_[u].push_back(v);
            has_in[v] = 1;
          }
        }
    }
    std::fill(stamp.begin(), stamp.end(), kNoNode);
    for (NodeId v = 0; v < n_; ++v) {
      meter().charge(1);
      for (LabelId y : y_ids)
        for (NodeId w : g.successors(v, y)) {
          meter().charge(1);
          if (stamp[w] != v) {
            stamp[w] = v;
            second_[v].push_back(w);
          }
        }
    }
    // Trim middle nodes lacking an in-arc or an out-arc, then flag the empty
    // first-layer rows so their phases are skipped in O(1).
    active_.assign(n_, 0);
    for (NodeId u = 0; u < n_; ++u) {
      meter().charge(1);
      auto& row = first_[u];
      std::size_t kept = 0;
      for (NodeId v : row) {
        meter().charge(1);
        if (has_in[v] && !second_[v].empty()) row[kept++] = v;
      }
      row.resize(kept);
      active_[u] = kept > 0;
    }
    delta_ = d.degree_stats().max_degree;
    meter().charge(d.size());
    in_q_.assign(n_, kNoNode);
    produced_.assign(n_, kNoNode);
    begin_enumeration();
  }

 private:
  enum class Stage { phase_start, explore, drain };

  StepResult advance() override {
    if (db_->version() != version_) return {StreamState::stale};
    for (;;) {
      switch (stage_) {
        case Stage::phase_start: {
          if (i_ >= n_) return {StreamState::done};
          meter().charge(1);
          if (!active_[i_]) {
            ++i_;
            continue;
          }
          mid_pos_ = 0;
          q_.clear();
          q_head_ = 0;
          stage_ = Stage::explore;
          continue;
        }
        case Stage::explore: {
          NodeId root = static_cast<NodeId>(i_);
          const auto& mids = first_[root];
          while (mid_pos_ < mids.size()) {
            NodeId mid = mids[mid_pos_++];
            meter().charge(1);
            for (NodeId w : second_[mid]) {
              meter().charge(1);
              if (produced_[w] != root && in_q_[w] != root) {
                in_q_[w] = root;
                q_.push_back(w);
                meter().charge(1);
              }
            }
            // a full middle neighbourhood was scanned: pay out if overdue
            if (steps_since_last_output() >= delta_ && q_head_ < q_.size()) {
              NodeId w = q_[q_head_++];
              produced_[w] = root;
              meter().charge(1);
              return {StreamState::item, {root, w}};
            }
          }
          stage_ = Stage::drain;
          continue;
        }
        case Stage::drain: {
          NodeId root = static_cast<NodeId>(i_);
          if (q_head_ < q_.size()) {
            NodeId w = q_[q_head_++];
            produced_[w] = root;
            meter().charge(1);
            return {StreamState::item, {root, w}};
          }
          ++i_;
          stage_ = Stage::phase_start;
          continue;
        }
      }
    }
  }

  const GraphDatabase* db_;
  std::uint64_t version_;
  std::size_t n_ = 0;
  std::vector<std::vector<NodeId>> first_, second_;
  std::vector<char> active_;
  std::size_t delta_ = 0;
  std::vector<NodeId> in_q_, produced_;  // phase-stamped membership arrays
  std::vector<NodeId> q_;
  std::size_t q_head_ = 0;
  std::size_t i_ = 0, mid_pos_ = 0;
  Stage stage_ = Stage::phase_start;
};

inline std::unique_ptr<SDoubleEnumerator> enum_s_double(const GraphDatabase& d,
                                                        const std::vector<char>& xs,
                                                        const std::vector<char>& ys) {
  return std::make_unique<SDoubleEnumerator>(d, xs, ys);
}

/// Phase-synchronised union of semi-sorted sub-enumerators over the same node
/// universe. Arrays L and R track each sub's current phase and most recent
/// right element; X stages pending outputs (array plus unsorted list), Y marks
/// what the current phase already produced, phase-stamped so it never needs
/// clearing. Duplicate-free and semi-sorted; each sub's step costs are charged
/// onto this enumerator's meter.
class DisjunctionEnumerator final : public Enumerator {
 public:
  DisjunctionEnumerator(std::size_t universe, std::vector<std::unique_ptr<Enumerator>> subs,
                        DelayMeter* shared_meter = nullptr)
      : Enumerator(OrderContract::semi_sorted, shared_meter), subs_(std::move(subs)), n_(universe) {
    const std::size_t m = subs_.size();
    left_.assign(m, kPrePhase);
    right_.assign(m, kPrePhase);
    x_in_.assign(n_, 0);
    y_stamp_.assign(n_, kPrePhase);
    meter().charge(n_ + m);
    begin_enumeration();
  }

  /// Times the emission step found X empty while subs were mid-phase; the
  /// alternation construction argues this never happens.
  std::size_t empty_emission_points() const { return empty_emission_points_; }

 private:
  // Phases are node ids; kPrePhase sorts before all of them and kDonePhase
  // after.
  static constexpr std::int64_t kPrePhase = -1;
  std::int64_t done_phase() const { return static_cast<std::int64_t>(n_); }

  enum class Stage { pull, flush, stage_and_emit };

  StepResult advance() override {
    const std::size_t m = subs_.size();
    for (;;) {
      switch (stage_) {
        case Stage::pull: {
          for (std::size_t i = 0; i < m; ++i) {
            meter().charge(1);
            if (left_[i] != phase_) continue;
            std::uint64_t before = subs_[i]->meter().steps();
            StepResult r = subs_[i]->next();
            meter().charge(subs_[i]->meter().steps() - before);
            if (r.state == StreamState::stale) return r;
            if (r.state == StreamState::done) {
              left_[i] = right_[i] = done_phase();
            } else {
              left_[i] = r.pair.first;
              right_[i] = r.pair.second;
            }
          }
          std::int64_t mn = done_phase();
          for (std::size_t i = 0; i < m; ++i) {
            meter().charge(1);
            mn = std::min(mn, left_[i]);
          }
          if (phase_ < mn) {
            next_phase_ = mn;
            stage_ = Stage::flush;
          } else {
            stage_ = Stage::stage_and_emit;
          }
          continue;
        }
        case Stage::flush: {
          if (x_head_ < x_list_.size()) {
            NodeId v = x_list_[x_head_++];
            x_in_[v] = 0;
            meter().charge(2);
            return {StreamState::item, {static_cast<NodeId>(phase_), v}};
          }
          x_list_.clear();
          x_head_ = 0;
          phase_ = next_phase_;  // also empties Y: its stamps are now stale
          if (phase_ == done_phase()) return {StreamState::done};
          stage_ = Stage::stage_and_emit;
          continue;
        }
        case Stage::stage_and_emit: {
          for (std::size_t i = 0; i < m; ++i) {
            meter().charge(1);
            if (left_[i] != phase_) continue;
            NodeId v = static_cast<NodeId>(right_[i]);
            if (y_stamp_[v] != phase_ && !x_in_[v]) {
              x_in_[v] = 1;
              x_list_.push_back(v);
              meter().charge(2);
            }
          }
          stage_ = Stage::pull;
          if (x_head_ < x_list_.size()) {
            NodeId v = x_list_[x_head_++];
            x_in_[v] = 0;
            y_stamp_[v] = phase_;
            meter().charge(3);
            return {StreamState::item, {static_cast<NodeId>(phase_), v}};
          }
          ++empty_emission_points_;
          continue;
        }
      }
    }
  }

  std::vector<std::unique_ptr<Enumerator>> subs_;
  std::size_t n_;
  std::vector<std::int64_t> left_, right_;
  std::vector<char> x_in_;
  std::vector<NodeId> x_list_;
  std::size_t x_head_ = 0;
  std::vector<std::int64_t> y_stamp_;
  std::int64_t phase_ = kPrePhase;
  std::int64_t next_phase_ = kPrePhase;
  Stage stage_ = Stage::pull;
  std::size_t empty_emission_points_ = 0;
};

inline std::unique_ptr<DisjunctionEnumerator> enum_disjunction(
    std::size_t universe, std::vector<std::unique_ptr<Enumerator>> subs) {
  return std::make_unique<DisjunctionEnumerator>(universe, std::move(subs));
}

namespace detail {

inline std::unique_ptr<Enumerator> make_member_enumerator(const GraphDatabase& d,
                                                          const QueryClass& c) {
  switch (c.kind) {
    case QueryClass::Kind::bt:
      return std::make_unique<BtEnumerator>(d, c.labels, c.reflexive);
    case QueryClass::Kind::s_single:
      return std::make_unique<SSingleEnumerator>(d, c.labels);
    case QueryClass::Kind::s_double:
      return std::make_unique<SDoubleEnumerator>(d, c.labels, c.second_labels);
    default:
      throw UnsupportedQueryClass("disjunction members must be basic-transitive or short queries");
  }
}

}  // namespace detail

/// Dispatches on the syntactic class; disjunctions wrap their members in the
/// phase-synchronised merger. General-class queries are rejected (use the
/// baseline or the sublinear enumerator for those).
inline std::unique_ptr<Enumerator> enum_restricted(const GraphDatabase& d, const RegexAst& q) {
  QueryClass c = classify(q);
  switch (c.kind) {
    case QueryClass::Kind::bt:
    case QueryClass::Kind::s_single:
    case QueryClass::Kind::s_double:
      return detail::make_member_enumerator(d, c);
    case QueryClass::Kind::disjunction: {
      std::vector<std::unique_ptr<Enumerator>> subs;
      subs.reserve(c.members.size());
      for (const QueryClass& member : c.members)
        subs.push_back(detail::make_member_enumerator(d, member));
      return enum_disjunction(d.node_count(), std::move(subs));
    }
    case QueryClass::Kind::general:
      break;
  }
  throw UnsupportedQueryClass(
      "query is not basic-transitive, short, or a disjunction of those; "
      "use the baseline or sublinear enumerator");
}

}  // namespace rpq
