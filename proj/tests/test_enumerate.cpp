#include <catch2/catch.hpp>

#include "testutil.hpp"

using namespace rpq;
using rpqtest::compile;
using rpqtest::d1;
using rpqtest::drain_checked;
using rpqtest::pairs_of;
using rpqtest::sorted_copy;

TEST_CASE("baseline enumerator") {
  GraphDatabase db = d1();

  SECTION("sorted output on the fixture") {
    Nfa m = compile(db, "a+");
    BaselineEnumerator e(db, m);
    auto s = drain_checked(e);
    CHECK(s.pairs == pairs_of({{0, 1}, {0, 2}, {1, 2}}));
    CHECK(s.sorted);
    CHECK(s.duplicate_free);
  }

  SECTION("empty result is Done immediately") {
    Nfa m = compile(db, "c");
    BaselineEnumerator e(db, m);
    CHECK(e.next().state == StreamState::done);
    CHECK(e.next().state == StreamState::done);
  }

  SECTION("a* includes the reflexive pairs, sorted") {
    Nfa m = compile(db, "a*");
    BaselineEnumerator e(db, m);
    CHECK(drain_checked(e).pairs ==
          pairs_of({{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}));
  }

  SECTION("an update mid-stream turns the enumerator stale") {
    Nfa m = compile(db, "a+");
    BaselineEnumerator e(db, m);
    CHECK(e.next().state == StreamState::item);
    db.apply_update(Update::insert_arc_of("3", 'a', "1"));
    CHECK(e.next().state == StreamState::stale);
    CHECK(e.next().state == StreamState::stale);
  }

  SECTION("done stays done") {
    Nfa m = compile(db, "ab");
    BaselineEnumerator e(db, m);
    e.drain();
    CHECK(e.next().state == StreamState::done);
  }
}

TEST_CASE("baseline update hook") {
  GraphDatabase db = d1();
  Nfa m = compile(db, "a+");
  BaselineEnumerator e(db, m);
  CHECK(drain_checked(e).pairs == pairs_of({{0, 1}, {0, 2}, {1, 2}}));

  SECTION("insert closes the a-cycle: all nine pairs") {
    db.apply_update(Update::insert_arc_of("3", 'a', "1"));
    e.refresh();
    auto s = drain_checked(e);
    CHECK(s.pairs.size() == 9);
    CHECK(s.sorted);
    CHECK(sorted_copy(s.pairs) == oracle_eval(db, compile(db, "a+")).pairs);
  }

  SECTION("delete leaves a single arc") {
    db.apply_update(Update::delete_arc_of("1", 'a', "2"));
    e.refresh();
    CHECK(drain_checked(e).pairs == pairs_of({{1, 2}}));
  }

  SECTION("update and revert restores the original stream") {
    db.apply_update(Update::insert_arc_of("3", 'a', "1"));
    db.apply_update(Update::delete_arc_of("3", 'a', "1"));
    e.refresh();
    CHECK(drain_checked(e).pairs == pairs_of({{0, 1}, {0, 2}, {1, 2}}));
  }

  SECTION("the hook costs O(1) meter steps") {
    db.apply_update(Update::insert_arc_of("3", 'a', "1"));
    std::uint64_t before = e.meter().steps();
    e.refresh();
    CHECK(e.meter().steps() - before <= 16);
  }
}

TEST_CASE("tarjan_scc") {
  SECTION("a cycle is one component") {
    SigmaGraph g{Alphabet("a")};
    g.add_nodes(3);
    LabelId a = 0;
    g.add_arc(0, a, 1);
    g.add_arc(1, a, 2);
    g.add_arc(2, a, 0);
    SccDag scc = tarjan_scc(g);
    CHECK(scc.count == 1);
    CHECK(scc.dag[0].empty());
  }

  SECTION("chain components are numbered sinks-first") {
    SigmaGraph g{Alphabet("a")};
    g.add_nodes(3);
    g.add_arc(0, 0, 1);
    g.add_arc(1, 0, 2);
    SccDag scc = tarjan_scc(g);
    REQUIRE(scc.count == 3);
    CHECK(scc.component[2] < scc.component[1]);
    CHECK(scc.component[1] < scc.component[0]);
    for (NodeId j = 0; j < scc.count; ++j)
      for (NodeId jj : scc.dag[j]) CHECK(jj < j);
  }

  SECTION("two isolated nodes form two components") {
    SigmaGraph g{Alphabet("a")};
    g.add_nodes(2);
    CHECK(tarjan_scc(g).count == 2);
  }

  SECTION("reverse topological numbering holds on random graphs") {
    Rng rng(1234);
    for (int round = 0; round < 40; ++round) {
      GraphDatabase d = random_database(10, 25, "ab", rng);
      SccDag scc = tarjan_scc(d.graph());
      for (NodeId j = 0; j < scc.count; ++j)
        for (NodeId jj : scc.dag[j]) REQUIRE(jj < j);
      // partition sanity: mutually reachable nodes share a component
      for (NodeId v = 0; v < d.node_count(); ++v) REQUIRE(scc.component[v] < scc.count);
    }
  }
}

namespace {

EvalResult row_expectation(const GraphDatabase& db, const std::string& query, NodeId source) {
  EvalResult all = oracle_eval(db, rpqtest::compile(db, query));
  EvalResult row;
  for (auto p : all.pairs)
    if (p.first == source) row.pairs.push_back(p);
  return row;
}

}  // namespace

TEST_CASE("sublinear_prepare buffers") {
  GraphDatabase db = d1();

  SECTION("buffers hold whole rows under a large cap") {
    Nfa m = compile(db, "a+");
    SublinearState st = sublinear_prepare(db, m, SublinearMode::sorted_tree, 8);
    NodeId comp = st.scc.component[st.product.start_of(0)];
    REQUIRE(st.nonempty[comp]);
    CHECK(st.buffers[comp] == std::vector<NodeId>{1, 2});
  }

  SECTION("no start reaches a final: every consulted flag is off") {
    Nfa m = compile(db, "c");
    SublinearState st = sublinear_prepare(db, m, SublinearMode::sorted_tree);
    for (NodeId i = 0; i < db.node_count(); ++i)
      CHECK_FALSE(st.nonempty[st.scc.component[st.product.start_of(i)]]);
  }

  SECTION("single node with a* buffers itself") {
    GraphDatabase one{Alphabet("a")};
    one.add_node("1");
    Nfa m = compile(one, "a*");
    SublinearState st = sublinear_prepare(one, m, SublinearMode::sorted_tree);
    NodeId comp = st.scc.component[st.product.start_of(0)];
    REQUIRE(st.nonempty[comp]);
    CHECK(st.buffers[comp] == std::vector<NodeId>{0});
  }

  SECTION("sorted-tree buffers are the K smallest row entries") {
    Rng rng(77);
    for (int round = 0; round < 50; ++round) {
      GraphDatabase d = random_database(8, 20, "ab", rng);
      if (d.node_count() == 0) continue;
      RegexAst q = random_query(3, d.alphabet(), rng);
      Nfa m = compile_nfa(q, d.alphabet());
      std::size_t cap = 1 + static_cast<std::size_t>(round % 4);
      SublinearState st = sublinear_prepare(d, m, SublinearMode::sorted_tree, cap);
      for (NodeId i = 0; i < d.node_count(); ++i) {
        EvalResult row = row_expectation(d, q.text, i);
        NodeId comp = st.scc.component[st.product.start_of(i)];
        const auto& z = st.buffers[comp];
        REQUIRE(std::is_sorted(z.begin(), z.end()));
        // every product node of a component shares its reachability, so the
        // buffer is exactly the K smallest entries of the row
        std::size_t expect = std::min(cap, row.pairs.size());
        REQUIRE(z.size() == expect);
        std::vector<NodeId> row_prefix;
        for (std::size_t k = 0; k < expect; ++k) row_prefix.push_back(row.pairs[k].second);
        REQUIRE(z == row_prefix);
      }
    }
  }
}

TEST_CASE("sublinear enumerator") {
  GraphDatabase db = d1();

  SECTION("sorted mode matches the baseline set, sorted") {
    Nfa m = compile(db, "a+");
    SublinearState st = sublinear_prepare(db, m, SublinearMode::sorted_tree);
    SublinearEnumerator e(st);
    auto s = drain_checked(e);
    CHECK(s.sorted);
    CHECK(s.pairs == pairs_of({{0, 1}, {0, 2}, {1, 2}}));
  }

  SECTION("empty result") {
    Nfa m = compile(db, "c");
    SublinearState st = sublinear_prepare(db, m, SublinearMode::sorted_tree);
    SublinearEnumerator e(st);
    CHECK(e.next().state == StreamState::done);
  }

  SECTION("K_{n,n} with a small cap exercises the paid BFS and stays exact") {
    const std::size_t n = 5;
    GraphDatabase kd{Alphabet("a")};
    for (std::size_t i = 0; i < 2 * n; ++i) kd.add_node(std::to_string(i + 1));
    for (NodeId u = 0; u < n; ++u)
      for (NodeId w = 0; w < n; ++w) kd.insert_arc(u, 'a', static_cast<NodeId>(n + w));
    Nfa m = compile(kd, "a");
    EvalResult expected = oracle_eval(kd, m);
    for (SublinearMode mode : {SublinearMode::sorted_tree, SublinearMode::lazy_unsorted}) {
      SublinearState st = sublinear_prepare(kd, m, mode, /*cap=*/2);
      SublinearEnumerator e(st);
      auto s = drain_checked(e);
      CHECK(s.duplicate_free);
      CHECK(s.semi_sorted);
      if (mode == SublinearMode::sorted_tree) CHECK(s.sorted);
      CHECK(sorted_copy(s.pairs) == expected.pairs);
    }
  }

  SECTION("update after prepare turns the stream stale") {
    Nfa m = compile(db, "a+");
    SublinearState st = sublinear_prepare(db, m, SublinearMode::sorted_tree);
    SublinearEnumerator e(st);
    CHECK(e.next().state == StreamState::item);
    db.apply_update(Update::insert_arc_of("3", 'a', "1"));
    CHECK(e.next().state == StreamState::stale);
  }
}

TEST_CASE("enumerators agree with the oracle on random instances") {
  Rng rng(909);
  for (int round = 0; round < 80; ++round) {
    GraphDatabase d = random_database(8, 20, "ab", rng);
    RegexAst q = random_query(4, d.alphabet(), rng);
    Nfa m = compile_nfa(q, d.alphabet());
    EvalResult expected = oracle_eval(d, m);

    BaselineEnumerator base(d, m);
    auto bs = drain_checked(base);
    REQUIRE(bs.duplicate_free);
    REQUIRE(bs.sorted);
    REQUIRE(bs.pairs == expected.pairs);

    std::optional<std::size_t> cap;
    if (round % 3 == 1) cap = 1 + static_cast<std::size_t>(round % 5);
    for (SublinearMode mode : {SublinearMode::sorted_tree, SublinearMode::lazy_unsorted}) {
      SublinearState st = sublinear_prepare(d, m, mode, cap);
      SublinearEnumerator e(st);
      auto s = drain_checked(e);
      REQUIRE(s.duplicate_free);
      REQUIRE(s.semi_sorted);
      if (mode == SublinearMode::sorted_tree) REQUIRE(s.sorted);
      REQUIRE(sorted_copy(s.pairs) == expected.pairs);
    }
  }
}

TEST_CASE("delay meter bookkeeping") {
  GraphDatabase db = d1();
  Nfa m = compile(db, "a+");

  SECTION("summary counts outputs and gaps") {
    BaselineEnumerator e(db, m);
    e.drain();
    const DelaySummary& s = e.summary();
    CHECK(s.outputs == 3);
    CHECK(s.first_gap > 0);      // embedded preprocessing
    CHECK(s.total_steps > 0);
    CHECK(s.prep_steps == 0);    // baseline has no separate prep phase
  }

  SECTION("sublinear prep lands in prep_steps, not in the first gap") {
    SublinearState st = sublinear_prepare(db, m, SublinearMode::sorted_tree);
    SublinearEnumerator e(st);
    e.drain();
    const DelaySummary& s = e.summary();
    CHECK(s.prep_steps >= st.prep_meter.steps());
    CHECK(s.first_gap < st.prep_meter.steps());
  }

  SECTION("zero-output streams report the whole run as the first gap") {
    Nfa none = compile(db, "c");
    BaselineEnumerator e(db, none);
    e.drain();
    CHECK(e.summary().outputs == 0);
    CHECK(e.summary().first_gap == e.summary().last_gap);
  }
}
