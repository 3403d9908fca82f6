// Command-line front end: load edge-list databases, run the evaluation
// problems, stream enumerations with optional delay reports, classify
// queries, generate and verify reduction instances, and run benchmark sweeps.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpq/rpq.hpp"

using json = nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rpq::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rpq::Error("cannot write '" + path + "'");
  out << content;
}

rpq::GraphDatabase load_db(const std::string& path) {
  return rpq::load_edge_list(read_file(path));
}

struct QueryArgs {
  std::string query;
  std::string query_file;

  std::string resolve() const {
    if (!query.empty()) return query;
    if (query_file.empty()) throw rpq::Error("no query given (use -q or --query-file)");
    std::istringstream in(read_file(query_file));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') return line;
    throw rpq::Error("query file '" + query_file + "' holds no query");
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("-q,--query", query, "query string");
    cmd->add_option("--query-file", query_file, "file with one query per line");
  }
};

rpq::Nfa compile_for(const rpq::GraphDatabase& db, const std::string& text) {
  return rpq::compile_nfa(rpq::parse_rpq(text, db.alphabet()), db.alphabet());
}

void print_pairs(const rpq::GraphDatabase& db, const std::vector<rpq::NodePair>& pairs,
                 std::ostream& out) {
  for (auto [u, v] : pairs) out << db.name(u) << '\t' << db.name(v) << '\n';
}

json delay_json(const std::string& mode, const rpq::GraphDatabase& db, const std::string& query,
                const rpq::DelaySummary& s) {
  return json{{"mode", mode},
              {"n", db.node_count()},
              {"m", db.arc_count()},
              {"q", query},
              {"outputs", s.outputs},
              {"first_gap", s.first_gap},
              {"max_gap", s.max_gap},
              {"last_gap", s.last_gap},
              {"prep_steps", s.prep_steps},
              {"total_steps", s.total_steps}};
}

void emit_delay(const json& j, const std::string& delay_out) {
  if (delay_out.empty()) {
    std::cerr << j.dump() << '\n';
  } else {
    std::ofstream out(delay_out, std::ios::app);
    out << j.dump() << '\n';
  }
}

struct EnumOptions {
  std::string mode = "baseline";
  bool report_delay = false;
  std::string delay_out;
  std::string update_script;
  std::optional<std::size_t> cap;
};

std::unique_ptr<rpq::Enumerator> make_enumerator(const rpq::GraphDatabase& db, const rpq::Nfa& nfa,
                                                 const rpq::RegexAst& ast, const std::string& mode,
                                                 std::optional<std::size_t> cap,
                                                 std::optional<rpq::SublinearState>& state_slot) {
  if (mode == "baseline") return rpq::enum_baseline(db, nfa);
  if (mode == "sublinear" || mode == "sublinear-lazy") {
    auto kind = mode == "sublinear" ? rpq::SublinearMode::sorted_tree
                                    : rpq::SublinearMode::lazy_unsorted;
    state_slot.emplace(rpq::sublinear_prepare(db, nfa, kind, cap));
    return rpq::enum_sublinear(*state_slot);
  }
  if (mode == "restricted") return rpq::enum_restricted(db, ast);
  if (mode == "approx") return std::make_unique<rpq::ApproxEnumerator>(db, nfa);
  throw rpq::Error("unknown enumeration mode '" + mode + "'");
}

rpq::Update parse_script_update(const std::string& line) {
  std::istringstream in(line);
  std::string op, u, x, v;
  in >> op;
  if (op == "+edge" || op == "-edge") {
    if (!(in >> u >> x >> v) || x.size() != 1) throw rpq::Error("malformed script line: " + line);
    return op[0] == '+' ? rpq::Update::insert_arc_of(u, x[0], v)
                        : rpq::Update::delete_arc_of(u, x[0], v);
  }
  if (op == "+node" || op == "-node") {
    if (!(in >> u)) throw rpq::Error("malformed script line: " + line);
    return op[0] == '+' ? rpq::Update::add_node_of(u) : rpq::Update::delete_node_of(u);
  }
  throw rpq::Error("unknown script directive: " + line);
}

int run_enum(const std::string& db_path, const QueryArgs& qa, const EnumOptions& opt) {
  rpq::GraphDatabase db = load_db(db_path);
  std::string query = qa.resolve();
  rpq::RegexAst ast = rpq::parse_rpq(query, db.alphabet());
  rpq::Nfa nfa = rpq::compile_nfa(ast, db.alphabet());

  if (!opt.update_script.empty()) {
    if (opt.mode != "baseline")
      throw rpq::Error(
          "update scripts require --mode baseline (the other enumerators reject updates)");
    rpq::BaselineEnumerator e(db, nfa);
    std::istringstream in(read_file(opt.update_script));
    std::string line;
    std::size_t checkpoint = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (line == "!enum") {
        std::cout << "!enum " << ++checkpoint << '\n';
        print_pairs(db, e.drain(), std::cout);
        if (opt.report_delay)
          emit_delay(delay_json(opt.mode, db, query, e.summary()), opt.delay_out);
        e.refresh();
        continue;
      }
      db.apply_update(parse_script_update(line));
      e.refresh();
    }
    return 0;
  }

  std::optional<rpq::SublinearState> state;
  auto e = make_enumerator(db, nfa, ast, opt.mode, opt.cap, state);
  print_pairs(db, e->drain(), std::cout);
  if (opt.report_delay) emit_delay(delay_json(opt.mode, db, query, e->summary()), opt.delay_out);
  return 0;
}

std::string class_name(const rpq::QueryClass& c) {
  using K = rpq::QueryClass::Kind;
  switch (c.kind) {
    case K::bt:
      return c.reflexive ? "bt*" : "bt+";
    case K::s_single:
      return "s-single";
    case K::s_double:
      return "s-double";
    case K::general:
      return "general";
    case K::disjunction: {
      std::string out = "disjunction(";
      for (std::size_t i = 0; i < c.members.size(); ++i) {
        if (i) out += ", ";
        out += class_name(c.members[i]);
      }
      return out + ")";
    }
  }
  return "general";
}

// --- instance files -----------------------------------------------------------

json matrix_json(const rpq::BitMatrix& m) {
  json rows = json::array();
  for (const auto& r : m) rows.push_back(std::vector<int>(r.begin(), r.end()));
  return rows;
}

rpq::BitMatrix matrix_from(const json& j) {
  rpq::BitMatrix m;
  for (const auto& row : j) {
    rpq::BitVector r;
    for (const auto& bit : row) r.push_back(bit.get<int>() ? 1 : 0);
    m.push_back(std::move(r));
  }
  return m;
}

std::string script_text(const rpq::UpdateScript& script) {
  std::ostringstream out;
  for (const auto& step : script) {
    if (step.kind == rpq::ScriptStep::Kind::checkpoint) {
      out << "!enum\n";
      continue;
    }
    const rpq::Update& u = step.update;
    switch (u.kind) {
      case rpq::Update::Kind::insert_arc:
        out << "+edge " << u.u << ' ' << u.label << ' ' << u.v << '\n';
        break;
      case rpq::Update::Kind::delete_arc:
        out << "-edge " << u.u << ' ' << u.label << ' ' << u.v << '\n';
        break;
      case rpq::Update::Kind::add_isolated_node:
        out << "+node " << u.u << '\n';
        break;
      case rpq::Update::Kind::delete_isolated_node:
        out << "-node " << u.u << '\n';
        break;
    }
  }
  return out.str();
}

rpq::UpdateScript script_from_text(const std::string& text) {
  rpq::UpdateScript script;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "!enum")
      script.push_back(rpq::ScriptStep::enumerate());
    else
      script.push_back(rpq::ScriptStep::of(parse_script_update(line)));
  }
  return script;
}

struct GenArgs {
  std::string kind;
  std::size_t n = 4;
  std::size_t d = 4;
  std::uint64_t seed = 1;
  std::string out = "instance";
};

int run_gen(const GenArgs& g) {
  rpq::Rng rng(g.seed);
  json side{{"reduction", g.kind}, {"n", g.n}, {"d", g.d}, {"seed", g.seed}};
  std::string graph_text;
  if (g.kind == "ov") {
    rpq::OvInstance inst = rpq::random_ov(g.n, g.d, rng);
    rpq::OvCheckReduction red = rpq::ov_to_check(inst);
    graph_text = rpq::save_edge_list(red.database);
    side["a"] = matrix_json(inst.a);
    side["b"] = matrix_json(inst.b);
    side["query"] = red.query;
    side["source"] = red.source;
    side["target"] = red.target;
    side["expected"] = rpq::ov_brute(inst);
  } else if (g.kind == "tri") {
    rpq::TriInstance inst = rpq::random_tri(g.n, rng);
    rpq::TriBooleReduction red = rpq::tri_to_boole(inst);
    graph_text = rpq::save_edge_list(red.database);
    side["adj"] = matrix_json(inst.adj);
    side["query"] = red.query;
    side["expected"] = rpq::tri_brute(inst);
  } else if (g.kind == "bmm" || g.kind == "sbmm") {
    rpq::BmmInstance inst = rpq::random_bmm(g.n, rng);
    rpq::BmmEvalReduction red = g.kind == "bmm" ? rpq::bmm_to_eval(inst) : rpq::sbmm_to_eval(inst);
    graph_text = rpq::save_edge_list(red.database);
    side["a"] = matrix_json(inst.a);
    side["b"] = matrix_json(inst.b);
    side["query"] = red.query;
    side["expected"] = matrix_json(rpq::bmm_brute(inst));
  } else if (g.kind == "ovcount") {
    rpq::OvInstance inst = rpq::random_ov(g.n, g.d, rng);
    rpq::OvCountReduction red = rpq::ov_to_count(inst);
    graph_text = rpq::save_edge_list(red.database);
    side["a"] = matrix_json(inst.a);
    side["b"] = matrix_json(inst.b);
    side["query"] = red.query;
    side["expected"] = !rpq::ov_brute(inst);  // count == n^2 <=> no orthogonal pair
  } else if (g.kind == "omv") {
    rpq::OmvInstance inst = rpq::random_omv(g.n, rng);
    rpq::OmvDynamicReduction red = rpq::omv_to_dynamic_enum(inst);
    graph_text = rpq::save_edge_list(red.initial);
    side["m"] = matrix_json(inst.m);
    side["vectors"] = matrix_json(inst.vectors);
    side["query"] = red.query;
    side["expected"] = matrix_json(rpq::omv_brute(inst));
    write_file(g.out + ".updates", script_text(red.script));
  } else if (g.kind == "tridyn") {
    rpq::TriInstance inst = rpq::random_tri(g.n, rng);
    rpq::TriDynamicReduction red = rpq::tri_to_dynamic_enum(inst);
    graph_text = rpq::save_edge_list(red.initial);
    side["adj"] = matrix_json(inst.adj);
    side["query"] = red.query;
    json rounds = json::array();
    for (std::size_t v = 0; v < inst.n; ++v) rounds.push_back(rpq::tri_brute_at(inst, v));
    side["expected"] = rounds;
    write_file(g.out + ".updates", script_text(red.script));
  } else {
    throw rpq::Error("unknown reduction kind '" + g.kind + "'");
  }
  write_file(g.out + ".graph", graph_text);
  write_file(g.out + ".json", side.dump(2) + "\n");
  std::cout << g.out << ".graph " << g.out << ".json written\n";
  return 0;
}

/// Replays a dynamic instance's script, collecting the pairs per checkpoint.
std::vector<std::vector<rpq::NodePair>> replay_rounds(rpq::GraphDatabase& db,
                                                      const rpq::UpdateScript& script,
                                                      const rpq::Nfa& nfa) {
  rpq::BaselineEnumerator e(db, nfa);
  std::vector<std::vector<rpq::NodePair>> rounds;
  for (const auto& step : script) {
    if (step.kind == rpq::ScriptStep::Kind::update) {
      db.apply_update(step.update);
      e.refresh();
    } else {
      rounds.push_back(e.drain());
      e.refresh();
    }
  }
  return rounds;
}

int run_verify(const std::string& prefix) {
  json side = json::parse(read_file(prefix + ".json"));
  std::string kind = side.at("reduction");
  rpq::GraphDatabase db = load_db(prefix + ".graph");
  std::string query = side.at("query");
  bool ok = false;
  if (kind == "ov") {
    rpq::Nfa nfa = compile_for(db, query);
    bool engine = rpq::check(db, nfa, db.require_node(side.at("source").get<std::string>()),
                             db.require_node(side.at("target").get<std::string>()));
    ok = engine == side.at("expected").get<bool>();
  } else if (kind == "tri") {
    rpq::Nfa nfa = compile_for(db, query);
    ok = rpq::boole(db, nfa) == side.at("expected").get<bool>();
  } else if (kind == "bmm" || kind == "sbmm") {
    rpq::BmmInstance inst{side.at("a").size(), matrix_from(side.at("a")),
                          matrix_from(side.at("b"))};
    rpq::BmmEvalReduction red = kind == "bmm" ? rpq::bmm_to_eval(inst) : rpq::sbmm_to_eval(inst);
    rpq::Nfa nfa = compile_for(db, query);
    ok = red.decode(rpq::eval_all(db, nfa)) == matrix_from(side.at("expected"));
  } else if (kind == "ovcount") {
    rpq::Nfa nfa = compile_for(db, query);
    std::size_t n = side.at("n").get<std::size_t>();
    ok = (rpq::count(db, nfa) == n * n) == side.at("expected").get<bool>();
  } else if (kind == "omv") {
    rpq::UpdateScript script = script_from_text(read_file(prefix + ".updates"));
    rpq::OmvInstance inst{side.at("m").size(), matrix_from(side.at("m")),
                          matrix_from(side.at("vectors"))};
    rpq::OmvDynamicReduction red = rpq::omv_to_dynamic_enum(inst);
    rpq::Nfa nfa = compile_for(db, query);
    auto rounds = replay_rounds(db, script, nfa);
    rpq::BitMatrix expected = matrix_from(side.at("expected"));
    ok = rounds.size() == expected.size();
    for (std::size_t r = 0; ok && r < rounds.size(); ++r)
      ok = red.decode_round(db, rounds[r]) == expected[r];
  } else if (kind == "tridyn") {
    rpq::UpdateScript script = script_from_text(read_file(prefix + ".updates"));
    rpq::Nfa nfa = compile_for(db, query);
    auto rounds = replay_rounds(db, script, nfa);
    const json& expected = side.at("expected");
    ok = rounds.size() == expected.size();
    for (std::size_t r = 0; ok && r < rounds.size(); ++r)
      ok = !rounds[r].empty() == expected[r].get<bool>();
  } else {
    throw rpq::Error("unknown reduction kind '" + kind + "'");
  }
  std::cout << (ok ? "OK" : "MISMATCH") << '\n';
  return ok ? 0 : 1;
}

struct BenchArgs {
  std::string family = "sparse-random";
  std::vector<std::size_t> sizes;
  std::string query = "(a|b)+";
  std::string mode = "baseline";
  std::uint64_t seed = 1;
  double prob = 0.2;
  std::size_t avg_out = 4;
  std::size_t delta = 8;
  std::optional<std::size_t> cap;
};

int run_bench(const BenchArgs& b) {
  for (std::size_t n : b.sizes) {
    rpq::Rng rng(b.seed + n);
    rpq::GraphDatabase db;
    if (b.family == "sparse-random")
      db = rpq::sparse_random(n, b.avg_out, "ab", rng);
    else if (b.family == "dense-random")
      db = rpq::dense_random(n, b.prob, "ab", rng);
    else if (b.family == "bipartite")
      db = rpq::bipartite_random(n, b.prob, rng);
    else if (b.family == "bounded-degree")
      db = rpq::bounded_degree_random(n, b.delta, "ab", rng);
    else
      throw rpq::Error("unknown bench family '" + b.family + "'");
    rpq::RegexAst ast = rpq::parse_rpq(b.query, db.alphabet());
    rpq::Nfa nfa = rpq::compile_nfa(ast, db.alphabet());
    std::optional<rpq::SublinearState> state;
    auto e = make_enumerator(db, nfa, ast, b.mode, b.cap, state);
    e->drain();
    std::cout << delay_json(b.mode, db, b.query, e->summary()).dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regular path query engine"};
  app.require_subcommand(1);

  std::string db_path;
  QueryArgs qa;
  std::string check_u, check_v;
  EnumOptions eo;
  GenArgs ga;
  std::string verify_prefix;
  BenchArgs ba;
  std::string sizes_csv;
  std::int64_t cap_flag = -1, bench_cap_flag = -1;

  auto* c_boole = app.add_subcommand("boole", "is the result nonempty?");
  c_boole->add_option("database", db_path)->required();
  qa.attach(c_boole);

  auto* c_check = app.add_subcommand("check", "is (u, v) in the result?");
  c_check->add_option("database", db_path)->required();
  c_check->add_option("u", check_u)->required();
  c_check->add_option("v", check_v)->required();
  qa.attach(c_check);

  auto* c_witness = app.add_subcommand("witness", "print one result pair, if any");
  c_witness->add_option("database", db_path)->required();
  qa.attach(c_witness);

  auto* c_eval = app.add_subcommand("eval", "print the whole result, sorted");
  c_eval->add_option("database", db_path)->required();
  qa.attach(c_eval);

  auto* c_count = app.add_subcommand("count", "print the result size");
  c_count->add_option("database", db_path)->required();
  qa.attach(c_count);

  auto* c_enum = app.add_subcommand("enum", "stream the result pairs");
  c_enum->add_option("database", db_path)->required();
  qa.attach(c_enum);
  c_enum->add_option("--mode", eo.mode, "baseline|sublinear|sublinear-lazy|restricted|approx");
  c_enum->add_flag("--report-delay", eo.report_delay, "emit a JSON delay summary");
  c_enum->add_option("--delay-out", eo.delay_out, "append delay summaries to this file");
  c_enum->add_option("--update-script", eo.update_script,
                     "replay updates; '!enum' lines trigger checkpoints");
  c_enum->add_option("--cap", cap_flag, "sublinear buffer cap override");

  auto* c_classify = app.add_subcommand("classify", "print the query's syntactic class");
  c_classify->add_option("database", db_path)->required();
  qa.attach(c_classify);

  auto* c_gen = app.add_subcommand("gen", "generate a reduction instance");
  c_gen->add_option("kind", ga.kind, "ov|tri|bmm|sbmm|ovcount|omv|tridyn")->required();
  c_gen->add_option("--n", ga.n);
  c_gen->add_option("--d", ga.d);
  c_gen->add_option("--seed", ga.seed);
  c_gen->add_option("--out", ga.out, "output file prefix");

  auto* c_verify = app.add_subcommand("verify", "run engine vs oracle on an instance");
  c_verify->add_option("prefix", verify_prefix, "instance file prefix")->required();

  auto* c_bench = app.add_subcommand("bench", "delay sweep over a graph family");
  c_bench->add_option("--family", ba.family,
                      "sparse-random|dense-random|bipartite|bounded-degree");
  c_bench->add_option("--sizes", sizes_csv, "comma-separated node counts")->required();
  c_bench->add_option("-q,--query", ba.query);
  c_bench->add_option("--mode", ba.mode);
  c_bench->add_option("--seed", ba.seed);
  c_bench->add_option("--prob", ba.prob, "edge probability (dense-random, bipartite)");
  c_bench->add_option("--avg-out", ba.avg_out, "arcs per node (sparse-random)");
  c_bench->add_option("--delta", ba.delta, "degree bound (bounded-degree)");
  c_bench->add_option("--cap", bench_cap_flag, "sublinear buffer cap override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2; --help stays 0
  }

  try {
    if (c_boole->parsed()) {
      rpq::GraphDatabase db = load_db(db_path);
      rpq::Nfa nfa = compile_for(db, qa.resolve());
      std::cout << (rpq::boole(db, nfa) ? "true" : "false") << '\n';
      return 0;
    }
    if (c_check->parsed()) {
      rpq::GraphDatabase db = load_db(db_path);
      rpq::Nfa nfa = compile_for(db, qa.resolve());
      bool r = rpq::check(db, nfa, db.require_node(check_u), db.require_node(check_v));
      std::cout << (r ? "true" : "false") << '\n';
      return 0;
    }
    if (c_witness->parsed()) {
      rpq::GraphDatabase db = load_db(db_path);
      rpq::Nfa nfa = compile_for(db, qa.resolve());
      auto w = rpq::witness(db, nfa);
      if (w)
        std::cout << db.name(w->first) << '\t' << db.name(w->second) << '\n';
      else
        std::cout << "none\n";
      return 0;
    }
    if (c_eval->parsed()) {
      rpq::GraphDatabase db = load_db(db_path);
      rpq::Nfa nfa = compile_for(db, qa.resolve());
      print_pairs(db, rpq::eval_all(db, nfa).pairs, std::cout);
      return 0;
    }
    if (c_count->parsed()) {
      rpq::GraphDatabase db = load_db(db_path);
      rpq::Nfa nfa = compile_for(db, qa.resolve());
      std::cout << rpq::count(db, nfa) << '\n';
      return 0;
    }
    if (c_enum->parsed()) {
      if (cap_flag >= 0) eo.cap = static_cast<std::size_t>(cap_flag);
      return run_enum(db_path, qa, eo);
    }
    if (c_classify->parsed()) {
      rpq::GraphDatabase db = load_db(db_path);
      std::vector<std::string> queries;
      if (!qa.query.empty()) {
        queries.push_back(qa.query);
      } else if (!qa.query_file.empty()) {
        std::istringstream in(read_file(qa.query_file));
        std::string line;
        while (std::getline(in, line))
          if (!line.empty() && line[0] != '#') queries.push_back(line);
      }
      if (queries.empty()) throw rpq::Error("no query given (use -q or --query-file)");
      for (const std::string& q : queries)
        std::cout << class_name(rpq::classify(rpq::parse_rpq(q, db.alphabet()))) << '\n';
      return 0;
    }
    if (c_gen->parsed()) return run_gen(ga);
    if (c_verify->parsed()) return run_verify(verify_prefix);
    if (c_bench->parsed()) {
      if (bench_cap_flag >= 0) ba.cap = static_cast<std::size_t>(bench_cap_flag);
      std::stringstream ss(sizes_csv);
      std::string item;
      while (std::getline(ss, item, ',')) ba.sizes.push_back(std::stoul(item));
      return run_bench(ba);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
