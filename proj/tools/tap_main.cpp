#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tap/harness.hpp"
#include "tap/trace.hpp"

namespace {

using nlohmann::json;
using namespace tap;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kViolation = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json link_json(const Instance& inst, LinkId id) {
  const Link& l = inst.link(id);
  return json{{"id", id}, {"u", l.u}, {"v", l.v}};
}

int run_solve(const std::string& file, const std::string& mode, const std::string& trace_out, int forced_gt) {
  Instance inst = read_instance_file(file);
  CoverOptions opt;
  opt.mode = mode == "listing" ? CoverMode::listing : CoverMode::accumulate;
  opt.forced_gt = forced_gt;
  CoverResult res = cover(inst, opt);
  std::cout << serialize_solution(inst, res.solution);
  if (!trace_out.empty()) std::ofstream(trace_out) << trace_to_json(res) << "\n";
  std::cerr << "links " << res.solution.size() << ", steps " << res.trace.steps.size() << ", falsifications "
            << res.trace.falsifications.size() << "\n";
  return is_feasible(inst, res.solution) ? kOk : kViolation;
}

int run_exact(const std::string& file, bool all, int max_links) {
  Instance inst = read_instance_file(file);
  OracleOptions o;
  o.max_links = max_links;
  if (all) {
    OptimaList list = enumerate_shadow_minimal_optima(inst, 1000, o);
    json j{{"status", to_string(list.status)}, {"value", list.value}, {"truncated", list.truncated}};
    j["optima"] = json::array();
    for (const auto& f : list.optima) {
      json one = json::array();
      for (const LinkUse& u : f) one.push_back({u.u, u.v});
      j["optima"].push_back(one);
    }
    std::cout << j.dump(2) << "\n";
    return list.status == OracleStatus::infeasible ? kInvalid : kOk;
  }
  OracleResult r = exact_opt(inst, o);
  if (r.status != OracleStatus::optimal) {
    std::cerr << "oracle: " << to_string(r.status) << "\n";
    return r.status == OracleStatus::infeasible ? kInvalid : kViolation;
  }
  std::cout << serialize_solution(inst, r.solution);
  return kOk;
}

int run_verify(const std::string& file, const std::string& solution, const std::string& trace) {
  Instance inst = read_instance_file(file);
  Solution sol = parse_solution(inst, slurp(solution));
  int code = kOk;
  FeasibilityReport rep = check_feasibility(inst, sol);
  if (!rep.feasible) {
    std::cout << "infeasible: uncovered edges";
    for (NodeId c : rep.uncovered) std::cout << " " << c << "-" << inst.tree().parent(c);
    std::cout << "\n";
    code = kViolation;
  } else {
    std::cout << "feasible: " << sol.size() << " links\n";
  }
  if (!trace.empty()) {
    AuditReport audit = audit_ledger(parse_trace(slurp(trace)));
    for (const std::string& v : audit.violations) std::cout << "ledger: " << v << "\n";
    if (!audit.clean()) code = kViolation;
    else std::cout << "ledger: clean\n";
  }
  return code;
}

int run_analyze(const std::string& file) {
  Instance inst = read_instance_file(file);
  ContractionState state(inst);
  TreeView view(state);
  std::vector<StemRecord> stems = find_stems(view);
  GoldenTicketMap gt = golden_tickets(view, stems);
  json j;
  j["nodes"] = inst.node_count();
  j["links"] = inst.link_count();
  j["stems"] = json::array();
  for (const StemRecord& s : stems) j["stems"].push_back({{"stem", s.stem}, {"twin", link_json(inst, s.twin)}});
  j["golden_tickets"] = json::array();
  for (LinkId id : gt.ticketed()) {
    json e = link_json(inst, id);
    e["gt"] = gt.value(id);
    e["witness"] = gt.witness[id];
    e["pattern"] = to_string(gt.pattern[id]);
    j["golden_tickets"].push_back(e);
  }
  j["up_links"] = json::object();
  for (NodeId leaf : view.leaves()) j["up_links"][std::to_string(leaf)] = link_json(inst, up_link(view, leaf));
  EdgeCoverResult ec = min_weight_edge_cover(leaf_cover_graph(view, gt));
  UsableMatching um = stem_matching(view, ec, gt, stems);
  SemiClosedTree sct = semi_closed_subtree(view, um.matching, stems);
  j["edge_cover_weight3"] = ec.weight;
  j["matching"] = json::array();
  for (const LinkUse& u : um.matching) j["matching"].push_back({u.u, u.v});
  j["semi_closed"] = {{"root", sct.root}, {"leaves", sct.leaves}, {"unmatched", sct.unmatched}};
  json basic = json::array();
  for (const LinkUse& u : sct.basic) basic.push_back({u.u, u.v});
  j["semi_closed"]["basic_cover"] = basic;
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int run_fuzz(FuzzOptions o, bool csv) {
  FuzzReport r = fuzz(o);
  if (csv) {
    std::cout << "index,seed,shape,n,m,opt,alg,baseline,steps,extra_credit,falsifications,failures\n";
    for (const FuzzCase& c : r.cases) {
      std::cout << c.index << "," << c.params.seed << "," << to_string(c.params.shape) << "," << c.n << "," << c.m
                << "," << c.opt << "," << c.alg << "," << c.baseline << "," << c.steps << ","
                << c.extra_credit_steps << "," << c.falsifications << "," << c.failures.size() << "\n";
    }
  }
  std::cerr << "instances " << r.cases.size() << ", oracle-solved " << r.oracle_solved << ", worst ratio "
            << r.worst_ratio << ", ratio violations " << r.ratio_violations << ", infeasible "
            << r.infeasible_outputs << ", audit failures " << r.audit_failures << ", errors " << r.errors << "\n";
  for (const FuzzCase& c : r.cases) {
    if (c.failures.empty()) continue;
    std::cerr << "case " << c.index << " seed " << c.params.seed << ": " << c.failures.front();
    if (!c.counterexample.empty()) std::cerr << " -> " << c.counterexample;
    std::cerr << "\n";
  }
  return r.clean() ? kOk : kViolation;
}

std::vector<std::pair<int, int>> parse_sizes(const std::vector<std::string>& specs) {
  std::vector<std::pair<int, int>> out;
  for (const std::string& s : specs) {
    auto colon = s.find(':');
    int n = std::stoi(s.substr(0, colon));
    int m = colon == std::string::npos ? 10 * n : std::stoi(s.substr(colon + 1));
    out.emplace_back(n, m);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree augmentation solver"};
  app.require_subcommand(1);

  std::string file, mode = "accumulate", trace_out, solution;
  int forced_gt = -1;
  auto* solve = app.add_subcommand("solve", "Approximate cover; prints the solution");
  solve->add_option("file", file)->required();
  solve->add_option("--mode", mode)->check(CLI::IsMember({"accumulate", "listing"}));
  solve->add_option("--trace", trace_out, "Write the step trace as JSON");
  solve->add_option("--forced-gt", forced_gt, "Give every link this golden-ticket value");

  bool all_optima = false;
  int max_links = 24;
  auto* exact = app.add_subcommand("exact", "Exact optimum for small instances");
  exact->add_option("file", file)->required();
  exact->add_flag("--all-optima", all_optima, "List all shadow-minimal optima as JSON");
  exact->add_option("--max-links", max_links);

  std::string trace_in;
  auto* verify = app.add_subcommand("verify", "Check a solution and optionally a trace");
  verify->add_option("file", file)->required();
  verify->add_option("--solution", solution)->required();
  verify->add_option("--trace", trace_in);

  auto* analyze = app.add_subcommand("analyze", "Stems, golden tickets and the first semi-closed tree");
  analyze->add_option("file", file)->required();

  FuzzOptions fo;
  bool csv = false;
  auto* fz = app.add_subcommand("fuzz", "Random campaign against the oracle");
  fz->add_option("--count", fo.count);
  fz->add_option("--seed", fo.seed);
  fz->add_option("--min-n", fo.min_n);
  fz->add_option("--max-n", fo.max_n);
  fz->add_option("--max-m", fo.max_m);
  fz->add_option("--threads", fo.threads);
  fz->add_option("--oracle-max-n", fo.oracle_max_n, "Largest n handed to the oracle; 0 disables it");
  fz->add_option("--out", fo.out_dir, "Directory for minimized counterexamples");
  fz->add_option("--forced-gt", fo.cover.forced_gt);
  fz->add_flag("--csv", csv, "Per-instance CSV on stdout");

  std::vector<std::string> sizes{"1000:10000", "10000:100000"};
  std::uint64_t bench_seed = 1;
  auto* bn = app.add_subcommand("bench", "Per-phase timings as CSV");
  bn->add_option("--sizes", sizes, "n:m pairs")->expected(1, -1);
  bn->add_option("--seed", bench_seed);

  GenParams gp;
  std::string shape = "random";
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--n", gp.n);
  gen->add_option("--m", gp.m);
  gen->add_option("--seed", gp.seed);
  gen->add_option("--shape", shape)->check(CLI::IsMember({"random", "caterpillar", "balanced", "gadget-chain"}));
  gen->add_flag("--leaf-links", gp.leaf_links_only);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(file, mode, trace_out, forced_gt);
    if (*exact) return run_exact(file, all_optima, max_links);
    if (*verify) return run_verify(file, solution, trace_in);
    if (*analyze) return run_analyze(file);
    if (*fz) {
      if (fo.oracle_max_n <= 0) fo.oracle_max_n = -1;
      return run_fuzz(fo, csv);
    }
    if (*bn) {
      std::cout << "n,m,phase,millis\n";
      for (const BenchRow& r : bench(parse_sizes(sizes), bench_seed))
        std::cout << r.n << "," << r.m << "," << r.phase << "," << r.millis << "\n";
      return kOk;
    }
    if (*gen) {
      gp.shape = *parse_shape(shape);
      std::cout << serialize(generate(gp));
      return kOk;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
