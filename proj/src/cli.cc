#include "acsolve/cli.h"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "acsolve/apps.h"
#include "acsolve/boxsimplex.h"
#include "acsolve/io.h"
#include "acsolve/properties.h"
#include "acsolve/sampling.h"
#include "acsolve/spectraplex.h"

namespace acsolve {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Largest allowed difference between the solver's gap and the gap recomputed
// from the emitted solution.
constexpr double kGapConsistency = 1e-9;

struct Common {
  double epsilon = 0.1;
  std::uint64_t seed = 20240601;
  std::optional<long> max_iters;
  long trace_every = 0;
  std::string meq = "exact";
  std::optional<double> meq_accuracy;
  std::string output;
  bool omit_timing = false;
};

struct Inputs {
  std::string matrix, b, c;                   // solve
  std::string cost, p, q;                     // ot
  std::string graph, demand, approximator;    // mmc, flow
  std::string objective = "l1";
  double t = 1.0;
  std::vector<std::string> ops;               // spectraplex
  std::string B;
  std::vector<std::string> suites;            // check
  std::optional<long> samples;
  int bench_n = 50, bench_d = 50, bench_count = 5;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SolverParams BoxParams(const Common& c) {
  SolverParams p;
  p.epsilon = c.epsilon;
  p.seed = c.seed;
  p.max_iters = c.max_iters;
  p.trace_every = c.trace_every;
  return p;
}

json TraceJson(const GapTrace& trace, bool omit_timing) {
  json out = json::array();
  for (const GapRecord& r : trace) {
    json e{{"iteration", r.iteration}, {"gap", r.gap}};
    if (!omit_timing) e["seconds"] = r.seconds;
    out.push_back(e);
  }
  return out;
}

json BoxParamsJson(const SolverParams& p, long T) {
  return json{{"alpha", p.alpha}, {"beta", p.beta},     {"gamma", p.gamma},
              {"eta", p.eta},     {"epsilon", p.epsilon}, {"T", T}};
}

// Solutions are written next to the report, or round-tripped through the
// same text form when the report goes to stdout, so the recomputed gap always
// sees exactly what a reader of the files would see.
class SolutionWriter {
 public:
  explicit SolutionWriter(const std::string& output) {
    if (output.empty()) return;
    std::string stem = output;
    const std::string ext = ".json";
    if (stem.size() > ext.size() && stem.ends_with(ext)) {
      stem.resize(stem.size() - ext.size());
    }
    stem_ = stem;
  }

  Vec vector(const std::string& key, const Vec& v) {
    if (!stem_) {
      Vec out(v.size());
      for (int i = 0; i < v.size(); ++i) out[i] = std::stod(format_double(v[i]));
      return out;
    }
    std::string path = *stem_ + "." + key + ".txt";
    write_vector(path, v);
    files_[key] = path;
    return read_vector(path);
  }

  Mat matrix(const std::string& key, const Mat& m) {
    if (!stem_) {
      return m.unaryExpr([](double e) { return std::stod(format_double(e)); });
    }
    std::string path = *stem_ + "." + key + ".csv";
    write_csv_matrix(path, m);
    files_[key] = path;
    return read_csv_matrix(path);
  }

  const json& files() const { return files_; }

 private:
  std::optional<std::string> stem_;
  json files_ = json::object();
};

double CheckedGap(double recomputed, double solver_gap) {
  if (!(std::abs(recomputed - solver_gap) <= kGapConsistency)) {
    throw std::runtime_error("recomputed gap " + format_double(recomputed) +
                             " disagrees with solver gap " +
                             format_double(solver_gap));
  }
  return recomputed;
}

json Header(const std::string& command, const Common& c) {
  return json{{"version", kVersion}, {"command", command}, {"seed", c.seed}};
}

// Fills the fields shared by every box-simplex based command.
void AddSolve(json& rep, const BoxSimplexInstance& inst, const SolverParams& p,
              const SolveResult& res, double final_gap, const Common& c) {
  rep["instance"] = {{"n", inst.n()}, {"d", inst.d()}, {"L", inst.L}};
  rep["parameters"] = BoxParamsJson(p, res.T);
  rep["trace"] = TraceJson(res.trace, c.omit_timing);
  rep["finalGap"] = final_gap;
  rep["value"] = res.value;
  rep["iterations"] = res.iterations;
  rep["earlyExit"] = res.early_exit;
}

json RunSolve(const Common& c, const Inputs& in) {
  SparseMatrix A = read_matrix_market(in.matrix);
  Vec b = read_vector(in.b);
  BoxSimplexInstance inst = BoxSimplexInstance::Make(std::move(A), std::move(b),
                                                     read_vector(in.c));
  SolverParams p = BoxParams(c);
  SolveResult res = solve(inst, p);
  SolutionWriter w(c.output);
  Vec x = w.vector("x", res.x), y = w.vector("y", res.y);
  json rep = Header("solve", c);
  AddSolve(rep, inst, p, res, CheckedGap(duality_gap(inst, x, y), res.gap), c);
  rep["solutionFiles"] = w.files();
  return rep;
}

json RunOt(const Common& c, const Inputs& in) {
  Mat C = read_csv_matrix(in.cost);
  Vec p_marg = read_vector(in.p);
  OtInstance ot = OtInstance::Make(std::move(C), std::move(p_marg), read_vector(in.q));
  SolverParams p = BoxParams(c);
  OtResult res = solve_ot(ot, c.epsilon, p);
  SolutionWriter w(c.output);
  Mat plan = w.matrix("plan", res.plan);
  Vec x = w.vector("x", res.solve.x), y = w.vector("y", res.solve.y);
  BoxSimplexInstance inst = ot_to_boxsimplex(ot);
  json rep = Header("ot", c);
  AddSolve(rep, inst, p, res.solve,
           CheckedGap(duality_gap(inst, x, y), res.solve.gap), c);
  rep["cost"] = ot.C.cwiseProduct(plan).sum();
  rep["marginalError"] =
      std::max((plan.rowwise().sum() - ot.p).lpNorm<Eigen::Infinity>(),
               (plan.colwise().sum().transpose() - ot.q).lpNorm<Eigen::Infinity>());
  rep["rawMarginalViolation"] = res.marginal_violation;
  rep["solutionFiles"] = w.files();
  return rep;
}

GraphInstance ReadGraph(const std::string& path) {
  std::vector<GraphEdge> edges;
  int vertices = 0;
  for (const EdgeLine& e : read_edge_list(path)) {
    edges.push_back({e.u, e.v, e.w});
    vertices = std::max({vertices, e.u + 1, e.v + 1});
  }
  return GraphInstance::Make(vertices, std::move(edges));
}

json RunMmc(const Common& c, const Inputs& in) {
  GraphInstance g = ReadGraph(in.graph);
  SolverParams p = BoxParams(c);
  MmcResult res = solve_mmc(g, c.epsilon, p);
  SolutionWriter w(c.output);
  Vec x = w.vector("x", res.solve.x), y = w.vector("y", res.solve.y);
  BoxSimplexInstance inst = dualize(mmc_game(g));
  p.epsilon = c.epsilon * (res.scale > 0.0 ? res.scale : 1.0);
  json rep = Header("mmc", c);
  AddSolve(rep, inst, p, res.solve,
           CheckedGap(duality_gap(inst, x, y), res.solve.gap), c);
  rep["mmcValue"] = res.value;
  rep["lower"] = res.lower;
  rep["upper"] = res.upper;
  rep["scale"] = res.scale;
  if (res.cycle) {
    rep["cycle"] = *res.cycle;
    rep["cycleMean"] = res.cycle_mean;
  } else {
    rep["cycle"] = nullptr;
  }
  rep["solutionFiles"] = w.files();
  return rep;
}

json RunFlow(const Common& c, const Inputs& in) {
  GraphInstance g = ReadGraph(in.graph);
  CostApproximator R;
  R.R = read_matrix_market(in.approximator, &R.alpha);
  Vec demand = read_vector(in.demand);
  SolverParams p = BoxParams(c);
  FlowResult res;
  BoxSimplexInstance inst;
  if (in.objective == "l1") {
    res = solve_l1_flow_given_R(g, R, demand, in.t, c.epsilon, p);
    inst = dualize(l1_flow_game(g, R, demand, in.t));
  } else {
    res = solve_maxflow_given_R(g, R, demand, in.t, c.epsilon, p);
    inst = maxflow_game(g, R, demand, in.t);
  }
  p.epsilon = c.epsilon * in.t;
  SolutionWriter w(c.output);
  w.vector("flow", res.flow);
  Vec x = w.vector("x", res.solve.x), y = w.vector("y", res.solve.y);
  json rep = Header("flow", c);
  AddSolve(rep, inst, p, res.solve,
           CheckedGap(duality_gap(inst, x, y), res.solve.gap), c);
  rep["objective"] = in.objective;
  rep["t"] = in.t;
  rep["alpha"] = R.alpha;
  rep["flowValue"] = res.value;
  rep["solutionFiles"] = w.files();
  return rep;
}

json RunSpectraplex(const Common& c, const Inputs& in) {
  std::vector<Mat> A;
  for (const std::string& path : in.ops) A.push_back(read_dense_matrix_market(path));
  Mat B = read_dense_matrix_market(in.B);
  OperatorSet ops = OperatorSet::Make(std::move(A), std::move(B), read_vector(in.c));
  SpectraplexParams p;
  p.epsilon = c.epsilon;
  p.seed = c.seed;
  p.max_iters = c.max_iters;
  p.trace_every = c.trace_every;
  p.meq = parse_meq_mode(c.meq);
  p.meq_accuracy = c.meq_accuracy;
  SpectraplexResult res = solve_spectraplex(ops, p);
  SolutionWriter w(c.output);
  Vec x = w.vector("x", res.x);
  Mat Y = w.matrix("Y", res.Y);
  json rep = Header("spectraplex", c);
  rep["instance"] = {{"n", ops.n()}, {"d", ops.d()}, {"L_A", res.L_A},
                     {"L_tot", res.L_tot}};
  rep["parameters"] = {{"alpha", p.alpha},
                       {"beta", p.beta},
                       {"gamma", p.gamma},
                       {"eta", p.eta},
                       {"mu", p.mu.value_or(1.0 / std::max(1, ops.n()))},
                       {"epsilon", p.epsilon},
                       {"meq", to_string(p.meq)},
                       {"T", res.T}};
  if (p.meq_accuracy) rep["parameters"]["meqAccuracy"] = *p.meq_accuracy;
  rep["trace"] = TraceJson(res.trace, c.omit_timing);
  rep["finalGap"] = CheckedGap(spectraplex_gap(ops, x, Y), res.gap);
  rep["value"] = res.value;
  rep["iterations"] = res.iterations;
  rep["earlyExit"] = res.early_exit;
  rep["maxCoefficient"] = res.max_coef;
  rep["meqCalls"] = res.meq_calls;
  rep["queryAccuracy"] = res.query_accuracy;
  rep["solutionFiles"] = w.files();
  return rep;
}

json RunCheck(const Common& c, const Inputs& in, bool& all_passed) {
  std::vector<std::string> names = in.suites.empty() ? suite_names() : in.suites;
  json rep = Header("check", c);
  json suites = json::array();
  long passed = 0, failed = 0;
  for (const std::string& name : names) {
    Clock::time_point start = Clock::now();
    SuiteReport r = run_suite(name, in.samples.value_or(default_samples(name)), c.seed);
    json e{{"name", r.name},
           {"samples", r.samples},
           {"violations", r.violations},
           {"allowedViolations", r.allowed_violations},
           {"worst", r.worst},
           {"tolerance", r.tolerance},
           {"passed", r.passed()}};
    if (!c.omit_timing) e["seconds"] = Seconds(start);
    suites.push_back(e);
    ++(r.passed() ? passed : failed);
  }
  rep["suites"] = suites;
  rep["passed"] = passed;
  rep["failed"] = failed;
  all_passed = failed == 0;
  return rep;
}

json RunBench(const Common& c, const Inputs& in) {
  Rng rng(c.seed);
  json rep = Header("bench", c);
  rep["instance"] = {{"n", in.bench_n}, {"d", in.bench_d}, {"count", in.bench_count}};
  rep["relativeEpsilon"] = c.epsilon;
  json runs = json::array();
  for (int k = 0; k < in.bench_count; ++k) {
    BoxSimplexInstance inst = random_instance(rng, in.bench_n, in.bench_d);
    SolverParams p = BoxParams(c);
    p.epsilon = c.epsilon * inst.L;
    Clock::time_point start = Clock::now();
    SolveResult res = solve(inst, p);
    json e{{"L", inst.L},
           {"T", res.T},
           {"iterations", res.iterations},
           {"gap", res.gap},
           {"productsPerIteration", res.products_per_iteration}};
    if (!c.omit_timing) e["seconds"] = Seconds(start);
    runs.push_back(e);
  }
  rep["runs"] = runs;
  return rep;
}

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--epsilon", c.epsilon, "Target duality gap")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--max-iters", c.max_iters, "Iteration cap")
      ->check(CLI::PositiveNumber);
  sub->add_option("--trace-every", c.trace_every,
                  "Gap trace interval (0 picks T/100)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--output", c.output, "Report path; solutions go alongside");
  sub->add_flag("--omit-timing", c.omit_timing,
                "Leave wall-clock fields out of the report");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Box-simplex and box-spectraplex game solver", "acsolve"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common c;
  Inputs in;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a box-simplex game");
  AddCommon(solve_cmd, c);
  solve_cmd->add_option("--matrix", in.matrix, "A in Matrix Market format")->required();
  solve_cmd->add_option("--b", in.b, "b vector file")->required();
  solve_cmd->add_option("--c", in.c, "c vector file")->required();

  CLI::App* ot_cmd = app.add_subcommand("ot", "Optimal transport");
  AddCommon(ot_cmd, c);
  ot_cmd->add_option("--cost", in.cost, "Cost matrix CSV")->required();
  ot_cmd->add_option("--p", in.p, "Row marginal file")->required();
  ot_cmd->add_option("--q", in.q, "Column marginal file")->required();

  CLI::App* mmc_cmd = app.add_subcommand("mmc", "Min-mean cycle value");
  AddCommon(mmc_cmd, c);
  mmc_cmd->add_option("--graph", in.graph, "Edge list \"u v w\"")->required();

  CLI::App* flow_cmd = app.add_subcommand("flow", "Flow with a cost approximator");
  AddCommon(flow_cmd, c);
  flow_cmd->add_option("--graph", in.graph, "Edge list \"u v w\"")->required();
  flow_cmd->add_option("--demand", in.demand, "Demand vector file")->required();
  flow_cmd->add_option("--approximator", in.approximator,
                       "R in Matrix Market format with a %alpha comment")
      ->required();
  flow_cmd->add_option("--t", in.t, "Scale parameter")->check(CLI::PositiveNumber);
  flow_cmd->add_option("--objective", in.objective, "l1 or linf")
      ->check(CLI::IsMember({"l1", "linf"}));

  CLI::App* sp_cmd = app.add_subcommand("spectraplex", "Solve a box-spectraplex game");
  AddCommon(sp_cmd, c);
  sp_cmd->add_option("--ops", in.ops, "Comma-separated A_i Matrix Market files")
      ->required()
      ->delimiter(',');
  sp_cmd->add_option("--B", in.B, "B in Matrix Market format")->required();
  sp_cmd->add_option("--c", in.c, "c vector file")->required();
  sp_cmd->add_option("--meq", c.meq, "exact or sketched")
      ->check(CLI::IsMember({"exact", "sketched"}));
  sp_cmd->add_option("--meq-accuracy", c.meq_accuracy,
                     "Multiplicative MEQ accuracy override (sketched mode)")
      ->check(CLI::PositiveNumber);

  CLI::App* check_cmd = app.add_subcommand("check", "Run property suites");
  AddCommon(check_cmd, c);
  check_cmd->add_option("--suite", in.suites, "Suite name (repeatable)")
      ->check(CLI::IsMember(suite_names()));
  check_cmd->add_option("--samples", in.samples, "Samples per suite")
      ->check(CLI::PositiveNumber);

  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Random box-simplex instances; --epsilon is relative to L");
  AddCommon(bench_cmd, c);
  bench_cmd->add_option("--n", in.bench_n)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--d", in.bench_d)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--count", in.bench_count)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    Clock::time_point start = Clock::now();
    bool ok = true;
    json rep;
    if (*solve_cmd) rep = RunSolve(c, in);
    if (*ot_cmd) rep = RunOt(c, in);
    if (*mmc_cmd) rep = RunMmc(c, in);
    if (*flow_cmd) rep = RunFlow(c, in);
    if (*sp_cmd) rep = RunSpectraplex(c, in);
    if (*check_cmd) rep = RunCheck(c, in, ok);
    if (*bench_cmd) rep = RunBench(c, in);
    if (!c.omit_timing) rep["wallClockSeconds"] = Seconds(start);
    const std::string text = rep.dump(2) + "\n";
    if (c.output.empty()) {
      out << text;
    } else {
      std::ofstream f(c.output);
      if (!(f << text)) throw std::runtime_error(c.output + ": cannot write report");
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    err << "acsolve: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace acsolve
