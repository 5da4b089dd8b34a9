#include "qflag/flagverify.hpp"
#include "qflag/repmod.hpp"
#include "qflag/rmatrix.hpp"
#include "qflag/runconfig.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace qflag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGate = 3;

struct ContextFlags {
  std::string config, type = "A", subset, output;
  int rank = 1, N = 16, M = 8, shift_budget = 8, depth = 2, workers = 1;
  double q = 0.5;
  unsigned seed = 20240611;
  bool relations_only = false, cache = false;

  CLI::Option *o_type = nullptr, *o_rank = nullptr, *o_q = nullptr, *o_subset = nullptr, *o_N = nullptr,
              *o_M = nullptr, *o_budget = nullptr, *o_depth = nullptr, *o_seed = nullptr, *o_workers = nullptr,
              *o_output = nullptr;

  void add(CLI::App* app, bool suite) {
    o_type = app->add_option("--type", type, "Lie type A, B, C, D or G");
    o_rank = app->add_option("--rank", rank, "rank");
    o_q = app->add_option("--q", q, "deformation parameter in (0,1)");
    o_subset = app->add_option("--subset", subset, "comma-separated 1-based nodes of S");
    o_N = app->add_option("--trunc", N, "Fock truncation per leg");
    o_M = app->add_option("--block", M, "block size per leg");
    if (!suite) return;
    app->add_option("--config", config, "JSON run config; flags given explicitly override it");
    o_budget = app->add_option("--shift-budget", shift_budget, "index shift reserved above the block");
    o_depth = app->add_option("--depth", depth, "battery depth");
    o_seed = app->add_option("--seed", seed, "sampling seed");
    o_workers = app->add_option("--workers", workers, "worker threads");
    o_output = app->add_option("--output", output, "report path");
    app->add_flag("--relations-only", relations_only, "only the algebra relations and eps");
    app->add_flag("--cache", cache, "reuse case reports from the cache directory");
  }

  RunConfig config_base() const {
    RunConfig c;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw DomainError("cannot read config " + config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw DomainError(std::string("config is not valid JSON: ") + e.what());
      }
      c = config_from_json(j);
    }
    if (o_type->count() || config.empty()) c.lie_type = parse_lie_type(type);
    if (o_rank->count() || config.empty()) c.rank = rank;
    if (o_q->count() || config.empty()) c.q = q;
    if (o_subset->count() || config.empty()) c.S = parse_subset(subset, c.rank);
    if (o_N->count() || config.empty()) c.N = N;
    if (o_M->count() || config.empty()) c.M = M;
    if (o_budget && (o_budget->count() || config.empty())) c.shift_budget = shift_budget;
    if (o_depth->count() || config.empty()) c.battery_depth = depth;
    if (o_seed->count() || config.empty()) c.seed = seed;
    if (o_workers->count() || config.empty()) c.workers = workers;
    if (o_output->count() || c.output.empty()) c.output = output;
    if (relations_only) c.relations_only = true;
    if (cache) c.use_cache = true;
    return c;
  }

  FlagContext context() const {
    const LieType t = parse_lie_type(type);
    const RootDatum dt = build_root_datum(t, rank, q);
    if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
    return make_flag_context(dt, parse_subset(subset, rank), N, M);
  }
};

std::string eps_string(const CaseReport& r) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", r.eps[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

void print_case(const CaseReport& r) {
  std::printf("%s  %-28s eps=%s  checks=%zu  %.2fs\n", r.pass() ? "PASS" : "FAIL", r.label.c_str(),
              eps_string(r).c_str(), r.checks.size(), r.seconds);
  for (const auto& c : r.checks)
    if (!c.pass)
      std::printf("      %-24s residual=%.3e gate=%.1e %s\n", c.name.c_str(), c.residual, c.gate, c.note.c_str());
}

int finish(const RunConfig& c, const std::vector<CaseReport>& reports) {
  bool pass = true;
  for (const auto& r : reports) {
    print_case(r);
    pass = pass && r.pass();
  }
  const std::string path = c.output.empty() ? "qflag-report.json" : c.output;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path);
  out << dump_json(report_json(c, reports)) << "\n";
  std::printf("report: %s\n", path.c_str());
  return pass ? kExitOk : kExitGate;
}

Weight weight_arg(const std::vector<int>& v, std::size_t rank, const std::string& what) {
  if (v.size() != rank)
    throw DomainError(what + " needs " + std::to_string(rank) + " fundamental-weight coordinates");
  for (int x : v)
    if (x < 0) throw DomainError(what + " must be dominant");
  return Weight(v);
}

json module_json(const Module& V) {
  const auto rank = static_cast<int>(V.datum.rank);
  json mats;
  for (int r = 0; r < rank; ++r) {
    const std::string n = std::to_string(r + 1);
    mats["E" + n] = matrix_json(V.E[static_cast<std::size_t>(r)]);
    mats["F" + n] = matrix_json(V.F[static_cast<std::size_t>(r)]);
    mats["L" + n] = matrix_json(V.l_diag(Weight::fundamental(static_cast<std::size_t>(rank), r)).cast<cplx>().asDiagonal().toDenseMatrix());
  }
  json weights = json::array();
  for (const auto& w : V.weights) weights.push_back(w.coords());
  return {{"dim", V.dim()}, {"weights", weights}, {"matrices", mats}};
}

json matrices_target(const ContextFlags& f, const std::string& what) {
  const auto colon = what.find(':');
  if (colon == std::string::npos) throw DomainError("target must look like kind:argument");
  const std::string kind = what.substr(0, colon), arg = what.substr(colon + 1);
  const LieType t = parse_lie_type(f.type);
  if (!(f.q > 0.0 && f.q < 1.0)) throw DomainError("q must lie in (0,1)");
  const RootDatum dt = build_root_datum(t, f.rank, f.q);
  const auto rank = static_cast<std::size_t>(f.rank);
  json out = {{"target", what}, {"lie_type", f.type}, {"rank", f.rank}, {"q", f.q}};

  if (kind == "irrep") {
    const auto V = build_irrep(dt, weight_arg(parse_int_list(arg), rank, "irrep weight"));
    out.update(module_json(*V));
    return out;
  }
  if (kind == "rmatrix") {
    std::string a = arg;
    for (char& ch : a)
      if (ch == ';' || ch == '|') ch = ',';
    const std::vector<int> all = parse_int_list(a);
    if (all.size() != 2 * rank) throw DomainError("rmatrix needs two weights of " + std::to_string(rank) + " coordinates");
    const Weight lam = weight_arg({all.begin(), all.begin() + static_cast<long>(rank)}, rank, "rmatrix weight");
    const Weight mu = weight_arg({all.begin() + static_cast<long>(rank), all.end()}, rank, "rmatrix weight");
    const auto ra = r_action(build_irrep(dt, lam), build_irrep(dt, mu));
    out["R"] = matrix_json(ra->R);
    out["Rtilde"] = matrix_json(ra->Rtilde);
    return out;
  }
  const FlagContext ctx = f.context();
  out["subset"] = f.subset;
  out["N"] = ctx.N;
  out["M"] = ctx.M;
  out["legs"] = ctx.legs();
  if (kind == "kop") {
    const Weight om(parse_int_list(arg));
    if (om.coords().size() != rank) throw DomainError("kop weight needs " + std::to_string(rank) + " coordinates");
    const Eigen::MatrixXcd K = principal_block(ctx, k_general(ctx, om).op);
    out["diagonal"] = matrix_json(K.diagonal());
    out["off_diagonal_max"] = (K - Eigen::MatrixXcd(K.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    return out;
  }
  if (kind == "xop") {
    const auto r = parse_int_list(arg);
    if (r.size() != 1 || r[0] < 1 || r[0] > f.rank) throw DomainError("xop needs one node in 1.." + std::to_string(f.rank));
    const XOperator& x = x_plus(ctx, r[0] - 1);
    out["x_plus"] = matrix_json(principal_block(ctx, x.plus));
    out["x_minus"] = matrix_json(principal_block(ctx, x.minus));
    return out;
  }
  throw DomainError("unknown target '" + kind + "' (irrep, rmatrix, kop, xop)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for quantum flag manifolds and degenerate quantized enveloping algebras"};
  app.require_subcommand(1);

  ContextFlags vf;
  auto* verify = app.add_subcommand("verify", "run the verification suite on one context or a config's case list");
  vf.add(verify, true);
  bool catalog = false, optional = false;
  verify->add_flag("--catalog", catalog, "run the default case catalog at --q");
  verify->add_flag("--optional", optional, "include the optional catalog cases");

  ContextFlags sf;
  auto* sweep = app.add_subcommand("sweep", "run the suite over a grid of q values");
  sf.add(sweep, true);
  std::string q_grid;
  bool sweep_catalog = false;
  auto* o_grid = sweep->add_option("--q-grid", q_grid, "comma-separated q values");
  sweep->add_flag("--catalog", sweep_catalog, "cross the default catalog with the q grid");

  ContextFlags mf;
  auto* matrices = app.add_subcommand("matrices", "export matrices as JSON");
  mf.add(matrices, false);
  std::string what, mout;
  matrices->add_option("--what", what, "irrep:λ, rmatrix:λ,μ, kop:λ or xop:r")->required();
  matrices->add_option("--output", mout, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      RunConfig c = vf.config_base();
      if (catalog) {
        c.cases.clear();
        for (const auto& cc : default_catalog(optional)) c.cases.push_back({cc.type, cc.rank, c.q, cc.S});
      }
      c.validate();
      return finish(c, run_cases(c));
    }
    if (sweep->parsed()) {
      RunConfig c = sf.config_base();
      if (o_grid->count()) {
        const auto grid = parse_real_list(q_grid);
        if (grid.empty()) throw DomainError("empty q grid");
        std::vector<CaseSpec> base;
        if (sweep_catalog) {
          for (const auto& cc : default_catalog()) base.push_back({cc.type, cc.rank, 0.0, cc.S});
        } else if (!c.cases.empty()) {
          base = c.cases;
        } else {
          base.push_back({c.lie_type, c.rank, 0.0, c.S});
        }
        c.cases.clear();
        for (const auto& b : base)
          for (double q : grid) c.cases.push_back({b.type, b.rank, q, b.S});
      } else if (c.cases.empty()) {
        throw DomainError("sweep needs --q-grid or a config with cases");
      }
      c.validate();
      return finish(c, run_cases(c));
    }
    if (matrices->parsed()) {
      const std::string text = dump_json(matrices_target(mf, what));
      if (mout.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(mout);
        if (!out) throw std::runtime_error("cannot write " + mout);
        out << text << "\n";
      }
      return kExitOk;
    }
  } catch (const DomainError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
