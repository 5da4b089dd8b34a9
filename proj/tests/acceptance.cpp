// One line per acceptance criterion; exit status is nonzero if any criterion fails.
#include "qflag/flagverify.hpp"
#include "qflag/linalg.hpp"
#include "qflag/polgq.hpp"
#include "qflag/repmod.hpp"
#include "qflag/rmatrix.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace qflag;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

bool all_ok = true;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  all_ok = all_ok && o.pass;
  std::printf("criterion %d: %s  %s  [%s]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

VectorXcd random_vector(std::mt19937& rng, Index n) {
  std::normal_distribution<double> g;
  VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

MatrixXcd coproduct_matrix(const Module& V, const Module& W, const Symbol& s) {
  if (s.kind == Symbol::Kind::L) return linalg::kron(V.symbol_matrix(s), W.symbol_matrix(s));
  const Weight a = V.datum.simple_root(s.node);
  return linalg::kron(V.symbol_matrix(s), W.symbol_matrix(Symbol::L(a))) +
         linalg::kron(V.symbol_matrix(Symbol::L(-a)), W.symbol_matrix(s));
}

const CheckResult* find_check(const CaseReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

int note_count(const CheckResult& c, const std::string& key) {
  const auto p = c.note.find(key + "=");
  return p == std::string::npos ? -1 : std::stoi(c.note.substr(p + key.size() + 1));
}

std::vector<CaseReport> catalog_reports;
double catalog_seconds = 0.0;

const std::vector<CaseReport>& catalog() {
  if (catalog_reports.empty()) {
    const auto t0 = Clock::now();
    for (const auto& c : default_catalog(true))
      catalog_reports.push_back(run_suite(make_flag_context(build_root_datum(c.type, c.rank, 0.5), c.S, 16, 8)));
    catalog_seconds = seconds_since(t0);
  }
  return catalog_reports;
}

}  // namespace

int main() {
  criterion(1, "irreducible modules: Weyl dimension, Serre and [E,F] relations", [] {
    const auto t0 = Clock::now();
    Outcome o;
    double worst = 0.0;
    int n = 0;
    for (auto dt : {build_root_datum(LieType::A, 1, 0.5), build_root_datum(LieType::A, 2, 0.5),
                    build_root_datum(LieType::B, 2, 0.5)}) {
      std::vector<Weight> lams;
      for (int r = 0; r < dt.rank; ++r) lams.push_back(Weight::fundamental(dt.rank, r));
      lams.push_back(dt.rho);
      for (const auto& lam : lams) {
        auto V = build_irrep(dt, lam);
        const auto res = relation_residuals(*V);
        if (V->dim() != weyl_dimension(dt, lam)) o.pass = false;
        worst = std::max({worst, res.serre, res.commutator});
        ++n;
      }
    }
    const double t = seconds_since(t0);
    o.pass = o.pass && worst < 1e-9 && t < 5.0;
    o.detail = std::to_string(n) + " modules, max residual " + sci(worst) + ", " + sci(t) + " s (limit 5 s)";
    return o;
  });

  criterion(2, "R-matrix: intertwining, adjoint = R21, Yang-Baxter", [] {
    const auto t0 = Clock::now();
    auto a1 = build_root_datum(LieType::A, 1, 0.5);
    auto a2 = build_root_datum(LieType::A, 2, 0.5);
    auto h = build_irrep(a1, Weight{1});
    auto w1 = build_irrep(a2, Weight{1, 0});
    auto w2 = build_irrep(a2, Weight{0, 1});
    double inter = 0.0, adj = 0.0, ybe = 0.0;
    for (const auto& [V, W] : std::vector<std::pair<ModulePtr, ModulePtr>>{{h, h}, {w1, w1}, {w1, w2}, {w2, w1}}) {
      auto ra = r_action(V, W);
      for (int r = 0; r < V->datum.rank; ++r)
        for (const Symbol& s : {Symbol::E(r), Symbol::F(r), Symbol::L(Weight::fundamental(V->datum.rank, r))})
          inter = std::max(inter, linalg::relative_residual(ra->R * coproduct_matrix(*V, *W, s),
                                                             opposite_coproduct_matrix(*V, *W, s) * ra->R));
      adj = std::max(adj, linalg::relative_residual(ra->R.adjoint(), r_flip_variants(*ra).R21));
    }
    for (const auto& V : {h, w1}) {
      const MatrixXcd& R = r_action(V, V)->R;
      const Index d = V->dim();
      const MatrixXcd I = MatrixXcd::Identity(d, d);
      const MatrixXcd R12 = linalg::kron(R, I), R23 = linalg::kron(I, R);
      const MatrixXcd P23 = linalg::kron(I, linalg::flip(d, d));
      const MatrixXcd R13 = P23 * R12 * P23;
      ybe = std::max(ybe, linalg::relative_residual(R12 * R13 * R23, R23 * R13 * R12));
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = inter < 1e-8 && adj < 1e-8 && ybe < 1e-8 && t < 10.0;
    o.detail = "intertwining " + sci(inter) + ", adjoint " + sci(adj) + ", YBE " + sci(ybe) + ", " + sci(t) +
               " s (limit 10 s)";
    return o;
  });

  criterion(3, "product flip through R, both forms, battery depth 4", [] {
    std::mt19937 rng(7);
    auto a1 = build_root_datum(LieType::A, 1, 0.5);
    auto a2 = build_root_datum(LieType::A, 2, 0.5);
    double worst = 0.0;
    int n = 0;
    for (const auto& [V1, V2] : std::vector<std::pair<ModulePtr, ModulePtr>>{
             {build_irrep(a1, Weight{1}), build_irrep(a1, Weight{1})},
             {build_irrep(a2, Weight{1, 0}), build_irrep(a2, Weight{0, 1})}}) {
      for (int trial = 0; trial < 3; ++trial) {
        const VectorXcd x1 = random_vector(rng, V1->dim()), y1 = random_vector(rng, V1->dim());
        const VectorXcd x2 = random_vector(rng, V2->dim()), y2 = random_vector(rng, V2->dim());
        const auto lhs = pol_product(PolElement::coefficient(V1, x1, y1), PolElement::coefficient(V2, x2, y2));
        const auto fl = r_flip_variants(*r_action(V2, V1));
        const auto host = tensor(V2, V1);
        const VectorXcd xs = linalg::kron(x2, x1), ys = linalg::kron(y2, y1);
        worst = std::max(worst, oracle_distance(lhs, PolElement::coefficient(host, fl.R21 * xs, fl.Rinv * ys), 4));
        worst = std::max(worst, oracle_distance(lhs, PolElement::coefficient(host, fl.Rinv * xs, fl.R21 * ys), 4));
        n += 2;
      }
    }
    return Outcome{worst < 1e-8, std::to_string(n) + " comparisons, max oracle distance " + sci(worst)};
  });

  criterion(4, "Soibelman representation: homomorphism, star, vanishing, diagonality (A2, B2 full flag)", [] {
    Outcome o;
    double worst = 0.0;
    int n = 0;
    for (const auto& r : catalog()) {
      if (r.label.rfind("A2 S={}", 0) != 0 && r.label.rfind("B2 S={}", 0) != 0) continue;
      if (r.N != 16 || r.M != 8) o.pass = false;
      for (const auto& c : r.checks) {
        const bool relevant = c.name == "theta_hom" || c.name == "theta_star" ||
                              c.name.rfind("vanishing[", 0) == 0 || c.name.rfind("diagonality[", 0) == 0;
        if (!relevant) continue;
        ++n;
        worst = std::max(worst, c.residual);
        if (!(c.pass && c.residual < 1e-8)) o.pass = false;
      }
    }
    o.pass = o.pass && n >= 2 * 7;
    o.detail = std::to_string(n) + " checks, max residual " + sci(worst);
    return o;
  });

  criterion(5, "commutation scalars with extremal coefficients, >= 50 instances per context", [] {
    Outcome o;
    double worst = 0.0;
    int min_count = 1 << 30;
    for (const auto& r : catalog()) {
      const CheckResult* c = find_check(r, "extremal_commutation");
      if (!c) {
        o.pass = false;
        continue;
      }
      min_count = std::min(min_count, note_count(*c, "instances"));
      worst = std::max(worst, c->residual);
      if (!(c->pass && c->residual < 1e-8)) o.pass = false;
    }
    o.pass = o.pass && min_count >= 50;
    o.detail = std::to_string(catalog().size()) + " contexts, min instances " + std::to_string(min_count) +
               ", max residual " + sci(worst);
    return o;
  });

  criterion(6, "degenerate algebra: relations and eps on the catalog, q-independent eps", [] {
    Outcome o;
    std::ostringstream d;
    double worst_rel = 0.0, worst_eps = 0.0;
    for (const auto& r : catalog()) {
      if (!r.pass()) {
        o.pass = false;
        d << r.label << " fails; ";
      }
      for (const auto& c : r.checks) {
        const bool relation = c.name.rfind("weight[", 0) == 0 || c.name.rfind("serre", 0) == 0 ||
                              c.name.rfind("commutator[", 0) == 0 || c.name.rfind("eps_fit[", 0) == 0;
        if (relation) worst_rel = std::max(worst_rel, c.residual);
        if (c.name.rfind("eps_target[", 0) == 0) worst_eps = std::max(worst_eps, c.residual);
      }
    }
    o.pass = o.pass && worst_rel < 1e-7 && worst_eps < 1e-6 && catalog_seconds < 180.0;

    SuiteOptions opt;
    opt.relations_only = true;
    int sweep_cases = 0;
    const auto t0 = Clock::now();
    for (double q : {0.3, 0.7})
      for (const auto& c : default_catalog(true)) {
        const auto r = run_suite(make_flag_context(build_root_datum(c.type, c.rank, q), c.S, 16, 8), opt);
        ++sweep_cases;
        for (std::size_t i = 0; i < r.eps.size(); ++i) {
          const double dev = std::abs(r.eps[i] - r.eps_target[i]);
          worst_eps = std::max(worst_eps, std::isfinite(dev) ? dev : INFINITY);
        }
        if (!r.pass()) {
          o.pass = false;
          d << r.label << " fails; ";
        }
      }
    o.pass = o.pass && worst_eps < 1e-6;
    d << catalog().size() << " catalog contexts in " << sci(catalog_seconds) << " s (limit 180 s), "
      << "max relation residual " << sci(worst_rel) << ", q sweep {0.3, 0.7}: " << sweep_cases << " cases in "
      << sci(seconds_since(t0)) << " s, max |eps - target| " << sci(worst_eps);
    o.detail = d.str();
    return o;
  });

  criterion(7, "equivariance: operator formulas vs adjoint action, >= 20 coinvariant samples; fin_part", [] {
    Outcome o;
    double worst = 0.0;
    int min_count = 1 << 30;
    for (const auto& r : catalog()) {
      const CheckResult* lc = find_check(r, "action_formulas");
      const CheckResult* fp = find_check(r, "fin_part");
      if (!lc || !fp) {
        o.pass = false;
        continue;
      }
      min_count = std::min(min_count, note_count(*lc, "instances"));
      worst = std::max({worst, lc->residual, fp->residual});
      if (!(lc->pass && lc->residual < 1e-7 && fp->pass)) o.pass = false;
    }
    o.pass = o.pass && min_count >= 20;
    o.detail = std::to_string(catalog().size()) + " contexts, min samples " + std::to_string(min_count) +
               ", max residual " + sci(worst);
    return o;
  });

  criterion(8, "degeneration: rescaled commutator defect scales as b^4", [] {
    auto dt = build_root_datum(LieType::A, 2, 0.5);
    auto V = build_irrep(dt, Weight{1, 1});
    const std::vector<double> bs{1.0, 0.5, 0.1, 0.01};
    Outcome o;
    std::ostringstream d;
    double presentation = 0.0;
    for (int r = 0; r < dt.rank; ++r) {
      std::vector<double> xs, ys;
      for (double b : bs) {
        std::vector<double> bv(static_cast<std::size_t>(dt.rank), 1.0);
        bv[static_cast<std::size_t>(r)] = b;
        const auto rep = rescaled_commutator_defect(dt, *V, bv)[static_cast<std::size_t>(r)];
        presentation = std::max(presentation, rep.presentation_residual);
        xs.push_back(std::log(b));
        ys.push_back(std::log(rep.degenerate_defect));
      }
      const double n = static_cast<double>(xs.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      if (std::abs(slope - 4.0) > 0.1) o.pass = false;
      d << "node " << r + 1 << " slope " << slope << "; ";
    }
    o.pass = o.pass && presentation < 1e-9;
    d << "rescaled presentation residual " << sci(presentation);
    o.detail = d.str();
    return o;
  });

  std::printf("%s\n", all_ok ? "all criteria pass" : "some criteria FAIL");
  return all_ok ? 0 : 1;
}
