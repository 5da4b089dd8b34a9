#pragma once

#include "qflag/polgq.hpp"
#include "qflag/soibelman.hpp"
#include "qflag/uqalg.hpp"

#include <memory>
#include <string>
#include <vector>

namespace qflag {

struct FlagCache;

struct FlagContext {
  RootDatum datum;
  std::vector<int> S;            ///< 0-based nodes
  WeylElt w;                     ///< shortest element of w_0 W_S
  int N = 16;
  int M = 8;
  std::vector<int> eps_target;   ///< 1 iff bar(α_r) ∈ S
  std::shared_ptr<FlagCache> cache;

  int legs() const { return w.length; }
  std::string label() const;
};

/// Throws DomainError on invalid nodes or truncation (M ≥ 1, M ≤ N).
FlagContext make_flag_context(const RootDatum& datum, std::vector<int> S, int N = 16, int M = 8);

struct KOperator {
  Weight omega;
  TensorOp op;
};

struct XOperator {
  int r = 0;
  TensorOp plus, minus;
};

/// U(h_λ, h_{w⁻¹λ}) on V_λ.
PolElement extremal_coefficient(const FlagContext& ctx, const Weight& lambda);
/// q^{−(ρ−wρ,λ)} U(h̄_λ⊗h_λ, v_λ) on V̄_λ⊗V_λ.
PolElement k4_pol(const FlagContext& ctx, const Weight& lambda);

/// k_{−4λ} = X†X with X = θ_w(U(h_λ,h_{w⁻¹λ})); cached.
const KOperator& k4_minus(const FlagContext& ctx, const Weight& lambda);
/// θ_w(k4_pol(λ)).
TensorOp k4_minus_invariant(const FlagContext& ctx, const Weight& lambda);
/// k_ω = Π_r k_{−4ω_r}^{−ω_r/4}, entrywise; cached. Throws NumericalError on a nonpositive entry.
const KOperator& k_general(const FlagContext& ctx, const Weight& omega);

/// x_r^+ = (q_r^{−1}−q_r)^{−1} θ_w(k_{−4ω_r} ⊲ E_r) k_{4ω_r−α_r}, x_r^− its adjoint; cached.
const XOperator& x_plus(const FlagContext& ctx, int r);
/// q_r^{1/2}(q_r^{−1}−q_r)^{−1} θ_w(U(h,h_{w⁻¹ω_r})^* U(F_r h, h_{w⁻¹ω_r})) k_{4ω_r−α_r}.
TensorOp x_plus_explicit(const FlagContext& ctx, int r);

/// Ψ(x) applied to the block columns (all n_k < M), E_r ↦ x_r^+, F_r ↦ x_r^−, L_ω ↦ k_ω.
/// scale, when given, receives the largest entry over the individual words.
SpMat psi_block(const FlagContext& ctx, const WordSum& x, double* scale = nullptr);
/// θ_w(p) on the block columns.
SpMat theta_block(const FlagContext& ctx, const PolElement& p);
SpMat block_of(const FlagContext& ctx, const TensorOp& op);
/// Dense matrix of op between block basis vectors (rows and columns with all n_k < M).
Eigen::MatrixXcd principal_block(const FlagContext& ctx, const TensorOp& op);

/// max|A − B| / max(1, max|A|, max|B|, scale); scale is the largest summand that went into A or B.
double relative_difference(const SpMat& a, const SpMat& b, double scale = 0.0);
/// max|Ψ(x)| / max(1, largest word term): residual of the relation x = 0.
double relation_residual(const FlagContext& ctx, const WordSum& x);

struct EpsilonFit {
  double eps = 0.0;
  double residual = 0.0;
};
/// Diagonal least squares for [x^+,x^−] = (ε k_α² − k_α^{−2})/(q_r−q_r^{−1}) on the block.
EpsilonFit epsilon_fit(const FlagContext& ctx, int r);

/// θ_w(a ⊲ y) against the operator formula for y = E_r, F_r or L_ω.
double action_extension_check(const FlagContext& ctx, const PolElement& a, const Symbol& y);
/// Ψ(L_{−4λ} ⊲ y) against θ_w(k4_pol(λ) ⊲ y).
double fin_part_check(const FlagContext& ctx, const Weight& lambda, const WordSum& y);
/// Left side of the ε identity built from R̃^{−1} against ε_r k_{−4ω_r+4α_r}.
double eps_identity_residual(const FlagContext& ctx, int r);

struct Gates {
  double k_routes = 1e-8;
  double k_shape = 1e-8;
  double k_algebra = 1e-8;
  double x_routes = 1e-8;
  double weight = 1e-8;
  double relation = 1e-7;
  double eps_fit = 1e-7;
  double eps_target = 1e-6;
  double eps_identity = 1e-7;
  double central = 1e-7;
  double representation = 1e-8;
  double vanishing = 1e-9;
  double extremal_commutation = 1e-8;
  double action_formulas = 1e-7;
  double fin_part = 1e-7;
};

struct SuiteOptions {
  Gates gates;
  int commutation_samples = 50;
  int action_samples = 20;
  int battery_depth = 2;
  unsigned seed = 20240611;
  /// Only the degenerate-algebra relations and ε (used for q sweeps).
  bool relations_only = false;
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double gate = 0.0;
  bool pass = false;
  std::string note;
};

struct CaseReport {
  std::string label;
  char lie_type = 'A';
  int rank = 0;
  double q = 0.0;
  std::vector<int> S;
  int N = 0, M = 0;
  std::vector<double> eps;
  std::vector<int> eps_target;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool pass() const;
};

CaseReport run_suite(const FlagContext& ctx, const SuiteOptions& opt = {});

struct CatalogCase {
  LieType type;
  int rank;
  std::vector<int> S;  ///< 0-based
};
std::vector<CatalogCase> default_catalog(bool include_optional = false);

}  // namespace qflag
