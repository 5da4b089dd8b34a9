#pragma once

#include "qflag/flagverify.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace qflag {

using json = nlohmann::json;

struct CaseSpec {
  LieType type = LieType::A;
  int rank = 1;
  double q = 0.5;
  std::vector<int> S;  ///< 0-based, sorted

  bool operator==(const CaseSpec&) const = default;
  std::string label() const;
};

struct RunConfig {
  LieType lie_type = LieType::A;
  int rank = 1;
  double q = 0.5;
  std::vector<int> S;  ///< 0-based
  int N = 16;
  int M = 8;
  /// Largest per-leg index shift a suite word may need; M + shift_budget ≤ N is required.
  int shift_budget = 8;
  Gates gates;
  int battery_depth = 2;
  int commutation_samples = 50;
  int action_samples = 20;
  unsigned seed = 20240611;
  bool relations_only = false;
  std::vector<CaseSpec> cases;  ///< overrides (lie_type, rank, q, S) when nonempty
  std::string output;
  int workers = 1;
  bool use_cache = false;

  /// Throws DomainError on out-of-range fields.
  void validate() const;
  /// The case list with duplicates removed, first occurrence kept.
  std::vector<CaseSpec> case_list() const;
  SuiteOptions suite_options() const;
};

/// "1,3" → {0, 2}; "" → {}. Throws DomainError on nodes outside 1..rank or bad syntax.
std::vector<int> parse_subset(const std::string& s, int rank);
/// Comma-separated integers.
std::vector<int> parse_int_list(const std::string& s);
/// Comma-separated reals.
std::vector<double> parse_real_list(const std::string& s);

json to_json(const RunConfig& c);
RunConfig config_from_json(const json& j);
json to_json(const CaseReport& r);
CaseReport report_from_json(const json& j);
json report_json(const RunConfig& c, const std::vector<CaseReport>& reports);

/// Pretty JSON with every floating-point number written with 17 significant digits
/// and non-finite numbers as null.
std::string dump_json(const json& j);

/// {"shape": [rows, cols], "data": [[re, im], ...]} in row-major order.
json matrix_json(const Eigen::MatrixXcd& m);

/// QFLAG_CACHE_DIR if set, else $XDG_CACHE_HOME/qflag, else $HOME/.cache/qflag.
std::string cache_dir();

/// Runs every case of the config on `workers` threads; results follow case_list() order.
std::vector<CaseReport> run_cases(const RunConfig& c);

}  // namespace qflag
