#include "qflag/runconfig.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace qflag {

namespace {

std::string subset_string(const std::vector<int>& S) {
  std::string s;
  for (std::size_t i = 0; i < S.size(); ++i) s += (i ? "," : "") + std::to_string(S[i] + 1);
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

json gates_json(const Gates& g) {
  return {{"k_routes", g.k_routes},   {"k_shape", g.k_shape},       {"k_algebra", g.k_algebra},
          {"x_routes", g.x_routes},   {"weight", g.weight},         {"relation", g.relation},
          {"eps_fit", g.eps_fit},     {"eps_target", g.eps_target}, {"eps_identity", g.eps_identity},
          {"central", g.central},     {"representation", g.representation},
          {"vanishing", g.vanishing}, {"extremal_commutation", g.extremal_commutation},       {"action_formulas", g.action_formulas},
          {"fin_part", g.fin_part}};
}

Gates gates_from_json(const json& j) {
  Gates g;
  auto get = [&](const char* k, double& v) {
    if (j.contains(k)) v = j.at(k).get<double>();
  };
  get("k_routes", g.k_routes);
  get("k_shape", g.k_shape);
  get("k_algebra", g.k_algebra);
  get("x_routes", g.x_routes);
  get("weight", g.weight);
  get("relation", g.relation);
  get("eps_fit", g.eps_fit);
  get("eps_target", g.eps_target);
  get("eps_identity", g.eps_identity);
  get("central", g.central);
  get("representation", g.representation);
  get("vanishing", g.vanishing);
  get("extremal_commutation", g.extremal_commutation);
  get("action_formulas", g.action_formulas);
  get("fin_part", g.fin_part);
  for (const auto& [k, v] : j.items())
    if (!gates_json(g).contains(k)) throw DomainError("unknown gate '" + k + "'");
  return g;
}

json case_json(const CaseSpec& c) {
  return {{"lie_type", std::string(1, lie_type_char(c.type))},
          {"rank", c.rank},
          {"q", c.q},
          {"subset", subset_string(c.S)}};
}

CaseSpec case_from_json(const json& j) {
  CaseSpec c;
  c.type = parse_lie_type(j.at("lie_type").get<std::string>());
  c.rank = j.at("rank").get<int>();
  c.q = j.at("q").get<double>();
  if (j.contains("subset")) c.S = parse_subset(j.at("subset").get<std::string>(), c.rank);
  return c;
}

double num_or_nan(const json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

void write_number(std::ostream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  os << s;
}

bool is_flat(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (e.is_object() || (e.is_array() && !std::all_of(e.begin(), e.end(), [](const json& x) {
                            return x.is_primitive();
                          })))
      return false;
  return true;
}

void emit(std::ostream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case json::value_t::number_float: write_number(os, j.get<double>()); return;
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(k).dump() << ": ";
        emit(os, v, indent + 2);
      }
      os << "\n" << std::string(static_cast<std::size_t>(indent), ' ') << "}";
      return;
    }
    case json::value_t::array: {
      if (is_flat(j)) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(os, j[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(os, j[i], indent + 2);
      }
      os << "\n" << std::string(static_cast<std::size_t>(indent), ' ') << "]";
      return;
    }
    default: os << j.dump(); return;
  }
}

// FNV-1a, stable across runs and platforms
std::string stable_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CaseReport run_one(const RunConfig& c, const CaseSpec& cs) {
  std::filesystem::path path;
  if (c.use_cache) {
    json key = to_json(c);
    key.erase("cases");
    key.erase("output");
    key.erase("workers");
    key.erase("use_cache");
    key["case"] = case_json(cs);
    path = std::filesystem::path(cache_dir()) / (stable_hash(dump_json(key)) + ".json");
    std::ifstream in(path);
    if (in) {
      try {
        return report_from_json(json::parse(in));
      } catch (const std::exception&) {
        // unreadable entry: recompute and overwrite
      }
    }
  }
  const auto ctx = make_flag_context(build_root_datum(cs.type, cs.rank, cs.q), cs.S, c.N, c.M);
  CaseReport rep = run_suite(ctx, c.suite_options());
  if (c.use_cache) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (out) out << dump_json(to_json(rep)) << "\n";
  }
  return rep;
}

}  // namespace

std::string CaseSpec::label() const {
  std::ostringstream os;
  os << lie_type_char(type) << rank << " S={" << subset_string(S) << "} q=" << q;
  return os.str();
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(t, &pos);
    } catch (const std::exception&) {
      throw DomainError("not an integer: '" + t + "'");
    }
    if (pos != t.size()) throw DomainError("not an integer: '" + t + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      throw DomainError("not a number: '" + t + "'");
    }
    if (pos != t.size()) throw DomainError("not a number: '" + t + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_subset(const std::string& s, int rank) {
  std::vector<int> S;
  for (int v : parse_int_list(s)) {
    if (v < 1 || v > rank) throw DomainError("subset node " + std::to_string(v) + " outside 1.." + std::to_string(rank));
    S.push_back(v - 1);
  }
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  return S;
}

void RunConfig::validate() const {
  if (N < 2) throw DomainError("trunc must be at least 2");
  if (M < 1) throw DomainError("block must be at least 1");
  if (shift_budget < 0) throw DomainError("shift budget must be nonnegative");
  if (M + shift_budget > N) {
    throw DomainError("block + shift budget exceeds trunc (" + std::to_string(M) + " + " +
                      std::to_string(shift_budget) + " > " + std::to_string(N) + ")");
  }
  if (battery_depth < 0) throw DomainError("battery depth must be nonnegative");
  if (commutation_samples < 0 || action_samples < 0) throw DomainError("sample counts must be nonnegative");
  if (workers < 1) throw DomainError("workers must be at least 1");
  for (const auto& cs : case_list()) {
    if (!(cs.q > 0.0 && cs.q < 1.0)) throw DomainError("q must lie in (0,1)");
    const RootDatum dt = build_root_datum(cs.type, cs.rank, cs.q);
    for (int s : cs.S) dt.check_node(s);
  }
}

std::vector<CaseSpec> RunConfig::case_list() const {
  std::vector<CaseSpec> in = cases;
  if (in.empty()) in.push_back({lie_type, rank, q, S});
  std::vector<CaseSpec> out;
  for (auto c : in) {
    std::sort(c.S.begin(), c.S.end());
    c.S.erase(std::unique(c.S.begin(), c.S.end()), c.S.end());
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

SuiteOptions RunConfig::suite_options() const {
  SuiteOptions o;
  o.gates = gates;
  o.battery_depth = battery_depth;
  o.commutation_samples = commutation_samples;
  o.action_samples = action_samples;
  o.seed = seed;
  o.relations_only = relations_only;
  return o;
}

json to_json(const RunConfig& c) {
  json cases = json::array();
  for (const auto& cs : c.cases) cases.push_back(case_json(cs));
  return {{"lie_type", std::string(1, lie_type_char(c.lie_type))},
          {"rank", c.rank},
          {"q", c.q},
          {"subset", subset_string(c.S)},
          {"N", c.N},
          {"M", c.M},
          {"shift_budget", c.shift_budget},
          {"gates", gates_json(c.gates)},
          {"battery_depth", c.battery_depth},
          {"commutation_samples", c.commutation_samples},
          {"action_samples", c.action_samples},
          {"seed", c.seed},
          {"relations_only", c.relations_only},
          {"cases", cases},
          {"output", c.output},
          {"workers", c.workers},
          {"use_cache", c.use_cache}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  static const std::vector<std::string> known{"lie_type", "rank", "q", "subset", "N", "M", "shift_budget", "gates",
                                              "battery_depth", "commutation_samples", "action_samples", "seed",
                                              "relations_only", "cases", "output", "workers", "use_cache"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw DomainError("unknown config field '" + k + "'");
  RunConfig c;
  try {
    if (j.contains("lie_type")) c.lie_type = parse_lie_type(j.at("lie_type").get<std::string>());
    if (j.contains("rank")) c.rank = j.at("rank").get<int>();
    if (j.contains("q")) c.q = j.at("q").get<double>();
    if (j.contains("subset")) c.S = parse_subset(j.at("subset").get<std::string>(), c.rank);
    if (j.contains("N")) c.N = j.at("N").get<int>();
    if (j.contains("M")) c.M = j.at("M").get<int>();
    if (j.contains("shift_budget")) c.shift_budget = j.at("shift_budget").get<int>();
    if (j.contains("gates")) c.gates = gates_from_json(j.at("gates"));
    if (j.contains("battery_depth")) c.battery_depth = j.at("battery_depth").get<int>();
    if (j.contains("commutation_samples")) c.commutation_samples = j.at("commutation_samples").get<int>();
    if (j.contains("action_samples")) c.action_samples = j.at("action_samples").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
    if (j.contains("relations_only")) c.relations_only = j.at("relations_only").get<bool>();
    if (j.contains("cases"))
      for (const auto& cj : j.at("cases")) c.cases.push_back(case_from_json(cj));
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("use_cache")) c.use_cache = j.at("use_cache").get<bool>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad config: ") + e.what());
  }
  return c;
}

json to_json(const CaseReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj = {{"name", c.name}, {"residual", c.residual}, {"gate", c.gate}, {"pass", c.pass}};
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  return {{"label", r.label},
          {"lie_type", std::string(1, r.lie_type)},
          {"rank", r.rank},
          {"q", r.q},
          {"subset", subset_string(r.S)},
          {"N", r.N},
          {"M", r.M},
          {"eps", r.eps},
          {"eps_target", r.eps_target},
          {"pass", r.pass()},
          {"checks", checks},
          {"seconds", r.seconds}};
}

CaseReport report_from_json(const json& j) {
  CaseReport r;
  r.label = j.at("label").get<std::string>();
  r.lie_type = j.at("lie_type").get<std::string>().at(0);
  r.rank = j.at("rank").get<int>();
  r.q = j.at("q").get<double>();
  r.S = parse_subset(j.at("subset").get<std::string>(), r.rank);
  r.N = j.at("N").get<int>();
  r.M = j.at("M").get<int>();
  for (const auto& e : j.at("eps")) r.eps.push_back(num_or_nan(e));
  r.eps_target = j.at("eps_target").get<std::vector<int>>();
  for (const auto& cj : j.at("checks")) {
    CheckResult c;
    c.name = cj.at("name").get<std::string>();
    c.residual = cj.at("residual").is_null() ? std::numeric_limits<double>::infinity() : cj.at("residual").get<double>();
    c.gate = cj.at("gate").get<double>();
    c.pass = cj.at("pass").get<bool>();
    if (cj.contains("note")) c.note = cj.at("note").get<std::string>();
    r.checks.push_back(std::move(c));
  }
  r.seconds = j.at("seconds").get<double>();
  return r;
}

json report_json(const RunConfig& c, const std::vector<CaseReport>& reports) {
  json cases = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    cases.push_back(to_json(r));
    pass = pass && r.pass();
  }
  json cfg = to_json(c);
  cfg.erase("output");
  cfg.erase("workers");
  cfg.erase("use_cache");
  return {{"config", cfg}, {"pass", pass}, {"cases", cases}};
}

std::string dump_json(const json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  return os.str();
}

json matrix_json(const Eigen::MatrixXcd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  return {{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

std::string cache_dir() {
  if (const char* d = std::getenv("QFLAG_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return (std::filesystem::path(x) / "qflag").string();
  if (const char* h = std::getenv("HOME"); h && *h) return (std::filesystem::path(h) / ".cache" / "qflag").string();
  return (std::filesystem::temp_directory_path() / "qflag").string();
}

std::vector<CaseReport> run_cases(const RunConfig& c) {
  const auto list = c.case_list();
  std::vector<CaseReport> out(list.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_m;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < list.size();) {
      try {
        out[i] = run_one(c, list[i]);
      } catch (...) {
        std::lock_guard lock(err_m);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(c.workers, static_cast<int>(list.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace qflag
