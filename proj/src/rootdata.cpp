#include "qflag/rootdata.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace qflag {

bool Weight::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](int x) { return x == 0; });
}

bool Weight::is_dominant() const {
  return std::all_of(c_.begin(), c_.end(), [](int x) { return x >= 0; });
}

Weight& Weight::operator+=(const Weight& o) {
  if (o.c_.size() != c_.size()) throw DomainError("weight rank mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Weight& Weight::operator-=(const Weight& o) {
  if (o.c_.size() != c_.size()) throw DomainError("weight rank mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Weight operator-(Weight a) {
  for (auto& x : a.c_) x = -x;
  return a;
}

Weight operator*(int k, Weight a) {
  for (auto& x : a.c_) x *= k;
  return a;
}

std::ostream& operator<<(std::ostream& os, const Weight& w) {
  os << '(';
  for (std::size_t i = 0; i < w.c_.size(); ++i) os << (i ? "," : "") << w.c_[i];
  return os << ')';
}

LieType parse_lie_type(const std::string& s) {
  if (s.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(s[0]))) {
      case 'A': return LieType::A;
      case 'B': return LieType::B;
      case 'C': return LieType::C;
      case 'D': return LieType::D;
      case 'G': return LieType::G;
      default: break;
    }
  }
  throw DomainError("unsupported Lie type '" + s + "'");
}

char lie_type_char(LieType t) {
  switch (t) {
    case LieType::A: return 'A';
    case LieType::B: return 'B';
    case LieType::C: return 'C';
    case LieType::D: return 'D';
    case LieType::G: return 'G';
  }
  return '?';
}

namespace {

using RMatrix = std::vector<std::vector<Rational>>;

RMatrix rational_inverse(RMatrix a) {
  const std::size_t n = a.size();
  RMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == Rational(0)) ++piv;
    if (piv == n) throw NumericalError("singular Cartan matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == Rational(0)) continue;
      const Rational f = a[i][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[col][j];
        inv[i][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

std::vector<std::vector<int>> cartan_for(LieType type, int n) {
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) a[i][i] = 2;
  auto link = [&](int i, int j) { a[i][j] = a[j][i] = -1; };
  switch (type) {
    case LieType::A:
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
    case LieType::B:
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      a[n - 1][n - 2] = -2;  // last node short
      break;
    case LieType::C:
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      a[n - 2][n - 1] = -2;  // last node long
      break;
    case LieType::D:
      link(0, 1);
      link(1, 2);
      link(1, 3);
      break;
    case LieType::G:
      a[0][1] = -3;  // node 0 short, node 1 long
      a[1][0] = -1;
      break;
  }
  return a;
}

std::vector<int> symmetrizer_for(LieType type, int n) {
  std::vector<int> d(n, 1);
  switch (type) {
    case LieType::B:
      for (int i = 0; i + 1 < n; ++i) d[i] = 2;
      break;
    case LieType::C:
      d[n - 1] = 2;
      break;
    case LieType::G:
      d[1] = 3;
      break;
    default:
      break;
  }
  return d;
}

bool supported(LieType type, int rank) {
  switch (type) {
    case LieType::A: return rank >= 1 && rank <= 3;
    case LieType::B: return rank == 2;
    case LieType::C: return rank == 2;
    case LieType::D: return rank == 4;
    case LieType::G: return rank == 2;
  }
  return false;
}

}  // namespace

std::string RootDatum::name() const {
  return std::string(1, lie_type_char(type)) + std::to_string(rank);
}

void RootDatum::check_node(int r) const {
  if (r < 0 || r >= rank) throw DomainError("node index out of range: " + std::to_string(r));
}

Weight RootDatum::simple_root(int r) const {
  check_node(r);
  Weight a(static_cast<std::size_t>(rank));
  for (int s = 0; s < rank; ++s) a[s] = cartan[s][r];
  return a;
}

Rational RootDatum::pairing(const Weight& a, const Weight& b) const {
  Rational acc(0);
  for (int r = 0; r < rank; ++r) {
    if (a[r] == 0) continue;
    for (int s = 0; s < rank; ++s) {
      if (b[s] == 0) continue;
      acc += gram[r][s] * static_cast<long long>(a[r]) * static_cast<long long>(b[s]);
    }
  }
  return acc;
}

std::vector<Rational> RootDatum::root_coordinates(const Weight& mu) const {
  // μ_r = Σ_s a_rs c_s
  RMatrix a(rank, std::vector<Rational>(rank));
  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) a[r][s] = cartan[r][s];
  const RMatrix inv = rational_inverse(a);
  std::vector<Rational> c(rank, Rational(0));
  for (int s = 0; s < rank; ++s)
    for (int r = 0; r < rank; ++r) c[s] += inv[s][r] * static_cast<long long>(mu[r]);
  return c;
}

bool RootDatum::in_root_lattice(const Weight& mu) const {
  for (const auto& c : root_coordinates(mu))
    if (c.denominator() != 1) return false;
  return true;
}

bool RootDatum::in_positive_root_cone(const Weight& mu) const {
  for (const auto& c : root_coordinates(mu))
    if (c.denominator() != 1 || c < Rational(0)) return false;
  return true;
}

double RootDatum::qpow(const Rational& e) const {
  return std::pow(q, static_cast<double>(e.numerator()) / static_cast<double>(e.denominator()));
}

RootDatum build_root_datum(LieType type, int rank, double q) {
  if (!supported(type, rank))
    throw DomainError(std::string("unsupported root datum ") + lie_type_char(type) +
                      std::to_string(rank));
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");

  RootDatum dt;
  dt.type = type;
  dt.rank = rank;
  dt.q = q;
  dt.cartan = cartan_for(type, rank);
  dt.d = symmetrizer_for(type, rank);

  // (ω_r, α_s) = δ_rs d_s and α_s = Σ_r a_rs ω_r give G·A = D.
  RMatrix a(rank, std::vector<Rational>(rank));
  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) a[r][s] = dt.cartan[r][s];
  const RMatrix ainv = rational_inverse(a);
  dt.gram.assign(rank, std::vector<Rational>(rank, Rational(0)));
  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) dt.gram[r][s] = Rational(dt.d[r]) * ainv[r][s];

  dt.rho = Weight(std::vector<int>(rank, 1));
  for (int r = 0; r < rank; ++r) dt.q_node.push_back(std::pow(q, dt.d[r]));

  for (int r = 0; r < rank; ++r)
    for (int s = 0; s < rank; ++s) {
      if (dt.d[r] * dt.cartan[r][s] != dt.d[s] * dt.cartan[s][r])
        throw NumericalError("Cartan matrix not symmetrizable by d");
      if (dt.gram[r][s] != dt.gram[s][r]) throw NumericalError("fundamental Gram not symmetric");
    }
  return dt;
}

// ---------------------------------------------------------------------------

Weight WeylElt::apply(const Weight& w) const {
  Weight out(w.size());
  for (int i = 0; i < action.rows(); ++i) {
    int acc = 0;
    for (int j = 0; j < action.cols(); ++j) acc += action(i, j) * w[j];
    out[i] = acc;
  }
  return out;
}

bool WeylElt::is_identity() const {
  return action.isApprox(Eigen::MatrixXi::Identity(action.rows(), action.cols())) && length == 0;
}

Eigen::MatrixXi simple_reflection(const RootDatum& datum, int i) {
  datum.check_node(i);
  // s_i(λ) = λ − λ_i α_i
  Eigen::MatrixXi m = Eigen::MatrixXi::Identity(datum.rank, datum.rank);
  for (int r = 0; r < datum.rank; ++r) m(r, i) -= datum.cartan[r][i];
  return m;
}

namespace {

Weight apply_matrix(const Eigen::MatrixXi& m, const Weight& w) {
  Weight out(w.size());
  for (int i = 0; i < m.rows(); ++i) {
    int acc = 0;
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * w[j];
    out[i] = acc;
  }
  return out;
}

bool is_negative_root(const RootDatum& datum, const Weight& beta) {
  return datum.pairing(beta, datum.rho) < Rational(0);
}

struct MatrixLess {
  bool operator()(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

}  // namespace

std::vector<Weight> positive_roots(const RootDatum& datum) {
  std::set<Weight> seen;
  std::deque<Weight> todo;
  for (int i = 0; i < datum.rank; ++i) {
    seen.insert(datum.simple_root(i));
    todo.push_back(datum.simple_root(i));
  }
  while (!todo.empty()) {
    Weight b = todo.front();
    todo.pop_front();
    for (int i = 0; i < datum.rank; ++i) {
      Weight c = b - b[i] * datum.simple_root(i);
      if (seen.insert(c).second) todo.push_back(c);
    }
  }
  std::vector<Weight> pos;
  for (const auto& b : seen)
    if (datum.pairing(b, datum.rho) > Rational(0)) pos.push_back(b);
  return pos;
}

int weyl_length(const RootDatum& datum, const Eigen::MatrixXi& action) {
  int len = 0;
  for (const auto& b : positive_roots(datum))
    if (is_negative_root(datum, apply_matrix(action, b))) ++len;
  return len;
}

std::vector<int> reduced_word(const RootDatum& datum, const Eigen::MatrixXi& action) {
  std::deque<int> word;
  Eigen::MatrixXi w = action;
  const Eigen::MatrixXi id = Eigen::MatrixXi::Identity(datum.rank, datum.rank);
  int guard = 0;
  while (w != id) {
    int pick = -1;
    for (int i = 0; i < datum.rank; ++i) {
      if (is_negative_root(datum, apply_matrix(w, datum.simple_root(i)))) {
        pick = i;
        break;
      }
    }
    if (pick < 0 || ++guard > 1000) throw NumericalError("reduced word search failed");
    word.push_front(pick);
    w = w * simple_reflection(datum, pick);
  }
  return {word.begin(), word.end()};
}

WeylElt weyl_from_action(const RootDatum& datum, const Eigen::MatrixXi& action) {
  WeylElt w;
  w.action = action;
  w.word = reduced_word(datum, action);
  w.length = static_cast<int>(w.word.size());
  return w;
}

WeylElt weyl_from_word(const RootDatum& datum, const std::vector<int>& word) {
  Eigen::MatrixXi m = Eigen::MatrixXi::Identity(datum.rank, datum.rank);
  for (int i : word) m = m * simple_reflection(datum, i);
  WeylElt w = weyl_from_action(datum, m);
  if (static_cast<int>(word.size()) == w.length) w.word = word;
  return w;
}

WeylElt weyl_inverse(const RootDatum& datum, const WeylElt& w) {
  std::vector<int> rev(w.word.rbegin(), w.word.rend());
  return weyl_from_word(datum, rev);
}

WeylElt weyl_product(const RootDatum& datum, const WeylElt& a, const WeylElt& b) {
  return weyl_from_action(datum, a.action * b.action);
}

std::vector<WeylElt> weyl_group(const RootDatum& datum) {
  std::set<Eigen::MatrixXi, MatrixLess> seen;
  std::deque<Eigen::MatrixXi> todo;
  const Eigen::MatrixXi id = Eigen::MatrixXi::Identity(datum.rank, datum.rank);
  seen.insert(id);
  todo.push_back(id);
  while (!todo.empty()) {
    Eigen::MatrixXi m = todo.front();
    todo.pop_front();
    for (int i = 0; i < datum.rank; ++i) {
      Eigen::MatrixXi n = m * simple_reflection(datum, i);
      if (seen.insert(n).second) todo.push_back(n);
    }
  }
  std::vector<WeylElt> out;
  out.reserve(seen.size());
  for (const auto& m : seen) out.push_back(weyl_from_action(datum, m));
  return out;
}

WeylElt longest_in_subgroup(const RootDatum& datum, const std::vector<int>& subset) {
  // Grow a reduced word by appending any s_i (i ∈ S) that increases the length.
  Eigen::MatrixXi w = Eigen::MatrixXi::Identity(datum.rank, datum.rank);
  std::vector<int> word;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i : subset) {
      datum.check_node(i);
      if (!is_negative_root(datum, apply_matrix(w, datum.simple_root(i)))) {
        w = w * simple_reflection(datum, i);
        word.push_back(i);
        grew = true;
        break;
      }
    }
  }
  return weyl_from_action(datum, w);
}

WeylElt longest_element(const RootDatum& datum) {
  std::vector<int> all(datum.rank);
  for (int i = 0; i < datum.rank; ++i) all[i] = i;
  return longest_in_subgroup(datum, all);
}

WeylElt shortest_coset_rep(const RootDatum& datum, const std::vector<int>& subset) {
  const WeylElt w0 = longest_element(datum);
  const WeylElt ws = longest_in_subgroup(datum, subset);
  return weyl_product(datum, w0, ws);
}

Weight bar_involution(const RootDatum& datum, const Weight& lambda) {
  return -longest_element(datum).apply(lambda);
}

int bar_node(const RootDatum& datum, int r) {
  const Weight b = bar_involution(datum, datum.simple_root(r));
  for (int s = 0; s < datum.rank; ++s)
    if (b == datum.simple_root(s)) return s;
  throw NumericalError("bar involution does not permute simple roots");
}

long long weyl_dimension(const RootDatum& datum, const Weight& lambda) {
  if (!lambda.is_dominant()) throw DomainError("weight is not dominant");
  Rational dim(1);
  const Weight lr = lambda + datum.rho;
  for (const auto& beta : positive_roots(datum))
    dim *= datum.pairing(lr, beta) / datum.pairing(datum.rho, beta);
  if (dim.denominator() != 1) throw NumericalError("non-integral Weyl dimension");
  return dim.numerator();
}

}  // namespace qflag
