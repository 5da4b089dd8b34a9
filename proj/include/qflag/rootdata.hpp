#pragma once

#include <boost/rational.hpp>
#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflag {

using Rational = boost::rational<long long>;

/// Raised on invalid user input (unsupported type, out-of-range q, bad node, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical construction violates an invariant it relies on.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integral weight in fundamental-weight coordinates. Nodes are 0-based.
class Weight {
public:
  Weight() = default;
  explicit Weight(std::size_t rank) : c_(rank, 0) {}
  Weight(std::initializer_list<int> coords) : c_(coords) {}
  explicit Weight(std::vector<int> coords) : c_(std::move(coords)) {}

  static Weight fundamental(std::size_t rank, int r) {
    Weight w(rank);
    w.c_.at(static_cast<std::size_t>(r)) = 1;
    return w;
  }

  std::size_t size() const { return c_.size(); }
  int operator[](std::size_t i) const { return c_[i]; }
  int& operator[](std::size_t i) { return c_[i]; }
  const std::vector<int>& coords() const { return c_; }

  bool is_zero() const;
  bool is_dominant() const;

  Weight& operator+=(const Weight& o);
  Weight& operator-=(const Weight& o);
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator-(Weight a);
  friend Weight operator*(int k, Weight a);
  friend bool operator==(const Weight&, const Weight&) = default;
  friend auto operator<=>(const Weight& a, const Weight& b) { return a.c_ <=> b.c_; }
  friend std::ostream& operator<<(std::ostream& os, const Weight& w);

private:
  std::vector<int> c_;
};

enum class LieType { A, B, C, D, G };

LieType parse_lie_type(const std::string& s);
char lie_type_char(LieType t);

/// Cartan data for a simple Lie type at small rank, with the deformation parameter.
/// Normalization: short roots have (α,α) = 2, so d_r ∈ {1,2,3}.
struct RootDatum {
  LieType type{};
  int rank = 0;
  double q = 0.5;
  std::vector<std::vector<int>> cartan;       ///< a_rs = (α_r^∨, α_s)
  std::vector<int> d;                         ///< (α_r, α_r) = 2 d_r
  std::vector<std::vector<Rational>> gram;    ///< (ω_r, ω_s)
  Weight rho;
  std::vector<double> q_node;                 ///< q_r = q^{d_r}

  std::string name() const;

  /// Simple root α_r in fundamental-weight coordinates (column r of the Cartan matrix).
  Weight simple_root(int r) const;
  Rational pairing(const Weight& a, const Weight& b) const;
  /// Coordinates of μ in the basis of simple roots (exact).
  std::vector<Rational> root_coordinates(const Weight& mu) const;
  bool in_root_lattice(const Weight& mu) const;
  bool in_positive_root_cone(const Weight& mu) const;  ///< μ ∈ Q^+
  /// q raised to a rational exponent.
  double qpow(const Rational& e) const;
  void check_node(int r) const;

  friend bool operator==(const RootDatum& a, const RootDatum& b) {
    return a.type == b.type && a.rank == b.rank && a.q == b.q;
  }
};

RootDatum build_root_datum(LieType type, int rank, double q);

/// Weyl group element with its action on weight coordinates and a reduced word.
struct WeylElt {
  Eigen::MatrixXi action;
  std::vector<int> word;
  int length = 0;

  Weight apply(const Weight& w) const;
  bool is_identity() const;
};

Eigen::MatrixXi simple_reflection(const RootDatum& datum, int i);
/// Positive roots in fundamental-weight coordinates.
std::vector<Weight> positive_roots(const RootDatum& datum);
int weyl_length(const RootDatum& datum, const Eigen::MatrixXi& action);
/// Reduced word chosen greedily: peel off the smallest i with w(α_i) < 0.
std::vector<int> reduced_word(const RootDatum& datum, const Eigen::MatrixXi& action);
WeylElt weyl_from_action(const RootDatum& datum, const Eigen::MatrixXi& action);
/// Element from a (not necessarily reduced) word; the stored word is the given one
/// when it is reduced, otherwise the greedy reduced word.
WeylElt weyl_from_word(const RootDatum& datum, const std::vector<int>& word);
WeylElt weyl_inverse(const RootDatum& datum, const WeylElt& w);
WeylElt weyl_product(const RootDatum& datum, const WeylElt& a, const WeylElt& b);
std::vector<WeylElt> weyl_group(const RootDatum& datum);

WeylElt longest_element(const RootDatum& datum);
/// Longest element of the parabolic subgroup W_S.
WeylElt longest_in_subgroup(const RootDatum& datum, const std::vector<int>& subset);
/// Shortest element of the coset w_0 W_S, i.e. w_0 w_{S,0}.
WeylElt shortest_coset_rep(const RootDatum& datum, const std::vector<int>& subset);
/// λ ↦ −w_0 λ.
Weight bar_involution(const RootDatum& datum, const Weight& lambda);
/// Node r̄ with α_{r̄} = −w_0 α_r.
int bar_node(const RootDatum& datum, int r);

/// Weyl dimension formula, exact.
long long weyl_dimension(const RootDatum& datum, const Weight& lambda);

}  // namespace qflag
