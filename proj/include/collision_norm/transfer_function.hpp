#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/matrix.hpp"
#include "collision_norm/state_space.hpp"

namespace cnorm {

/// Real polynomial, coefficients in ascending powers of s.
using Poly = std::vector<double>;

namespace poly {

inline Poly trimmed(Poly p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  if (p.empty()) p.push_back(0.0);
  return p;
}

inline std::size_t degree(const Poly& p) { return trimmed(p).size() - 1; }

inline bool is_zero(const Poly& p) {
  return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return trimmed(std::move(r));
}

inline Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return trimmed(std::move(r));
}

inline Poly scale(Poly p, double k) {
  for (double& c : p) c *= k;
  return trimmed(std::move(p));
}

inline std::complex<double> horner(const Poly& p, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
  return acc;
}

}  // namespace poly

/// Single-input single-output rational transfer function num(s)/den(s).
///
/// Coefficients are stored ascending and trimmed. The function is always
/// proper; a common factor sᵏ (exact zero low-order coefficients in both
/// polynomials) is divided out, but no other cancellation is attempted.
class RationalTF {
 public:
  RationalTF(Poly num, Poly den) {
    den = poly::trimmed(std::move(den));
    num = poly::trimmed(std::move(num));
    if (poly::is_zero(den)) throw InvalidParams("zero denominator");
    for (double c : num)
      if (!std::isfinite(c)) throw NonFiniteValue("non-finite numerator");
    for (double c : den)
      if (!std::isfinite(c)) throw NonFiniteValue("non-finite denominator");
    if (!poly::is_zero(num)) {
      std::size_t k = 0;
      while (k + 1 < num.size() && k + 1 < den.size() && num[k] == 0.0 &&
             den[k] == 0.0)
        ++k;
      num.erase(num.begin(), num.begin() + static_cast<std::ptrdiff_t>(k));
      den.erase(den.begin(), den.begin() + static_cast<std::ptrdiff_t>(k));
    }
    if (num.size() > den.size())
      throw ImproperTF("numerator degree " + std::to_string(num.size() - 1) +
                       " exceeds denominator degree " +
                       std::to_string(den.size() - 1));
    num_ = std::move(num);
    den_ = std::move(den);
  }

  static RationalTF constant(double k) { return {{k}, {1.0}}; }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return poly::is_zero(num_); }

 private:
  Poly num_;
  Poly den_;
};

inline RationalTF tf_add(const RationalTF& a, const RationalTF& b) {
  return {poly::add(poly::mul(a.num(), b.den()), poly::mul(b.num(), a.den())),
          poly::mul(a.den(), b.den())};
}

inline RationalTF tf_mul(const RationalTF& a, const RationalTF& b) {
  return {poly::mul(a.num(), b.num()), poly::mul(a.den(), b.den())};
}

inline RationalTF tf_scale(const RationalTF& a, double k) {
  return {poly::scale(a.num(), k), a.den()};
}

/// g(s) by Horner evaluation of numerator and denominator.
inline std::complex<double> evaluate(const RationalTF& g,
                                     std::complex<double> s) {
  const auto d = poly::horner(g.den(), s);
  if (std::abs(d) < 1e-300)
    throw PoleEvaluation("evaluation at a pole of the transfer function");
  return poly::horner(g.num(), s) / d;
}

inline std::size_t relative_degree(const RationalTF& g) {
  if (g.is_zero()) throw ZeroNumerator("relative degree of a zero transfer function");
  return (g.den().size() - 1) - (g.num().size() - 1);
}

/// Controllable canonical realization, single input `input_label`, single
/// output `output_label`. The denominator is normalized to be monic first.
inline StateSpace tf_to_ss(const RationalTF& g,
                           const std::string& input_label = "delta",
                           const std::string& output_label = "f") {
  const std::size_t n = g.den().size() - 1;
  if (g.num().size() > g.den().size())
    throw ImproperTF("cannot realize an improper transfer function");
  if (n == 0) throw InvalidParams("static gain has no state realization");

  const double lead = g.den().back();
  Poly a(g.den());
  for (double& c : a) c /= lead;
  Poly b(n + 1, 0.0);
  for (std::size_t i = 0; i < g.num().size(); ++i) b[i] = g.num()[i] / lead;

  const double d = b[n];
  Matrix am(n, n), bm(n, 1), cm(1, n), dm(1, 1);
  for (std::size_t i = 0; i + 1 < n; ++i) am(i, i + 1) = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    am(n - 1, j) = -a[j];
    cm(0, j) = b[j] - d * a[j];
  }
  bm(n - 1, 0) = 1.0;
  dm(0, 0) = d;
  return {am, bm, cm, dm, {input_label}, {output_label}};
}

/// C(sI − A)⁻¹B + D for one input/output pair.
inline std::complex<double> frequency_response(const StateSpace& ss,
                                               std::size_t output,
                                               std::size_t input,
                                               std::complex<double> s) {
  using cd = std::complex<double>;
  const std::size_t n = ss.states();
  // Complex Gaussian elimination on (sI − A)x = B_input.
  std::vector<std::vector<cd>> m(n, std::vector<cd>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = (i == j ? s : cd(0.0)) - ss.a()(i, j);
    m[i][n] = ss.b()(i, input);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > std::abs(m[p][k])) p = i;
    std::swap(m[k], m[p]);
    if (std::abs(m[k][k]) == 0.0) throw PoleEvaluation("s is an eigenvalue of A");
    for (std::size_t i = k + 1; i < n; ++i) {
      const cd f = m[i][k] / m[k][k];
      for (std::size_t j = k; j <= n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  std::vector<cd> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cd acc = m[i][n];
    for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * x[j];
    x[i] = acc / m[i][i];
  }
  cd y = ss.d()(output, input);
  for (std::size_t j = 0; j < n; ++j) y += ss.c()(output, j) * x[j];
  return y;
}

}  // namespace cnorm
