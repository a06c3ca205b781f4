#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lcn/architecture.hpp"
#include "lcn/errors.hpp"

namespace lcn {

// Dense univariate polynomial, coefficients in ascending powers.
// The zero polynomial is represented by an all-zero (possibly empty)
// coefficient vector; degree() is -1 for it.
template <class T>
struct Poly {
  std::vector<T> coeffs;

  Poly() = default;
  explicit Poly(std::vector<T> c) : coeffs(std::move(c)) {}

  // Largest index with |coefficient| > tol, or -1.
  int degree(double tol = 0.0) const {
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
      if (std::abs(coeffs[i]) > tol) return i;
    return -1;
  }

  bool is_zero(double tol = 0.0) const { return degree(tol) < 0; }

  T eval(const T& x) const {
    T acc{};
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
      acc = acc * x + coeffs[i];
    return acc;
  }

  // Drops trailing coefficients with modulus <= tol.
  Poly trimmed(double tol = 0.0) const {
    Poly p = *this;
    p.coeffs.resize(static_cast<std::size_t>(degree(tol) + 1));
    return p;
  }
};

using RealPoly = Poly<double>;
using ComplexPoly = Poly<std::complex<double>>;

// Coefficient q-norm (the polynomial p-norm of the paper).
template <class T>
double p_norm(const Poly<T>& p, double q) {
  double acc = 0.0;
  for (const T& c : p.coeffs) acc += std::pow(std::abs(c), q);
  return std::pow(acc, 1.0 / q);
}

template <class T>
double norm1(const Poly<T>& p) {
  double acc = 0.0;
  for (const T& c : p.coeffs) acc += std::abs(c);
  return acc;
}

// p(x) = w_1 + w_2 x + ... + w_k x^{k-1}.
RealPoly from_filter(const Eigen::VectorXd& w);

// Strided polynomial of layer i (1-based): sum_j w_{j+1} x^{j * prod_{n<i} s_n}.
RealPoly stretch(const Eigen::VectorXd& w, int layer,
                 const std::vector<int>& strides);

// Cauchy-product multiplication.
template <class T>
Poly<T> multiply(const Poly<T>& p, const Poly<T>& q) {
  if (p.coeffs.empty() || q.coeffs.empty()) return Poly<T>{};
  std::vector<T> out(p.coeffs.size() + q.coeffs.size() - 1, T{});
  for (std::size_t i = 0; i < p.coeffs.size(); ++i)
    for (std::size_t j = 0; j < q.coeffs.size(); ++j)
      out[i + j] += p.coeffs[i] * q.coeffs[j];
  return Poly<T>(std::move(out));
}

inline ComplexPoly to_complex(const RealPoly& p) {
  ComplexPoly q;
  q.coeffs.assign(p.coeffs.begin(), p.coeffs.end());
  return q;
}

}  // namespace lcn
