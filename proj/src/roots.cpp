#include "lcn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lcn {

namespace {

using cd = std::complex<double>;

ComplexPoly derivative(const ComplexPoly& p) {
  ComplexPoly d;
  for (std::size_t i = 1; i < p.coeffs.size(); ++i)
    d.coeffs.push_back(static_cast<double>(i) * p.coeffs[i]);
  return d;
}

bool residuals_ok(const ComplexPoly& p, const std::vector<cd>& zs,
                  double tol) {
  const double n1 = norm1(p);
  const int n = p.degree();
  for (const cd& z : zs) {
    const double scale = std::pow(std::max(1.0, std::abs(z)), n);
    if (std::abs(p.eval(z)) > tol * n1 * scale) return false;
  }
  return true;
}

}  // namespace

double root_bound(const ComplexPoly& p) {
  const int n = p.degree();
  if (n < 0) fail(ErrorCode::ZeroPolynomial, "root_bound of zero polynomial");
  if (n == 0)
    fail(ErrorCode::ConstantPolynomial, "root_bound of constant polynomial");
  double maxc = 0.0;
  for (int i = 0; i <= n; ++i) maxc = std::max(maxc, std::abs(p.coeffs[i]));
  return n / std::abs(p.coeffs[n]) * maxc;
}

std::vector<cd> roots(const ComplexPoly& p, double tol) {
  ComplexPoly q = p.trimmed();
  int n = q.degree();
  if (n < 1)
    fail(n < 0 ? ErrorCode::ZeroPolynomial : ErrorCode::ConstantPolynomial,
         "roots requires degree >= 1");

  // Deflate exact roots at the origin first.
  std::vector<cd> out;
  while (!q.coeffs.empty() && q.coeffs.front() == 0.0) {
    out.emplace_back(0.0, 0.0);
    q.coeffs.erase(q.coeffs.begin());
  }
  n = q.degree();
  if (n < 1) return out;
  if (n == 1) {
    out.push_back(-q.coeffs[0] / q.coeffs[1]);
    return out;
  }

  const ComplexPoly dq = derivative(q);
  const double radius = std::max(root_bound(q) / 2.0, 1e-3);
  std::vector<cd> z(n);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n + 0.4;
    z[i] = radius * cd(std::cos(theta), std::sin(theta));
  }

  constexpr int kMaxIter = 1000;
  bool converged = false;
  for (int iter = 0; iter < kMaxIter && !converged; ++iter) {
    double max_update = 0.0;
    for (int i = 0; i < n; ++i) {
      const cd pz = q.eval(z[i]);
      if (pz == 0.0) continue;
      cd dpz = dq.eval(z[i]);
      if (dpz == 0.0) {
        z[i] += cd(1e-8 * (1.0 + std::abs(z[i])), 1e-8);
        max_update = 1.0;
        continue;
      }
      const cd newton = pz / dpz;
      cd sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cd denom = 1.0 - newton * sum;
      const cd step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
      z[i] -= step;
      max_update =
          std::max(max_update, std::abs(step) / std::max(1.0, std::abs(z[i])));
    }
    if (max_update < tol) converged = true;
  }

  if (!converged && !residuals_ok(q, z, std::max(tol, 1e-10)))
    fail(ErrorCode::NoConvergence,
         "root iteration did not converge within the iteration cap");

  out.insert(out.end(), z.begin(), z.end());
  return out;
}

ComplexPoly LinearFactorization::product() const {
  ComplexPoly acc;
  acc.coeffs = {cd(sign, 0.0)};
  for (const ComplexPoly& u : factors) acc = multiply(acc, u);
  return acc;
}

LinearFactorization factor_linear(const RealPoly& p) {
  RealPoly q = p.trimmed();
  const int n = q.degree();
  if (n < 1)
    fail(n < 0 ? ErrorCode::ZeroPolynomial : ErrorCode::ConstantPolynomial,
         "factor_linear requires degree >= 1");
  const double an = q.coeffs[n];

  LinearFactorization fac;
  fac.sign = (an >= 0.0) ? 1.0 : -1.0;
  fac.bound_T = std::max(norm1(q), 1.0);

  std::vector<cd> zs = roots(to_complex(q));
  std::sort(zs.begin(), zs.end(),
            [](const cd& a, const cd& b) { return std::abs(a) > std::abs(b); });
  int r = 0;
  while (r < n && std::abs(zs[r]) >= 1.0) ++r;

  if (r == 0) {
    // All roots inside the unit disc: spread |a_n| evenly over all factors.
    const double c = std::pow(std::abs(an), 1.0 / n);
    for (const cd& z : zs) fac.factors.push_back(ComplexPoly({-c * z, c}));
  } else {
    // |a_n z_1...z_r|^{1/r} / |z_i| scaling on the r large-modulus roots,
    // plain monic factors for the rest.
    double prod_mag = std::abs(an);
    for (int i = 0; i < r; ++i) prod_mag *= std::abs(zs[i]);
    const double scale = std::pow(prod_mag, 1.0 / r);
    for (int i = 0; i < n; ++i) {
      if (i < r) {
        const double c = scale / std::abs(zs[i]);
        fac.factors.push_back(ComplexPoly({-c * zs[i], cd(c, 0.0)}));
      } else {
        fac.factors.push_back(ComplexPoly({-zs[i], cd(1.0, 0.0)}));
      }
    }
  }
  return fac;
}

std::vector<cd> common_roots(const std::vector<RealPoly>& polys, double tol) {
  std::vector<ComplexPoly> trimmed;
  for (const RealPoly& p : polys) {
    RealPoly q = p.trimmed();
    if (q.degree() < 0)
      fail(ErrorCode::ZeroPolynomialInput,
           "zero polynomial shares all roots; caller must handle");
    trimmed.push_back(to_complex(q));
  }
  if (trimmed.empty()) return {};
  // A nonzero constant has no roots at all.
  for (const ComplexPoly& q : trimmed)
    if (q.degree() == 0) return {};

  std::vector<cd> candidates = roots(trimmed.front());
  std::vector<cd> common;
  const double cluster_radius = std::sqrt(tol);
  for (const cd& z : candidates) {
    bool all = true;
    for (const ComplexPoly& q : trimmed) {
      const double scale = std::pow(std::max(1.0, std::abs(z)), q.degree());
      if (std::abs(q.eval(z)) > tol * norm1(q) * scale) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    bool dup = false;
    for (const cd& c : common)
      if (std::abs(c - z) <= cluster_radius) {
        dup = true;
        break;
      }
    if (!dup) common.push_back(z);
  }
  return common;
}

}  // namespace lcn
