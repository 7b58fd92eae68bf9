#include "hsl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsl {

Matrix matmul(const Matrix& x, const Matrix& y) {
  Matrix out(x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t k = 0; k < x.n; ++k) {
      double v = x(i, k);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < x.n; ++j) out(i, j) += v * y(k, j);
    }
  return out;
}

SymEigen sym_eigen(const Matrix& m) {
  const std::size_t n = m.n;
  Matrix a = m;
  Matrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return s;
  };

  double scale = 0.0;
  for (double x : a.a) scale = std::max(scale, std::abs(x));
  const double tol = (scale > 0 ? scale : 1.0) * 1e-14;

  for (int sweep = 0; sweep < 64 && off_norm() > tol * tol * n; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::abs(apq) <= tol * 1e-4) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
  SymEigen sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
  }
  return sorted;
}

Matrix sym_sqrt(const Matrix& m) {
  SymEigen e = sym_eigen(m);
  const std::size_t n = m.n;
  Matrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lam = std::max(e.values[k], 0.0);
    double r = std::sqrt(lam);
    if (r == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      double vik = e.vectors(i, k);
      if (vik == 0.0) continue;
      double w = r * vik;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += w * e.vectors(j, k);
    }
  }
  return out;
}

std::vector<double> singular_values(Matrix m) {
  const std::size_t n = m.n;
  // One-sided Jacobi: rotate column pairs until all are orthogonal.
  double scale = 0.0;
  for (double x : m.a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return std::vector<double>(n, 0.0);
  const double eps = 1e-15;

  for (int sweep = 0; sweep < 64; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          app += m(k, p) * m(k, p);
          aqq += m(k, q) * m(k, q);
          apq += m(k, p) * m(k, q);
        }
        if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += m(k, j) * m(k, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double nuclear_norm(const Matrix& m) {
  auto sv = singular_values(m);
  double s = 0.0;
  for (double x : sv) s += x;
  return s;
}

}  // namespace hsl
