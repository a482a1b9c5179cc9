#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Small dense symmetric linear algebra: cyclic Jacobi eigendecomposition,
// PSD checks, projection onto the PSD cone, and Euclidean simplex projection.
// Matrices here are tiny ((n+1) x (n+1) moment blocks), so the
// unconditionally stable Jacobi iteration is the right tool.

namespace negsched {

// Dense symmetric matrix, full row-major storage.
struct SymMatrix {
  int dim = 0;
  std::vector<double> a;  // dim * dim

  SymMatrix() = default;
  explicit SymMatrix(int d) : dim(d), a(static_cast<std::size_t>(d) * d, 0.0) {}

  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }

  double frobenius() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
  }

  double max_asymmetry() const {
    double worst = 0.0;
    for (int r = 0; r < dim; ++r)
      for (int c = r + 1; c < dim; ++c)
        worst = std::max(worst, std::abs(at(r, c) - at(c, r)));
    return worst;
  }

  void symmetrize() {
    for (int r = 0; r < dim; ++r)
      for (int c = r + 1; c < dim; ++c) {
        const double v = 0.5 * (at(r, c) + at(c, r));
        at(r, c) = v;
        at(c, r) = v;
      }
  }
};

struct EigenSystem {
  std::vector<double> values;   // unsorted, values[k] pairs with column k of vectors
  SymMatrix vectors;            // orthogonal, columns are eigenvectors
};

namespace detail {

inline double offdiag_sq(const SymMatrix& m) {
  double s = 0.0;
  for (int r = 0; r < m.dim; ++r)
    for (int c = r + 1; c < m.dim; ++c) s += 2.0 * m.at(r, c) * m.at(r, c);
  return s;
}

}  // namespace detail

// Cyclic Jacobi sweeps; stops when the off-diagonal Frobenius norm drops
// below 1e-12 times the Frobenius norm of the input.
inline EigenSystem jacobi_eigensystem(const SymMatrix& input) {
  if (input.max_asymmetry() > 1e-12 * std::max(1.0, input.frobenius()))
    throw std::invalid_argument("jacobi_eigensystem: matrix is not symmetric");
  const int d = input.dim;
  SymMatrix m = input;
  m.symmetrize();
  EigenSystem es;
  es.vectors = SymMatrix(d);
  for (int r = 0; r < d; ++r) es.vectors.at(r, r) = 1.0;

  const double scale = m.frobenius();
  const double stop_sq = (1e-12 * scale) * (1e-12 * scale);
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::offdiag_sq(m) <= stop_sq) break;
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = m.at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = m.at(p, p), aqq = m.at(q, q);
        m.at(p, p) = app - t * apq;
        m.at(q, q) = aqq + t * apq;
        m.at(p, q) = 0.0;
        m.at(q, p) = 0.0;
        for (int r = 0; r < d; ++r) {
          if (r != p && r != q) {
            const double arp = m.at(r, p), arq = m.at(r, q);
            m.at(r, p) = arp - s * (arq + tau * arp);
            m.at(p, r) = m.at(r, p);
            m.at(r, q) = arq + s * (arp - tau * arq);
            m.at(q, r) = m.at(r, q);
          }
          const double vrp = es.vectors.at(r, p), vrq = es.vectors.at(r, q);
          es.vectors.at(r, p) = vrp - s * (vrq + tau * vrp);
          es.vectors.at(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
  es.values.resize(d);
  for (int r = 0; r < d; ++r) es.values[r] = m.at(r, r);
  return es;
}

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

// True iff the minimum eigenvalue is >= -tol.
inline PsdCheck check_psd(const SymMatrix& m, double tol) {
  const EigenSystem es = jacobi_eigensystem(m);
  double lo = es.values.empty() ? 0.0 : es.values[0];
  for (double v : es.values) lo = std::min(lo, v);
  return {lo >= -tol, lo};
}

// Nearest (Frobenius) PSD matrix: eigendecompose and clip negative
// eigenvalues to zero.
inline SymMatrix project_psd(const SymMatrix& m) {
  const EigenSystem es = jacobi_eigensystem(m);
  const int d = m.dim;
  SymMatrix out(d);
  for (int k = 0; k < d; ++k) {
    const double lam = es.values[k];
    if (lam <= 0.0) continue;
    for (int r = 0; r < d; ++r) {
      const double vr = es.vectors.at(r, k) * lam;
      if (vr == 0.0) continue;
      for (int c = 0; c < d; ++c) out.at(r, c) += vr * es.vectors.at(c, k);
    }
  }
  out.symmetrize();
  return out;
}

// Euclidean projection onto the probability simplex {t >= 0, sum t = 1}.
inline void project_simplex(std::vector<double>& t) {
  const int n = static_cast<int>(t.size());
  if (n == 1) {
    t[0] = 1.0;
    return;
  }
  std::vector<double> sorted = t;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  int support = 0;
  for (int k = 0; k < n; ++k) {
    cum += sorted[k];
    const double cand = (cum - 1.0) / (k + 1);
    if (sorted[k] - cand > 0.0) {
      theta = cand;
      support = k + 1;
    }
  }
  (void)support;
  for (double& v : t) v = std::max(v - theta, 0.0);
}

}  // namespace negsched
