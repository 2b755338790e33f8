#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "kreinmap/fields.hpp"

namespace kreinmap {

// Spectral norm of one block.
inline double block_norm(const Eigen::Ref<const Mat>& b) {
  if (b.size() == 1) return std::abs(b(0, 0));
  if (b.rows() == 2 && b.cols() == 2) {
    // largest eigenvalue of the 2x2 Gram matrix
    const Eigen::Matrix2cd g = b.adjoint() * b;
    const double a = g(0, 0).real(), d = g(1, 1).real();
    const double off = std::norm(g(0, 1));
    const double half = 0.5 * (a - d);
    return std::sqrt(std::max(0.0, 0.5 * (a + d) + std::sqrt(half * half + off)));
  }
  return Eigen::JacobiSVD<Mat>(b).singularValues()(0);
}

inline double sup_norm(const Kernel2D& k) {
  double m = 0.0;
  for (int i = 0; i < k.grid().nodes(); ++i)
    for (int j = 0; j < k.grid().nodes(); ++j) m = std::max(m, block_norm(k.block(i, j)));
  return m;
}

// Nystrom matrix of an integral operator. `support` fixes the weight convention:
// triangular operators weight their diagonal with h/2 (trapezoid on [0, x_i] or [x_i, 1]).
struct DiscOp {
  int n;
  GridSpec grid;
  Support support;
  Mat M;

  int dim() const { return static_cast<int>(M.rows()); }
  auto block(int i, int j) const { return M.block(i * n, j * n, n, n); }
};

inline double nystrom_weight(const GridSpec& g, Support s, int i, int j) {
  if (!in_support(s, i, j)) return 0.0;
  if (s != Support::full && i == j) return 0.5 * g.step();
  return g.weight(j);
}

inline DiscOp op_from_kernel(const Kernel2D& k) {
  const int n = k.n(), nodes = k.grid().nodes();
  DiscOp op{n, k.grid(), k.support(), Mat::Zero(nodes * n, nodes * n)};
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      const double w = nystrom_weight(k.grid(), k.support(), i, j);
      if (w != 0.0) op.M.block(i * n, j * n, n, n) = w * k.block(i, j);
    }
  return op;
}

inline Kernel2D kernel_from_op(const DiscOp& a, Support support) {
  const int n = a.n, nodes = a.grid.nodes();
  Kernel2D k(n, a.grid, support);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      if (!in_support(support, i, j) || !in_support(a.support, i, j)) continue;
      k.block(i, j) = a.block(i, j) / nystrom_weight(a.grid, a.support, i, j);
    }
  return k;
}

inline void require_compatible(const DiscOp& a, const DiscOp& b) {
  if (!(a.grid == b.grid) || a.n != b.n || a.M.rows() != b.M.rows())
    throw InputError("operator dimension mismatch");
}

inline DiscOp compose(const DiscOp& a, const DiscOp& b) {
  require_compatible(a, b);
  return DiscOp{a.n, a.grid, combined_support(a.support, b.support), a.M * b.M};
}

inline DiscOp operator+(const DiscOp& a, const DiscOp& b) {
  require_compatible(a, b);
  return DiscOp{a.n, a.grid, combined_support(a.support, b.support), a.M + b.M};
}

inline DiscOp operator-(const DiscOp& a, const DiscOp& b) {
  require_compatible(a, b);
  return DiscOp{a.n, a.grid, combined_support(a.support, b.support), a.M - b.M};
}

// Truncate the matrix to a triangle; the result uses that triangle's weight convention.
inline DiscOp restrict_op(const DiscOp& a, Support s) {
  DiscOp out{a.n, a.grid, s, a.M};
  const int nodes = a.grid.nodes();
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (!in_support(s, i, j)) out.M.block(i * a.n, j * a.n, a.n, a.n).setZero();
  return out;
}

inline double smallest_singular_value(const Mat& m) {
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Gamma = (I + A)^{-1} - I.
inline DiscOp invert_identity_plus(const DiscOp& a) {
  const int n = a.n, nodes = a.grid.nodes(), dim = a.dim();
  const Mat T = Mat::Identity(dim, dim) + a.M;
  auto fail = [&]() -> DiscOp {
    const double smin = smallest_singular_value(T);
    throw SingularOperatorError("I + K is singular (smallest singular value " + std::to_string(smin) + ")", smin);
  };

  if (a.support == Support::full) {
    Eigen::PartialPivLU<Mat> lu(T);
    if (!(lu.rcond() > 1e-14)) return fail();
    return DiscOp{n, a.grid, Support::full, lu.inverse() - Mat::Identity(dim, dim)};
  }

  // block substitution for triangular operators
  Mat X = Mat::Zero(dim, dim);
  std::vector<Eigen::PartialPivLU<Mat>> diag(nodes);
  for (int i = 0; i < nodes; ++i) {
    diag[i].compute(T.block(i * n, i * n, n, n));
    if (!(diag[i].rcond() > 1e-14)) return fail();
  }
  const Mat id = Mat::Identity(n, n);
  if (a.support == Support::lower) {
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j <= i; ++j) {
        Mat rhs = (i == j) ? id : Mat::Zero(n, n);
        for (int s = j; s < i; ++s) rhs.noalias() -= T.block(i * n, s * n, n, n) * X.block(s * n, j * n, n, n);
        X.block(i * n, j * n, n, n) = diag[i].solve(rhs);
      }
  } else {
    for (int i = nodes - 1; i >= 0; --i)
      for (int j = nodes - 1; j >= i; --j) {
        Mat rhs = (i == j) ? id : Mat::Zero(n, n);
        for (int s = i + 1; s <= j; ++s) rhs.noalias() -= T.block(i * n, s * n, n, n) * X.block(s * n, j * n, n, n);
        X.block(i * n, j * n, n, n) = diag[i].solve(rhs);
      }
  }
  X -= Mat::Identity(dim, dim);
  return DiscOp{n, a.grid, a.support, std::move(X)};
}

// Kernel-level adjoint K*(x,t) = K(t,x)^H, realized as W^{-1} M^H W.
inline DiscOp adjoint_op(const DiscOp& a) {
  const int n = a.n, nodes = a.grid.nodes();
  Eigen::VectorXd w(nodes * n);
  for (int i = 0; i < nodes; ++i) w.segment(i * n, n).setConstant(a.grid.weight(i));
  Mat m = w.cwiseInverse().asDiagonal() * a.M.adjoint() * w.asDiagonal();
  Support s = a.support == Support::lower ? Support::upper : a.support == Support::upper ? Support::lower : Support::full;
  return DiscOp{n, a.grid, s, std::move(m)};
}

inline Kernel2D kernel_adjoint(const Kernel2D& k) {
  Support s = k.support() == Support::lower   ? Support::upper
              : k.support() == Support::upper ? Support::lower
                                              : Support::full;
  Kernel2D out(k.n(), k.grid(), s);
  const int nodes = k.grid().nodes();
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) out.block(i, j) = k.block(j, i).adjoint();
  return out;
}

inline Kernel2D triangular_truncate(const Kernel2D& k, Support part) { return k.with_support(part); }

inline Kernel2D diagonal_part(const Kernel2D& k) {
  Kernel2D d(k.n(), k.grid(), Support::full);
  for (int i = 0; i < k.grid().nodes(); ++i) d.block(i, i) = k.block(i, i);
  return d;
}

// max over rows and columns of the discrete L_p norm, blocks in spectral norm.
inline double gp_norm(const Kernel2D& k, double p = 1.0) {
  if (!(p >= 1.0)) throw InputError("gp_norm requires p >= 1");
  const int nodes = k.grid().nodes();
  Eigen::MatrixXd a(nodes, nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) a(i, j) = std::pow(block_norm(k.block(i, j)), p);
  double best = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < nodes; ++j) {
      row += k.grid().weight(j) * a(i, j);
      col += k.grid().weight(j) * a(j, i);
    }
    best = std::max({best, std::pow(row, 1.0 / p), std::pow(col, 1.0 / p)});
  }
  return best;
}

inline double lp_field_norm(const Accelerant& h, double p = 1.0) {
  if (!(p >= 1.0)) throw InputError("lp_field_norm requires p >= 1");
  const double step = 1.0 / (2.0 * h.grid().cells());
  double s = 0.0;
  for (int k = 0; k < h.size(); ++k) {
    const double w = (k == 0 || k == h.size() - 1) ? 0.5 * step : step;
    s += w * std::pow(block_norm(h[k]), p);
  }
  return std::pow(s, 1.0 / p);
}

inline double lp_field_norm(const Potential& q, double p = 1.0) {
  if (!(p >= 1.0)) throw InputError("lp_field_norm requires p >= 1");
  double s = 0.0;
  for (int i = 0; i < q.grid().nodes(); ++i)
    s += q.grid().weight(i) * std::pow(std::max(block_norm(q.q_plus(i)), block_norm(q.q_minus(i))), p);
  return std::pow(s, 1.0 / p);
}

// (A o B)(x,t) = int_t^x A(x,s) B(s,t) ds by the trapezoid rule, for lower kernels.
inline Kernel2D compose_volterra(const Kernel2D& a, const Kernel2D& b) {
  require_compatible(a, b);
  const int n = a.n(), nodes = a.grid().nodes();
  const double h = a.grid().step();
  const Kernel2D al = a.with_support(Support::lower), bl = b.with_support(Support::lower);
  Kernel2D c(n, a.grid(), Support::lower, h * (al.values() * bl.values()));
  for (int i = 0; i < nodes; ++i) {
    c.block(i, i).setZero();
    for (int j = 0; j < i; ++j)
      c.block(i, j) -= 0.5 * h * (al.block(i, i) * bl.block(i, j) + al.block(i, j) * bl.block(j, j));
  }
  return c;
}

}  // namespace kreinmap
