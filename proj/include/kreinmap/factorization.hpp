#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "kreinmap/fields.hpp"
#include "kreinmap/parallel.hpp"
#include "kreinmap/quadops.hpp"

namespace kreinmap {

// F(x_i, x_j) = h(x_i - x_j). With refine = 2 the kernel lives on the 2N grid,
// whose node differences still land on accelerant samples.
inline Kernel2D convolution_kernel(const Accelerant& h, int refine = 1) {
  if (refine != 1 && refine != 2) throw InputError("convolution_kernel: refine must be 1 or 2");
  const GridSpec g(h.grid().cells() * refine);
  const int r = h.r(), nodes = g.nodes(), stride = 2 / refine;
  Kernel2D f(r, g, Support::full);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) f.block(i, j) = h.at_half_steps(stride * (i - j));
  return f;
}

// Jump of the convolution kernel across its diagonal, h(0+) - h(0-) at every node; empty
// when h is continuous at the origin.
inline std::vector<Mat> convolution_jump(const Accelerant& h, int refine = 1) {
  if (!h.has_jump()) return {};
  return std::vector<Mat>(h.grid().cells() * refine + 1, h.origin_jump());
}

struct AlphaMargin {
  double alpha;
  double sigma_min;
  double sigma_max;
};

struct AccelerantReport {
  bool accepted = true;
  double min_singular_value = 0.0;
  double min_ratio = 0.0;
  double worst_alpha = 0.0;
  std::vector<AlphaMargin> margins;
};

namespace detail {

inline Eigen::VectorXcd start_vector(Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = cplx(1.0 + 0.25 * std::cos(1.7 * k), 0.1 * std::sin(0.9 * k));
  return v.normalized();
}

// Extreme singular values by power iteration on A^H A and its inverse.
inline std::pair<double, double> extreme_singular_values(const Mat& a) {
  if (a.rows() <= 64) {
    Eigen::BDCSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    return {s(s.size() - 1), s(0)};
  }
  Eigen::VectorXcd x = start_vector(a.rows());
  double smax = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXcd y = a * x;
    const double est = y.norm();
    x = (a.adjoint() * y).normalized();
    if (std::abs(est - smax) <= 1e-10 * est) {
      smax = est;
      break;
    }
    smax = est;
  }
  Eigen::PartialPivLU<Mat> lu(a);
  if (!(lu.rcond() > 1e-13)) return {smallest_singular_value(a), smax};
  x = start_vector(a.rows());
  double inv = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXcd y = lu.solve(x);
    const double est = y.norm();
    x = lu.adjoint().solve(y).normalized();
    if (std::abs(est - inv) <= 1e-10 * est) {
      inv = est;
      break;
    }
    inv = est;
  }
  return {1.0 / inv, smax};
}

}  // namespace detail

// Sweep alpha = x_k, k = 1..N, over the symmetrized Nystrom matrix of I + H P_alpha on [0, alpha].
inline AccelerantReport is_accelerant(const Accelerant& h, double tol = 1e-8) {
  const GridSpec& g = h.grid();
  const int r = h.r(), N = g.cells();
  const double step = g.step();
  AccelerantReport rep;
  rep.margins.resize(N);
  parallel_for(1, N + 1, [&](int k) {
    const int dim = (k + 1) * r;
    Mat a = Mat::Identity(dim, dim);
    for (int i = 0; i <= k; ++i) {
      const double wi = (i == 0 || i == k) ? 0.5 * step : step;
      for (int j = 0; j <= k; ++j) {
        const double wj = (j == 0 || j == k) ? 0.5 * step : step;
        a.block(i * r, j * r, r, r) += std::sqrt(wi * wj) * h.at_half_steps(2 * (i - j));
      }
    }
    auto [smin, smax] = detail::extreme_singular_values(a);
    rep.margins[k - 1] = {g.node(k), smin, smax};
  });
  rep.min_ratio = INFINITY;
  rep.min_singular_value = INFINITY;
  for (const auto& m : rep.margins) {
    const double ratio = m.sigma_max > 0 ? m.sigma_min / m.sigma_max : 0.0;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.worst_alpha = m.alpha;
    }
    rep.min_singular_value = std::min(rep.min_singular_value, m.sigma_min);
  }
  rep.accepted = rep.min_ratio > tol;
  return rep;
}

struct GlmStats {
  double max_residual = 0.0;
  int direct_rows = 0;
};

namespace detail {

inline std::string alpha_message(double alpha) {
  std::ostringstream os;
  os << "restricted system is singular at alpha = " << alpha << " (not an accelerant / regularity fails)";
  return os.str();
}

}  // namespace detail

// Row residual of X(x_i,t) + F(x_i,t) + int_0^{x_i} X(x_i,s) F(s,t) ds on nodes t <= x_i.
// F(x, x-0) and F(x, x+0) when F jumps across the diagonal; `jump` holds their difference
// and the diagonal sample is their mean.
namespace detail {
inline Mat diag_below(const Kernel2D& f, const std::vector<Mat>& jump, int i) {
  return jump.empty() ? Mat(f.block(i, i)) : Mat(f.block(i, i) + 0.5 * jump[i]);
}
inline Mat diag_above(const Kernel2D& f, const std::vector<Mat>& jump, int i) {
  return jump.empty() ? Mat(f.block(i, i)) : Mat(f.block(i, i) - 0.5 * jump[i]);
}

// Row system of the discrete equation: row * A = rhs on nodes 0..i. The integrand
// X(x_i,s) F(s,t_j) takes its one-sided value where s = t_j is an end of [0, x_i].
inline void glm_row_system(const Kernel2D& f, const std::vector<Mat>& jump, int i, Mat& A, Mat& rhs) {
  const int n = f.n(), mm = (i + 1) * n;
  const double step = f.grid().step();
  rhs = -f.values().block(i * n, 0, n, mm);
  rhs.rightCols(n) = -diag_below(f, jump, i);
  A = Mat::Identity(mm, mm);
  if (i == 0) return;
  Mat W = f.values().topLeftCorner(mm, mm);
  W.block(0, 0, n, n) = diag_below(f, jump, 0);
  W.block(i * n, i * n, n, n) = diag_above(f, jump, i);
  for (int s = 0; s <= i; ++s) W.middleRows(s * n, n) *= (s == 0 || s == i) ? 0.5 * step : step;
  A += W;
}
}  // namespace detail

inline double glm_row_residual(const Kernel2D& f, const Mat& row, int i, const std::vector<Mat>& jump = {}) {
  Mat A, rhs;
  detail::glm_row_system(f, jump, i, A, rhs);
  const Mat res = row * A - rhs;
  const double scale = std::max({1.0, row.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
  return res.cwiseAbs().maxCoeff() / scale;
}

inline double glm_residual(const Kernel2D& f, const Kernel2D& x, const std::vector<Mat>& jump = {}) {
  double worst = 0.0;
  const int n = f.n();
  for (int i = 0; i < f.grid().nodes(); ++i)
    worst = std::max(worst, glm_row_residual(f, x.values().block(i * n, 0, n, (i + 1) * n), i, jump));
  return worst;
}

// X(x,t) + F(x,t) + int_0^x X(x,s) F(s,t) ds = 0 for t <= x, row by row.
// Rows are solved in order with a bordered inverse of G = I + U F (U = trapezoid weights
// on the growing interval), so the total cost is O(N^3 n^3); a row whose residual is not
// small is re-solved densely. `jump` (optional) is the jump of F across its diagonal.
inline Kernel2D solve_glm(const Kernel2D& f, GlmStats* stats = nullptr, const std::vector<Mat>& jump = {}) {
  const int n = f.n();
  const GridSpec& g = f.grid();
  const int N = g.cells();
  const double step = g.step();
  const Mat& F = f.values();
  const Mat id = Mat::Identity(n, n);
  Kernel2D x(n, g, Support::lower);
  GlmStats local;

  if (!jump.empty() && static_cast<int>(jump.size()) != g.nodes()) throw InputError("solve_glm: jump has wrong length");
  const Mat f00 = detail::diag_below(f, jump, 0);
  x.block(0, 0) = -f00;
  Mat ginv;
  bool ginv_ok = false;
  {
    Eigen::PartialPivLU<Mat> lu(id + 0.5 * step * f00);
    if (lu.rcond() > 1e-12) {
      ginv = lu.inverse();
      ginv_ok = true;
    }
  }

  for (int i = 1; i <= N; ++i) {
    const int m = i * n;
    Mat c = step * F.block(0, i * n, m, n);
    c.topRows(n) *= 0.5;
    const Mat r_half = 0.5 * step * F.block(i * n, 0, n, m);
    const Mat b_lt = F.block(i * n, 0, n, m);
    const Mat b_ii = f.block(i, i);
    const Mat d = id + 0.5 * step * detail::diag_above(f, jump, i);

    Mat row(n, m + n);
    bool solved = false;
    Mat v;
    if (ginv_ok) {
      v = ginv * c;
      const Mat T = d - r_half * v;
      Eigen::PartialPivLU<Mat> tlu(T);
      // rcond is scale-free (always 1 for n = 1); T is a perturbation of I, so also
      // require its smallest singular value to stay away from zero
      if (tlu.rcond() > 1e-10 && Eigen::JacobiSVD<Mat>(T).singularValues().minCoeff() > 1e-10) {
        const Mat rhs = -detail::diag_below(f, jump, i) + b_lt * v;
        const Mat z = rhs * tlu.inverse();
        const Mat y = -(b_lt + z * r_half) * ginv;
        row.leftCols(m) = y;
        row.rightCols(n) = z;
        const double res = glm_row_residual(f, row, i, jump);
        if (res <= 1e-11) {
          solved = true;
          local.max_residual = std::max(local.max_residual, res);
        }
      }
    }
    if (!solved) {
      // dense fallback: row * (I + Omega F_i) = -F_row
      Mat a, rhs;
      detail::glm_row_system(f, jump, i, a, rhs);
      Eigen::PartialPivLU<Mat> lu(a.transpose());
      if (!(lu.rcond() > 1e-14)) throw NotAccelerantError(detail::alpha_message(g.node(i)), g.node(i));
      row = lu.solve(rhs.transpose()).transpose();
      const double res = glm_row_residual(f, row, i, jump);
      local.max_residual = std::max(local.max_residual, res);
      ++local.direct_rows;
    }
    x.values().block(i * n, 0, n, m + n) = row;

    if (i == N) break;
    // extend G^{-1} by one block row/column
    bool extended = false;
    if (ginv_ok) {
      const Mat rG = 2.0 * r_half;
      const Mat S = id + step * b_ii - rG * v;
      Eigen::PartialPivLU<Mat> slu(S);
      if (slu.rcond() > 1e-10) {
        const Mat sinv = slu.inverse();
        const Mat wG = rG * ginv;
        Mat next(m + n, m + n);
        next.topLeftCorner(m, m) = ginv + v * sinv * wG;
        next.topRightCorner(m, n) = -v * sinv;
        next.bottomLeftCorner(n, m) = -sinv * wG;
        next.bottomRightCorner(n, n) = sinv;
        ginv = std::move(next);
        extended = true;
      }
    }
    if (!extended) {
      const int mm = m + n;
      Mat G = F.topLeftCorner(mm, mm);
      G.block(0, 0, n, n) = f00;
      G.topRows(n) *= 0.5 * step;
      G.bottomRows(mm - n) *= step;
      G += Mat::Identity(mm, mm);
      Eigen::PartialPivLU<Mat> lu(G);
      ginv_ok = lu.rcond() > 1e-12;
      if (ginv_ok) ginv = lu.inverse();
    }
  }
  if (stats) *stats = local;
  return x;
}

// Krein resolvent r_h on the base grid (refine = 1) or on the 2N grid (refine = 2).
inline Kernel2D solve_krein(const Accelerant& h, int refine = 1, GlmStats* stats = nullptr) {
  return solve_glm(convolution_kernel(h, refine), stats, convolution_jump(h, refine));
}

struct Factorization {
  Kernel2D lower;
  Kernel2D upper;
  double leakage;
  double reconstruction_residual;
};

// I + F = (I + L_plus)^{-1} (I + L_minus)^{-1}.
inline Factorization factorize(const Kernel2D& f, double leakage_tol = 5e-8) {
  const Kernel2D lp = solve_glm(f);
  const DiscOp op_l = op_from_kernel(lp);
  const DiscOp op_f = op_from_kernel(f.with_support(Support::full));
  const int dim = op_f.dim();
  // (I + L_plus)(I + F) - I is (I + L_minus)^{-1} - I and must be upper triangular
  const DiscOp prod = op_l + op_f + compose(op_l, op_f);

  Kernel2D strict_lower = kernel_from_op(prod, Support::lower);
  for (int i = 0; i < f.grid().nodes(); ++i) strict_lower.block(i, i).setZero();
  const double leakage = gp_norm(strict_lower, 1.0);
  if (leakage > leakage_tol) {
    std::ostringstream os;
    os << "upper factor leaks into the lower triangle (gp_norm " << leakage << ")";
    throw SupportViolationError(os.str(), leakage);
  }
  const DiscOp gamma_minus = restrict_op(prod, Support::upper);
  const DiscOp op_minus = invert_identity_plus(gamma_minus);
  const Kernel2D lm = kernel_from_op(op_minus, Support::upper);

  const Mat id = Mat::Identity(dim, dim);
  const Mat inv_plus = id + invert_identity_plus(op_l).M;
  const Mat inv_minus = id + invert_identity_plus(op_from_kernel(lm)).M;
  const double res = (inv_plus * inv_minus - (id + op_f.M)).cwiseAbs().maxCoeff();
  return Factorization{lp, lm, leakage, res};
}

}  // namespace kreinmap
