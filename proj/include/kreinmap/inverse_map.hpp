#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "kreinmap/fields.hpp"
#include "kreinmap/quadops.hpp"

namespace kreinmap {

// Q on the 2N grid: base nodes copied, midpoints by cubic Lagrange interpolation.
inline std::vector<Mat> refine_potential(const Potential& q) {
  const int N = q.grid().cells();
  std::vector<Mat> out(2 * N + 1);
  for (int i = 0; i <= N; ++i) out[2 * i] = q.full(i);
  for (int m = 0; m < N; ++m) {
    int first;
    double w[4];
    if (m == 0) {
      first = 0;
      w[0] = 0.3125, w[1] = 0.9375, w[2] = -0.3125, w[3] = 0.0625;
    } else if (m == N - 1) {
      first = N - 3;
      w[0] = 0.0625, w[1] = -0.3125, w[2] = 0.9375, w[3] = 0.3125;
    } else {
      first = m - 1;
      w[0] = -0.0625, w[1] = 0.5625, w[2] = 0.5625, w[3] = -0.0625;
    }
    Mat v = w[0] * out[2 * first];
    for (int k = 1; k < 4; ++k) v += w[k] * out[2 * (first + k)];
    out[2 * m + 1] = v;
  }
  return out;
}

struct PKernels {
  Kernel2D plus;   // on the 2N grid
  Kernel2D minus;  // on the 2N grid
  int iterations;
  double last_change;
};

// Picard iteration for
//   P+(x,t) = int_t^x JQ(s) P-(s, s-t) ds,
//   P-(x,t) = int_t^x JQ(s) P+(s, s-t) ds + JQ(t),
// trapezoid rule along s on the 2N grid.
inline PKernels solve_P_kernels(const Potential& q, double tol = 1e-12, int max_iter = 60) {
  const int r = q.r(), n = 2 * r;
  const GridSpec g = q.grid().refined();
  const int M = g.cells();
  const double hm = g.step();
  const Mat J = StructuralConstants::make(r).J;
  std::vector<Mat> jq = refine_potential(q);
  for (Mat& m : jq) m = J * m;

  Kernel2D plus(n, g, Support::lower), minus(n, g, Support::lower);
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= i; ++j) minus.block(i, j) = jq[j];

  Mat gbuf = Mat::Zero((M + 1) * n, (M + 1) * n);
  // out(i,j) = int_{t_j}^{x_i} JQ(s) src(s, s - t_j) ds + (add_jq ? JQ(t_j) : 0)
  auto sweep = [&](const Kernel2D& src, Kernel2D& out, bool add_jq) {
    for (int j = 0; j <= M; ++j)
      for (int k = j; k <= M; ++k) gbuf.block(k * n, j * n, n, n).noalias() = jq[k] * src.block(k, k - j);
    for (int j = 0; j <= M; ++j) {
      out.block(j, j) = add_jq ? jq[j] : Mat::Zero(n, n);
      for (int i = j + 1; i <= M; ++i)
        out.block(i, j) = out.block(i - 1, j) + 0.5 * hm * (gbuf.block((i - 1) * n, j * n, n, n) + gbuf.block(i * n, j * n, n, n));
    }
  };

  double change = INFINITY;
  int it = 0;
  while (it < max_iter) {
    ++it;
    Kernel2D plus_new(n, g, Support::lower), minus_new(n, g, Support::lower);
    sweep(minus, plus_new, false);
    sweep(plus_new, minus_new, true);
    const double scale = std::max(1.0, std::max(plus_new.values().cwiseAbs().maxCoeff(), minus_new.values().cwiseAbs().maxCoeff()));
    change = std::max((plus_new.values() - plus.values()).cwiseAbs().maxCoeff(),
                      (minus_new.values() - minus.values()).cwiseAbs().maxCoeff()) /
             scale;
    plus = std::move(plus_new);
    minus = std::move(minus_new);
    if (change <= tol) return PKernels{std::move(plus), std::move(minus), it, change};
  }
  std::ostringstream os;
  os << "transformation kernels did not converge in " << max_iter << " iterations (last change " << change
     << "); the potential is too large for this grid";
  throw ConvergenceError(os.str(), it, change);
}

// K_Q(x,t) = 1/2 {P+(x,(x-t)/2) + P+(x,(x+t)/2) B + P-(x,(x-t)/2) B + P-(x,(x+t)/2)}.
inline Kernel2D build_K(const PKernels& p) {
  const int n = p.plus.n();
  const GridSpec g(p.plus.grid().cells() / 2);
  const Mat B = StructuralConstants::make(n / 2).B;
  Kernel2D K(n, g, Support::lower);
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j <= i; ++j) {
      const int x = 2 * i, lo = i - j, hi = i + j;
      K.block(i, j) = 0.5 * (p.plus.block(x, lo) + p.plus.block(x, hi) * B + p.minus.block(x, lo) * B + p.minus.block(x, hi));
    }
  return K;
}

inline Kernel2D build_K(const Potential& q) { return build_K(solve_P_kernels(q)); }

// Nystrom matrix of a lower kernel whose diagonal blocks are the Cayley image
// (I - hK/4)^{-1}(I + hK/4) - I = hK/2 + O(h^2) instead of hK/2. Off-diagonal blocks
// carry the trapezoid weights. With this diagonal, inverting I + E(K) returns a matrix
// of the same form whose diagonal decodes to exactly -K(x,x).
inline DiscOp volterra_embed(const Kernel2D& k) {
  if (k.support() != Support::lower) throw InputError("volterra_embed expects a lower kernel");
  const int n = k.n(), nodes = k.grid().nodes();
  const double h = k.grid().step();
  const Mat id = Mat::Identity(n, n);
  DiscOp op = op_from_kernel(k);
  for (int i = 0; i < nodes; ++i) {
    const Mat kk = k.block(i, i);
    Eigen::PartialPivLU<Mat> lu(id - 0.25 * h * kk);
    if (!(lu.rcond() > 1e-14)) throw SingularOperatorError("Volterra kernel too large for the grid", 0.0);
    op.M.block(i * n, i * n, n, n) = lu.solve(id + 0.25 * h * kk) - id;
  }
  return op;
}

inline Kernel2D volterra_decode(const DiscOp& op) {
  const int n = op.n, nodes = op.grid.nodes();
  const double h = op.grid.step();
  const Mat id = Mat::Identity(n, n);
  Kernel2D k = kernel_from_op(op, Support::lower);
  for (int i = 0; i < nodes; ++i) {
    const Mat d = id + op.block(i, i);
    Eigen::PartialPivLU<Mat> lu(d + id);
    k.block(i, i) = (4.0 / h) * lu.solve(d - id);
  }
  return k;
}

// Volterra resolvent L with (I + K)^{-1} = I + L, computed as E(L) = (I + E(K))^{-1} - I by
// block forward substitution one row at a time.
inline Kernel2D resolvent_volterra(const Kernel2D& k) {
  const DiscOp e = volterra_embed(k);
  const int n = k.n(), nodes = k.grid().nodes(), dim = e.dim();
  const Mat id = Mat::Identity(n, n);
  Mat X = Mat::Zero(dim, dim);  // (I + E(K))^{-1}
  for (int i = 0; i < nodes; ++i) {
    Eigen::PartialPivLU<Mat> d(id + e.M.block(i * n, i * n, n, n));
    if (!(d.rcond() > 1e-14)) throw SingularOperatorError("Volterra resolvent: singular diagonal block", 0.0);
    X.block(i * n, i * n, n, n) = d.inverse();
    if (i > 0) {
      const Mat row = e.M.block(i * n, 0, n, i * n) * X.topLeftCorner(i * n, i * n);
      X.block(i * n, 0, n, i * n) = -d.solve(row);
    }
  }
  X -= Mat::Identity(dim, dim);
  return volterra_decode(DiscOp{n, k.grid(), Support::lower, std::move(X)});
}

// The two one-sided traces of F_Q: `lower` on the closed triangle t <= x, `upper` on t >= x.
struct FQSides {
  Kernel2D lower;
  Kernel2D upper;
};

// F_Q = (I + L_Q)(I + L_{Q*}^*) - I with L^* the kernel adjoint. The product term
// int_0^{min(x,t)} L(x,s) L_*(t,s)^H ds is a trapezoid sum.
inline FQSides build_F_Q_sides(const Kernel2D& L, const Kernel2D& Ls) {
  const int n = L.n(), nodes = L.grid().nodes();
  const double h = L.grid().step();
  Eigen::VectorXd w(nodes * n);
  w.setConstant(h);
  w.head(n).setConstant(0.5 * h);
  Mat C = L.values() * w.asDiagonal() * Ls.values().adjoint();
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      const int m = std::min(i, j);
      C.block(i * n, j * n, n, n) -= 0.5 * h * L.block(i, m) * Ls.block(j, m).adjoint();
    }
  FQSides out{Kernel2D(n, L.grid(), Support::lower), Kernel2D(n, L.grid(), Support::upper)};
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      if (j <= i) out.lower.block(i, j) = L.block(i, j) + C.block(i * n, j * n, n, n);
      if (j >= i) out.upper.block(i, j) = Ls.block(j, i).adjoint() + C.block(i * n, j * n, n, n);
    }
  return out;
}

inline Kernel2D merge_sides(const FQSides& s) {
  const int nodes = s.lower.grid().nodes();
  Kernel2D f(s.lower.n(), s.lower.grid(), Support::full, s.lower.values() + s.upper.values());
  for (int i = 0; i < nodes; ++i) f.block(i, i) *= 0.5;
  return f;
}

// Everything the inverse map computes on the way to F_Q.
struct InverseChain {
  PKernels P;
  Kernel2D K;
  Kernel2D L;
  PKernels P_adj;
  Kernel2D K_adj;
  Kernel2D L_adj;
  FQSides F_sides;
  Kernel2D F;
};

inline InverseChain inverse_chain(const Potential& q) {
  PKernels P = solve_P_kernels(q);
  Kernel2D K = build_K(P);
  Kernel2D L = resolvent_volterra(K);
  PKernels Pa = solve_P_kernels(potential_adjoint(q));
  Kernel2D Ka = build_K(Pa);
  Kernel2D La = resolvent_volterra(Ka);
  FQSides sides = build_F_Q_sides(L, La);
  Kernel2D F = merge_sides(sides);
  return InverseChain{std::move(P), std::move(K), std::move(L), std::move(Pa), std::move(Ka), std::move(La), std::move(sides), std::move(F)};
}

inline Kernel2D build_F_Q(const Potential& q) { return inverse_chain(q).F; }

// Trace of F at t = 1, piecewise over the four quarters of [-1,1], times 2.
inline Accelerant eta_boundary(const Kernel2D& f) {
  if (f.n() % 2 != 0) throw InputError("eta expects an even block dimension");
  const int r = f.n() / 2, N = f.grid().cells();
  std::vector<Mat> v(4 * N + 1);
  for (int k = 0; k <= 4 * N; ++k) {
    const int d = k - 2 * N;
    auto b = [&](int i) { return f.block(i, N); };
    if (d <= -N)
      v[k] = 2.0 * b(-d - N).bottomLeftCorner(r, r);
    else if (d <= 0)
      v[k] = 2.0 * b(d + N).topLeftCorner(r, r);
    else if (d <= N)
      v[k] = 2.0 * b(N - d).bottomRightCorner(r, r);
    else
      v[k] = 2.0 * b(d - N).topRightCorner(r, r);
  }
  return Accelerant(r, f.grid(), std::move(v));
}

// For each half-step abscissa, twice the mean of every node sample on the matching
// characteristic lines x - t = const (F11, F22) and x + t = const (F12, F21).
inline Accelerant eta_characteristic(const Kernel2D& f) {
  if (f.n() % 2 != 0) throw InputError("eta expects an even block dimension");
  const int r = f.n() / 2, N = f.grid().cells();
  std::vector<Mat> v(4 * N + 1, Mat::Zero(r, r));
  for (int k = 0; k <= 4 * N; ++k) {
    const int d = k - 2 * N;
    Mat sum = Mat::Zero(r, r);
    int count = 0;
    if (std::abs(d) <= N) {
      for (int i = std::max(0, d); i <= std::min(N, N + d); ++i) {
        sum += f.block(i, i - d).topLeftCorner(r, r);  // x - t = d
        ++count;
      }
      for (int i = std::max(0, -d); i <= std::min(N, N - d); ++i) {
        sum += f.block(i, i + d).bottomRightCorner(r, r);  // t - x = d
        ++count;
      }
    }
    if (d > 0) {
      for (int i = std::max(0, d - N); i <= std::min(N, d); ++i) {
        sum += f.block(i, d - i).topRightCorner(r, r);  // x + t = d
        ++count;
      }
    } else if (d < 0) {
      for (int i = std::max(0, -d - N); i <= std::min(N, -d); ++i) {
        sum += f.block(i, -d - i).bottomLeftCorner(r, r);  // x + t = -d
        ++count;
      }
    }
    v[k] = (2.0 / count) * sum;
  }
  return Accelerant(r, f.grid(), std::move(v));
}

// Same, with the one-sided limits h(0+) and h(0-) read from the diagonal traces of the
// two sides of F: below the diagonal F11 -> h(0+)/2 and F22 -> h(0-)/2, above it the reverse.
inline Accelerant eta_characteristic(const FQSides& s) {
  const Accelerant mid = eta_characteristic(merge_sides(s));
  const int r = mid.r(), nodes = s.lower.grid().nodes();
  Mat plus = Mat::Zero(r, r), minus = Mat::Zero(r, r);
  for (int i = 0; i < nodes; ++i) {
    plus += s.lower.block(i, i).topLeftCorner(r, r) + s.upper.block(i, i).bottomRightCorner(r, r);
    minus += s.lower.block(i, i).bottomRightCorner(r, r) + s.upper.block(i, i).topLeftCorner(r, r);
  }
  return Accelerant(r, mid.grid(), mid.values(), plus / nodes, minus / nodes);
}

inline double sup_difference(const Accelerant& a, const Accelerant& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, block_norm(a[k] - b[k]));
  return m;
}

struct UpsilonResult {
  Accelerant h;
  double eta_spread;
  int picard_iterations;
};

inline UpsilonResult upsilon_detailed(const Potential& q) {
  InverseChain chain = inverse_chain(q);
  Accelerant h = eta_characteristic(chain.F_sides);
  const double spread = sup_difference(h, eta_boundary(chain.F));
  return UpsilonResult{std::move(h), spread, std::max(chain.P.iterations, chain.P_adj.iterations)};
}

inline Accelerant upsilon(const Potential& q) { return upsilon_detailed(q).h; }

}  // namespace kreinmap
