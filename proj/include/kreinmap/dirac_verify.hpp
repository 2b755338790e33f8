#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kreinmap/factorization.hpp"
#include "kreinmap/fields.hpp"
#include "kreinmap/forward_map.hpp"
#include "kreinmap/inverse_map.hpp"
#include "kreinmap/quadops.hpp"

namespace kreinmap {

// ---------------------------------------------------------------- Cauchy problem

// J Y' + Q Y = lambda Y, Y(0) = I, by classical RK4 with Q linear between nodes.
inline std::vector<Mat> solve_cauchy(const Potential& q, cplx lambda, int substeps = 4) {
  if (substeps < 1) throw InputError("solve_cauchy: substeps must be >= 1");
  const int r = q.r(), n = 2 * r, N = q.grid().cells();
  const Mat J = StructuralConstants::make(r).J;
  const double dt = q.grid().step() / substeps;
  std::vector<Mat> full(N + 1);
  for (int i = 0; i <= N; ++i) full[i] = q.full(i);
  auto Qat = [&](int cell, double frac) -> Mat { return (1.0 - frac) * full[cell] + frac * full[std::min(cell + 1, N)]; };
  auto rhs = [&](const Mat& Q, const Mat& Y) -> Mat { return -J * (lambda * Y - Q * Y); };

  std::vector<Mat> out(N + 1);
  Mat Y = Mat::Identity(n, n);
  out[0] = Y;
  for (int cell = 0; cell < N; ++cell) {
    for (int s = 0; s < substeps; ++s) {
      const double f0 = static_cast<double>(s) / substeps;
      const double fm = (s + 0.5) / substeps;
      const double f1 = static_cast<double>(s + 1) / substeps;
      const Mat Q0 = Qat(cell, f0), Qm = Qat(cell, fm), Q1 = Qat(cell, f1);
      const Mat k1 = rhs(Q0, Y);
      const Mat k2 = rhs(Qm, Y + 0.5 * dt * k1);
      const Mat k3 = rhs(Qm, Y + 0.5 * dt * k2);
      const Mat k4 = rhs(Q1, Y + dt * k3);
      Y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out[cell + 1] = Y;
  }
  return out;
}

// ---------------------------------------------------------------- solution formulas

namespace detail {

inline double interval_weight(const GridSpec& g, int i, int k) {
  if (i == 0) return 0.0;
  return (k == 0 || k == i) ? 0.5 * g.step() : g.step();
}

}  // namespace detail

// phi_1 = e^{i l x}(I + int_0^x e^{-2 i l s} r_h(x, x-s) ds), phi_2 likewise with r_{h#}.
inline std::vector<Mat> phi_krein(const KreinPair& kp, cplx lambda) {
  const GridSpec& g = kp.r.grid();
  const int r = kp.r.n();
  std::vector<Mat> out(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) {
    Mat s1 = Mat::Identity(r, r), s2 = Mat::Identity(r, r);
    for (int k = 0; k <= i; ++k) {
      const double w = detail::interval_weight(g, i, k);
      if (w == 0.0) continue;
      const double s = g.node(k);
      s1 += w * std::exp(-2.0 * kI * lambda * s) * kp.r.block(i, i - k);
      s2 += w * std::exp(2.0 * kI * lambda * s) * kp.r_sharp.block(i, i - k);
    }
    const double x = g.node(i);
    Mat phi(2 * r, r);
    phi.topRows(r) = std::exp(kI * lambda * x) * s1;
    phi.bottomRows(r) = std::exp(-kI * lambda * x) * s2;
    out[i] = std::move(phi);
  }
  return out;
}

inline std::vector<Mat> phi_krein(const Accelerant& h, cplx lambda) { return phi_krein(solve_krein_pair(h), lambda); }

// phi = phi_0 + int_0^x K(x,s) phi_0(s) ds.
inline std::vector<Mat> phi_transop(const Kernel2D& k, cplx lambda) {
  const GridSpec& g = k.grid();
  const int r = k.n() / 2;
  std::vector<Mat> phi0(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) phi0[i] = free_solution(r, g.node(i), lambda);
  std::vector<Mat> out(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) {
    Mat v = phi0[i];
    for (int s = 0; s <= i; ++s) {
      const double w = detail::interval_weight(g, i, s);
      if (w != 0.0) v += w * k.block(i, s) * phi0[s];
    }
    out[i] = std::move(v);
  }
  return out;
}

inline double sup_difference(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, block_norm(a[i] - b[i]));
  return m;
}

inline std::vector<Mat> times_right(const std::vector<Mat>& a, const Mat& m) {
  std::vector<Mat> out;
  out.reserve(a.size());
  for (const Mat& x : a) out.push_back(x * m);
  return out;
}

// sup_i |J phi'(x_i) + Q phi - lambda phi| with second-order differences.
inline double dirac_residual(const Potential& q, const std::vector<Mat>& phi, cplx lambda) {
  const int N = q.grid().cells();
  const double h = q.grid().step();
  const Mat J = StructuralConstants::make(q.r()).J;
  double worst = 0.0;
  for (int i = 0; i <= N; ++i) {
    Mat d;
    if (i == 0)
      d = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h);
    else if (i == N)
      d = (3.0 * phi[N] - 4.0 * phi[N - 1] + phi[N - 2]) / (2.0 * h);
    else
      d = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    worst = std::max(worst, block_norm(J * d + q.full(i) * phi[i] - lambda * phi[i]));
  }
  return worst;
}

// e^{-lambda y J} = diag(e^{i lambda y}, e^{-i lambda y}).
inline Mat exp_minus_lambda_J(int r, cplx lambda, double y) {
  Mat e = Mat::Zero(2 * r, 2 * r);
  e.topLeftCorner(r, r) = std::exp(kI * lambda * y) * Mat::Identity(r, r);
  e.bottomRightCorner(r, r) = std::exp(-kI * lambda * y) * Mat::Identity(r, r);
  return e;
}

// Right-hand side of the transformation-kernel representation of Y, trapezoid on the 2N grid.
inline std::vector<Mat> y_representation(const PKernels& p, int r, cplx lambda) {
  const GridSpec& fine = p.plus.grid();
  const int N = fine.cells() / 2;
  const double hm = fine.step();
  std::vector<Mat> out(N + 1);
  for (int i = 0; i <= N; ++i) {
    const int xi = 2 * i;
    const double x = fine.node(xi);
    Mat y = exp_minus_lambda_J(r, lambda, x);
    for (int k = 0; k <= xi && xi > 0; ++k) {
      const double w = (k == 0 || k == xi) ? 0.5 * hm : hm;
      const double arg = x - 2.0 * fine.node(k);
      y += w * (p.plus.block(xi, k) * exp_minus_lambda_J(r, lambda, arg) + p.minus.block(xi, k) * exp_minus_lambda_J(r, lambda, -arg));
    }
    out[i] = std::move(y);
  }
  return out;
}

inline DiagnosticReport verify_Y_representation(const Potential& q, const std::vector<cplx>& lambdas, double tol = 5e-3) {
  Stopwatch sw;
  DiagnosticReport rep;
  rep.grid_cells = q.grid().cells();
  const PKernels p = solve_P_kernels(q);
  for (cplx l : lambdas) {
    const double res = sup_difference(y_representation(p, q.r(), l), solve_cauchy(q, l));
    std::string name = "Y_representation(lambda=" + std::to_string(l.real()) + (l.imag() < 0 ? "" : "+") + std::to_string(l.imag()) + "i)";
    // complex lambda carries the growth factor e^{|Im lambda|}
    rep.add(name, res, l.imag() != 0.0 ? 2.0 * tol : tol);
  }
  rep.runtime_ms = sw.elapsed_ms();
  return rep;
}

// ---------------------------------------------------------------- kernel identities

struct AResult {
  Kernel2D values;
  std::vector<char> valid;  // (N+1)^2, row-major
  bool is_valid(int i, int j) const { return valid[static_cast<std::size_t>(i) * values.grid().nodes() + j] != 0; }
};

// (A X)(x,t) = J X'_x + X'_t J with differences kept inside the closed triangle.
inline AResult apply_A(const Kernel2D& x, Support region) {
  if (region == Support::full) throw InputError("apply_A needs a triangular region");
  const int n = x.n(), N = x.grid().cells();
  const double h = x.grid().step();
  const Mat J = StructuralConstants::make(n / 2).J;
  AResult out{Kernel2D(n, x.grid(), region), std::vector<char>(static_cast<std::size_t>(N + 1) * (N + 1), 0)};
  auto inside = [&](int i, int j) { return i >= 0 && j >= 0 && i <= N && j <= N && in_support(region, i, j); };
  // derivative along (di, dj) at (i, j); false if no stencil fits
  auto deriv = [&](int i, int j, int di, int dj, Mat& d) {
    if (inside(i - di, j - dj) && inside(i + di, j + dj)) {
      d = (x.block(i + di, j + dj) - x.block(i - di, j - dj)) / (2.0 * h);
      return true;
    }
    if (inside(i + di, j + dj) && inside(i + 2 * di, j + 2 * dj)) {
      d = (-3.0 * x.block(i, j) + 4.0 * x.block(i + di, j + dj) - x.block(i + 2 * di, j + 2 * dj)) / (2.0 * h);
      return true;
    }
    if (inside(i - di, j - dj) && inside(i - 2 * di, j - 2 * dj)) {
      d = (3.0 * x.block(i, j) - 4.0 * x.block(i - di, j - dj) + x.block(i - 2 * di, j - 2 * dj)) / (2.0 * h);
      return true;
    }
    return false;
  };
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      if (!in_support(region, i, j)) continue;
      Mat dx, dt;
      if (!deriv(i, j, 1, 0, dx) || !deriv(i, j, 0, 1, dt)) continue;
      out.values.block(i, j) = J * dx + dt * J;
      out.valid[static_cast<std::size_t>(i) * (N + 1) + j] = 1;
    }
  return out;
}

inline constexpr double kAlgebraicTol = 5e-3;
inline constexpr double kDifferenceTol = 5e-2;

inline DiagnosticReport verify_appendix(const Potential& q, const InverseChain& c) {
  Stopwatch sw;
  const int r = q.r(), N = q.grid().cells();
  const auto sc = StructuralConstants::make(r);
  const Mat& J = sc.J;
  const Mat a_star = sc.a_row.adjoint();
  DiagnosticReport rep;
  rep.grid_cells = N;

  auto sup_over = [&](const AResult& a, auto&& term) {
    double m = 0.0;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j)
        if (a.is_valid(i, j)) m = std::max(m, block_norm(term(i, j)));
    return m;
  };

  const AResult AK = apply_A(c.K, Support::lower);
  rep.add("AK", sup_over(AK, [&](int i, int j) -> Mat { return AK.values.block(i, j) + q.full(i) * c.K.block(i, j); }), kDifferenceTol);
  double jk = 0.0, kb = 0.0, jl = 0.0, lb = 0.0;
  for (int i = 0; i <= N; ++i) {
    jk = std::max(jk, block_norm(c.K.block(i, i) * J - J * c.K.block(i, i) - q.full(i)));
    kb = std::max(kb, block_norm(c.K.block(i, 0) * a_star));
    jl = std::max(jl, block_norm(J * c.L.block(i, i) - c.L.block(i, i) * J - q.full(i)));
    lb = std::max(lb, block_norm(c.L.block(i, 0) * a_star));
  }
  rep.add("JK_diagonal", jk, kAlgebraicTol);
  rep.add("K_boundary", kb, kAlgebraicTol);

  const AResult AL = apply_A(c.L, Support::lower);
  rep.add("AL", sup_over(AL, [&](int i, int j) -> Mat { return AL.values.block(i, j) - c.L.block(i, j) * q.full(j); }), kDifferenceTol);
  rep.add("JL_diagonal", jl, kAlgebraicTol);
  rep.add("L_boundary", lb, kAlgebraicTol);

  const AResult AFl = apply_A(c.F_sides.lower, Support::lower);
  const AResult AFu = apply_A(c.F_sides.upper, Support::upper);
  rep.add("AF_lower", sup_over(AFl, [&](int i, int j) -> Mat { return AFl.values.block(i, j); }), kDifferenceTol);
  rep.add("AF_upper", sup_over(AFu, [&](int i, int j) -> Mat { return AFu.values.block(i, j); }), kDifferenceTol);
  double fr = 0.0, fl = 0.0;
  for (int i = 0; i <= N; ++i) {
    fr = std::max(fr, block_norm(c.F_sides.lower.block(i, 0) * a_star));
    fl = std::max(fl, block_norm(sc.a_row * c.F_sides.upper.block(0, i)));
  }
  rep.add("F_boundary_right", fr, kAlgebraicTol);
  rep.add("F_boundary_left", fl, kAlgebraicTol);

  // symmetry of the transformation kernels
  const int M = c.P.plus.grid().cells();
  Kernel2D pj_plus(2 * r, c.P.plus.grid(), Support::lower), pj_minus(2 * r, c.P.plus.grid(), Support::lower);
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= i; ++j) {
      pj_plus.block(i, j) = c.P.plus.block(i, j) * J - J * c.P.plus.block(i, j);
      pj_minus.block(i, j) = c.P.minus.block(i, j) * J + J * c.P.minus.block(i, j);
    }
  rep.add("PJ_plus", gp_norm(pj_plus), 1e-8);
  rep.add("PJ_minus", gp_norm(pj_minus), 1e-8);

  // reciprocity of K and L in the Volterra embedding (both orders), and the quadrature
  // residuals of the two continuum equations
  const DiscOp ek = volterra_embed(c.K), el = volterra_embed(c.L);
  rep.add("KL_left", (ek.M + el.M + ek.M * el.M).cwiseAbs().maxCoeff(), 1e-10);
  rep.add("KL_right", (ek.M + el.M + el.M * ek.M).cwiseAbs().maxCoeff(), 1e-10);
  rep.add("KL_left_quadrature", sup_norm(c.K + c.L + compose_volterra(c.K, c.L)), kAlgebraicTol);
  rep.add("KL_right_quadrature", sup_norm(c.K + c.L + compose_volterra(c.L, c.K)), kAlgebraicTol);
  rep.runtime_ms = sw.elapsed_ms();
  return rep;
}

inline DiagnosticReport verify_appendix(const Potential& q) { return verify_appendix(q, inverse_chain(q)); }

// d/dx R_H(x, x-t) - R_H(x,0) B R_H(x,t) B on the closed lower triangle.
inline DiagnosticReport check_verR(const Kernel2D& R, double tol = kAlgebraicTol) {
  Stopwatch sw;
  const int n = R.n(), N = R.grid().cells();
  const double h = R.grid().step();
  const Mat B = StructuralConstants::make(n / 2).B;
  double worst = 0.0;
  for (int j = 0; j <= N; ++j) {
    auto G = [&](int i) { return R.block(i, i - j); };
    for (int i = j; i <= N; ++i) {
      Mat d;
      if (i - 1 >= j && i + 1 <= N)
        d = (G(i + 1) - G(i - 1)) / (2.0 * h);
      else if (i + 2 <= N)
        d = (-3.0 * G(i) + 4.0 * G(i + 1) - G(i + 2)) / (2.0 * h);
      else if (i - 2 >= j)
        d = (3.0 * G(i) - 4.0 * G(i - 1) + G(i - 2)) / (2.0 * h);
      else
        continue;
      worst = std::max(worst, block_norm(d - R.block(i, 0) * B * R.block(i, j) * B));
    }
  }
  DiagnosticReport rep;
  rep.grid_cells = N;
  rep.add("verR", worst, tol);
  rep.runtime_ms = sw.elapsed_ms();
  return rep;
}

inline DiagnosticReport check_verR(const Accelerant& h, double tol = kAlgebraicTol) { return check_verR(build_R_H(h), tol); }

// ---------------------------------------------------------------- probes

// ||M_K^s||_2^{1/s} for s = 1..s_max.
inline std::vector<double> spectral_radius_probe(const Kernel2D& k, int s_max) {
  if (k.support() == Support::full) throw InputError("spectral_radius_probe needs a triangular kernel");
  const Mat M = op_from_kernel(k).M;
  std::vector<double> out;
  Mat P = M;
  for (int s = 1; s <= s_max; ++s) {
    if (s > 1) P = P * M;
    const double nrm = Eigen::BDCSVD<Mat>(P).singularValues()(0);
    out.push_back(std::pow(nrm, 1.0 / s));
  }
  return out;
}

struct ScaleStats {
  double scale;
  double min;
  double max;
  double mean;
  int skipped;
  std::vector<double> ratios;  // per trial, NaN when skipped
};

struct LipschitzReport {
  std::vector<ScaleStats> scales;
  // largest factor by which a trial's ratio moved away from its value at the first scale
  double band() const {
    double worst = 1.0;
    if (scales.empty()) return worst;
    const auto& base = scales.front().ratios;
    for (const auto& s : scales)
      for (std::size_t t = 0; t < base.size(); ++t) {
        if (!std::isfinite(base[t]) || !std::isfinite(s.ratios[t])) continue;
        const double q = s.ratios[t] / base[t];
        worst = std::max(worst, std::max(q, 1.0 / q));
      }
    return worst;
  }
};

namespace detail {

inline Mat random_block(std::mt19937_64& rng, int r) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) m(a, b) = cplx(nd(rng), nd(rng));
  return m;
}

// Smooth random field: a few low Fourier modes with decaying amplitude.
struct SmoothField {
  std::vector<Mat> c, s;
  Mat operator()(double x) const {
    Mat v = Mat::Zero(c.front().rows(), c.front().cols());
    for (std::size_t m = 0; m < c.size(); ++m)
      v += (c[m] * std::cos(M_PI * m * x) + s[m] * std::sin(M_PI * m * x)) / (1.0 + m);
    return v;
  }
};

inline SmoothField smooth_field(std::mt19937_64& rng, int r, int modes = 4) {
  SmoothField f;
  for (int m = 0; m < modes; ++m) {
    f.c.push_back(random_block(rng, r));
    f.s.push_back(random_block(rng, r));
  }
  return f;
}

template <class Field, class Perturb, class Eval>
LipschitzReport run_probe(const std::vector<double>& scales, int trials, std::uint64_t seed, Perturb&& perturb, Eval&& eval) {
  LipschitzReport rep;
  for (double sigma : scales) {
    ScaleStats st{sigma, INFINITY, 0.0, 0.0, 0, {}};
    int used = 0;
    for (int t = 0; t < trials; ++t) {
      std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(t));
      double ratio = NAN;
      try {
        ratio = eval(perturb(rng, sigma));
      } catch (const NotAccelerantError&) {
      } catch (const ConvergenceError&) {
      } catch (const SingularOperatorError&) {
      }
      st.ratios.push_back(ratio);
      if (!std::isfinite(ratio)) {
        ++st.skipped;
        continue;
      }
      ++used;
      st.min = std::min(st.min, ratio);
      st.max = std::max(st.max, ratio);
      st.mean += ratio;
    }
    st.mean = used ? st.mean / used : NAN;
    rep.scales.push_back(std::move(st));
  }
  return rep;
}

}  // namespace detail

// Difference quotients of the forward map around `center`, one smooth direction per trial.
inline LipschitzReport lipschitz_probe(const Accelerant& center, const std::vector<double>& scales, int trials, std::uint64_t seed) {
  const Potential base = theta(center);
  auto perturb = [&](std::mt19937_64& rng, double sigma) {
    const auto f = detail::smooth_field(rng, center.r());
    Accelerant d = Accelerant::sample(center.r(), center.grid(), f);
    const double nrm = lp_field_norm(d);
    std::vector<Mat> v;
    for (int k = 0; k < d.size(); ++k) v.push_back(d[k] * (sigma / nrm));
    return Accelerant(center.r(), center.grid(), std::move(v));
  };
  auto eval = [&](const Accelerant& d) { return lp_field_norm(theta(center + d) - base) / lp_field_norm(d); };
  return detail::run_probe<Accelerant>(scales, trials, seed, perturb, eval);
}

// Same for the inverse map around a potential.
inline LipschitzReport lipschitz_probe(const Potential& center, const std::vector<double>& scales, int trials, std::uint64_t seed) {
  const Accelerant base = upsilon(center);
  const GridSpec& g = center.grid();
  auto perturb = [&](std::mt19937_64& rng, double sigma) {
    const auto fp = detail::smooth_field(rng, center.r());
    const auto fm = detail::smooth_field(rng, center.r());
    Potential d = Potential::sample(center.r(), g, fp, fm);
    const double s = sigma / lp_field_norm(d);
    std::vector<Mat> p, m;
    for (int i = 0; i < g.nodes(); ++i) {
      p.push_back(d.q_plus(i) * s);
      m.push_back(d.q_minus(i) * s);
    }
    return Potential(center.r(), g, std::move(p), std::move(m));
  };
  auto eval = [&](const Potential& d) { return lp_field_norm(upsilon(center + d) - base) / lp_field_norm(d); };
  return detail::run_probe<Potential>(scales, trials, seed, perturb, eval);
}

// ---------------------------------------------------------------- round trips

inline constexpr double kRoundoffFloor = 1e-12;

namespace detail {

inline std::string at(const char* what, int N) { return std::string(what) + "@N=" + std::to_string(N); }

// error at the next rung divided by the current one; an O(N^-2) pipeline gives 1/4.
inline void add_contractions(DiagnosticReport& rep, const std::vector<int>& ladder, const std::vector<double>& err, const char* what) {
  for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
    const bool floor = err[k] < kRoundoffFloor && err[k + 1] < kRoundoffFloor;
    const double c = floor ? 0.0 : err[k + 1] / err[k];
    rep.add(std::string(what) + "_contraction@N=" + std::to_string(ladder[k]) + "->" + std::to_string(ladder[k + 1]), c, 1.0 / 3.0);
  }
}

}  // namespace detail

// Upsilon(Theta(h)) against h on each rung of the ladder; h must live on the finest rung.
inline DiagnosticReport roundtrip_report(const Accelerant& h, const std::vector<int>& ladder, double tol = 5e-3) {
  Stopwatch sw;
  DiagnosticReport rep;
  std::vector<double> err;
  for (int N : ladder) {
    const Accelerant hn = decimate(h, N);
    const Potential q = theta(hn);
    const InverseChain chain = inverse_chain(q);
    const Accelerant back = eta_characteristic(chain.F_sides);
    const double nrm = lp_field_norm(hn);
    const double e = lp_field_norm(back - hn) / (nrm > 0 ? nrm : 1.0);
    err.push_back(e);
    const bool last = N == ladder.back();
    rep.add(detail::at("relative_error", N), e, tol, last);
    rep.note(detail::at("FQh", N), gp_norm(chain.F - build_F_h(hn)));
    rep.grid_cells = N;
  }
  detail::add_contractions(rep, ladder, err, "relative_error");
  rep.runtime_ms = sw.elapsed_ms();
  return rep;
}

// Theta(Upsilon(Q)) against Q.
inline DiagnosticReport roundtrip_report(const Potential& q, const std::vector<int>& ladder, double tol = 5e-3) {
  Stopwatch sw;
  DiagnosticReport rep;
  std::vector<double> err;
  for (int N : ladder) {
    const Potential qn = decimate(q, N);
    const InverseChain chain = inverse_chain(qn);
    const Accelerant h = eta_characteristic(chain.F_sides);
    const Potential back = theta(h);
    const double nrm = lp_field_norm(qn);
    const double e = lp_field_norm(back - qn) / (nrm > 0 ? nrm : 1.0);
    err.push_back(e);
    rep.add(detail::at("relative_error", N), e, tol, N == ladder.back());
    rep.note(detail::at("FQh", N), gp_norm(chain.F - build_F_h(h)));
    rep.grid_cells = N;
  }
  detail::add_contractions(rep, ladder, err, "relative_error");
  rep.runtime_ms = sw.elapsed_ms();
  return rep;
}

}  // namespace kreinmap
