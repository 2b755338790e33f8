#pragma once

#include "kreinmap/factorization.hpp"
#include "kreinmap/fields.hpp"
#include "kreinmap/quadops.hpp"

namespace kreinmap {

// Resolvents of h and of h(-x), solved once and shared by the forward constructions.
struct KreinPair {
  Kernel2D r;
  Kernel2D r_sharp;
};

inline KreinPair solve_krein_pair(const Accelerant& h, int refine = 1) {
  return {solve_krein(h, refine), solve_krein(sharp(h), refine)};
}

inline Potential theta_from_pair(const KreinPair& kp) {
  const GridSpec& g = kp.r.grid();
  std::vector<Mat> p, m;
  for (int i = 0; i < g.nodes(); ++i) {
    p.push_back(kI * kp.r.block(i, 0));
    m.push_back(-kI * kp.r_sharp.block(i, 0));
  }
  return Potential(kp.r.n(), g, std::move(p), std::move(m));
}

// Forward map: q_plus = i r_h(x,0), q_minus = -i r_{h#}(x,0).
inline Potential theta(const Accelerant& h) { return theta_from_pair(solve_krein_pair(h)); }

// diag(r_h, r_{h#}) as one 2r-block lower kernel.
inline Kernel2D build_R_H(const KreinPair& kp) {
  const int r = kp.r.n();
  const GridSpec& g = kp.r.grid();
  Kernel2D R(2 * r, g, Support::lower);
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j <= i; ++j) {
      R.block(i, j).topLeftCorner(r, r) = kp.r.block(i, j);
      R.block(i, j).bottomRightCorner(r, r) = kp.r_sharp.block(i, j);
    }
  return R;
}

inline Kernel2D build_R_H(const Accelerant& h, int refine = 1) { return build_R_H(solve_krein_pair(h, refine)); }

// Same potential read off as R_H(x,0) B J.
inline Potential theta_via_RH(const Kernel2D& R) {
  const int r = R.n() / 2;
  const auto sc = StructuralConstants::make(r);
  std::vector<Mat> p, m;
  for (int i = 0; i < R.grid().nodes(); ++i) {
    const Mat q = R.block(i, 0) * sc.B * sc.J;
    p.push_back(q.topRightCorner(r, r));
    m.push_back(q.bottomLeftCorner(r, r));
  }
  return Potential(r, R.grid(), std::move(p), std::move(m));
}

inline Potential theta_via_RH(const Accelerant& h) { return theta_via_RH(build_R_H(h)); }

// F(x,t) = 1/2 [[h((x-t)/2), h((x+t)/2)], [h(-(x+t)/2), h(-(x-t)/2)]].
inline Kernel2D build_F_h(const Accelerant& h) {
  const int r = h.r();
  const GridSpec& g = h.grid();
  Kernel2D f(2 * r, g, Support::full);
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j < g.nodes(); ++j) {
      auto b = f.block(i, j);
      b.topLeftCorner(r, r) = 0.5 * h.at_half_steps(i - j);
      b.topRightCorner(r, r) = 0.5 * h.at_half_steps(i + j);
      b.bottomLeftCorner(r, r) = 0.5 * h.at_half_steps(-(i + j));
      b.bottomRightCorner(r, r) = 0.5 * h.at_half_steps(j - i);
    }
  // x + t -> 0 from inside the square
  f.block(0, 0).topRightCorner(r, r) = 0.5 * h.origin_plus();
  f.block(0, 0).bottomLeftCorner(r, r) = 0.5 * h.origin_minus();
  return f;
}

// L_h(x,t) = 1/2 {R_H(x,(x+t)/2) + R_H(x,(x-t)/2) B}; R_H is taken on the 2N grid so that
// both half arguments are nodes.
inline Kernel2D build_L_h_from_refined(const Kernel2D& R_fine) {
  const int n = R_fine.n();
  const GridSpec g(R_fine.grid().cells() / 2);
  const Mat B = StructuralConstants::make(n / 2).B;
  Kernel2D L(n, g, Support::lower);
  for (int i = 0; i < g.nodes(); ++i)
    for (int j = 0; j <= i; ++j) L.block(i, j) = 0.5 * (R_fine.block(2 * i, i + j) + R_fine.block(2 * i, i - j) * B);
  return L;
}

inline Kernel2D build_L_h(const Accelerant& h) { return build_L_h_from_refined(build_R_H(h, 2)); }

}  // namespace kreinmap
