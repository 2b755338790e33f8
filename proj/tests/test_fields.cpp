#include <gtest/gtest.h>

#include "kreinmap/kreinmap.hpp"
#include "oracles.hpp"

using namespace kreinmap;

namespace {

Accelerant identity_field(int N) {
  return Accelerant::scalar(GridSpec(N), [](double x) { return cplx(x); });
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(GridSpec, RejectsSmallOrOddCellCounts) {
  EXPECT_THROW(GridSpec(6), InputError);
  EXPECT_THROW(GridSpec(9), InputError);
  EXPECT_NO_THROW(GridSpec(8));
}

TEST(GridSpec, WeightsSumToOne) {
  for (int N : {8, 50, 200}) {
    GridSpec g(N);
    double s = 0.0;
    for (double w : g.weights()) s += w;
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(g.weight(0), 0.5 / N);
    EXPECT_DOUBLE_EQ(g.weight(N), 0.5 / N);
    EXPECT_DOUBLE_EQ(g.node(N), 1.0);
  }
}

TEST(Accelerant, SampleLayoutOnHalfSteps) {
  const Accelerant h = identity_field(8);
  ASSERT_EQ(h.size(), 33);
  for (int k = 0; k < h.size(); ++k) EXPECT_DOUBLE_EQ(h[k](0, 0).real(), -1.0 + k / 16.0);
  EXPECT_DOUBLE_EQ(h.at_half_steps(0)(0, 0).real(), 0.0);
  EXPECT_DOUBLE_EQ(h.at_half_steps(3)(0, 0).real(), 3.0 / 16.0);
}

TEST(Accelerant, RejectsWrongLengthAndNonFinite) {
  EXPECT_THROW(Accelerant(1, GridSpec(8), std::vector<Mat>(32, Mat::Zero(1, 1))), InputError);
  std::vector<Mat> v(33, Mat::Zero(1, 1));
  v[5](0, 0) = cplx(NAN, 0.0);
  EXPECT_THROW(Accelerant(1, GridSpec(8), v), InputError);
}

TEST(Sharp, ZeroAndConstantAreFixed) {
  const GridSpec g(8);
  const Accelerant z = Accelerant::zero(2, g);
  EXPECT_EQ(sup_difference(sharp(z), z), 0.0);
  const Accelerant c = Accelerant::scalar(g, [](double) { return cplx(0.5, -0.2); });
  EXPECT_EQ(sup_difference(sharp(c), c), 0.0);
}

TEST(Sharp, ReversesTheIdentityField) {
  const Accelerant h = identity_field(8);
  const Accelerant s = sharp(h);
  for (int k = 0; k < h.size(); ++k) EXPECT_EQ(s[k](0, 0), -h[k](0, 0));
}

TEST(Sharp, IsAnInvolution) {
  const Accelerant h = oracle::random_accelerant(2, 16, 7, 1.0);
  EXPECT_EQ(sup_difference(sharp(sharp(h)), h), 0.0);
}

TEST(BlockEmbed, ZeroConstantAndIdentityField) {
  const GridSpec g(8);
  const Accelerant z = block_embed_H(Accelerant::zero(1, g));
  EXPECT_EQ(z.r(), 2);
  for (int k = 0; k < z.size(); ++k) EXPECT_EQ(max_abs(z[k]), 0.0);

  const Accelerant c = block_embed_H(Accelerant::scalar(g, [](double) { return cplx(0.5); }));
  for (int k = 0; k < c.size(); ++k) EXPECT_EQ(max_abs(c[k] - 0.5 * Mat::Identity(2, 2)), 0.0);

  const Accelerant x = block_embed_H(identity_field(8));
  for (int k = 0; k < x.size(); ++k) {
    const double t = -1.0 + k / 16.0;
    EXPECT_DOUBLE_EQ(x[k](0, 0).real(), t);
    EXPECT_DOUBLE_EQ(x[k](1, 1).real(), -t);
    EXPECT_EQ(x[k](0, 1), 0.0);
    EXPECT_EQ(x[k](1, 0), 0.0);
  }
}

TEST(PotentialAdjoint, ScalarExamples) {
  const GridSpec g(8);
  const Potential fixed = Potential::scalar(g, [](double) { return cplx(0.0, -0.5); }, [](double) { return cplx(0.0, 0.5); });
  const Potential a = potential_adjoint(fixed);
  for (int i = 0; i <= 8; ++i) {
    EXPECT_EQ(a.q_plus(i)(0, 0), cplx(0.0, -0.5));
    EXPECT_EQ(a.q_minus(i)(0, 0), cplx(0.0, 0.5));
  }
  const Potential q = Potential::scalar(g, [](double) { return cplx(1.0, 1.0); }, [](double) { return cplx(2.0); });
  const Potential b = potential_adjoint(q);
  EXPECT_EQ(b.q_plus(3)(0, 0), cplx(2.0));
  EXPECT_EQ(b.q_minus(3)(0, 0), cplx(1.0, -1.0));
}

TEST(PotentialAdjoint, IsAnInvolutionAndMatchesFullAdjoint) {
  std::mt19937_64 rng(3);
  const GridSpec g(8);
  std::vector<Mat> p, m;
  for (int i = 0; i <= 8; ++i) {
    p.push_back(oracle::random_block(rng, 2));
    m.push_back(oracle::random_block(rng, 2));
  }
  const Potential q(2, g, p, m);
  const Potential a = potential_adjoint(q);
  const Potential back = potential_adjoint(a);
  for (int i = 0; i <= 8; ++i) {
    EXPECT_EQ(max_abs(back.full(i) - q.full(i)), 0.0);
    EXPECT_EQ(max_abs(a.full(i) - q.full(i).adjoint()), 0.0);
  }
}

TEST(Potential, AnticommutesWithJ) {
  std::mt19937_64 rng(4);
  for (int r : {1, 2, 3}) {
    const GridSpec g(8);
    std::vector<Mat> p, m;
    for (int i = 0; i <= 8; ++i) {
      p.push_back(oracle::random_block(rng, r));
      m.push_back(oracle::random_block(rng, r));
    }
    const Potential q(r, g, p, m);
    const Mat J = StructuralConstants::make(r).J;
    for (int i = 0; i <= 8; ++i) EXPECT_EQ(max_abs(q.full(i) * J + J * q.full(i)), 0.0);
  }
}

TEST(AssemblePotential, RoundTripAndErrors) {
  std::vector<Mat> top, bottom;
  for (int i = 0; i <= 8; ++i) {
    top.push_back(Mat::Constant(1, 1, cplx(i, 1)));
    bottom.push_back(Mat::Constant(1, 1, cplx(-i, 2)));
  }
  const Potential q = assemble_potential(top, bottom);
  EXPECT_EQ(q.grid().cells(), 8);
  for (int i = 0; i <= 8; ++i) {
    EXPECT_EQ(q.q_plus(i), top[i]);
    EXPECT_EQ(q.q_minus(i), bottom[i]);
  }
  bottom.pop_back();
  EXPECT_THROW(assemble_potential(top, bottom), InputError);
}

TEST(AssemblePotential, ClosedFormImageOfConstantAccelerant) {
  const int N = 200;
  const double c = 0.5;
  std::vector<Mat> top, bottom;
  const GridSpec g(N);
  for (int i = 0; i <= N; ++i) {
    top.push_back(Mat::Constant(1, 1, -kI * c / (1.0 + c * g.node(i))));
    bottom.push_back(Mat::Constant(1, 1, kI * c / (1.0 + c * g.node(i))));
  }
  const Potential expected = assemble_potential(top, bottom);
  const Potential q = theta(Accelerant::scalar(g, [c](double) { return cplx(c); }));
  EXPECT_LE(lp_field_norm(q - expected), 1e-3);
}

TEST(PotentialFromFull, RejectsDiagonalBlocks) {
  std::vector<Mat> full(9, Mat::Zero(2, 2));
  full[4](0, 0) = 1e-3;
  EXPECT_THROW(potential_from_full(full), InputError);
  full[4](0, 0) = 0.0;
  full[4](0, 1) = 2.0;
  const Potential q = potential_from_full(full);
  EXPECT_EQ(q.q_plus(4)(0, 0), cplx(2.0));
}

TEST(StructuralConstants, Identities) {
  for (int r : {1, 2, 3}) {
    const auto s = StructuralConstants::make(r);
    const Mat id = Mat::Identity(2 * r, 2 * r);
    EXPECT_EQ(max_abs(s.J * s.J + id), 0.0);
    EXPECT_EQ(max_abs(s.B * s.B - id), 0.0);
    EXPECT_EQ(max_abs(s.J * s.B + s.B * s.J), 0.0);
    EXPECT_EQ(max_abs(s.a_row * s.a_row.adjoint() - 2.0 * Mat::Identity(r, r)), 0.0);
    EXPECT_EQ(max_abs(s.a_row * s.a_col), 0.0);
  }
}

TEST(StructuralConstants, SwapReflectsFreeSolution) {
  const auto s = StructuralConstants::make(2);
  for (cplx l : {cplx(0.0), cplx(1.0), cplx(-2.0, 0.3)})
    for (double x : {0.0, 0.25, 1.0}) EXPECT_LE(max_abs(s.B * free_solution(2, x, l) - free_solution(2, -x, l)), 1e-15);
}

TEST(SpectralParameter, RejectsNonFinite) {
  EXPECT_THROW(SpectralParameter(cplx(INFINITY, 0.0)), InputError);
  EXPECT_NO_THROW(SpectralParameter(cplx(1.0, 0.5)));
}

TEST(Kernel2D, SupportIsEnforced) {
  const Kernel2D k = Kernel2D::sample(1, GridSpec(8), Support::upper, [](double, double) { return Mat::Ones(1, 1); });
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) EXPECT_EQ(k.block(i, j)(0, 0), j >= i ? cplx(1.0) : cplx(0.0));
  Mat v = Mat::Ones(9, 9);
  const Kernel2D masked(1, GridSpec(8), Support::lower, v);
  EXPECT_EQ(masked.block(2, 5)(0, 0), cplx(0.0));
  EXPECT_EQ(masked.block(5, 2)(0, 0), cplx(1.0));
}

TEST(Decimate, NestedGridsOnly) {
  const Accelerant h = identity_field(32);
  const Accelerant d = decimate(h, 8);
  for (int k = 0; k < d.size(); ++k) EXPECT_EQ(d[k], identity_field(8)[k]);
  EXPECT_THROW(decimate(h, 12), InputError);
}

TEST(DiagnosticReport, NotesAreNotAsserted) {
  DiagnosticReport rep;
  rep.add("a", 1.0, 2.0);
  rep.note("b", 100.0);
  EXPECT_TRUE(rep.all_passed());
  rep.add("c", 3.0, 2.0);
  EXPECT_FALSE(rep.all_passed());
  ASSERT_EQ(rep.failures().size(), 1u);
  rep.add("d", NAN, 1.0, false);
  EXPECT_EQ(rep.failures().size(), 2u);
}
