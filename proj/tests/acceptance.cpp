// Acceptance suite: one line per criterion, exit status 1 if any selected criterion fails.
//   acceptance            run all criteria
//   acceptance c07        run one
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kreinmap/kreinmap.hpp"
#include "oracles.hpp"

using namespace kreinmap;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// ratio test under N-doubling; both errors below the round-off floor counts as converged
bool contracts(double coarse, double fine, double factor = 3.0) {
  if (coarse < kRoundoffFloor && fine < kRoundoffFloor) return true;
  return coarse >= factor * fine;
}

const std::vector<int> kLadder = {50, 100, 200};

Potential demo_potential(int N) {
  return Potential::scalar(GridSpec(N), [](double x) { return cplx(0.3 * (1.0 + x)); }, [](double) { return cplx(0.2); });
}

Accelerant constant_accelerant(int N, double c) {
  return Accelerant::scalar(GridSpec(N), [c](double) { return cplx(c); });
}

Accelerant gaussian_accelerant(int N) {
  return Accelerant::scalar(GridSpec(N), [](double x) { return cplx(0.3 * std::exp(-x * x)); });
}

// ---------------------------------------------------------------------------

Outcome c01() {
  Outcome o;
  std::vector<double> err;
  double ms = 0.0;
  for (int N : {100, 200}) {
    Stopwatch sw;
    const Potential q = theta(constant_accelerant(N, 0.5));
    ms = sw.elapsed_ms();
    double e = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double x = q.grid().node(i);
      e = std::max(e, std::abs(q.q_plus(i)(0, 0) + kI * 0.5 / (1.0 + 0.5 * x)));
    }
    err.push_back(e);
  }
  o.detail << "err@100=" << err[0] << " err@200=" << err[1] << " runtime@200=" << ms << "ms";
  o.require(err[1] <= 1e-3, "error <= 1e-3");
  o.require(contracts(err[0], err[1]), "ratio >= 3");
  o.require(ms <= 10000.0, "runtime <= 10 s");
  return o;
}

void roundtrip_outcome(Outcome& o, const char* label, const DiagnosticReport& rep, double budget_ms) {
  o.detail << label << ":";
  for (const auto& e : rep.entries())
    if (e.name.rfind("relative_error", 0) == 0) o.detail << " " << e.name << "=" << e.value;
  o.detail << " runtime=" << rep.runtime_ms << "ms; ";
  for (const auto& f : rep.failures()) o.require(false, std::string(label) + " " + f);
  o.require(rep.runtime_ms <= budget_ms, std::string(label) + " runtime");
}

Outcome c02() {
  Outcome o;
  roundtrip_outcome(o, "h=0.5", roundtrip_report(constant_accelerant(200, 0.5), kLadder), 60000.0);
  roundtrip_outcome(o, "gaussian", roundtrip_report(gaussian_accelerant(200), kLadder), 60000.0);
  return o;
}

Outcome c03() {
  Outcome o;
  roundtrip_outcome(o, "smooth Q", roundtrip_report(demo_potential(200), kLadder), 60000.0);
  return o;
}

Outcome c04() {
  Outcome o;
  const Accelerant h = constant_accelerant(200, 0.5);
  const double d = gp_norm(build_F_Q(theta(h)) - build_F_h(h));
  o.detail << "gp_norm(F_Q - F^h)=" << d;
  o.require(d <= 5e-3, "<= 5e-3");
  return o;
}

Outcome c05() {
  Outcome o;
  const auto bad = is_accelerant(constant_accelerant(200, -1.25));
  o.detail << "h=-1.25: accepted=" << bad.accepted << " alpha=" << bad.worst_alpha;
  o.require(!bad.accepted, "h=-1.25 rejected");
  o.require(std::abs(bad.worst_alpha - 0.8) <= 0.05, "critical alpha within 0.8 +- 0.05");
  for (double c : {0.5, 0.0}) {
    const auto rep = is_accelerant(constant_accelerant(200, c));
    o.detail << " h=" << c << ": accepted=" << rep.accepted;
    o.require(rep.accepted, "constant accepted");
  }
  int agree = 0;
  for (int s = 0; s < 20; ++s) {
    const Accelerant h = oracle::random_accelerant(2, 32, 1000 + s, 0.8 + 0.1 * s);
    if (is_accelerant(h).accepted == is_accelerant(sharp(h)).accepted) ++agree;
  }
  o.detail << " sharp agreement " << agree << "/20";
  o.require(agree == 20, "accelerant test invariant under reflection");
  return o;
}

Outcome c06() {
  Outcome o;
  const int N = 200;
  const Accelerant h = constant_accelerant(N, 0.5);
  const KreinPair kp = solve_krein_pair(h);
  const auto phi0 = phi_krein(kp, 0.0);
  double e = 0.0;
  for (int i = 0; i <= N; ++i) e = std::max(e, std::abs(phi0[i](0, 0) - 1.0 / (1.0 + 0.5 * h.grid().node(i))));
  o.detail << "phi(x,0) closed form err=" << e;
  o.require(e <= 1e-3, "closed form <= 1e-3");
  const Potential q = theta_from_pair(kp);
  const Kernel2D K = build_K(q);
  const Mat a = StructuralConstants::make(1).a_col;
  for (cplx l : {cplx(0.0), cplx(1.0), cplx(1.0, 0.5)}) {
    const auto pk = phi_krein(kp, l);
    const auto pc = times_right(solve_cauchy(q, l), a);
    const auto pt = phi_transop(K, l);
    const double d = std::max({sup_difference(pk, pc), sup_difference(pk, pt), sup_difference(pc, pt)});
    o.detail << " lambda=" << l << ":" << d;
    o.require(d <= 5e-3, "pairwise agreement <= 5e-3");
  }
  return o;
}

Outcome c07() {
  Outcome o;
  std::vector<DiagnosticReport> reps;
  for (int N : kLadder) {
    DiagnosticReport rep = verify_appendix(demo_potential(N));
    rep.merge(check_verR(gaussian_accelerant(N)));
    reps.push_back(std::move(rep));
  }
  const auto& fine = reps.back();
  for (const auto& e : fine.entries()) {
    if (!e.asserted) continue;
    const double c0 = reps[0].value(e.name), c1 = reps[1].value(e.name);
    o.detail << e.name << "=" << e.value << " ";
    o.require(e.passed(), e.name + " tolerance");
    o.require(contracts(c0, c1) && contracts(c1, e.value), e.name + " ratio >= 3");
  }
  return o;
}

Outcome c08() {
  Outcome o;
  double worst_rec = 0.0, worst_leak = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Kernel2D f = oracle::random_kernel(2, 64, 2000 + s, 0.45);
    const Factorization fz = factorize(f);
    worst_rec = std::max(worst_rec, fz.reconstruction_residual);
    worst_leak = std::max(worst_leak, fz.leakage);
  }
  double worst_dense = 0.0;
  for (int s = 0; s < 5; ++s) {
    const Kernel2D f = oracle::random_kernel(2, 8, 3000 + s, 0.45);
    const Factorization fz = factorize(f);
    const auto ref = oracle::dense_factorization(f);
    worst_dense = std::max({worst_dense, sup_norm(fz.lower - ref.lower), sup_norm(fz.upper - ref.upper)});
  }
  o.detail << "reconstruction=" << worst_rec << " leakage=" << worst_leak << " dense@N=8=" << worst_dense;
  o.require(worst_rec <= 1e-8, "reconstruction <= 1e-8");
  o.require(worst_leak <= 5e-8, "leakage <= 5e-8");
  o.require(worst_dense <= 1e-10, "dense agreement <= 1e-10");
  return o;
}

Outcome c09() {
  Outcome o;
  const Kernel2D k = Kernel2D::sample(1, GridSpec(64), Support::lower, [](double, double) { return Mat::Ones(1, 1); });
  const auto seq = spectral_radius_probe(k, 16);
  o.detail << "root norm s=1:" << seq[0] << " s=16:" << seq[15] << " ratio=" << seq[15] / seq[0];
  o.require(seq[15] <= 1e-3 * seq[0], "s=16 value <= 1e-3 x s=1 value");

  const double kappa = 0.5;
  std::vector<double> err;
  for (int N : {100, 200}) {
    const Kernel2D c = Kernel2D::sample(1, GridSpec(N), Support::lower, [&](double, double) { return Mat::Constant(1, 1, kappa); });
    const Kernel2D exact = Kernel2D::sample(1, GridSpec(N), Support::lower,
                                            [&](double x, double t) { return Mat::Constant(1, 1, -kappa * std::exp(-kappa * (x - t))); });
    err.push_back(sup_norm(resolvent_volterra(c) - exact));
  }
  o.detail << " resolvent err@100=" << err[0] << " err@200=" << err[1];
  o.require(err[1] <= 2e-3, "resolvent <= 2e-3");
  o.require(contracts(err[0], err[1]), "resolvent ratio >= 3");
  return o;
}

Outcome c10() {
  Outcome o;
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    const Accelerant h = oracle::random_accelerant(2, 32, 4000 + s, 1.0);
    worst = std::max(worst, sup_difference(eta_characteristic(build_F_h(h)), h));
  }
  o.detail << "max |eta(F^h) - h|=" << worst;
  o.require(worst <= 1e-12, "<= 1e-12");
  return o;
}

Outcome c11() {
  Outcome o;
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) worst = std::max(worst, oracle::resolvent_identity_residual(8, 5000 + s));
  o.detail << "max residual=" << worst;
  o.require(worst <= 1e-10, "<= 1e-10");
  return o;
}

void probe_outcome(Outcome& o, const char* label, const LipschitzReport& rep) {
  o.detail << label << ":";
  for (const auto& s : rep.scales) {
    o.detail << " [" << s.scale << ": " << s.min << ".." << s.max << ", skipped " << s.skipped << "]";
    o.require(s.skipped == 0, std::string(label) + " all trials finite");
  }
  o.detail << " band=" << rep.band() << "; ";
  o.require(rep.band() <= 1.5, std::string(label) + " band within 1.5");
}

Outcome c12() {
  Outcome o;
  const std::vector<double> scales = {1e-2, 1e-3, 1e-4};
  probe_outcome(o, "theta", lipschitz_probe(Accelerant::zero(1, GridSpec(64)), scales, 10, 11));
  probe_outcome(o, "upsilon", lipschitz_probe(Potential::zero(1, GridSpec(64)), scales, 10, 12));
  return o;
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"c01", "forward closed form", c01},
      {"c02", "round trip from accelerant", c02},
      {"c03", "round trip from potential", c03},
      {"c04", "F_Q equals F^h", c04},
      {"c05", "accelerant detector", c05},
      {"c06", "solution representations", c06},
      {"c07", "identity suite", c07},
      {"c08", "factorization self-consistency", c08},
      {"c09", "Volterra spectral decay", c09},
      {"c10", "eta exactness", c10},
      {"c11", "discrete resolvent identity", c11},
      {"c12", "Lipschitz stability", c12},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    Stopwatch sw;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " (" << static_cast<long>(sw.elapsed_ms()) << " ms): " << o.detail.str()
              << std::endl;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failed ? 1 : 0;
}
