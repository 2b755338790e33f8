#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kreinmap/field_file.hpp"
#include "kreinmap/kreinmap.hpp"

namespace kreinmap::cli {

enum Exit : int { kOk = 0, kInternal = 1, kRejected = 2, kBadInput = 3, kNoConvergence = 4 };

// "a+bi", "a-bi", "a", "bi", "i", "-i".
inline cplx parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw InputError("empty spectral parameter");
  auto to_double = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (...) {
      throw InputError("malformed spectral parameter '" + s + "'");
    }
    if (used != t.size()) throw InputError("malformed spectral parameter '" + s + "'");
    return v;
  };
  cplx value;
  if (s.back() == 'i' || s.back() == 'j') {
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;)
      if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        split = k;
        break;
      }
    if (split == std::string::npos)
      value = cplx(0.0, to_double(body));
    else
      value = cplx(to_double(body.substr(0, split)), to_double(body.substr(split)));
  } else {
    value = cplx(to_double(s), 0.0);
  }
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) throw InputError("spectral parameter must be finite");
  return value;
}

inline std::vector<cplx> parse_lambdas(const std::vector<std::string>& raw) {
  std::vector<cplx> out;
  for (const std::string& item : raw) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_complex(part));
  }
  return out;
}

inline std::string format_complex(cplx z) {
  std::ostringstream os;
  os << std::setprecision(17) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

struct Options {
  std::string in, out;
  int n = 0;
  std::optional<double> tol;
  std::vector<int> ladder;
  std::vector<std::string> lambdas;
  bool csv = false;
  std::uint64_t seed = 0;
};

inline Accelerant load_accelerant(const Options& o) {
  Field f = read_field_file(o.in);
  if (!std::holds_alternative<Accelerant>(f)) throw InputError(o.in + " does not hold an accelerant");
  Accelerant h = std::get<Accelerant>(std::move(f));
  return o.n > 0 ? decimate(h, o.n) : h;
}

inline Potential load_potential(const Options& o) {
  Field f = read_field_file(o.in);
  if (!std::holds_alternative<Potential>(f)) throw InputError(o.in + " does not hold a potential");
  Potential q = std::get<Potential>(std::move(f));
  return o.n > 0 ? decimate(q, o.n) : q;
}

inline void emit_json(const Options& o, const json& j, std::ostream& out) {
  if (o.out.empty())
    out << j.dump(2) << '\n';
  else
    write_json_file(o.out, j);
}

inline void print_margin(const AccelerantReport& rep, std::ostream& os) {
  os << "accelerant test: " << (rep.accepted ? "accepted" : "rejected") << ", min sigma = " << rep.min_singular_value
     << ", min sigma ratio = " << rep.min_ratio << " at alpha = " << rep.worst_alpha << '\n';
}

inline int cmd_theta(const Options& o, std::ostream& out, std::ostream& err) {
  const Accelerant h = load_accelerant(o);
  const AccelerantReport rep = is_accelerant(h, o.tol.value_or(1e-8));
  print_margin(rep, err);
  if (!rep.accepted) {
    err << "not an accelerant: the truncated equation is singular near alpha = " << rep.worst_alpha << '\n';
    return kRejected;
  }
  emit_json(o, to_json(theta(h), "theta of " + o.in), out);
  return kOk;
}

inline int cmd_upsilon(const Options& o, std::ostream& out, std::ostream& err) {
  const Potential q = load_potential(o);
  const UpsilonResult res = upsilon_detailed(q);
  err << "eta spread (boundary vs characteristic) = " << res.eta_spread << ", kernel iterations = " << res.picard_iterations << '\n';
  json j = to_json(res.h, "upsilon of " + o.in);
  j["eta_spread"] = res.eta_spread;
  emit_json(o, j, out);
  return kOk;
}

inline int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  const Accelerant h = load_accelerant(o);
  const AccelerantReport rep = is_accelerant(h, o.tol.value_or(1e-8));
  if (o.csv) {
    out << "alpha,sigma_min,sigma_max\n" << std::setprecision(17);
    for (const auto& m : rep.margins) out << m.alpha << ',' << m.sigma_min << ',' << m.sigma_max << '\n';
    print_margin(rep, err);
  } else {
    print_margin(rep, out);
  }
  return rep.accepted ? kOk : kRejected;
}

inline int cmd_roundtrip(const Options& o, std::ostream& out, std::ostream& err) {
  Field f = read_field_file(o.in);
  const double tol = o.tol.value_or(5e-3);
  DiagnosticReport rep;
  if (auto* h = std::get_if<Accelerant>(&f)) {
    std::vector<int> ladder = o.ladder.empty() ? std::vector<int>{h->grid().cells()} : o.ladder;
    rep = roundtrip_report(*h, ladder, tol);
  } else if (auto* q = std::get_if<Potential>(&f)) {
    std::vector<int> ladder = o.ladder.empty() ? std::vector<int>{q->grid().cells()} : o.ladder;
    rep = roundtrip_report(*q, ladder, tol);
  } else {
    throw InputError("roundtrip needs an accelerant or a potential");
  }
  emit_json(o, report_to_json(rep), out);
  double final_error = NAN;
  for (const auto& e : rep.entries())
    if (e.name.rfind("relative_error@", 0) == 0) final_error = e.value;
  err << "final relative error = " << final_error << " (tolerance " << tol << ")\n";
  return final_error <= tol ? kOk : kRejected;
}

inline const std::vector<cplx> kDefaultLambdas = {cplx(0.0), cplx(1.0), cplx(-1.0), cplx(1.0, 0.5)};

inline DiagnosticReport verify_potential(const Potential& q, const std::vector<cplx>& lambdas) {
  DiagnosticReport rep = verify_appendix(q);
  rep.merge(verify_Y_representation(q, lambdas));
  return rep;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  Field f = read_field_file(o.in);
  const std::vector<cplx> lambdas = o.lambdas.empty() ? kDefaultLambdas : parse_lambdas(o.lambdas);
  Stopwatch sw;
  DiagnosticReport rep;
  if (auto* q = std::get_if<Potential>(&f)) {
    const Potential qq = o.n > 0 ? decimate(*q, o.n) : *q;
    rep = verify_potential(qq, lambdas);
    rep.grid_cells = qq.grid().cells();
  } else if (auto* hp = std::get_if<Accelerant>(&f)) {
    const Accelerant h = o.n > 0 ? decimate(*hp, o.n) : *hp;
    const AccelerantReport acc = is_accelerant(h, o.tol.value_or(1e-8));
    if (!acc.accepted) {
      print_margin(acc, err);
      return kRejected;
    }
    const KreinPair kp = solve_krein_pair(h);
    const Potential q = theta_from_pair(kp);
    rep = verify_potential(q, lambdas);
    const Kernel2D R = build_R_H(kp);
    rep.add("krein_residual",
            std::max(glm_residual(convolution_kernel(h), kp.r, convolution_jump(h)),
                     glm_residual(convolution_kernel(sharp(h)), kp.r_sharp, convolution_jump(sharp(h)))),
            1e-10);
    rep.add("theta_forms_agree", lp_field_norm(theta_via_RH(R) - q, 1.0), 1e-12);
    rep.merge(check_verR(R));
    rep.add("GLM_consistency", gp_norm(build_L_h(h) - solve_glm(build_F_h(h))), kAlgebraicTol);
    rep.grid_cells = h.grid().cells();
  } else {
    throw InputError("verify needs an accelerant or a potential");
  }
  rep.runtime_ms = sw.elapsed_ms();
  emit_json(o, report_to_json(rep), out);
  const auto failed = rep.failures();
  if (failed.empty()) return kOk;
  err << "failed residuals:";
  for (const auto& n : failed) err << ' ' << n;
  err << '\n';
  return kRejected;
}

inline int cmd_solve_dirac(const Options& o, std::ostream& out, std::ostream&) {
  const std::vector<cplx> lambdas = parse_lambdas(o.lambdas.empty() ? std::vector<std::string>{"0"} : o.lambdas);
  const Potential q = load_potential(o);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw InputError("cannot write " + o.out);
  }
  std::ostream& os = o.out.empty() ? out : file;
  os << std::setprecision(17);
  const int n = 2 * q.r();
  bool first = true;
  for (cplx l : lambdas) {
    const auto Y = solve_cauchy(q, l);
    if (!first) os << '\n';
    first = false;
    os << "# lambda=" << format_complex(l) << '\n' << "x";
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b) os << ",Y" << a << b << "_re,Y" << a << b << "_im";
    os << '\n';
    for (int i = 0; i < q.grid().nodes(); ++i) {
      os << q.grid().node(i);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) os << ',' << Y[i](a, b).real() << ',' << Y[i](a, b).imag();
      os << '\n';
    }
  }
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Accelerant <-> Dirac potential maps on [0,1]"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--in", o.in, "input field file (JSON)")->required();
    auto* opt = sub->add_option("--out", o.out, "output file");
    if (needs_out) opt->description("output field file (JSON; stdout if omitted)");
    sub->add_option("--n", o.n, "resample to N cells (nested grids only)");
    sub->add_option("--tol", o.tol, "tolerance");
    sub->add_option("--seed", o.seed, "random seed");
  };
  auto* th = app.add_subcommand("theta", "accelerant -> potential");
  add_common(th, true);
  auto* up = app.add_subcommand("upsilon", "potential -> accelerant");
  add_common(up, true);
  auto* ck = app.add_subcommand("check-accelerant", "singular-value sweep over truncation lengths");
  add_common(ck, false);
  ck->add_flag("--csv", o.csv, "print per-alpha margins as CSV");
  auto* rt = app.add_subcommand("roundtrip", "round trip over a grid ladder");
  add_common(rt, false);
  rt->add_option("--ladder", o.ladder, "grid ladder, e.g. 50,100,200")->delimiter(',');
  auto* vf = app.add_subcommand("verify", "identity residual suite");
  add_common(vf, false);
  vf->add_option("--lambda", o.lambdas, "spectral parameters, e.g. \"1+0.5i\"");
  auto* sd = app.add_subcommand("solve-dirac", "integrate the Cauchy problem, CSV output");
  add_common(sd, false);
  sd->add_option("--lambda", o.lambdas, "spectral parameters, e.g. \"1+0.5i\" (repeat or comma-separate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    if (th->parsed()) return cmd_theta(o, out, err);
    if (up->parsed()) return cmd_upsilon(o, out, err);
    if (ck->parsed()) return cmd_check(o, out, err);
    if (rt->parsed()) return cmd_roundtrip(o, out, err);
    if (vf->parsed()) return cmd_verify(o, out, err);
    if (sd->parsed()) return cmd_solve_dirac(o, out, err);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kBadInput;
  } catch (const NotAccelerantError& e) {
    err << "not an accelerant: " << e.what() << '\n';
    return kRejected;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const SingularOperatorError& e) {
    err << "singular operator: " << e.what() << '\n';
    return kRejected;
  } catch (const SupportViolationError& e) {
    err << "support violation: " << e.what() << '\n';
    return kRejected;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace kreinmap::cli
