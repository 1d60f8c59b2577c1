#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "expfact/io.hpp"

namespace {

using namespace expfact;
using io::Json;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::BadSpec:
    case ErrorCode::Config:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::SpaceMismatch:
    case ErrorCode::UnsupportedBackend:
    case ErrorCode::NotTriangular:
      return 2;
    case ErrorCode::VerificationFailed:
      return 1;
    default:
      return 3;
  }
}

struct Options {
  double epsilon = 0.25;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string output = "json";
  std::string out_path;
  bool triangular_only = false;
  bool replay = false;
  bool serial = false;

  Exec exec() const { return serial ? Exec::Serial : Exec::Parallel; }
  SearchOptions search() const {
    SearchOptions s;
    s.seed = seed;
    s.tol = tol;
    s.exec = exec();
    return s;
  }
};

void emit(const Json& j, const Options& opt) {
  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path);
    if (!out) throw Error(ErrorCode::BadSpec, "cannot write " + opt.out_path);
    out << j.dump(2) << "\n";
  } else if (opt.output == "json") {
    std::cout << j.dump(2) << "\n";
  }
}

void print_cert_summary(const FactorizationCertificate& cert) {
  std::printf("factors             %zu\n", cert.factor_count);
  std::printf("residual            %.3e (tol %.1e)\n", cert.reconstruction_residual,
              cert.tolerance);
  for (const auto& c : cert.claims)
    std::printf("claim factor %zu     %s %s (margin %.3e)\n", c.factor, claim_kind_name(c.kind),
                c.verified ? "ok" : "FAILED", c.margin);
  std::printf("continuity jump     %.3e\n", cert.continuity_jump);
  std::printf("holomorphy residual %.3e\n", cert.holomorphy_residual);
  std::printf("verified            %s\n", cert.all_verified ? "yes" : "NO");
}

MatrixOverAlgebra load_input(const std::string& path, const Options& opt, SpacePtr* space_out) {
  io::MatrixSpec spec = io::load_matrix_spec(path);
  MatrixOverAlgebra a = spec.matrix;
  if (spec.normalize_det) {
    // explicit opt-in: divide out the n-th root of the determinant
    AlgebraElement det = a.det(opt.exec());
    if (!is_exp1(det, opt.tol))
      throw Error(ErrorCode::DetNotExp1, "cannot normalize: determinant not in Exp1");
    AlgebraElement phi = scalar_log_exp1(det, opt.tol);
    AlgebraElement unit =
        exp_pointwise(elem_scale(phi, Complex(-1.0 / double(a.dim()), 0.0)));
    MatrixOverAlgebra scaled(a.dim(), a.space());
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < a.dim(); ++j) scaled.set(i, j, elem_mul(a.at(i, j), unit));
    a = scaled;
  }
  if (space_out) *space_out = spec.space;
  return a;
}

int cmd_factorize(const std::string& path, const Options& opt) {
  SpacePtr space;
  MatrixOverAlgebra a = load_input(path, opt, &space);
  if (opt.triangular_only && !a.is_upper_triangular(1e-8) && !a.is_lower_triangular(1e-8))
    throw Error(ErrorCode::NotTriangular, "--triangular given but the input is not triangular");

  GeneralFactorization f = factorize_two_exp(a, opt.epsilon, opt.search());
  Json cert = io::certificate_to_json(f.certificate, {f.b1, f.b2}, space, &f.trace);
  if (opt.output == "text") print_cert_summary(f.certificate);
  emit(cert, opt);
  return f.certificate.all_verified ? 0 : 1;
}

int cmd_spectrum(const std::string& path, const Options& opt) {
  SpacePtr space;
  MatrixOverAlgebra a = load_input(path, opt, &space);
  emit(io::spectrum_to_json(spectrum(a, opt.exec())), opt);
  return 0;
}

int cmd_singleexp(const std::string& path, const Options& opt) {
  SpacePtr space;
  MatrixOverAlgebra a = load_input(path, opt, &space);
  MatrixOverAlgebra b = single_exp_finite(a, opt.exec());
  FactorizationCertificate cert = verify_factorization(a, {b}, 1e-9, {}, opt.exec());
  if (opt.output == "text") print_cert_summary(cert);
  emit(io::certificate_to_json(cert, {b}, space), opt);
  return cert.all_verified ? 0 : 1;
}

int cmd_verify(const std::string& cert_path, const std::string& spec_path, const Options& opt) {
  io::StoredCertificate stored = io::certificate_from_json(io::load_json(cert_path));
  SpacePtr space;
  MatrixOverAlgebra a = load_input(spec_path, opt, &space);
  if (!space->same_as(*stored.space))
    throw Error(ErrorCode::SpaceMismatch, "certificate backend differs from the spec");

  FactorizationCertificate fresh = verify_factorization(
      a, stored.factors, stored.cert.tolerance, stored.cert.claims, opt.exec());

  bool consistent = std::abs(fresh.reconstruction_residual -
                             stored.cert.reconstruction_residual) <= 1e-12;
  consistent = consistent && fresh.all_verified == stored.cert.all_verified;
  for (std::size_t i = 0; i < fresh.claims.size(); ++i)
    consistent = consistent && fresh.claims[i].verified == stored.cert.claims[i].verified;

  double replay_drift = 0.0;
  if (opt.replay) {
    if (!stored.trace)
      throw Error(ErrorCode::BadSpec, "--replay requested but the certificate has no trace");
    auto [b1, b2] = replay_trace(a, *stored.trace, opt.exec());
    replay_drift = std::max(max_residual(b1, stored.factors.at(0)),
                            max_residual(b2, stored.factors.at(1)));
    consistent = consistent && replay_drift <= 1e-6;
  }

  Json report;
  report["residual"] = fresh.reconstruction_residual;
  report["stored_residual"] = stored.cert.reconstruction_residual;
  report["verified"] = fresh.all_verified;
  report["consistent"] = consistent;
  if (opt.replay) report["replay_drift"] = replay_drift;
  if (opt.output == "text") {
    print_cert_summary(fresh);
    std::printf("consistent          %s\n", consistent ? "yes" : "NO");
    if (opt.replay) std::printf("replay drift        %.3e\n", replay_drift);
  }
  emit(report, opt);
  return (fresh.all_verified && consistent) ? 0 : 1;
}

int cmd_regroup(const std::string& path, const Options& opt) {
  Json j = io::load_json(path);
  SpacePtr space = io::backend_from_json(j.at("backend"));
  std::vector<MatrixOverAlgebra> factors;
  for (const auto& f : j.at("factors")) factors.push_back(io::matrix_from_json(f, space));

  std::vector<MatrixOverAlgebra> grouped = regroup_unitriangular(factors);
  Json out;
  out["backend"] = io::backend_to_json(space);
  Json arr = Json::array();
  for (const auto& g : grouped) arr.push_back(io::matrix_to_json(g));
  out["factors"] = std::move(arr);
  out["count"] = grouped.size();
  emit(out, opt);
  return 0;
}

int cmd_demo(std::size_t samples, const Options& opt) {
  SpacePtr space = SampleSpace::interval_path(samples);
  int failures = 0;
  auto row = [&](const char* name, bool pass, const std::string& detail) {
    std::printf("%-34s %-4s %s\n", name, pass ? "ok" : "FAIL", detail.c_str());
    if (!pass) ++failures;
  };
  std::printf("obstruction demo on %s\n", space->describe().c_str());

  MatrixOverAlgebra t = build_t_counterexample(space);

  bool no_log = false;
  std::string msg = "unexpected success";
  try {
    direct_log(t, opt.exec());
  } catch (const Error& e) {
    no_log = e.code() == ErrorCode::NotInSigmaN;
    msg = error_code_name(e.code());
  }
  row("direct_log(T)", no_log, msg);

  ObstructionReport rep = verify_t_obstruction(t);
  double worst = 0.0;
  for (const auto& c : rep.cases) worst = std::max(worst, c.magnitude);
  row("square-root case analysis 4/4", rep.no_continuous_sqrt,
      "max vanishing sum " + std::to_string(worst));

  GeneralFactorization f = factorize_two_exp(t, opt.epsilon, opt.search());
  row("two-exponential factorization",
      f.certificate.all_verified,
      "residual " + std::to_string(f.certificate.reconstruction_residual));
  const double input_jump = continuity_report(t);
  const bool cont_ok = f.certificate.continuity_jump <= 10.0 * input_jump + 1e-6;
  row("factor continuity", cont_ok,
      "jump " + std::to_string(f.certificate.continuity_jump) + " vs input " +
          std::to_string(input_jump));

  MatrixOverAlgebra t3 = build_tn(space, 3);
  bool no_log3 = false;
  try {
    direct_log(t3, opt.exec());
  } catch (const Error& e) {
    no_log3 = e.code() == ErrorCode::NotInSigmaN;
  }
  row("direct_log(T3)", no_log3, no_log3 ? "NotInSigmaN" : "unexpected");

  GeneralFactorization f3 = factorize_two_exp(t3, opt.epsilon, opt.search());
  row("T3 two-exponential factorization", f3.certificate.all_verified,
      "residual " + std::to_string(f3.certificate.reconstruction_residual));
  const bool cont3_ok =
      f3.certificate.continuity_jump <= 10.0 * continuity_report(t3) + 1e-6;
  row("T3 factor continuity", cont3_ok,
      "jump " + std::to_string(f3.certificate.continuity_jump));

  std::printf("%s\n", failures == 0 ? "all checks passed" : "SOME CHECKS FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-exponential factorization of matrices over sampled function algebras"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Options opt;
  app.add_option("--epsilon", opt.epsilon, "radius of the root-of-unity neighborhood");
  app.add_option("--tol", opt.tol, "invertibility / zero-locus tolerance");
  app.add_option("--seed", opt.seed, "seed for the shift searches");
  app.add_option("--output", opt.output, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", opt.out_path, "write JSON output to a file");
  app.add_flag("--serial", opt.serial, "run per-sample kernels serially");

  std::string spec_path, cert_path, aux_path;
  std::size_t demo_samples = 257;

  CLI::App* factorize = app.add_subcommand("factorize", "factor a matrix into two exponentials");
  factorize->add_option("spec", spec_path, "matrix spec JSON")->required();
  factorize->add_flag("--triangular", opt.triangular_only,
                      "require the triangular construction");

  CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "pointwise spectrum of a matrix");
  spectrum_cmd->add_option("spec", spec_path, "matrix spec JSON")->required();

  CLI::App* verify = app.add_subcommand("verify", "re-check a stored certificate");
  verify->add_option("certificate", cert_path, "certificate JSON")->required();
  verify->add_option("--spec", aux_path, "original matrix spec")->required();
  verify->add_flag("--replay", opt.replay, "replay the reduction trace");

  CLI::App* regroup = app.add_subcommand("regroup", "regroup alternating unitriangular factors");
  regroup->add_option("factors", spec_path, "factors JSON")->required();

  CLI::App* demo = app.add_subcommand("demo", "run the obstruction demo suite");
  std::string demo_what = "t-counterexample";
  demo->add_option("which", demo_what, "demo name (t-counterexample)");
  demo->add_option("--samples", demo_samples, "interval path sample count");

  CLI::App* singleexp = app.add_subcommand("singleexp", "single exponential over finite points");
  singleexp->add_option("spec", spec_path, "matrix spec JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (factorize->parsed()) return cmd_factorize(spec_path, opt);
    if (spectrum_cmd->parsed()) return cmd_spectrum(spec_path, opt);
    if (verify->parsed()) return cmd_verify(cert_path, aux_path, opt);
    if (regroup->parsed()) return cmd_regroup(spec_path, opt);
    if (demo->parsed()) {
      if (demo_what != "t-counterexample")
        throw Error(ErrorCode::BadSpec, "unknown demo '" + demo_what + "'");
      return cmd_demo(demo_samples, opt);
    }
    if (singleexp->parsed()) return cmd_singleexp(spec_path, opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
