#include "expfact/certify.hpp"

#include <cmath>
#include <limits>

#include "expfact/error.hpp"

namespace expfact {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kEqualsSnTol = 1e-8;
}  // namespace

const char* claim_kind_name(ClaimKind kind) {
  switch (kind) {
    case ClaimKind::EqualsSn: return "equals_Sn";
    case ClaimKind::WithinNeps: return "within_Neps";
    case ClaimKind::InSigmaN: return "in_SigmaN";
  }
  return "?";
}

double continuity_jump(const AlgebraElement& e) {
  const SpacePtr& sp = e.space();
  if (!sp->ordered_path())
    throw Error(ErrorCode::UnsupportedBackend, "continuity report needs a path backend");
  double worst = 0.0;
  for (const auto& [p, q] : sp->adjacency())
    worst = std::max(worst, std::abs(e.value(p) - e.value(q)));
  return worst;
}

double continuity_report(const MatrixOverAlgebra& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      worst = std::max(worst, continuity_jump(m.at(i, j)));
  return worst;
}

double holomorphy_residual(const MatrixOverAlgebra& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      worst = std::max(worst, holomorphy_residual(m.at(i, j)));
  return worst;
}

FactorizationCertificate verify_factorization(const MatrixOverAlgebra& a,
                                              const std::vector<MatrixOverAlgebra>& factors,
                                              double tol,
                                              std::vector<SpectralClaim> claims,
                                              Exec exec) {
  if (factors.empty()) throw Error(ErrorCode::ShapeMismatch, "no factors to verify");
  for (const auto& f : factors) {
    require_same_space(a.space(), f.space());
    if (f.dim() != a.dim()) throw Error(ErrorCode::ShapeMismatch, "factor dimension differs");
  }

  FactorizationCertificate cert;
  cert.factor_count = factors.size();
  cert.tolerance = tol;

  std::vector<MatrixOverAlgebra> exps;
  exps.reserve(factors.size());
  for (const auto& f : factors) {
    cert.factor_norms.push_back(f.max_operator_norm());
    exps.push_back(mat_exp(f, exec));
  }
  MatrixOverAlgebra product = exps[0];
  for (std::size_t i = 1; i < exps.size(); ++i) product = product * exps[i];
  cert.reconstruction_residual = max_residual(product, a);

  bool ok = cert.reconstruction_residual <= tol;
  for (SpectralClaim& claim : claims) {
    if (claim.factor >= exps.size())
      throw Error(ErrorCode::ShapeMismatch, "claim references a missing factor");
    const Spectrum s = spectrum(exps[claim.factor], exec);
    switch (claim.kind) {
      case ClaimKind::EqualsSn: {
        const double h = hausdorff_distance(s.values(), roots_of_unity(a.dim()));
        claim.margin = kEqualsSnTol - h;
        claim.verified = h <= kEqualsSnTol;
        break;
      }
      case ClaimKind::WithinNeps: {
        double worst = 0.0;
        for (const auto& p : s.points)
          worst = std::max(worst, distance_to_roots(p.value, a.dim()));
        claim.margin = claim.epsilon - worst;
        claim.verified = worst <= claim.epsilon;
        break;
      }
      case ClaimKind::InSigmaN: {
        double dist0 = std::numeric_limits<double>::infinity();
        for (const auto& p : s.points) dist0 = std::min(dist0, std::abs(p.value));
        claim.margin = dist0 - s.resolution;
        claim.verified = zero_in_unbounded_component(s);
        break;
      }
    }
    ok = ok && claim.verified;
  }
  cert.claims = std::move(claims);

  if (a.space()->ordered_path()) {
    double worst = 0.0;
    for (const auto& f : factors) worst = std::max(worst, continuity_report(f));
    cert.continuity_jump = worst;
  }
  if (a.space()->kind() == SpaceKind::DiskGrid) {
    double worst = 0.0;
    for (const auto& f : factors) worst = std::max(worst, holomorphy_residual(f));
    cert.holomorphy_residual = worst;
  }
  cert.all_verified = ok;
  return cert;
}

MatrixOverAlgebra build_t_counterexample(const SpacePtr& space) {
  if (space->kind() != SpaceKind::IntervalPath)
    throw Error(ErrorCode::UnsupportedBackend, "the obstruction instance lives on an interval path");
  if (space->size() < 64)
    throw Error(ErrorCode::Config, "need >= 64 samples to resolve the winding");

  std::vector<Complex> g(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    const double x = space->coordinate(i).real();
    g[i] = std::exp(Complex(0.0, kTwoPi * x));
  }
  MatrixOverAlgebra t(2, space);
  t.set(0, 0, AlgebraElement(space, std::move(g)));
  t.set(0, 1, AlgebraElement::constant(space, Complex(1.0, 0.0)));
  t.set(1, 1, AlgebraElement::constant(space, Complex(1.0, 0.0)));
  return t;
}

MatrixOverAlgebra build_tn(const SpacePtr& space, std::size_t n) {
  if (n < 3) throw Error(ErrorCode::Config, "block extension needs n >= 3");
  MatrixOverAlgebra t = build_t_counterexample(space);
  double max_g = 0.0;
  for (std::size_t s = 0; s < space->size(); ++s)
    max_g = std::max(max_g, std::abs(t.at(0, 0).value(s)));
  const Complex m(1.0 + max_g, 0.0);

  MatrixOverAlgebra out(n, space);
  for (std::size_t i = 0; i < n - 2; ++i) out.set(i, i, AlgebraElement::constant(space, m));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) out.set(n - 2 + i, n - 2 + j, t.at(i, j));
  return out;
}

ObstructionReport verify_t_obstruction(const MatrixOverAlgebra& t) {
  const SpacePtr& space = t.space();
  if (space->kind() != SpaceKind::IntervalPath || t.dim() != 2)
    throw Error(ErrorCode::UnsupportedBackend, "expects the interval-path obstruction instance");

  // a square root S = [[f1, f2], [f3, f4]] of T forces (f1+f4) f2 = 1 and
  // f3 = 0, hence f1^2 = g and f4^2 = 1; on a connected domain each branch
  // choice is constant, and every one of the four makes f1 + f4 vanish at
  // one endpoint
  const std::size_t first = 0;
  const std::size_t last = space->size() - 1;
  auto half_exp = [&](std::size_t sample) {
    const double x = space->coordinate(sample).real();
    return std::exp(Complex(0.0, kTwoPi * x / 2.0));
  };

  ObstructionReport report;
  int idx = 0;
  for (int sign_half : {+1, -1}) {
    for (int sign_unit : {+1, -1}) {
      // opposite signs cancel at x=0 where g=1; equal signs cancel at x=1
      // where exp(f/2) = exp(i*pi) = -1
      const std::size_t where = (sign_half * sign_unit < 0) ? first : last;
      const Complex sum = double(sign_half) * half_exp(where) + double(sign_unit);
      report.cases[std::size_t(idx++)] = {sign_half, sign_unit, where, std::abs(sum)};
    }
  }
  report.no_continuous_sqrt = true;
  for (const auto& c : report.cases)
    report.no_continuous_sqrt = report.no_continuous_sqrt && c.magnitude <= 1e-12;
  return report;
}

}  // namespace expfact
