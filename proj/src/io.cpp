#include "expfact/io.hpp"

#include <fstream>

#include "expfact/error.hpp"

namespace expfact::io {

namespace {

const Json& need(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(ErrorCode::BadSpec, std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadSpec, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::BadSpec, std::string("json parse error: ") + e.what());
  }
  return j;
}

Json backend_to_json(const SpacePtr& space) {
  Json j;
  switch (space->kind()) {
    case SpaceKind::FinitePoints:
      j["kind"] = "finite_points";
      j["points"] = space->size();
      break;
    case SpaceKind::IntervalPath:
      j["kind"] = "interval_path";
      j["samples"] = space->size();
      break;
    case SpaceKind::CirclePath:
      j["kind"] = "circle_path";
      j["samples"] = space->size();
      break;
    case SpaceKind::DiskGrid: {
      j["kind"] = "disk_grid";
      j["boundary"] = space->boundary_count();
      const std::size_t interior = space->size() - space->boundary_count();
      j["rings"] = interior == 0 ? 1 : 1 + (interior - 1) / space->boundary_count();
      j["degree_cap"] = space->degree_cap();
      break;
    }
  }
  return j;
}

SpacePtr backend_from_json(const Json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  try {
    if (kind == "finite_points") return SampleSpace::finite_points(need(j, "points").get<std::size_t>());
    if (kind == "interval_path") return SampleSpace::interval_path(need(j, "samples").get<std::size_t>());
    if (kind == "circle_path") return SampleSpace::circle_path(need(j, "samples").get<std::size_t>());
    if (kind == "disk_grid")
      return SampleSpace::disk_grid(need(j, "boundary").get<std::size_t>(),
                                    need(j, "rings").get<std::size_t>(),
                                    need(j, "degree_cap").get<std::size_t>());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::BadSpec, std::string("bad backend descriptor: ") + e.what());
  }
  throw Error(ErrorCode::BadSpec, "unknown backend kind '" + kind + "'");
}

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorCode::BadSpec, "complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json element_to_json(const AlgebraElement& e) {
  Json j;
  if (e.has_poly()) {
    Json coeffs = Json::array();
    for (const Complex& c : e.poly()) coeffs.push_back(complex_to_json(c));
    j["poly"] = std::move(coeffs);
  } else {
    Json vals = Json::array();
    for (const Complex& v : e.values()) vals.push_back(complex_to_json(v));
    j["samples"] = std::move(vals);
  }
  return j;
}

AlgebraElement element_from_json(const Json& j, const SpacePtr& space) {
  if (j.is_array() || j.is_number()) {
    // shorthand: a constant, either [re,im] or a bare real
    Complex c = j.is_number() ? Complex(j.get<double>(), 0.0) : complex_from_json(j);
    return AlgebraElement::constant(space, c);
  }
  if (j.contains("poly")) {
    std::vector<Complex> coeffs;
    for (const auto& item : j["poly"]) coeffs.push_back(complex_from_json(item));
    return AlgebraElement::from_poly(space, std::move(coeffs));
  }
  if (j.contains("samples")) {
    const auto& arr = j["samples"];
    if (arr.size() != space->size())
      throw Error(ErrorCode::BadSpec, "sample count does not match the backend");
    std::vector<Complex> vals;
    vals.reserve(arr.size());
    for (const auto& item : arr) vals.push_back(complex_from_json(item));
    return AlgebraElement(space, std::move(vals));
  }
  throw Error(ErrorCode::BadSpec, "element literal needs 'poly' or 'samples'");
}

Json matrix_to_json(const MatrixOverAlgebra& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(element_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  Json j;
  j["n"] = m.dim();
  j["entries"] = std::move(rows);
  return j;
}

MatrixOverAlgebra matrix_from_json(const Json& j, const SpacePtr& space) {
  const std::size_t n = need(j, "n").get<std::size_t>();
  const Json& entries = need(j, "entries");
  if (entries.size() != n) throw Error(ErrorCode::BadSpec, "entry rows do not match n");
  MatrixOverAlgebra m(n, space);
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i].size() != n) throw Error(ErrorCode::BadSpec, "entry row length mismatch");
    for (std::size_t k = 0; k < n; ++k) m.set(i, k, element_from_json(entries[i][k], space));
  }
  return m;
}

MatrixSpec matrix_spec_from_json(const Json& j) {
  SpacePtr space = backend_from_json(need(j, "backend"));
  MatrixSpec spec{space, matrix_from_json(j, space), false};
  if (j.contains("normalize_det")) spec.normalize_det = j["normalize_det"].get<bool>();
  return spec;
}

MatrixSpec load_matrix_spec(const std::string& path) {
  return matrix_spec_from_json(load_json(path));
}

Json spectrum_to_json(const Spectrum& s) {
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json e;
    e["value"] = complex_to_json(p.value);
    e["sample"] = p.sample;
    e["multiplicity"] = p.multiplicity;
    pts.push_back(std::move(e));
  }
  Json j;
  j["dim"] = s.matrix_dim;
  j["resolution"] = s.resolution;
  j["points"] = std::move(pts);
  return j;
}

Json claim_to_json(const SpectralClaim& c) {
  Json j;
  j["factor"] = c.factor;
  j["claim"] = claim_kind_name(c.kind);
  if (c.kind == ClaimKind::WithinNeps) j["epsilon"] = c.epsilon;
  j["verified"] = c.verified;
  j["margin"] = c.margin;
  return j;
}

SpectralClaim claim_from_json(const Json& j) {
  SpectralClaim c;
  c.factor = need(j, "factor").get<std::size_t>();
  const std::string kind = need(j, "claim").get<std::string>();
  if (kind == "equals_Sn") c.kind = ClaimKind::EqualsSn;
  else if (kind == "within_Neps") c.kind = ClaimKind::WithinNeps;
  else if (kind == "in_SigmaN") c.kind = ClaimKind::InSigmaN;
  else throw Error(ErrorCode::BadSpec, "unknown claim kind '" + kind + "'");
  if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
  c.verified = need(j, "verified").get<bool>();
  c.margin = need(j, "margin").get<double>();
  return c;
}

Json trace_to_json(const ReductionTrace& t) {
  Json j;
  j["n"] = t.n;
  switch (t.kind) {
    case ReductionTrace::Kind::Scalar:
      j["kind"] = "scalar";
      if (t.det_log) j["log"] = element_to_json(*t.det_log);
      break;
    case ReductionTrace::Kind::Triangular:
      j["kind"] = "triangular";
      if (t.det_log) j["det_log"] = element_to_json(*t.det_log);
      j["t_eps"] = t.t_eps;
      j["theta"] = t.theta;
      break;
    case ReductionTrace::Kind::Block:
      j["kind"] = "block";
      j["pivot_col"] = t.pivot_col;
      if (t.column_c) j["column_c"] = matrix_to_json(*t.column_c);
      if (t.reduced) j["reduced"] = matrix_to_json(*t.reduced);
      j["lambda"] = t.lambda;
      if (t.a11_log) j["a11_log"] = element_to_json(*t.a11_log);
      if (t.sub) j["sub"] = trace_to_json(*t.sub);
      break;
  }
  return j;
}

ReductionTrace trace_from_json(const Json& j, const SpacePtr& space) {
  ReductionTrace t;
  t.n = need(j, "n").get<std::size_t>();
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "scalar") {
    t.kind = ReductionTrace::Kind::Scalar;
    t.det_log = element_from_json(need(j, "log"), space);
  } else if (kind == "triangular") {
    t.kind = ReductionTrace::Kind::Triangular;
    t.det_log = element_from_json(need(j, "det_log"), space);
    t.t_eps = need(j, "t_eps").get<double>();
    t.theta = need(j, "theta").get<double>();
  } else if (kind == "block") {
    t.kind = ReductionTrace::Kind::Block;
    t.pivot_col = need(j, "pivot_col").get<std::size_t>();
    t.column_c = matrix_from_json(need(j, "column_c"), space);
    t.reduced = matrix_from_json(need(j, "reduced"), space);
    t.lambda = need(j, "lambda").get<double>();
    t.a11_log = element_from_json(need(j, "a11_log"), space);
    t.sub = std::make_unique<ReductionTrace>(trace_from_json(need(j, "sub"), space));
  } else {
    throw Error(ErrorCode::BadSpec, "unknown trace kind '" + kind + "'");
  }
  return t;
}

Json certificate_to_json(const FactorizationCertificate& cert,
                         const std::vector<MatrixOverAlgebra>& factors,
                         const SpacePtr& space, const ReductionTrace* trace) {
  Json j;
  j["schema"] = "expfact-cert-1";
  j["backend"] = backend_to_json(space);
  Json fs = Json::array();
  for (const auto& f : factors) fs.push_back(matrix_to_json(f));
  j["factors"] = std::move(fs);
  j["residual"] = cert.reconstruction_residual;
  Json claims = Json::array();
  for (const auto& c : cert.claims) claims.push_back(claim_to_json(c));
  j["claims"] = std::move(claims);
  j["norms"] = cert.factor_norms;
  j["continuity"] = cert.continuity_jump;
  j["holomorphy"] = cert.holomorphy_residual;
  j["tolerance"] = cert.tolerance;
  j["verified"] = cert.all_verified;
  if (trace) j["trace"] = trace_to_json(*trace);
  return j;
}

StoredCertificate certificate_from_json(const Json& j) {
  if (!j.contains("schema") || j["schema"].get<std::string>() != "expfact-cert-1")
    throw Error(ErrorCode::BadSpec, "not an expfact-cert-1 document");
  StoredCertificate out{backend_from_json(need(j, "backend")), {}, {}, std::nullopt};
  for (const auto& f : need(j, "factors")) out.factors.push_back(matrix_from_json(f, out.space));
  out.cert.factor_count = out.factors.size();
  out.cert.reconstruction_residual = need(j, "residual").get<double>();
  for (const auto& c : need(j, "claims")) out.cert.claims.push_back(claim_from_json(c));
  out.cert.factor_norms = need(j, "norms").get<std::vector<double>>();
  out.cert.continuity_jump = need(j, "continuity").get<double>();
  out.cert.holomorphy_residual = need(j, "holomorphy").get<double>();
  out.cert.tolerance = need(j, "tolerance").get<double>();
  out.cert.all_verified = need(j, "verified").get<bool>();
  if (j.contains("trace")) out.trace = trace_from_json(j["trace"], out.space);
  return out;
}

}  // namespace expfact::io
