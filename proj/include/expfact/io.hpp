#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "expfact/general.hpp"

namespace expfact::io {

using Json = nlohmann::ordered_json;

Json backend_to_json(const SpacePtr& space);
SpacePtr backend_from_json(const Json& j);

Json complex_to_json(Complex c);
Complex complex_from_json(const Json& j);

// {"samples": [[re,im]...]} or {"poly": [[re,im]...]}
Json element_to_json(const AlgebraElement& e);
AlgebraElement element_from_json(const Json& j, const SpacePtr& space);

// {"n": n, "entries": [[element...]...]} row-major
Json matrix_to_json(const MatrixOverAlgebra& m);
MatrixOverAlgebra matrix_from_json(const Json& j, const SpacePtr& space);

struct MatrixSpec {
  SpacePtr space;
  MatrixOverAlgebra matrix;
  bool normalize_det = false;
};
MatrixSpec matrix_spec_from_json(const Json& j);
MatrixSpec load_matrix_spec(const std::string& path);

Json spectrum_to_json(const Spectrum& s);

Json claim_to_json(const SpectralClaim& c);
SpectralClaim claim_from_json(const Json& j);

Json trace_to_json(const ReductionTrace& t);
ReductionTrace trace_from_json(const Json& j, const SpacePtr& space);

// schema "expfact-cert-1"
Json certificate_to_json(const FactorizationCertificate& cert,
                         const std::vector<MatrixOverAlgebra>& factors,
                         const SpacePtr& space,
                         const ReductionTrace* trace = nullptr);

struct StoredCertificate {
  SpacePtr space;
  std::vector<MatrixOverAlgebra> factors;
  FactorizationCertificate cert;
  std::optional<ReductionTrace> trace;
};
StoredCertificate certificate_from_json(const Json& j);

Json load_json(const std::string& path);

}  // namespace expfact::io
