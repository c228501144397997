#pragma once

#include <json.hpp>
#include <string>

#include "eps/integrable.hpp"

namespace eps {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed run configuration; `doc` keeps the raw JSON for suite-specific
/// sections, `hash_hex` fingerprints the canonical serialization.
struct RunConfig {
  nlohmann::json doc;
  std::uint64_t seed = 42;
  std::string hash_hex;

  static RunConfig load(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j);
};

Vec vector_from_json(const nlohmann::json& j);
Mat matrix_from_json(const nlohmann::json& j);

LieAlgebra algebra_from_config(const nlohmann::json& doc);

/// A subspace is given either as basis labels ["f_12", ...] or as spanning
/// coordinate vectors [[...], ...].
Subspace subspace_from_json(const LieAlgebra& alg, const nlohmann::json& j);

/// Chain of the algebra's own family starting at the configured base size.
ChainSpec chain_from_config(const LieAlgebra& alg, const nlohmann::json& chain_obj);

/// Metric spec: explicit | block | chain | sectional.
MetricOperator metric_from_config(const LieAlgebra& alg, const nlohmann::json& doc);

Distribution distribution_from_config(const LieAlgebra& alg, const nlohmann::json& doc);

IntegrateOptions integrator_from_config(const nlohmann::json& doc);

/// Symmetric-pair setup from the "pair" section (split-integrals and
/// frequencies suites).
SymmetricPairSetup pair_setup_from_config(const LieAlgebra& alg,
                                          const nlohmann::json& doc);

}  // namespace eps
