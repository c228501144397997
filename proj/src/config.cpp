#include "eps/config.hpp"

#include <fstream>
#include <sstream>

namespace eps {

using nlohmann::json;

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;
  cfg.doc = j;
  cfg.seed = j.value("seed", 42ull);
  std::ostringstream hex;
  hex << std::hex << fnv1a(j.dump());
  cfg.hash_hex = hex.str();
  return cfg;
}

Vec vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("config: expected a numeric array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("config: expected a numeric array");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError("config: expected an array of rows");
  Mat M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (size_t r = 0; r < j.size(); ++r) {
    Vec row = vector_from_json(j[r]);
    if (row.size() != M.cols()) throw ConfigError("config: ragged matrix rows");
    M.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return M;
}

LieAlgebra algebra_from_config(const json& doc) {
  if (!doc.contains("algebra"))
    throw ConfigError("config: missing \"algebra\" section");
  const json& a = doc["algebra"];
  std::string family = a.value("family", "");
  if (family == "so3_body") return build_so3_body();
  int n = a.value("n", 0);
  if (family == "so") return build_so(n);
  if (family == "u") return build_u(n);
  if (family == "sp") return build_sp(n);
  throw ConfigError("config: algebra.family must be so | u | sp | so3_body");
}

Subspace subspace_from_json(const LieAlgebra& alg, const json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("config: subspace must be a nonempty array");
  if (j[0].is_string()) {
    std::vector<std::string> labels;
    for (const auto& item : j) labels.push_back(item.get<std::string>());
    return Subspace::from_labels(alg, labels);
  }
  Mat span(alg.dim(), static_cast<Eigen::Index>(j.size()));
  for (size_t c = 0; c < j.size(); ++c) {
    Vec v = vector_from_json(j[c]);
    if (v.size() != alg.dim())
      throw ConfigError("config: subspace vector has wrong dimension");
    span.col(static_cast<Eigen::Index>(c)) = v;
  }
  return Subspace(alg, span);
}

ChainSpec chain_from_config(const LieAlgebra& alg, const json& chain_obj) {
  int base = chain_obj.value("base", 0);
  if (base <= 0) throw ConfigError("config: chain.base must be positive");
  const std::string& name = alg.name();
  if (name.rfind("so", 0) == 0) return so_chain(alg, base);
  if (name.rfind("u(", 0) == 0) return u_chain(alg, base);
  if (name.rfind("sp", 0) == 0) return sp_chain(alg, base);
  throw ConfigError("config: chains need an so/u/sp algebra");
}

MetricOperator metric_from_config(const LieAlgebra& alg, const json& doc) {
  if (!doc.contains("metric")) throw ConfigError("config: missing \"metric\" section");
  const json& m = doc["metric"];
  std::string type = m.value("type", "");
  try {
    if (type == "explicit") {
      Mat A = matrix_from_json(m.at("matrix"));
      if (A.rows() != alg.dim())
        throw ConfigError("config: metric.matrix dimension mismatch");
      return MetricOperator::from_matrix(A);
    }
    if (type == "block") {
      const json& subs = m.at("subspaces");
      const json& blocks = m.at("blocks");
      if (!subs.is_array() || !blocks.is_array() || subs.size() != blocks.size())
        throw ConfigError("config: metric.block needs matching subspaces/blocks");
      std::vector<Subspace> decomp;
      std::vector<Mat> B;
      for (size_t i = 0; i < subs.size(); ++i) {
        decomp.push_back(subspace_from_json(alg, subs[i]));
        B.push_back(matrix_from_json(blocks[i]));
      }
      return make_block_metric(decomp, B);
    }
    if (type == "chain") {
      ChainSpec chain = chain_from_config(alg, m);
      Mat A0 = matrix_from_json(m.at("A0"));
      std::vector<double> s = m.at("s").get<std::vector<double>>();
      return make_chain_metric(chain, A0, s);
    }
    if (type == "sectional") {
      Vec a = vector_from_json(m.at("a"));
      Vec b = vector_from_json(m.at("b"));
      Subspace K = m.contains("K") ? subspace_from_json(alg, m["K"])
                                   : centralizer(alg, a);
      Mat R = matrix_from_json(m.at("R"));
      return make_sectional_operator(alg, K, a, b, R).as_metric();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: metric: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: metric: ") + e.what());
  }
  throw ConfigError("config: metric.type must be explicit | block | chain | sectional");
}

Distribution distribution_from_config(const LieAlgebra& alg, const json& doc) {
  if (!doc.contains("distribution"))
    throw ConfigError("config: missing \"distribution\" section");
  const json& d = doc["distribution"];
  const json& cons = d.contains("constraints") ? d["constraints"] : json::array();
  if (!cons.is_array()) throw ConfigError("config: distribution.constraints must be an array");
  Mat C(alg.dim(), static_cast<Eigen::Index>(cons.size()));
  for (size_t i = 0; i < cons.size(); ++i) {
    Vec a = vector_from_json(cons[i]);
    if (a.size() != alg.dim())
      throw ConfigError("config: constraint vector has wrong dimension");
    C.col(static_cast<Eigen::Index>(i)) = a;
  }
  try {
    return Distribution(alg, C);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: distribution: ") + e.what());
  }
}

IntegrateOptions integrator_from_config(const json& doc) {
  IntegrateOptions opt;
  if (doc.contains("integrator")) {
    const json& I = doc["integrator"];
    opt.h = I.value("h", opt.h);
    opt.T = I.value("T", opt.T);
    opt.stride = I.value("stride", opt.stride);
    opt.projection = I.value("projection", opt.projection);
  }
  if (!(opt.h > 0.0) || !(opt.T > 0.0) || opt.stride < 1)
    throw ConfigError("config: integrator requires h > 0, T > 0, stride >= 1");
  return opt;
}

SymmetricPairSetup pair_setup_from_config(const LieAlgebra& alg, const json& doc) {
  if (!doc.contains("pair")) throw ConfigError("config: missing \"pair\" section");
  const json& p = doc["pair"];
  try {
    PairSetupInput in{Subspace::zero(alg), Subspace::zero(alg), Subspace::zero(alg),
                      std::nullopt,        {},                  1.0,
                      Mat(),               {},                  Mat()};
    in.H = subspace_from_json(alg, p.at("H"));
    in.K = subspace_from_json(alg, p.at("K"));
    in.U = subspace_from_json(alg, p.at("U"));
    if (p.contains("W0")) {
      in.W0 = subspace_from_json(alg, p["W0"]);
      in.A_W0 = matrix_from_json(p.at("A_W0"));
    }
    for (const auto& w : p.at("Wk")) in.Wk.push_back(subspace_from_json(alg, w));
    for (const auto& b : p.at("A_Wk")) in.A_Wk.push_back(matrix_from_json(b));
    in.s = p.at("s").get<double>();
    if (p.contains("A_L")) in.A_L = matrix_from_json(p["A_L"]);
    return SymmetricPairSetup(alg, std::move(in));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: pair: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: pair: ") + e.what());
  }
}

}  // namespace eps
