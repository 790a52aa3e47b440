#ifndef ANGEMB_MODEL_HPP
#define ANGEMB_MODEL_HPP

#include <optional>
#include <string>
#include <string_view>

#include "angemb/linalg.hpp"

namespace angemb {

enum class Method { Pca, EmPca, Ae, Tae };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Pca: return "pca";
    case Method::EmPca: return "em_pca";
    case Method::Ae: return "ae";
    case Method::Tae: return "tae";
  }
  return "ae";
}

inline Method parse_method(std::string_view s) {
  if (s == "pca") return Method::Pca;
  if (s == "em_pca" || s == "em-pca") return Method::EmPca;
  if (s == "ae") return Method::Ae;
  if (s == "tae") return Method::Tae;
  throw Error(ErrorCode::InvalidData, "unknown method '" + std::string(s) + "'");
}

/// Outcome of cosine pre-trimming. Indices refer to columns of the sphere data.
struct TrimReport {
  double eta_theta = 0.0;
  double cos_threshold = 0.0;
  std::vector<Index> tau;
  Index tau_min = 0;
  Index pivot = 0;
  IndexList outliers;
  IndexList inliers;
};

struct FitStats {
  Index samples_used = 0;
  Index trimmed = 0;
  Index dropped_zero_norm = 0;
  Index iterations = 0;  // EM-PCA only
  double wall_time_s = 0.0;
  Strategy strategy_used = Strategy::Auto;
};

/// Everything needed to project and reconstruct: mean, basis and provenance.
struct FitModel {
  Eigen::VectorXd mean;
  Subspace subspace;
  Method method = Method::Ae;
  std::optional<TrimReport> trim;
  FitStats fit_stats;

  Index D() const { return subspace.D(); }
  Index d() const { return subspace.d(); }
};

}  // namespace angemb

#endif  // ANGEMB_MODEL_HPP
