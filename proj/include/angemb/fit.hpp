#ifndef ANGEMB_FIT_HPP
#define ANGEMB_FIT_HPP

#include <numbers>

#include "angemb/ae.hpp"
#include "angemb/baselines.hpp"
#include "angemb/tae.hpp"

namespace angemb {

inline constexpr double kDefaultEtaTheta = std::numbers::pi / 3;

/// Method-agnostic fitting options; fields irrelevant to the chosen method are ignored.
struct FitOptions {
  Method method = Method::Ae;
  double eta_theta = kDefaultEtaTheta;
  Strategy strategy = Strategy::Auto;
  std::uint64_t seed = 0;
  double zero_tol = kDefaultZeroTol;
  Index block = kDefaultBlock;
  unsigned threads = 1;
  double em_tol = 1e-4;
  Index em_max_iter = 1000;
};

inline FitModel fit(const DataMatrix& x, Index d, const FitOptions& opt) {
  const FitConfig cfg{opt.strategy, opt.zero_tol, opt.seed};
  switch (opt.method) {
    case Method::Pca: return fit_pca(x, d, cfg);
    case Method::Ae: return fit_ae(x, d, cfg);
    case Method::Tae: return fit_tae(x, d, opt.eta_theta, TaeConfig{cfg, opt.block, opt.threads});
    case Method::EmPca: {
      EmPcaOptions em;
      em.tol = opt.em_tol;
      em.max_iter = opt.em_max_iter;
      em.seed = opt.seed;
      return fit_em_pca(x, d, em);
    }
  }
  throw Error(ErrorCode::InvalidData, "unknown method");
}

}  // namespace angemb

#endif  // ANGEMB_FIT_HPP
