#pragma once

// Closed-form communication-only precoders used as benchmarks. Both are
// scaled to exhaust the power budget and neither looks at the sensing floors.

#include "isac/common.h"

namespace isac::baselines {

enum class Method { zf, mmse };

struct BaselineResult {
  CMatrix W;  // M x K
  Method method = Method::zf;
  std::vector<bool> feasible_sensing;  // filled by evaluate_sensing()
};

/// H (H^H H)^{-1}, scaled to Tr(W W^H) = p_max. Throws SingularityError if
/// K > M or cond(H^H H) >= 1e12.
BaselineResult zf_beamformer(const CMatrix& h, double p_max);

/// H (H^H H + sigma2 I)^{-1}, scaled to Tr(W W^H) = p_max.
BaselineResult mmse_beamformer(const CMatrix& h, double sigma2, double p_max);

/// The unscaled MMSE matrix H (H^H H + sigma2 I)^{-1}.
CMatrix mmse_matrix(const CMatrix& h, double sigma2);

/// Marks, per sensing angle, whether the beampattern gain reaches gamma_th.
void evaluate_sensing(BaselineResult& r, const std::vector<double>& sensing_rad,
                      double gamma_th);

}  // namespace isac::baselines
