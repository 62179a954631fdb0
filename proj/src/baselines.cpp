#include "isac/baselines.h"

#include "isac/problem.h"

#include <cmath>

namespace isac::baselines {
namespace {

CMatrix scale_to_budget(CMatrix w, double p_max) {
  const double tr = w.squaredNorm();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw SingularityError("baseline precoder has zero or non-finite power");
  }
  w *= std::sqrt(p_max / tr);
  return w;
}

}  // namespace

BaselineResult zf_beamformer(const CMatrix& h, double p_max) {
  if (h.cols() > h.rows()) {
    throw SingularityError("zf_beamformer: K > M, H cannot have full column rank");
  }
  const CMatrix gram = h.adjoint() * h;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo >= 1e12) {
    throw SingularityError("zf_beamformer: H^H H is singular or ill-conditioned");
  }
  BaselineResult r;
  r.method = Method::zf;
  r.W = scale_to_budget(h * gram.ldlt().solve(CMatrix::Identity(h.cols(), h.cols())), p_max);
  return r;
}

CMatrix mmse_matrix(const CMatrix& h, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("mmse_matrix: sigma2 must be > 0");
  CMatrix reg = h.adjoint() * h;
  reg.diagonal().array() += sigma2;
  return h * reg.ldlt().solve(CMatrix::Identity(h.cols(), h.cols()));
}

BaselineResult mmse_beamformer(const CMatrix& h, double sigma2, double p_max) {
  BaselineResult r;
  r.method = Method::mmse;
  r.W = scale_to_budget(mmse_matrix(h, sigma2), p_max);
  return r;
}

void evaluate_sensing(BaselineResult& r, const std::vector<double>& sensing_rad,
                      double gamma_th) {
  r.feasible_sensing.clear();
  for (double th : sensing_rad) {
    r.feasible_sensing.push_back(problem::beampattern_gain(r.W, th) >= gamma_th);
  }
}

}  // namespace isac::baselines
