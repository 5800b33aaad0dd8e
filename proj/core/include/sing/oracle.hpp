#pragma once

#include <cstddef>
#include <string>

#include "sing/matrix.hpp"
#include "sing/rng.hpp"
#include "sing/score.hpp"

namespace sing {

struct CmiEstimate {
    double value = 0.0;  // nats
    std::size_t outer_n = 0;
    std::size_t inner_n = 0;
    double std_error = 0.0;
};

// A joint density the nested Monte Carlo estimator can sample exactly and
// evaluate pointwise (normalized).
class JointDensity {
  public:
    virtual ~JointDensity() = default;
    virtual int dim() const = 0;
    virtual double log_density(const Vector& z) const = 0;
    virtual void sample(RandomEngine& eng, Vector& out) const = 0;
};

class GaussianDensity final : public JointDensity {
  public:
    GaussianDensity(Vector mean, Matrix covariance);

    int dim() const override { return static_cast<int>(mean_.size()); }
    double log_density(const Vector& z) const override;
    void sample(RandomEngine& eng, Vector& out) const override;

  private:
    Vector mean_;
    CholeskyFactor chol_;  // of the covariance
    double log_norm_ = 0.0;
};

// Entrywise square of the off-diagonal precision entries; the exact score of
// a Gaussian with that precision.
ScoreMatrix gaussian_score(const Matrix& precision);

// Largest eigenvalue of the covariance via power iteration to 1e-10.
double gaussian_log_sobolev_constant(const Matrix& covariance);

// Nested Monte Carlo conditional mutual information between variables i and j
// (1-based) given the rest: outer average over joint samples, inner
// importance-sampled normalizing integrals with Gaussian proposals matched to
// empirically regressed conditional moments. A verification tool, not a
// performance path.
CmiEstimate nested_mc_cmi(const JointDensity& density, int i, int j, std::size_t outer_n,
                          std::size_t inner_n, RngStream rng);

struct InformationBoundCheck {
    double cmi = 0.0;
    double bound = 0.0;
    bool holds = false;
};

// Both sides of the CMI bound for the 2-d Gaussian with correlation rho:
// cmi = -log(1 - rho^2)/2 against lambda_max(Sigma)^2 (rho/(1-rho^2))^2.
InformationBoundCheck check_information_bound(double rho);

std::string cmi_to_json(const CmiEstimate& est);
std::string information_bound_to_json(const InformationBoundCheck& check);

}  // namespace sing
