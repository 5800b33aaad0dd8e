#pragma once

#include <vector>

#include "sing/matrix.hpp"
#include "sing/sample_matrix.hpp"
#include "sing/transport.hpp"

namespace sing {

struct FitOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-6;
};

// One fitted component plus diagnostics. The objective is the component's
// share of the average negative log-likelihood, including its (1/2) log(2 pi).
struct ComponentFit {
    MapComponent component;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool underdetermined = false;   // fewer samples than coefficients
    std::vector<double> objective_trace;  // accepted line-search values
};

struct FitResult {
    TriangularMap map;
    double objective = 0.0;  // average negative log-likelihood of the pullback
    std::vector<int> iterations;
    std::vector<char> converged;
    std::vector<char> underdetermined;
};

// Quasi-Newton (BFGS with backtracking line search) maximum-likelihood fit of
// one component on the given data. The start carries the bases; coefficients
// are initialized from it.
ComponentFit fit_component(const MapComponent& start, const SampleMatrix& data,
                           int quadrature_order, double epsilon, const FitOptions& opts = {});

// Fits all d components independently on the same data; the sparsity pattern
// is enforced through the basis construction. Components run as parallel tasks
// and merge by index.
FitResult fit_map(const SampleMatrix& data, const SparsityPattern& pattern, int degree,
                  int quadrature_order = 32, double epsilon = 1e-8, const FitOptions& opts = {});

// Closed-form affine (degree 1) maximum likelihood: the pullback equals the
// Gaussian with the empirical mean and empirical covariance (1/n moments), and
// the map is z -> L (z - mean) with L the inverse Cholesky factor of the
// covariance, so that L^T L equals the empirical precision.
FitResult fit_affine_closed_form(const SampleMatrix& data, int quadrature_order = 32,
                                 double epsilon = 1e-8);

// Empirical average of negative coefficient Hessians of log-pullback over the
// samples; symmetrized, with ridge 1e-8 trace/p on the diagonal. Cross-component
// blocks are exactly zero by separability.
Matrix fisher_information(const TriangularMap& map, const SampleMatrix& data);

Vector empirical_mean(const SampleMatrix& data);
Matrix empirical_covariance(const SampleMatrix& data);  // 1/n normalization

// Map plus fit diagnostics (objective, iteration counts, convergence flags).
std::string fit_result_to_json(const FitResult& fit);

}  // namespace sing
