#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sing/graph.hpp"
#include "sing/optimize.hpp"
#include "sing/sample_matrix.hpp"
#include "sing/score.hpp"

namespace sing {

struct SingConfig {
    int beta = 1;               // maximum total degree of the map
    double c = 1.0;             // threshold scaling in f(n) = c sqrt(log n)
    double tau0 = 0.0;          // constant threshold offset
    int max_iterations = 10;    // safety cap on the iterative loop
    int quadrature_order = 32;  // monotone-part integral
    double epsilon = 1e-2;      // floor in the monotone part g(x) = x^2 + epsilon; this
                                // bounds the slope sensitivity of the score (the spike
                                // scale goes like 1/sqrt(epsilon)) so near-singular
                                // conditionals keep finite, comparable thresholds
    std::uint64_t seed = 0;     // carried for reporting; the driver itself draws nothing
};

struct Standardization {
    Vector mean;
    Vector std;
};

// Subtracts the empirical mean and divides by the empirical standard deviation
// (1/n moments) per column. Throws DegenerateColumn below std 1e-12.
std::pair<SampleMatrix, Standardization> standardize(const SampleMatrix& data);

// One iteration's record. Edge sets and score matrices are reported in the
// ORIGINAL variable labels; the ordering and sparsity pattern describe the
// permuted frame the map was fitted in.
struct SingIteration {
    int t = 1;
    Ordering ordering;
    SparsityPattern pattern;
    ScoreMatrix score;
    Matrix tau;
    UndirectedGraph edges;
    std::size_t edge_count = 0;
    double fit_objective = 0.0;
    std::vector<int> fit_iterations;
    std::vector<char> fit_converged;
};

enum class StopReason { edge_count_non_decreasing, max_iterations };

struct SingReport {
    SingConfig config;
    Standardization standardization;
    std::vector<SingIteration> iterations;
    UndirectedGraph final_edges;
    StopReason stopped_reason = StopReason::max_iterations;
};

// Single pass: dense triangular fit, score, variance threshold; equals the
// first iteration of the iterative driver.
std::pair<UndirectedGraph, ScoreMatrix> n_sing(const SampleMatrix& data, const SingConfig& cfg);

// Iterative driver: refit under the sparsity bound induced by the current
// edge estimate (after a fill-reducing reordering) until the edge count stops
// decreasing. On a strict increase the previous iteration's graph is returned;
// on a tie the current one.
SingReport run_sing(const SampleMatrix& data, const SingConfig& cfg);

std::string stop_reason_name(StopReason reason);
std::string report_to_json(const SingReport& report);

}  // namespace sing
