#pragma once

#include <utility>
#include <vector>

namespace sing {

// Per-trial error counts at one sample size.
struct ErrorSeries {
    std::vector<double> values;
    double n_label = 0.0;  // sample size the trials used
};

// Mean and Student-t confidence half-width at the given level (two-sided).
// Quantiles are tabulated for df <= 200 and fall back to the normal quantile
// beyond. Throws InsufficientData for fewer than 2 values.
std::pair<double, double> mean_ci(const ErrorSeries& series, double level = 0.95);

// Two-sided upper quantile helper, exposed for verification against tables.
double student_t_quantile(double prob, int df);

}  // namespace sing
