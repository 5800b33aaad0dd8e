#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sing {

// n x d table of real observations, row-major; the sole statistical input.
struct SampleMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values;

    SampleMatrix() = default;
    SampleMatrix(std::size_t rows, std::size_t cols)
        : n(rows), d(cols), values(rows * cols, 0.0) {}

    double& operator()(std::size_t l, std::size_t col) { return values[l * d + col]; }
    double operator()(std::size_t l, std::size_t col) const { return values[l * d + col]; }
    const double* row(std::size_t l) const { return values.data() + l * d; }
    double* row(std::size_t l) { return values.data() + l * d; }
};

// Plain comma-separated doubles, one sample per row, no header, full double
// precision on write.
void write_samples_csv(const std::string& path, const SampleMatrix& m);
SampleMatrix read_samples_csv(const std::string& path);

}  // namespace sing
