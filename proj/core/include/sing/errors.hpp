#pragma once

#include <stdexcept>
#include <string>

namespace sing {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& what) : Error(what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct DegenerateColumn : Error {
    explicit DegenerateColumn(const std::string& what) : Error(what) {}
};

struct UnsupportedDerivativeOrder : Error {
    explicit UnsupportedDerivativeOrder(const std::string& what) : Error(what) {}
};

struct NumericalBlowup : Error {
    explicit NumericalBlowup(const std::string& what) : Error(what) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error(what) {}
};

// Command-line usage problems; mapped to exit code 1 by the tool.
struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace sing
