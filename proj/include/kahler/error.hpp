#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace kahler {

/// Base class of every error raised by the library.
class KahlerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public KahlerError {
public:
    using KahlerError::KahlerError;
};

class InvalidArgument : public KahlerError {
public:
    using KahlerError::KahlerError;
};

/// A matrix that was required to be Hermitian positive-definite is not.
class NotPositiveDefinite : public KahlerError {
public:
    using KahlerError::KahlerError;
};

/// A metric field lost positivity at some sample. `point` is the linear grid
/// index (torus) or the sample index (chart); `min_eigenvalue` is the offending
/// smallest eigenvalue.
class PositivityLoss : public KahlerError {
public:
    PositivityLoss(std::size_t point, double min_eigenvalue, const std::string& context = {})
        : KahlerError("positivity lost at point " + std::to_string(point) +
                      " (min eigenvalue " + std::to_string(min_eigenvalue) + ")" +
                      (context.empty() ? std::string{} : ": " + context)),
          point_(point),
          min_eigenvalue_(min_eigenvalue),
          context_(context) {}

    std::size_t point() const noexcept { return point_; }
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }
    const std::string& context() const noexcept { return context_; }

private:
    std::size_t point_;
    double min_eigenvalue_;
    std::string context_;
};

inline std::string format_residual(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r);
    return buf;
}

class NonConvergence : public KahlerError {
public:
    NonConvergence(const std::string& what, int iterations, double residual)
        : KahlerError(what + " (after " + std::to_string(iterations) +
                      " iterations, residual " + format_residual(residual) + ")"),
          iterations_(iterations),
          residual_(residual),
          context_(what) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }
    const std::string& context() const noexcept { return context_; }

private:
    int iterations_;
    double residual_;
    std::string context_;
};

class OutOfTrustedRegion : public KahlerError {
public:
    using KahlerError::KahlerError;
};

}  // namespace kahler
