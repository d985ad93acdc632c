#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace perfhom {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fields or masks defined on different grids were combined.
class shape_error : public error {
public:
    using error::error;
};

/// Invalid geometry, kernel or problem description.
class validation_error : public error {
public:
    using error::error;
};

/// The requested geometry family has no analytic description.
class unsupported_geometry : public validation_error {
public:
    using validation_error::validation_error;
};

/// An iterative method stopped before reaching its tolerance.
class solver_error : public error {
public:
    solver_error(const std::string& what, double residual, std::size_t iterations)
        : error(what + " (relative residual " + std::to_string(residual) + " after "
                + std::to_string(iterations) + " iterations)")
        , residual_(residual)
        , iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// A limit-equality verdict fell between the "equal" and "unequal" thresholds.
class verdict_gap_error : public error {
public:
    verdict_gap_error(const std::string& what, double distance)
        : error(what + " (relative distance " + std::to_string(distance) + ")")
        , distance_(distance) {}

    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

}  // namespace perfhom
