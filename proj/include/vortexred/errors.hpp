#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vortexred {

/// Two vortices share a position; the energy and velocity field are singular there.
class CoincidentVortices : public std::runtime_error {
public:
    CoincidentVortices(std::size_t first, std::size_t second)
        : std::runtime_error("coincident vortices " + std::to_string(first + 1) + " and " +
                             std::to_string(second + 1)),
          first_(first),
          second_(second) {}

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

/// A configuration does not lie on the momentum level set the reduction is built for.
class MomentumMismatch : public std::runtime_error {
public:
    explicit MomentumMismatch(double residual)
        : std::runtime_error("configuration is off the momentum level set (residual " +
                             std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// After translating the central vortex to the origin the outer vortices are not centred.
class CentroidResidual : public std::runtime_error {
public:
    explicit CentroidResidual(double residual)
        : std::runtime_error("outer vortex centroid residual " + std::to_string(residual)),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The partial section (v1 = 0) degenerates at the north pole w3 = 1.
class NearNorthPole : public std::domain_error {
public:
    explicit NearNorthPole(double w3)
        : std::domain_error("section undefined near the north pole (w3 = " + std::to_string(w3) +
                            "); use section_any"),
          w3_(w3) {}

    double w3() const noexcept { return w3_; }

private:
    double w3_;
};

/// The reduced vector field was evaluated too close to a collision state.
class NearCollision : public std::domain_error {
public:
    explicit NearCollision(double min_l)
        : std::domain_error("reduced point within collision neighbourhood (min l = " +
                            std::to_string(min_l) + ")"),
          min_l_(min_l) {}

    double min_l() const noexcept { return min_l_; }

private:
    double min_l_;
};

/// An invariant-polynomial point is off the semi-algebraic quotient set.
class RelationViolation : public std::domain_error {
public:
    explicit RelationViolation(double residual)
        : std::domain_error("invariant point violates the quotient relation (residual " +
                            std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Adaptive step control could not make progress.
class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vortexred
