#pragma once

#include "sbridge/numgrid.hpp"

#include <cstddef>
#include <optional>

namespace sbridge {

/// v = -2 nu grad ln theta. Throws PositivityError unless theta > 0 everywhere.
ScalarField hopf_cole_forward(const ScalarField& theta, double nu);

/// theta with theta(anchor) = 1 and -2 nu grad ln theta = v at every interior node:
/// theta = exp(-Phi / (2 nu)) where Phi integrates v exactly against the
/// gradient stencil (so the round trip is exact to rounding).
ScalarField hopf_cole_inverse(const ScalarField& v, double nu, std::size_t anchor);

/// Max over interior nodes and interior slices of |d_t v + v grad v - nu Laplace v - F|.
/// Nodes where `density` (when given) is below 1e-12 are excluded.
double burgers_residual(const FieldSeries& v, double nu, const FieldSeries& force,
                        const FieldSeries* density = nullptr);

struct CompatibilityPotential {
    /// c = d_t Phi + (b^2 / (2 nu) + grad b) / 2 on every slice.
    FieldSeries c;
    /// Phi with b = 2 nu grad Phi and Phi(anchor) = 0 on every slice.
    FieldSeries phi;
    std::size_t anchor;
};

/// Potential compatible with the gradient drift b. The anchor defaults to the grid
/// centre; moving it shifts c by a spatially constant function of time.
/// d_t Phi uses the fourth-order stencil (at least five slices).
CompatibilityPotential compatibility_potential(const FieldSeries& b, double nu,
                                               std::optional<std::size_t> anchor = std::nullopt);

/// F = 2 nu grad c.
FieldSeries force_from_potential(const FieldSeries& c, double nu);

/// max - min of a - b over interior nodes where `density` >= 1e-12 (all interior nodes if null).
double spatial_spread(const ScalarField& a, const ScalarField& b, const ScalarField* density = nullptr);

} // namespace sbridge
