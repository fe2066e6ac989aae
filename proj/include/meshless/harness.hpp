#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "meshless/cloud.hpp"
#include "meshless/model.hpp"
#include "meshless/scheme.hpp"
#include "meshless/stencil.hpp"

namespace meshless {

// ---------------------------------------------------------------------------
// ODE reduction

struct OdeResult {
    double k = 0.0;
    double A = 0.0;
};

/// Classical RK4 on k' = A f(k) - delta k, A' = g A. Evaluates f with its
/// own arithmetic so it shares no code path with the GFD scheme.
OdeResult ode_oracle(const ModelParams& params, double k0, double A0, double g_const,
                     double t_final, double dt);

// ---------------------------------------------------------------------------
// Stencil accuracy

using ScalarField = std::function<double(Point)>;
/// Exact derivatives in the Derivatives slot layout for the cloud dimension.
using DerivativeField = std::function<Coeffs(Point)>;

/// Max |GFD - exact| per derivative slot over interior nodes.
Coeffs max_derivative_error(const NodeCloud& cloud, const StencilTable& table,
                            const ScalarField& u, const DerivativeField& exact);

struct ExactnessEntry {
    std::string monomial;
    std::string derivative;
    double max_error = 0.0;
};

struct ExactnessReport {
    std::vector<ExactnessEntry> entries;
    double max_error = 0.0;
};

/// Every monomial of total degree <= 2, every derivative, interior nodes.
ExactnessReport polynomial_exactness(const NodeCloud& cloud, const StarConfig& config);
ExactnessReport polynomial_exactness(const NodeCloud& cloud, const StencilTable& table);

struct FdEquivalence {
    double first_derivative = 0.0;   // max relative difference, u_x row (1D)
    double second_derivative = 0.0;  // u_xx row (1D) or Laplacian row (2D)
    double max_relative_difference = 0.0;
};

/**
 * Compares GFD rows on a regular grid with closed-form finite differences.
 * 1D: two-node symmetric stars against central differences. 2D: the
 * four-neighbor star cannot resolve u_xy, so the 8-node star is used and its
 * Laplacian row is compared with the 9-point family member fixed by the
 * axis/diagonal weight ratio (the isotropic 9-point stencil for d^-3).
 */
FdEquivalence fd_equivalence(const NodeCloud& grid, const WeightSpec& weight = {});

// ---------------------------------------------------------------------------
// Convergence studies

/// Manufactured diffusion-reaction problem for the k equation
///   k_t = Lap k - delta k + F,  A = 1,  f = 0,  chi = 0,
/// with F chosen so that u = e^{-t} cos(pi x / L) [cos(pi y / L)] is exact.
struct ManufacturedProblem {
    double delta = 0.5;
    double t_final = 0.5;
    double dt_factor = 0.2;  // dt = dt_factor * h^2
    StarConfig star{};
};

double manufactured_solution(const ManufacturedProblem& prob, int dim, double length, Point x,
                             double t);

struct ConvergenceLevel {
    double h = 0.0;
    double error = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceLevel> levels;  // decreasing h
    double observed_order = 0.0;
    std::vector<std::string> warnings;
};

/// Least-squares slope of log(error) against log(h).
double observed_order(const std::vector<ConvergenceLevel>& levels);

/// Nominal spacing L / (n - 1), n = nodes per axis.
double nominal_spacing(const NodeCloud& cloud);

/// Max-norm error at t_final for one cloud and time step.
double manufactured_error(const ManufacturedProblem& prob, const NodeCloud& cloud, double dt);

/// Requires >= 3 levels. Levels that diverge are excluded with a warning.
ConvergenceResult convergence_study(const ManufacturedProblem& prob,
                                    const std::vector<NodeCloud>& levels);

/// Temporal refinement on one cloud: error of each dt against a run at
/// reference_dt. `levels[i].h` holds the dt.
ConvergenceResult temporal_study(const ManufacturedProblem& prob, const NodeCloud& cloud,
                                 const std::vector<double>& dts, double reference_dt);

void write_convergence_csv(const ConvergenceResult& r, std::ostream& out);

// ---------------------------------------------------------------------------

/// Max |GFD normal derivative| of a field over the boundary nodes.
double max_normal_derivative(const NeumannProjector& neumann, std::span<const double> field);

}  // namespace meshless
