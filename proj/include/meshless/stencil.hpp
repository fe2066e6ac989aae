#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "meshless/cloud.hpp"

namespace meshless {

enum class WeightKind { potential, exponential };

/// Moving-least-squares weight. potential: d^-exponent (exponent 0 gives unit
/// weights); exponential: exp(-shape * (d / star_radius)^2).
struct WeightSpec {
    WeightKind kind = WeightKind::potential;
    double exponent = 3.0;
    double shape = 1.0;
};

double weight(double distance, const WeightSpec& spec, double star_radius);

/// Derivative slots. 1D uses {ux, uxx} packed into slots 0 and 1; 2D uses
/// all five in the Taylor order (ux, uy, uxx, uyy, uxy).
inline constexpr std::size_t kMaxDerivs = 5;
using Coeffs = std::array<double, kMaxDerivs>;

constexpr std::size_t deriv_count(int dim) { return dim == 1 ? 2 : 5; }

/// Derivative values at a star center.
struct Derivatives {
    int dim = 1;
    Coeffs v{};

    double ux() const { return v[0]; }
    double uy() const { return dim == 2 ? v[1] : 0.0; }
    double uxx() const { return dim == 1 ? v[1] : v[2]; }
    double uyy() const { return dim == 2 ? v[3] : 0.0; }
    double uxy() const { return dim == 2 ? v[4] : 0.0; }
    double laplacian() const { return dim == 1 ? v[1] : v[2] + v[3]; }
};

/// Symmetric moment matrix in radius-normalized offsets.
struct MomentMatrix {
    std::size_t n = 0;
    std::array<std::array<double, kMaxDerivs>, kMaxDerivs> a{};
    double radius = 1.0;  // offsets were divided by this before assembly
};

/**
 * Stencil: GFD coefficients of one star.
 *
 * A derivative at the center is -center[j] * U0 + sum_i neighbors[i][j] * Ui,
 * with center[j] == sum_i neighbors[i][j]. The Laplacian row is stored
 * separately (uxx row in 1D; uxx + uyy rows in 2D).
 */
struct Stencil {
    int dim = 1;
    Coeffs center{};
    std::vector<Coeffs> neighbors;
    double laplacian_center = 0.0;
    std::vector<double> laplacian_neighbors;

    std::size_t size() const noexcept { return neighbors.size(); }
};

MomentMatrix assemble_moment_matrix(const NodeCloud& cloud, const Star& star,
                                     const WeightSpec& spec);
MomentMatrix assemble_moment_matrix(int dim, const Star& star, const WeightSpec& spec);

/// Throws DegenerateStar when the Cholesky factorization fails or the
/// reciprocal 1-norm condition number falls below kMinRcond.
Stencil compute_stencil(int dim, const Star& star, const WeightSpec& spec);

inline constexpr double kMinRcond = 1e-12;

/// Derivatives from nodal values; neighbor_values follow star order.
Derivatives apply(const Stencil& stencil, double center_value,
                  std::span<const double> neighbor_values);

/// Gathers values of a full nodal field over a star and applies the stencil.
Derivatives apply(const Stencil& stencil, const Star& star, std::span<const double> field);

/**
 * StencilTable: one (Star, Stencil) per node, plus a flattened copy of the
 * coefficients (stride s) used by the time-stepping kernels.
 */
struct StencilTable {
    int dim = 1;
    std::size_t s = 0;
    std::vector<Star> stars;
    std::vector<Stencil> stencils;

    std::vector<std::size_t> nbr;  // N*s neighbor indices
    std::vector<double> cx, cy, clap;
    std::vector<double> cx0, cy0, clap0;

    std::size_t size() const noexcept { return stars.size(); }
};

struct StarConfig {
    std::size_t s = 2;
    StarCriterion criterion = StarCriterion::distance;
    WeightSpec weight{};
};

/// OpenMP over nodes. On failure the error of the lowest failing node is
/// rethrown, so the outcome does not depend on thread scheduling.
StencilTable build_all_stencils(const NodeCloud& cloud, const StarConfig& config);

/// Serial reference; bit-identical to build_all_stencils.
StencilTable build_all_stencils_reference(const NodeCloud& cloud, const StarConfig& config);

/// Debug dump: `node,deriv,coeff_center,coeff_1..coeff_s`. coeff_center is
/// the multiplier of U0 (that is, -m0j), so every row sums to zero.
void write_stencil_dump(const StencilTable& table, const std::filesystem::path& path);

}  // namespace meshless
