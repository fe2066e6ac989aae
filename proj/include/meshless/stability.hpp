#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "meshless/cloud.hpp"
#include "meshless/model.hpp"
#include "meshless/state.hpp"
#include "meshless/stencil.hpp"

namespace meshless {

/// How f'(xi) is replaced by a computable value. The mean-value point xi
/// lies between the exact and the numerical capital and is unknown.
enum class FPrimeProxy {
    current,       // f' at the numerical center value
    conservative,  // extremes of f' over [k_floor, max k]
};

struct StabilityOptions {
    FPrimeProxy proxy = FPrimeProxy::current;
};

/// Per-star aggregates of the explicit error recurrence
/// e^{n+1} <= e^n |1 - dt (m00 + phi1)| + dt phi2.
struct PhiTerms {
    double phi1 = 0.0;
    double phi2 = 0.0;
    // phi1 with the f' extreme that minimizes the step bound; equals phi1
    // except in conservative mode.
    double phi1_for_dt = 0.0;
    bool fprime_fallback = false;
};

PhiTerms phi_terms(const Stencil& stencil, const Star& star, std::span<const double> k,
                   std::span<const double> A, const ModelParams& params,
                   const StabilityOptions& options = {});

struct ConditionCheck {
    bool ok = false;
    double margin = 0.0;  // m00 + phi1 - phi2
};

ConditionCheck check_condition(const Stencil& stencil, const Star& star,
                               std::span<const double> k, std::span<const double> A,
                               const ModelParams& params, const StabilityOptions& options = {});

struct StarStability {
    std::size_t node = 0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    std::optional<double> dt_max;  // 2/(m00 + phi1 + phi2) when the denominator is positive
    bool condition_ok = false;
    double margin = 0.0;
};

struct StabilityReport {
    std::vector<StarStability> per_star;
    double global_dt = 0.0;
    std::vector<std::size_t> violations;
    std::size_t fprime_fallbacks = 0;
};

/**
 * Per-star step bounds over the interior nodes (boundary values are set by
 * the Neumann projection, not by the explicit update) and their minimum.
 *
 * global_dt is the minimum over every star with a finite bound; stars that
 * fail the positivity condition are listed in `violations` rather than
 * dropped, so the heat-equation limit (margin exactly 0) still yields h^2/2.
 * Throws NoAdmissibleDt when no star has a finite bound.
 */
StabilityReport dt_bound(const NodeCloud& cloud, const StencilTable& table, const State& state,
                         const ModelParams& params, const StabilityOptions& options = {});

/// CSV `node,phi1,phi2,margin,dt_max` (dt_max empty when undefined).
void write_stability_report(const StabilityReport& report, std::ostream& out);
void write_stability_report(const StabilityReport& report, const std::filesystem::path& path);

}  // namespace meshless
