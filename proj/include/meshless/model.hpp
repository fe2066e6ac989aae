#pragma once

#include "meshless/cloud.hpp"

namespace meshless {

enum class GrowthKind { constant, gaussian };

/// Technology growth-rate field g(x), constant in time.
struct GrowthSpec {
    GrowthKind kind = GrowthKind::constant;
    double level = 0.0;   // constant rate, or Gaussian amplitude
    Point center{};
    double sigma = 1.0;
};

/**
 * Economic ingredients of the capital/technology system.
 *
 * f(k) = alpha1 k^p / (1 + alpha2 k^q). alpha1 = 0 is accepted and gives
 * f = 0, the reduction used by the heat-equation and pure-decay checks.
 */
struct ModelParams {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double p = 2.0;
    double q = 3.0;
    double delta = 0.05;
    double chi = 0.0;
    double tech_diffusion = 0.0;
    GrowthSpec g{};
};

/// Throws ValidationError on a range violation.
void validate(const ModelParams& params);

/// f(k); throws DomainError for k < 0.
double production(double k, const ModelParams& params);

/// f(max(k, 0)); the time-stepping path uses this so transient undershoot
/// does not abort a run. Callers count the clamps.
double production_clamped(double k, const ModelParams& params);

/// f'(k) = alpha1 k^(p-1) [p + alpha2 (p-q) k^q] / (1 + alpha2 k^q)^2.
/// Throws DomainError for k < 0, or k == 0 with p < 1.
double production_derivative(double k, const ModelParams& params);

double tech_rate(Point position, const GrowthSpec& spec);

}  // namespace meshless
