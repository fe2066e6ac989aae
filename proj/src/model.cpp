#include "meshless/model.hpp"

#include <cmath>
#include <string>

#include "meshless/errors.hpp"

namespace meshless {

void validate(const ModelParams& m) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("model: ") + what);
    };
    require(m.alpha1 >= 0.0 && std::isfinite(m.alpha1), "alpha1 must be >= 0");
    require(m.alpha2 >= 0.0 && std::isfinite(m.alpha2), "alpha2 must be >= 0");
    require(m.p > 0.0 && std::isfinite(m.p), "p must be > 0");
    require(m.q > 0.0 && std::isfinite(m.q), "q must be > 0");
    require(m.delta >= 0.0 && std::isfinite(m.delta), "delta must be >= 0");
    require(std::isfinite(m.chi), "chi must be finite");
    require(m.tech_diffusion >= 0.0 && std::isfinite(m.tech_diffusion),
            "tech_diffusion must be >= 0");
    require(std::isfinite(m.g.level), "g level must be finite");
    if (m.g.kind == GrowthKind::gaussian) require(m.g.sigma > 0.0, "gaussian g needs sigma > 0");
}

double production(double k, const ModelParams& m) {
    if (k < 0.0) throw DomainError("production: capital must be nonnegative, got " + std::to_string(k));
    if (k == 0.0) return 0.0;
    return m.alpha1 * std::pow(k, m.p) / (1.0 + m.alpha2 * std::pow(k, m.q));
}

double production_clamped(double k, const ModelParams& m) {
    return production(k > 0.0 ? k : 0.0, m);
}

double production_derivative(double k, const ModelParams& m) {
    if (k < 0.0)
        throw DomainError("production_derivative: capital must be nonnegative, got " +
                          std::to_string(k));
    if (k == 0.0) {
        if (m.p < 1.0) throw DomainError("production_derivative: singular at k=0 for p<1");
        return m.p == 1.0 ? m.alpha1 : 0.0;
    }
    const double kq = std::pow(k, m.q);
    const double den = 1.0 + m.alpha2 * kq;
    return m.alpha1 * std::pow(k, m.p - 1.0) * (m.p + m.alpha2 * (m.p - m.q) * kq) / (den * den);
}

double tech_rate(Point x, const GrowthSpec& g) {
    if (g.kind == GrowthKind::constant) return g.level;
    const double dx = x.x - g.center.x;
    const double dy = x.y - g.center.y;
    return g.level * std::exp(-(dx * dx + dy * dy) / (2.0 * g.sigma * g.sigma));
}

}  // namespace meshless
