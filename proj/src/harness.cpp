#include "meshless/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "meshless/errors.hpp"

namespace meshless {

OdeResult ode_oracle(const ModelParams& params, double k0, double A0, double g_const,
                     double t_final, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("ode_oracle: dt must be positive");
    const double a1 = params.alpha1, a2 = params.alpha2, p = params.p, q = params.q;
    const double delta = params.delta;
    auto f = [&](double k) {
        if (k <= 0.0) return 0.0;
        return a1 * std::pow(k, p) / (1.0 + a2 * std::pow(k, q));
    };
    auto rhs = [&](double k, double A, double& dk, double& dA) {
        dk = A * f(k) - delta * k;
        dA = g_const * A;
    };

    double k = k0, A = A0, t = 0.0;
    const auto n = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
    for (std::size_t i = 0; i < n; ++i) {
        const double h = std::min(dt, t_final - t);
        double k1, a1s, k2, a2s, k3, a3s, k4, a4s;
        rhs(k, A, k1, a1s);
        rhs(k + 0.5 * h * k1, A + 0.5 * h * a1s, k2, a2s);
        rhs(k + 0.5 * h * k2, A + 0.5 * h * a2s, k3, a3s);
        rhs(k + h * k3, A + h * a3s, k4, a4s);
        k += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        A += h / 6.0 * (a1s + 2.0 * a2s + 2.0 * a3s + a4s);
        t += h;
        if (!std::isfinite(k) || !std::isfinite(A))
            throw DivergenceError(0, t, "ode oracle produced a non-finite state");
    }
    return {k, A};
}

// ---------------------------------------------------------------------------

Coeffs max_derivative_error(const NodeCloud& cloud, const StencilTable& table,
                            const ScalarField& u, const DerivativeField& exact) {
    std::vector<double> field(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) field[i] = u(cloud.positions[i]);
    Coeffs err{};
    const std::size_t nd = deriv_count(cloud.dim);
    for (std::size_t p = 0; p < cloud.size(); ++p) {
        if (cloud.is_boundary(p)) continue;
        const Derivatives d = apply(table.stencils[p], table.stars[p], field);
        const Coeffs ex = exact(cloud.positions[p]);
        for (std::size_t j = 0; j < nd; ++j) err[j] = std::max(err[j], std::abs(d.v[j] - ex[j]));
    }
    return err;
}

namespace {

struct Monomial {
    const char* name;
    ScalarField u;
    DerivativeField d1;  // 1D slots
    DerivativeField d2;  // 2D slots
};

std::vector<Monomial> quadratic_monomials(int dim) {
    std::vector<Monomial> m{
        {"1", [](Point) { return 1.0; }, [](Point) { return Coeffs{}; },
         [](Point) { return Coeffs{}; }},
        {"x", [](Point p) { return p.x; }, [](Point) { return Coeffs{1, 0}; },
         [](Point) { return Coeffs{1, 0, 0, 0, 0}; }},
        {"x^2", [](Point p) { return p.x * p.x; }, [](Point p) { return Coeffs{2 * p.x, 2}; },
         [](Point p) { return Coeffs{2 * p.x, 0, 2, 0, 0}; }},
    };
    if (dim == 2) {
        m.push_back({"y", [](Point p) { return p.y; }, nullptr,
                     [](Point) { return Coeffs{0, 1, 0, 0, 0}; }});
        m.push_back({"xy", [](Point p) { return p.x * p.y; }, nullptr,
                     [](Point p) { return Coeffs{p.y, p.x, 0, 0, 1}; }});
        m.push_back({"y^2", [](Point p) { return p.y * p.y; }, nullptr,
                     [](Point p) { return Coeffs{0, 2 * p.y, 0, 2, 0}; }});
    }
    return m;
}

}  // namespace

ExactnessReport polynomial_exactness(const NodeCloud& cloud, const StencilTable& table) {
    static constexpr const char* names_1d[] = {"ux", "uxx"};
    static constexpr const char* names_2d[] = {"ux", "uy", "uxx", "uyy", "uxy"};
    ExactnessReport rep;
    for (const Monomial& m : quadratic_monomials(cloud.dim)) {
        const Coeffs err =
            max_derivative_error(cloud, table, m.u, cloud.dim == 1 ? m.d1 : m.d2);
        for (std::size_t j = 0; j < deriv_count(cloud.dim); ++j) {
            rep.entries.push_back(
                {m.name, cloud.dim == 1 ? names_1d[j] : names_2d[j], err[j]});
            rep.max_error = std::max(rep.max_error, err[j]);
        }
    }
    return rep;
}

ExactnessReport polynomial_exactness(const NodeCloud& cloud, const StarConfig& config) {
    return polynomial_exactness(cloud, build_all_stencils(cloud, config));
}

double nominal_spacing(const NodeCloud& cloud) {
    const double n = cloud.dim == 1 ? static_cast<double>(cloud.size())
                                    : std::round(std::sqrt(static_cast<double>(cloud.size())));
    return cloud.length / (n - 1.0);
}

namespace {

double rel_diff(double got, double want, double scale) { return std::abs(got - want) / scale; }

}  // namespace

FdEquivalence fd_equivalence(const NodeCloud& grid, const WeightSpec& weight_spec) {
    const double h = nominal_spacing(grid);
    FdEquivalence out;
    if (grid.dim == 1) {
        const StencilTable t = build_all_stencils(grid, {2, StarCriterion::distance, weight_spec});
        for (std::size_t p = 0; p < grid.size(); ++p) {
            if (grid.is_boundary(p)) continue;
            const Stencil& st = t.stencils[p];
            const Star& star = t.stars[p];
            const double sx = 1.0 / (2.0 * h), sxx = 1.0 / (h * h);
            // ux = (u_{+} - u_{-}) / 2h, center weight 0; uxx = (u_{+} - 2u0 + u_{-}) / h^2
            out.first_derivative = std::max(out.first_derivative, rel_diff(st.center[0], 0.0, sx));
            out.second_derivative =
                std::max(out.second_derivative, rel_diff(st.center[1], 2.0 * sxx, sxx));
            for (std::size_t i = 0; i < star.size(); ++i) {
                const double sign = star.offsets[i].x > 0.0 ? 1.0 : -1.0;
                out.first_derivative =
                    std::max(out.first_derivative, rel_diff(st.neighbors[i][0], sign * sx, sx));
                out.second_derivative =
                    std::max(out.second_derivative, rel_diff(st.neighbors[i][1], sxx, sxx));
            }
        }
    } else {
        const StencilTable t = build_all_stencils(grid, {8, StarCriterion::distance, weight_spec});
        // Symmetry decouples the (uxx, uyy) block of the normal equations; its
        // solution gives Lap = (1-theta) * five_point + theta * diagonal_cross
        // with theta = 4 wd^2 / (wa^2 + 4 wd^2).
        const double r = std::sqrt(2.0) * h;
        const double wa = weight(h / r, weight_spec, 1.0);
        const double wd = weight(1.0, weight_spec, 1.0);
        const double theta = 4.0 * wd * wd / (wa * wa + 4.0 * wd * wd);
        const double axis = (1.0 - theta) / (h * h);
        const double diag = theta / (2.0 * h * h);
        const double center = 4.0 * axis + 4.0 * diag;
        const double scale = center;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            if (grid.is_boundary(p)) continue;
            const Stencil& st = t.stencils[p];
            const Star& star = t.stars[p];
            out.second_derivative =
                std::max(out.second_derivative, rel_diff(st.laplacian_center, center, scale));
            for (std::size_t i = 0; i < star.size(); ++i) {
                const bool is_axis = norm(star.offsets[i]) < 1.2 * h;
                out.second_derivative =
                    std::max(out.second_derivative,
                             rel_diff(st.laplacian_neighbors[i], is_axis ? axis : diag, scale));
            }
        }
    }
    out.max_relative_difference = std::max(out.first_derivative, out.second_derivative);
    return out;
}

// ---------------------------------------------------------------------------

double manufactured_solution(const ManufacturedProblem&, int dim, double length, Point x,
                             double t) {
    const double w = std::numbers::pi / length;
    double u = std::exp(-t) * std::cos(w * x.x);
    if (dim == 2) u *= std::cos(w * x.y);
    return u;
}

namespace {

// k at t_final for the manufactured problem; throws DivergenceError.
std::vector<double> manufactured_run(const ManufacturedProblem& prob, const NodeCloud& cloud,
                                     const StencilTable& table, double dt) {
    ModelParams params;
    params.alpha1 = 0.0;
    params.alpha2 = 0.0;
    params.p = 1.0;
    params.q = 1.0;
    params.delta = prob.delta;
    params.chi = 0.0;
    params.tech_diffusion = 0.0;
    params.g = {GrowthKind::constant, 0.0, {}, 1.0};
    const SchemeContext ctx(cloud, table, params);

    const int dim = cloud.dim;
    const double L = cloud.length;
    // F = u_t - Lap u + delta u = u (-1 + dim pi^2/L^2 + delta)
    const double factor = -1.0 + dim * std::numbers::pi * std::numbers::pi / (L * L) + prob.delta;

    State init = uniform_state(cloud.size(), 0.0, 1.0);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        init.k[i] = manufactured_solution(prob, dim, L, cloud.positions[i], 0.0);

    SchemeConfig cfg;
    cfg.dt = dt;
    cfg.t_final = prob.t_final;
    cfg.log_interval = std::numeric_limits<std::size_t>::max();
    const Forcing forcing = [&](double t, std::span<double> out) {
        for (std::size_t i = 0; i < cloud.size(); ++i)
            out[i] = factor * manufactured_solution(prob, dim, L, cloud.positions[i], t);
    };
    Trajectory tr = run(ctx, std::move(init), cfg, forcing);
    if (tr.divergence)
        throw DivergenceError(tr.divergence->node, tr.divergence->time, tr.divergence->message);
    return std::move(tr.final_state.k);
}

}  // namespace

double manufactured_error(const ManufacturedProblem& prob, const NodeCloud& cloud, double dt) {
    const StencilTable table = build_all_stencils(cloud, prob.star);
    const std::vector<double> k = manufactured_run(prob, cloud, table, dt);
    double err = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double ex =
            manufactured_solution(prob, cloud.dim, cloud.length, cloud.positions[i], prob.t_final);
        err = std::max(err, std::abs(k[i] - ex));
    }
    return err;
}

double observed_order(const std::vector<ConvergenceLevel>& levels) {
    if (levels.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(levels.size());
    for (const auto& l : levels) {
        const double x = std::log(l.h), y = std::log(l.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceResult convergence_study(const ManufacturedProblem& prob,
                                    const std::vector<NodeCloud>& levels) {
    if (levels.size() < 3) throw InvalidArgument("convergence_study: need at least 3 levels");
    ConvergenceResult res;
    for (const NodeCloud& cloud : levels) {
        const double h = nominal_spacing(cloud);
        try {
            res.levels.push_back({h, manufactured_error(prob, cloud, prob.dt_factor * h * h)});
        } catch (const DivergenceError& e) {
            res.warnings.push_back("level h=" + std::to_string(h) + " excluded: " + e.what());
        }
    }
    std::sort(res.levels.begin(), res.levels.end(),
              [](const ConvergenceLevel& a, const ConvergenceLevel& b) { return a.h > b.h; });
    res.observed_order = observed_order(res.levels);
    return res;
}

ConvergenceResult temporal_study(const ManufacturedProblem& prob, const NodeCloud& cloud,
                                 const std::vector<double>& dts, double reference_dt) {
    if (dts.size() < 2) throw InvalidArgument("temporal_study: need at least 2 time steps");
    // Same cloud for every run: the spatial error cancels against the reference.
    const StencilTable table = build_all_stencils(cloud, prob.star);
    const std::vector<double> ref = manufactured_run(prob, cloud, table, reference_dt);
    ConvergenceResult res;
    for (double dt : dts) {
        const std::vector<double> k = manufactured_run(prob, cloud, table, dt);
        double err = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) err = std::max(err, std::abs(k[i] - ref[i]));
        res.levels.push_back({dt, err});
    }
    std::sort(res.levels.begin(), res.levels.end(),
              [](const ConvergenceLevel& a, const ConvergenceLevel& b) { return a.h > b.h; });
    res.observed_order = observed_order(res.levels);
    return res;
}

void write_convergence_csv(const ConvergenceResult& r, std::ostream& out) {
    out << "h,error\n" << std::setprecision(17);
    for (const auto& l : r.levels) out << l.h << ',' << l.error << '\n';
    out << "# observed_order," << r.observed_order << '\n';
    for (const auto& w : r.warnings) out << "# warning," << w << '\n';
}

double max_normal_derivative(const NeumannProjector& neumann, std::span<const double> field) {
    double m = 0.0;
    for (std::size_t b : neumann.boundary_nodes())
        m = std::max(m, std::abs(neumann.normal_derivative(b, field)));
    return m;
}

}  // namespace meshless
