#include "meshless/stability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "meshless/errors.hpp"

namespace meshless {

namespace {

struct FPrimeRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Sampled extremes of f' on [k_floor, k_max] (plus k=0 when f' is regular there).
FPrimeRange fprime_range(double k_max, const ModelParams& params) {
    const double top = std::max(k_max, 1e-8);
    const double k_floor = 1e-8 * std::max(top, 1.0);
    FPrimeRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto take = [&](double k) {
        const double v = production_derivative(k, params);
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
    };
    if (params.p >= 1.0) take(0.0);
    constexpr int samples = 1024;
    if (top <= k_floor) {
        take(k_floor);
        return r;
    }
    const double ratio = std::log(top / k_floor);
    for (int i = 0; i <= samples; ++i)
        take(k_floor * std::exp(ratio * static_cast<double>(i) / samples));
    return r;
}

double max_of(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

PhiTerms phi_terms_impl(const Stencil& st, const Star& star, std::span<const double> k,
                        std::span<const double> A, const ModelParams& params,
                        const StabilityOptions& options, const FPrimeRange* range) {
    const std::size_t c = star.center;
    const double A0 = A[c];
    const double k0 = k[c];
    const double chi = params.chi;
    const bool two_d = st.dim == 2;

    // f'(xi) proxy. Two values: the one that makes phi1 smallest (worst for
    // the positivity condition) and the one that makes it largest (worst for
    // the step bound); they coincide unless the conservative mode is active.
    double fp_margin = 0.0;
    double fp_dt = 0.0;
    bool fallback = false;
    const bool singular = k0 <= 0.0 && params.p < 1.0;
    if (options.proxy == FPrimeProxy::current && !singular) {
        fp_margin = fp_dt = production_derivative(std::max(k0, 0.0), params);
    } else {
        FPrimeRange local;
        if (!range) {
            local = fprime_range(max_of(k), params);
            range = &local;
        }
        if (options.proxy == FPrimeProxy::current) {
            // one-sided sup of |f'| stands in for the singular value at 0
            fp_margin = fp_dt = std::max(std::abs(range->lo), std::abs(range->hi));
            fallback = true;
        } else {
            // phi1 contains -A0 f'; A0 >= 0 in practice but keep the sign honest
            fp_margin = A0 >= 0.0 ? range->hi : range->lo;
            fp_dt = A0 >= 0.0 ? range->lo : range->hi;
        }
    }

    double sum_mx_A = 0.0, sum_my_A = 0.0, sum_lap_A = 0.0;
    double abs_mx = 0.0, abs_my = 0.0, abs_lap = 0.0;
    for (std::size_t i = 0; i < star.size(); ++i) {
        const double Ai = A[star.neighbors[i]];
        const double mx = st.neighbors[i][0];
        sum_mx_A += mx * Ai;
        abs_mx += std::abs(mx);
        sum_lap_A += st.laplacian_neighbors[i] * Ai;
        abs_lap += std::abs(st.laplacian_neighbors[i]);
        if (two_d) {
            const double my = st.neighbors[i][1];
            sum_my_A += my * Ai;
            abs_my += std::abs(my);
        }
    }
    const double m01 = st.center[0];
    const double m02 = two_d ? st.center[1] : 0.0;
    const double m00 = st.laplacian_center;

    // Coefficient of the center error inside |1 - dt(m00 + phi1)|, without
    // the f' term. The last bracket is the GFD Laplacian of A.
    const double rest = params.delta + chi * m01 * m01 * A0 + chi * m02 * m02 * A0 +
                        chi * m01 * sum_mx_A + chi * m02 * sum_my_A -
                        chi * (-m00 * A0 + sum_lap_A);

    PhiTerms out;
    out.phi1 = rest - A0 * fp_margin;
    out.phi1_for_dt = rest - A0 * fp_dt;
    out.phi2 = abs_lap + std::abs(chi * m01 * A0) * abs_mx + std::abs(chi * m02 * A0) * abs_my +
               std::abs(chi) * abs_mx * std::abs(sum_mx_A) +
               std::abs(chi) * abs_my * std::abs(sum_my_A);
    out.fprime_fallback = fallback;
    return out;
}

}  // namespace

PhiTerms phi_terms(const Stencil& stencil, const Star& star, std::span<const double> k,
                   std::span<const double> A, const ModelParams& params,
                   const StabilityOptions& options) {
    return phi_terms_impl(stencil, star, k, A, params, options, nullptr);
}

ConditionCheck check_condition(const Stencil& stencil, const Star& star,
                               std::span<const double> k, std::span<const double> A,
                               const ModelParams& params, const StabilityOptions& options) {
    const PhiTerms phi = phi_terms(stencil, star, k, A, params, options);
    ConditionCheck c;
    c.margin = stencil.laplacian_center + phi.phi1 - phi.phi2;
    c.ok = c.margin > 0.0;
    return c;
}

StabilityReport dt_bound(const NodeCloud& cloud, const StencilTable& table, const State& state,
                         const ModelParams& params, const StabilityOptions& options) {
    if (state.k.size() != cloud.size() || state.A.size() != cloud.size() ||
        table.size() != cloud.size())
        throw InvalidArgument("dt_bound: state, table and cloud sizes differ");
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!std::isfinite(state.k[i]) || !std::isfinite(state.A[i]))
            throw InvalidArgument("dt_bound: non-finite field value at node " + std::to_string(i));
    }

    const bool need_range = options.proxy == FPrimeProxy::conservative || params.p < 1.0;
    FPrimeRange range;
    if (need_range) range = fprime_range(max_of(state.k), params);

    StabilityReport rep;
    rep.global_dt = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < cloud.size(); ++p) {
        if (cloud.is_boundary(p)) continue;
        const Stencil& st = table.stencils[p];
        const PhiTerms phi = phi_terms_impl(st, table.stars[p], state.k, state.A, params, options,
                                            need_range ? &range : nullptr);
        StarStability s;
        s.node = p;
        s.phi1 = phi.phi1;
        s.phi2 = phi.phi2;
        s.margin = st.laplacian_center + phi.phi1 - phi.phi2;
        s.condition_ok = s.margin > 0.0;
        const double den = st.laplacian_center + phi.phi1_for_dt + phi.phi2;
        if (den > 0.0) {
            s.dt_max = 2.0 / den;
            rep.global_dt = std::min(rep.global_dt, *s.dt_max);
        }
        if (!s.condition_ok) rep.violations.push_back(p);
        if (phi.fprime_fallback) ++rep.fprime_fallbacks;
        rep.per_star.push_back(s);
    }
    if (!std::isfinite(rep.global_dt))
        throw NoAdmissibleDt("no interior star admits a positive time step");
    return rep;
}

void write_stability_report(const StabilityReport& report, std::ostream& out) {
    out << "node,phi1,phi2,margin,dt_max\n" << std::setprecision(17);
    for (const StarStability& s : report.per_star) {
        out << s.node << ',' << s.phi1 << ',' << s.phi2 << ',' << s.margin << ',';
        if (s.dt_max) out << *s.dt_max;
        out << '\n';
    }
}

void write_stability_report(const StabilityReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_stability_report(report, out);
}

}  // namespace meshless
