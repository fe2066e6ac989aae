#include "meshless/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <string>

#include "meshless/errors.hpp"

namespace meshless {

double weight(double distance, const WeightSpec& spec, double star_radius) {
    if (!(distance > 0.0))
        throw InvalidArgument("weight: distance must be positive (the center is not a data point)");
    switch (spec.kind) {
    case WeightKind::potential:
        if (spec.exponent == 0.0) return 1.0;
        return std::pow(distance, -spec.exponent);
    case WeightKind::exponential: {
        if (!(star_radius > 0.0)) throw InvalidArgument("weight: star radius must be positive");
        const double r = distance / star_radius;
        return std::exp(-spec.shape * r * r);
    }
    }
    throw InvalidArgument("weight: unknown kind");
}

namespace {

// Taylor basis c_i of a (normalized) offset.
Coeffs taylor_basis(int dim, Point d) {
    if (dim == 1) return {d.x, 0.5 * d.x * d.x, 0.0, 0.0, 0.0};
    return {d.x, d.y, 0.5 * d.x * d.x, 0.5 * d.y * d.y, d.x * d.y};
}

// Derivative order carried by each slot.
constexpr std::array<int, kMaxDerivs> order_1d{1, 2, 0, 0, 0};
constexpr std::array<int, kMaxDerivs> order_2d{1, 1, 2, 2, 2};

using Mat = std::array<std::array<double, kMaxDerivs>, kMaxDerivs>;

double one_norm(const Mat& a, std::size_t n) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i][j]);
        best = std::max(best, col);
    }
    return best;
}

// Inverse of an SPD matrix as Q Q^T, Q = L^-T from A = L L^T.
// Returns false when a pivot is not positive.
bool spd_inverse(const Mat& a, std::size_t n, Mat& inv) {
    Mat l{};
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j][j];
        for (std::size_t k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
        if (!(diag > 0.0)) return false;
        l[j][j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i][j];
            for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
            l[i][j] = v / l[j][j];
        }
    }
    // Forward substitution for L^-1, column by column.
    Mat linv{};
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = c; i < n; ++i) {
            double v = (i == c) ? 1.0 : 0.0;
            for (std::size_t k = c; k < i; ++k) v -= l[i][k] * linv[k][c];
            linv[i][c] = v / l[i][i];
        }
    }
    // inv = Q Q^T = L^-T L^-1
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            for (std::size_t k = std::max(i, j); k < n; ++k) v += linv[k][i] * linv[k][j];
            inv[i][j] = v;
        }
    }
    return true;
}

void check_star(int dim, const Star& star) {
    if (dim != 1 && dim != 2) throw InvalidArgument("dim must be 1 or 2");
    if (star.size() < min_star_size(dim))
        throw InvalidArgument("star at node " + std::to_string(star.center) + " has " +
                              std::to_string(star.size()) + " neighbors; need at least " +
                              std::to_string(min_star_size(dim)));
    if (star.offsets.size() != star.neighbors.size())
        throw InvalidArgument("star offsets do not match neighbors");
    if (!(star.radius > 0.0)) throw DegenerateStar(star.center, "zero radius");
}

}  // namespace

MomentMatrix assemble_moment_matrix(int dim, const Star& star, const WeightSpec& spec) {
    check_star(dim, star);
    MomentMatrix m;
    m.n = deriv_count(dim);
    m.radius = star.radius;
    for (const Point& off : star.offsets) {
        const Point d{off.x / star.radius, off.y / star.radius};
        const double w = weight(norm(d), spec, 1.0);
        const double w2 = w * w;
        const Coeffs c = taylor_basis(dim, d);
        for (std::size_t i = 0; i < m.n; ++i)
            for (std::size_t j = 0; j < m.n; ++j) m.a[i][j] += w2 * c[i] * c[j];
    }
    return m;
}

MomentMatrix assemble_moment_matrix(const NodeCloud& cloud, const Star& star,
                                     const WeightSpec& spec) {
    return assemble_moment_matrix(cloud.dim, star, spec);
}

Stencil compute_stencil(int dim, const Star& star, const WeightSpec& spec) {
    const MomentMatrix mm = assemble_moment_matrix(dim, star, spec);
    const std::size_t n = mm.n;

    Mat inv{};
    if (!spd_inverse(mm.a, n, inv))
        throw DegenerateStar(star.center, "moment matrix is not positive definite");
    const double rcond = 1.0 / (one_norm(mm.a, n) * one_norm(inv, n));
    if (!(rcond >= kMinRcond))
        throw DegenerateStar(star.center, "moment matrix reciprocal condition " +
                                              std::to_string(rcond) + " below threshold");

    const auto& order = dim == 1 ? order_1d : order_2d;
    Coeffs unscale{};
    for (std::size_t j = 0; j < n; ++j) unscale[j] = std::pow(star.radius, -order[j]);

    Stencil st;
    st.dim = dim;
    st.neighbors.resize(star.size());
    st.laplacian_neighbors.resize(star.size());
    for (std::size_t i = 0; i < star.size(); ++i) {
        const Point d{star.offsets[i].x / star.radius, star.offsets[i].y / star.radius};
        const double w = weight(norm(d), spec, 1.0);
        const double w2 = w * w;
        const Coeffs c = taylor_basis(dim, d);
        Coeffs& mi = st.neighbors[i];
        for (std::size_t r = 0; r < n; ++r) {
            double v = 0.0;
            for (std::size_t k = 0; k < n; ++k) v += inv[r][k] * c[k];
            mi[r] = w2 * v * unscale[r];
        }
        for (std::size_t r = 0; r < n; ++r) st.center[r] += mi[r];
        st.laplacian_neighbors[i] = dim == 1 ? mi[1] : mi[2] + mi[3];
    }
    st.laplacian_center = dim == 1 ? st.center[1] : st.center[2] + st.center[3];
    return st;
}

Derivatives apply(const Stencil& stencil, double center_value,
                  std::span<const double> neighbor_values) {
    if (neighbor_values.size() != stencil.size())
        throw InvalidArgument("apply: expected " + std::to_string(stencil.size()) +
                              " neighbor values, got " + std::to_string(neighbor_values.size()));
    Derivatives d;
    d.dim = stencil.dim;
    const std::size_t n = deriv_count(stencil.dim);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = -stencil.center[j] * center_value;
        for (std::size_t i = 0; i < stencil.size(); ++i)
            acc += stencil.neighbors[i][j] * neighbor_values[i];
        d.v[j] = acc;
    }
    return d;
}

Derivatives apply(const Stencil& stencil, const Star& star, std::span<const double> field) {
    std::vector<double> nb(star.size());
    for (std::size_t i = 0; i < star.size(); ++i) nb[i] = field[star.neighbors[i]];
    return apply(stencil, field[star.center], nb);
}

// ---------------------------------------------------------------------------

namespace {

void flatten(StencilTable& t) {
    const std::size_t n = t.size();
    const std::size_t s = t.s;
    t.nbr.resize(n * s);
    t.cx.resize(n * s);
    t.cy.resize(n * s);
    t.clap.resize(n * s);
    t.cx0.resize(n);
    t.cy0.resize(n);
    t.clap0.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const Stencil& st = t.stencils[p];
        t.cx0[p] = st.center[0];
        t.cy0[p] = t.dim == 2 ? st.center[1] : 0.0;
        t.clap0[p] = st.laplacian_center;
        for (std::size_t i = 0; i < s; ++i) {
            t.nbr[p * s + i] = t.stars[p].neighbors[i];
            t.cx[p * s + i] = st.neighbors[i][0];
            t.cy[p * s + i] = t.dim == 2 ? st.neighbors[i][1] : 0.0;
            t.clap[p * s + i] = st.laplacian_neighbors[i];
        }
    }
}

StencilTable empty_table(const NodeCloud& cloud, const StarConfig& config) {
    StencilTable t;
    t.dim = cloud.dim;
    t.s = config.s;
    t.stars.resize(cloud.size());
    t.stencils.resize(cloud.size());
    return t;
}

}  // namespace

StencilTable build_all_stencils(const NodeCloud& cloud, const StarConfig& config) {
    StencilTable t = empty_table(cloud, config);
    const auto n = static_cast<std::ptrdiff_t>(cloud.size());
    std::vector<std::exception_ptr> errors(cloud.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
        const auto i = static_cast<std::size_t>(p);
        try {
            t.stars[i] = select_star(cloud, i, config.s, config.criterion);
            t.stencils[i] = compute_stencil(cloud.dim, t.stars[i], config.weight);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    flatten(t);
    return t;
}

StencilTable build_all_stencils_reference(const NodeCloud& cloud, const StarConfig& config) {
    StencilTable t = empty_table(cloud, config);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        t.stars[i] = select_star(cloud, i, config.s, config.criterion);
        t.stencils[i] = compute_stencil(cloud.dim, t.stars[i], config.weight);
    }
    flatten(t);
    return t;
}

void write_stencil_dump(const StencilTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write stencil dump " + path.string());
    out << "node,deriv,coeff_center";
    for (std::size_t i = 1; i <= table.s; ++i) out << ",coeff_" << i;
    out << '\n' << std::setprecision(17);
    static constexpr const char* names_1d[] = {"dx", "dxx"};
    static constexpr const char* names_2d[] = {"dx", "dy", "dxx", "dyy", "dxy"};
    const std::size_t nd = deriv_count(table.dim);
    for (std::size_t p = 0; p < table.size(); ++p) {
        const Stencil& st = table.stencils[p];
        for (std::size_t j = 0; j < nd; ++j) {
            out << p << ',' << (table.dim == 1 ? names_1d[j] : names_2d[j]) << ','
                << -st.center[j];
            for (const Coeffs& mi : st.neighbors) out << ',' << mi[j];
            out << '\n';
        }
        out << p << ",lap," << -st.laplacian_center;
        for (double v : st.laplacian_neighbors) out << ',' << v;
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace meshless
