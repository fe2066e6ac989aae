#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "meshless/cloud.hpp"
#include "meshless/errors.hpp"
#include "meshless/stencil.hpp"

using namespace meshless;

namespace {

Star manual_star(const std::vector<Point>& offsets) {
    Star s;
    s.center = 0;
    for (std::size_t i = 0; i < offsets.size(); ++i) s.neighbors.push_back(i + 1);
    s.offsets = offsets;
    for (const Point& p : offsets) s.radius = std::max(s.radius, norm(p));
    return s;
}

}  // namespace

TEST_CASE("weights") {
    const WeightSpec pot{WeightKind::potential, 3.0, 1.0};
    CHECK(weight(0.5, pot, 1.0) == doctest::Approx(8.0));
    CHECK(weight(1.0, pot, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS(weight(0.0, pot, 1.0));
    const WeightSpec ex{WeightKind::exponential, 3.0, 2.0};
    CHECK(weight(0.5, ex, 1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("moment matrix") {
    WeightSpec unit;
    unit.exponent = 0.0;
    const MomentMatrix m = assemble_moment_matrix(1, manual_star({{1.0, 0.0}, {-1.0, 0.0}}), unit);
    CHECK(m.a[0][0] == doctest::Approx(2.0));
    CHECK(m.a[0][1] == doctest::Approx(0.0));
    CHECK(m.a[1][0] == doctest::Approx(0.0));
    CHECK(m.a[1][1] == doctest::Approx(0.5));

    const MomentMatrix w = assemble_moment_matrix(1, manual_star({{0.3, 0.0}, {-0.3, 0.0}}), {});
    CHECK(w.a[0][1] == 0.0);
}

TEST_CASE("rank-deficient stars are rejected") {
    // two identical offsets
    const Star dup = manual_star({{1, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    CHECK_THROWS_AS(compute_stencil(2, dup, {}), DegenerateStar);
    // five collinear points
    const Star line = manual_star({{1, 0}, {2, 0}, {-1, 0}, {-2, 0}, {3, 0}});
    CHECK_THROWS_AS(compute_stencil(2, line, {}), DegenerateStar);

    std::vector<Point> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({0.1 + 0.2 * i, 0.5});
    for (int i = 0; i < 4; ++i) pts.push_back({i % 2 ? 0.0 : 1.0, i < 2 ? 0.0 : 1.0});
    const NodeCloud c = make_cloud(2, 1.0, pts, {0, 0, 0, 0, 0, 1, 1, 1, 1});
    CHECK_THROWS_AS(compute_stencil(2, select_star(c, 2, 4 + 1, StarCriterion::distance), {}),
                    DegenerateStar);
}

TEST_CASE("central difference recovery") {
    WeightSpec unit;
    unit.exponent = 0.0;
    const double h = 0.1;
    const Stencil st = compute_stencil(1, manual_star({{h, 0.0}, {-h, 0.0}}), unit);
    CHECK(st.neighbors[0][1] == doctest::Approx(1.0 / (h * h)).epsilon(1e-12));
    CHECK(st.neighbors[1][1] == doctest::Approx(1.0 / (h * h)).epsilon(1e-12));
    CHECK(st.center[1] == doctest::Approx(2.0 / (h * h)).epsilon(1e-12));
    CHECK(st.neighbors[0][0] == doctest::Approx(1.0 / (2 * h)).epsilon(1e-12));
    CHECK(st.neighbors[1][0] == doctest::Approx(-1.0 / (2 * h)).epsilon(1e-12));

    const Stencil wide = compute_stencil(1, manual_star({{2 * h, 0.0}, {-2 * h, 0.0}}), unit);
    CHECK(wide.neighbors[0][1] == doctest::Approx(st.neighbors[0][1] / 4.0).epsilon(1e-12));
}

TEST_CASE("nine-point family on a regular grid") {
    WeightSpec unit;
    unit.exponent = 0.0;
    const double h = 0.25;
    std::vector<Point> off;
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
            if (dx || dy) off.push_back({dx * h, dy * h});
    const Star s = manual_star(off);
    const Stencil st = compute_stencil(2, s, unit);
    std::vector<double> u;
    for (const Point& p : off) u.push_back(p.x * p.x + p.y * p.y);
    CHECK(apply(st, 0.0, u).laplacian() == doctest::Approx(4.0).epsilon(1e-12));

    // unit weights: theta = 4/5 of the diagonal cross
    const double theta = 0.8;
    for (std::size_t i = 0; i < off.size(); ++i) {
        const bool axis = off[i].x == 0.0 || off[i].y == 0.0;
        const double want = axis ? (1 - theta) / (h * h) : theta / (2 * h * h);
        CHECK(st.laplacian_neighbors[i] == doctest::Approx(want).epsilon(1e-12));
    }

    // d^-3 weights: the isotropic stencil (4 edges, 1 corner, -20 center) / 6h^2
    const Stencil iso = compute_stencil(2, s, {});
    CHECK(iso.laplacian_center == doctest::Approx(20.0 / (6 * h * h)).epsilon(1e-12));
}

TEST_CASE("apply") {
    const NodeCloud c = generate_jittered(8, 1.0, 2, 0.3, 4);
    const StencilTable t = build_all_stencils(c, {8, StarCriterion::distance, {}});
    std::vector<double> xy(c.size()), cst(c.size(), 3.5), x2(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        xy[i] = c.positions[i].x * c.positions[i].y;
        x2[i] = c.positions[i].x * c.positions[i].x;
    }
    for (std::size_t p = 0; p < c.size(); ++p) {
        const Derivatives d = apply(t.stencils[p], t.stars[p], xy);
        CHECK(d.uxy() == doctest::Approx(1.0).epsilon(1e-9));
        const Derivatives k = apply(t.stencils[p], t.stars[p], cst);
        double m0 = 0;
        for (double v : t.stencils[p].center) m0 = std::max(m0, std::abs(v));
        for (double v : k.v) CHECK(std::abs(v) <= 1e-10 * 3.5 * m0);
    }
    const Stencil& st = t.stencils[0];
    CHECK_THROWS_AS(apply(st, 0.0, std::vector<double>(st.size() + 1)), InvalidArgument);

    const NodeCloud c1 = generate_jittered(20, 1.0, 1, 0.3, 4);
    const StencilTable t1 = build_all_stencils(c1, {2, StarCriterion::distance, {}});
    std::vector<double> u(c1.size());
    for (std::size_t i = 0; i < c1.size(); ++i) u[i] = c1.positions[i].x * c1.positions[i].x;
    for (std::size_t p = 0; p < c1.size(); ++p)
        CHECK(apply(t1.stencils[p], t1.stars[p], u).uxx() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("stencil tables") {
    const NodeCloud c = generate_regular(21, 1.0, 1);
    const StencilTable t = build_all_stencils(c, {2, StarCriterion::distance, {}});
    for (std::size_t p = 2; p + 1 < c.size(); ++p)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(t.stencils[p].center[j] == doctest::Approx(t.stencils[1].center[j]).epsilon(1e-9).scale(1.0));

    const NodeCloud j = generate_jittered(15, 1.0, 2, 0.3, 8);
    const StarConfig cfg{8, StarCriterion::quadrant, {}};
    const StencilTable a = build_all_stencils(j, cfg);
    const StencilTable b = build_all_stencils(j, cfg);
    const StencilTable r = build_all_stencils_reference(j, cfg);
    CHECK(a.clap == b.clap);
    CHECK(a.cx == r.cx);
    CHECK(a.cy == r.cy);
    CHECK(a.clap == r.clap);
    CHECK(a.nbr == r.nbr);
}
