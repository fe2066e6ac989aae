#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "meshless/cloud.hpp"
#include "meshless/errors.hpp"

using namespace meshless;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / ("meshless_test_" + name);
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST_CASE("regular 1D grid") {
    const NodeCloud c = generate_regular(3, 1.0, 1);
    REQUIRE(c.size() == 3);
    CHECK(c.positions[0].x == 0.0);
    CHECK(c.positions[1].x == 0.5);
    CHECK(c.positions[2].x == 1.0);
    CHECK(c.is_boundary(0));
    CHECK_FALSE(c.is_boundary(1));
    CHECK(c.is_boundary(2));
    CHECK(c.normals[0].x == -1.0);
    CHECK(c.normals[2].x == 1.0);

    const NodeCloud c5 = generate_regular(5, 1.0, 1);
    for (std::size_t i = 1; i < c5.size(); ++i)
        CHECK(c5.positions[i].x - c5.positions[i - 1].x == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("regular 2D grid") {
    const NodeCloud c = generate_regular(2, 1.0, 2);
    REQUIRE(c.size() == 4);
    CHECK(c.boundary_count() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::hypot(c.normals[i].x, c.normals[i].y) == doctest::Approx(1.0).epsilon(1e-12));

    const NodeCloud g = generate_regular(5, 2.0, 2);
    CHECK(g.size() == 25);
    CHECK(g.boundary_count() == 16);
    // edge midpoint on y = 0 points down
    CHECK(g.normals[2].x == 0.0);
    CHECK(g.normals[2].y == -1.0);
}

TEST_CASE("jittered clouds") {
    const NodeCloud reg = generate_regular(9, 1.0, 2);
    const NodeCloud zero = generate_jittered(9, 1.0, 2, 0.0, 77);
    CHECK(zero.positions == reg.positions);

    const NodeCloud a = generate_jittered(12, 1.0, 2, 0.3, 5);
    const NodeCloud b = generate_jittered(12, 1.0, 2, 0.3, 5);
    CHECK(a.positions == b.positions);
    CHECK(a.boundary == b.boundary);
    const NodeCloud other = generate_jittered(12, 1.0, 2, 0.3, 6);
    CHECK(other.positions != a.positions);

    for (int dim : {1, 2}) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const int n = 15;
            const double h = 1.0 / (n - 1);
            const NodeCloud r = generate_regular(n, 1.0, dim);
            const NodeCloud j = generate_jittered(n, 1.0, dim, 0.3, seed);
            for (std::size_t i = 0; i < j.size(); ++i) {
                CHECK(std::abs(j.positions[i].x - r.positions[i].x) <= 0.3 * h + 1e-15);
                CHECK(std::abs(j.positions[i].y - r.positions[i].y) <= 0.3 * h + 1e-15);
            }
            CHECK_NOTHROW(validate(j));
        }
    }
    CHECK_THROWS_AS(generate_jittered(5, 1.0, 1, 0.5, 1), InvalidArgument);
}

TEST_CASE("cloud validation") {
    CHECK_THROWS_AS(make_cloud(1, 1.0, {{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {1.0, 0.0}}, {1, 0, 0, 1}),
                    ValidationError);
    CHECK_THROWS_AS(make_cloud(1, 1.0, {{0.0, 0.0}, {1.5, 0.0}}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(make_cloud(1, 1.0, {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}}, {1, 1, 1}), ValidationError);
}

TEST_CASE("load and save") {
    const auto p = temp_file("three.csv", "x,boundary\n0,1\n0.5,0\n1,1\n");
    const NodeCloud c = load_cloud(p);
    CHECK(c.size() == 3);
    CHECK(c.dim == 1);
    CHECK(c.length == 1.0);
    CHECK(c.boundary_count() == 2);

    const auto bad = temp_file("bad.csv", "x,y,boundary\n0,0,1\n0.5\n");
    try {
        load_cloud(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    const NodeCloud j = generate_jittered(10, 2.0, 2, 0.35, 99);
    const auto out = fs::temp_directory_path() / "meshless_test_roundtrip.csv";
    save_cloud(j, out);
    const NodeCloud back = load_cloud(out);
    CHECK(back.positions == j.positions);
    CHECK(back.boundary == j.boundary);
    CHECK(back.length == j.length);
    fs::remove(p);
    fs::remove(bad);
    fs::remove(out);
}

TEST_CASE("star selection") {
    const NodeCloud c = generate_regular(11, 1.0, 1);
    const Star s = select_star(c, 5, 2, StarCriterion::distance);
    std::vector<std::size_t> nb = s.neighbors;
    std::sort(nb.begin(), nb.end());
    CHECK(nb == std::vector<std::size_t>{4, 6});

    // equal distances: lower index first
    const NodeCloud eq = make_cloud(1, 2.0, {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, {1, 0, 1});
    const Star s1 = select_star(eq, 1, 1 + 1, StarCriterion::distance);
    CHECK(s1.neighbors.front() == 0);

    CHECK_THROWS_AS(select_star(generate_regular(2, 1.0, 1), 0, 2, StarCriterion::distance),
                    InsufficientNodes);
}

TEST_CASE("quadrant stars match a brute-force search") {
    const NodeCloud c = generate_regular(9, 1.0, 2);
    const std::size_t center = 4 * 9 + 4;
    const Star s = select_star(c, center, 8, StarCriterion::quadrant);
    REQUIRE(s.size() == 8);

    auto quadrant = [](Point d) {
        if (d.x > 0 && d.y >= 0) return 0;
        if (d.x <= 0 && d.y > 0) return 1;
        if (d.x < 0 && d.y <= 0) return 2;
        return 3;
    };
    for (int q = 0; q < 4; ++q) {
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i == center) continue;
            const Point d = c.positions[i] - c.positions[center];
            if (quadrant(d) == q) cand.push_back({norm(d), i});
        }
        std::sort(cand.begin(), cand.end());
        int found = 0;
        for (std::size_t k = 0; k < 2; ++k)
            found += std::count(s.neighbors.begin(), s.neighbors.end(), cand[k].second);
        CHECK(found == 2);
    }
}
