#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace meshless {

/// Point in the plane. 1D clouds leave y at zero.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

double norm(Point p);

/**
 * NodeCloud: discretization of [0,L]^dim by scattered nodes.
 *
 * Boundary nodes carry an outward unit normal; interior nodes carry (0,0).
 * Construct through the generators or load_cloud(); make_cloud() validates
 * an arbitrary node list and derives normals from the box faces.
 */
struct NodeCloud {
    int dim = 1;
    double length = 1.0;
    std::vector<Point> positions;
    std::vector<std::uint8_t> boundary;
    std::vector<Point> normals;

    std::size_t size() const noexcept { return positions.size(); }
    bool is_boundary(std::size_t i) const noexcept { return boundary[i] != 0; }
    std::size_t boundary_count() const noexcept;
};

/// Outward normal of a point on the box boundary: normalized sum of the
/// normals of every face the point lies on (corners get the diagonal).
Point box_normal(Point p, int dim, double length);

/// Validates positions/flags and fills normals. Throws ValidationError.
NodeCloud make_cloud(int dim, double length, std::vector<Point> positions,
                     std::vector<std::uint8_t> boundary);

/// Checks every NodeCloud invariant; throws ValidationError on the first
/// violation.
void validate(const NodeCloud& cloud);

NodeCloud generate_regular(int nodes_per_axis, double length, int dim);

/// Regular lattice with interior nodes displaced by at most jitter*h per
/// axis. 2D edge nodes slide along their edge; corners and 1D end points
/// stay fixed. Deterministic in (params, seed).
NodeCloud generate_jittered(int nodes_per_axis, double length, int dim, double jitter,
                            std::uint64_t seed);

/// Reads the `x[,y],boundary[,nx[,ny]]` CSV. The domain length is taken as
/// the largest coordinate present.
NodeCloud load_cloud(const std::filesystem::path& path);
void save_cloud(const NodeCloud& cloud, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Stars

enum class StarCriterion { distance, quadrant };

struct Star {
    std::size_t center = 0;
    std::vector<std::size_t> neighbors;
    std::vector<Point> offsets;
    double radius = 0.0;

    std::size_t size() const noexcept { return neighbors.size(); }
};

/// Smallest admissible star size for a dimension (number of Taylor unknowns).
constexpr std::size_t min_star_size(int dim) { return dim == 1 ? 2 : 5; }

/**
 * Select the s neighbors of `center`.
 *
 * distance: s nearest nodes by Euclidean distance, ties to the lower index.
 * quadrant (2D only): quadrants are half-open, counter-clockwise from +x
 * (h>0,k>=0), (h<=0,k>0), (h<0,k<=0), (h>=0,k<0), so every axis neighbor
 * belongs to exactly one quadrant. Nodes are taken round-robin, the r-th
 * nearest of each quadrant in turn, up to ceil(s/4) per quadrant; short
 * quadrants are topped up with the global nearest unused nodes.
 */
Star select_star(const NodeCloud& cloud, std::size_t center, std::size_t s,
                 StarCriterion criterion);

}  // namespace meshless
