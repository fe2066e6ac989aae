#include "meshless/cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "meshless/errors.hpp"

namespace meshless {

double norm(Point p) { return std::hypot(p.x, p.y); }

std::size_t NodeCloud::boundary_count() const noexcept {
    return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), 1));
}

namespace {

double boundary_tol(double length) { return 1e-12 * length; }

// Faces touched by p, as outward normals.
Point face_normal_sum(Point p, int dim, double length) {
    const double tol = boundary_tol(length);
    Point n{};
    if (std::abs(p.x) <= tol) n.x -= 1.0;
    if (std::abs(p.x - length) <= tol) n.x += 1.0;
    if (dim == 2) {
        if (std::abs(p.y) <= tol) n.y -= 1.0;
        if (std::abs(p.y - length) <= tol) n.y += 1.0;
    }
    return n;
}

void check_dim(int dim) {
    if (dim != 1 && dim != 2) throw InvalidArgument("dim must be 1 or 2");
}

// Lattice coordinate i*L/(n-1) with the far end pinned to L exactly.
double lattice(int i, int n, double length) {
    return i == n - 1 ? length : length * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

Point box_normal(Point p, int dim, double length) {
    Point n = face_normal_sum(p, dim, length);
    const double len = norm(n);
    if (len == 0.0) return {};
    return {n.x / len, n.y / len};
}

void validate(const NodeCloud& cloud) {
    check_dim(cloud.dim);
    if (!(cloud.length > 0.0)) throw ValidationError("domain length must be positive");
    const std::size_t n = cloud.size();
    if (cloud.boundary.size() != n || cloud.normals.size() != n)
        throw ValidationError("boundary/normal arrays do not match node count");
    const double tol = boundary_tol(cloud.length);
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = cloud.positions[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("node " + std::to_string(i) + " has a non-finite coordinate");
        const bool outside = p.x < -tol || p.x > cloud.length + tol ||
                             (cloud.dim == 2 && (p.y < -tol || p.y > cloud.length + tol)) ||
                             (cloud.dim == 1 && p.y != 0.0);
        if (outside) throw ValidationError("node " + std::to_string(i) + " lies outside the domain");
        const Point faces = face_normal_sum(p, cloud.dim, cloud.length);
        if (cloud.is_boundary(i)) {
            if (faces.x == 0.0 && faces.y == 0.0)
                throw ValidationError("boundary node " + std::to_string(i) +
                                      " is not on the domain boundary");
            if (std::abs(norm(cloud.normals[i]) - 1.0) > 1e-12)
                throw ValidationError("boundary node " + std::to_string(i) +
                                      " has a non-unit normal");
        } else if (cloud.normals[i].x != 0.0 || cloud.normals[i].y != 0.0) {
            throw ValidationError("interior node " + std::to_string(i) + " carries a normal");
        }
    }
    // Duplicate detection on exact coordinates; sorting keeps this O(N log N).
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Point pa = cloud.positions[a], pb = cloud.positions[b];
        return std::tie(pa.x, pa.y, a) < std::tie(pb.x, pb.y, b);
    });
    for (std::size_t k = 1; k < n; ++k) {
        if (cloud.positions[order[k]] == cloud.positions[order[k - 1]])
            throw ValidationError("nodes " + std::to_string(order[k - 1]) + " and " +
                                  std::to_string(order[k]) + " coincide");
    }
}

NodeCloud make_cloud(int dim, double length, std::vector<Point> positions,
                     std::vector<std::uint8_t> boundary) {
    check_dim(dim);
    if (positions.size() != boundary.size())
        throw ValidationError("boundary flags do not match node count");
    NodeCloud cloud;
    cloud.dim = dim;
    cloud.length = length;
    cloud.positions = std::move(positions);
    cloud.boundary = std::move(boundary);
    cloud.normals.assign(cloud.size(), Point{});
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.is_boundary(i)) cloud.normals[i] = box_normal(cloud.positions[i], dim, length);
    }
    validate(cloud);
    return cloud;
}

NodeCloud generate_regular(int nodes_per_axis, double length, int dim) {
    check_dim(dim);
    if (nodes_per_axis < 2) throw InvalidArgument("nodes_per_axis must be at least 2");
    if (!(length > 0.0)) throw InvalidArgument("length must be positive");
    const int n = nodes_per_axis;
    std::vector<Point> pos;
    std::vector<std::uint8_t> bnd;
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            pos.push_back({lattice(i, n, length), 0.0});
            bnd.push_back(i == 0 || i == n - 1);
        }
    } else {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                pos.push_back({lattice(i, n, length), lattice(j, n, length)});
                bnd.push_back(i == 0 || j == 0 || i == n - 1 || j == n - 1);
            }
        }
    }
    return make_cloud(dim, length, std::move(pos), std::move(bnd));
}

NodeCloud generate_jittered(int nodes_per_axis, double length, int dim, double jitter,
                            std::uint64_t seed) {
    if (!(jitter >= 0.0 && jitter < 0.49)) throw InvalidArgument("jitter must lie in [0, 0.49)");
    NodeCloud cloud = generate_regular(nodes_per_axis, length, dim);
    if (jitter == 0.0) return cloud;

    const double h = length / static_cast<double>(nodes_per_axis - 1);
    std::mt19937_64 gen(seed);
    // 53-bit uniform in [-1,1); avoids the implementation-defined
    // std::uniform_real_distribution so clouds are identical across libraries.
    auto draw = [&] { return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0; };

    const double tol = boundary_tol(length);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        Point& p = cloud.positions[i];
        const double dx = draw() * jitter * h;
        const double dy = draw() * jitter * h;
        if (!cloud.is_boundary(i)) {
            p.x += dx;
            if (dim == 2) p.y += dy;
            continue;
        }
        if (dim == 1) continue;
        const bool on_x_face = std::abs(p.x) <= tol || std::abs(p.x - length) <= tol;
        const bool on_y_face = std::abs(p.y) <= tol || std::abs(p.y - length) <= tol;
        if (on_x_face && on_y_face) continue;  // corner
        if (on_x_face) p.y += dy;
        else p.x += dx;
    }
    return make_cloud(dim, length, std::move(cloud.positions), std::move(cloud.boundary));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line) {
    const std::string t = trim(cell);
    if (t.empty()) throw ParseError("empty numeric field", line);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + t + "'", line);
    }
    if (used != t.size()) throw ParseError("not a number: '" + t + "'", line);
    return v;
}

}  // namespace

NodeCloud load_cloud(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cloud file " + path.string());

    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) {
            header = split_csv(line);
            break;
        }
    }
    for (auto& h : header) h = trim(h);
    int dim = 0;
    bool has_normals = false;
    if (header == std::vector<std::string>{"x", "boundary"}) dim = 1;
    else if (header == std::vector<std::string>{"x", "y", "boundary"}) dim = 2;
    else if (header == std::vector<std::string>{"x", "boundary", "nx"}) dim = 1, has_normals = true;
    else if (header == std::vector<std::string>{"x", "y", "boundary", "nx", "ny"})
        dim = 2, has_normals = true;
    else
        throw ParseError("expected header 'x[,y],boundary[,nx[,ny]]'", lineno);

    const std::size_t ncols = header.size();
    std::vector<Point> pos;
    std::vector<std::uint8_t> bnd;
    std::vector<Point> given_normals;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != ncols)
            throw ParseError("expected " + std::to_string(ncols) + " columns, found " +
                                 std::to_string(cells.size()),
                             lineno);
        Point p{parse_number(cells[0], lineno), dim == 2 ? parse_number(cells[1], lineno) : 0.0};
        const std::string flag = trim(cells[static_cast<std::size_t>(dim)]);
        if (flag != "0" && flag != "1") throw ParseError("boundary flag must be 0 or 1", lineno);
        pos.push_back(p);
        bnd.push_back(flag == "1");
        if (has_normals) {
            const std::size_t c = static_cast<std::size_t>(dim) + 1;
            given_normals.push_back(
                {parse_number(cells[c], lineno), dim == 2 ? parse_number(cells[c + 1], lineno) : 0.0});
        }
    }
    if (pos.empty()) throw ParseError("cloud file has no nodes", lineno);

    double length = 0.0;
    for (const Point& p : pos) length = std::max({length, p.x, p.y});
    NodeCloud cloud = make_cloud(dim, length, std::move(pos), std::move(bnd));
    if (has_normals) {
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (cloud.is_boundary(i)) cloud.normals[i] = given_normals[i];
        }
        validate(cloud);
    }
    return cloud;
}

void save_cloud(const NodeCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write cloud file " + path.string());
    out << (cloud.dim == 2 ? "x,y,boundary\n" : "x,boundary\n");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        out << cloud.positions[i].x;
        if (cloud.dim == 2) out << ',' << cloud.positions[i].y;
        out << ',' << int(cloud.boundary[i]) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Stars

namespace {

struct Candidate {
    double dist2;
    std::size_t index;
    bool operator<(const Candidate& o) const {
        return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
    }
};

int quadrant_of(Point d) {
    if (d.x > 0.0 && d.y >= 0.0) return 0;
    if (d.x <= 0.0 && d.y > 0.0) return 1;
    if (d.x < 0.0 && d.y <= 0.0) return 2;
    return 3;
}

}  // namespace

Star select_star(const NodeCloud& cloud, std::size_t center, std::size_t s,
                 StarCriterion criterion) {
    if (center >= cloud.size()) throw InvalidArgument("star center out of range");
    if (s < min_star_size(cloud.dim))
        throw InvalidArgument("star size " + std::to_string(s) + " below minimum " +
                              std::to_string(min_star_size(cloud.dim)) + " for dim " +
                              std::to_string(cloud.dim));
    if (criterion == StarCriterion::quadrant && cloud.dim != 2)
        throw InvalidArgument("quadrant criterion requires a 2D cloud");
    if (cloud.size() - 1 < s)
        throw InsufficientNodes("star at node " + std::to_string(center) + " needs " +
                                std::to_string(s) + " neighbors but only " +
                                std::to_string(cloud.size() - 1) + " candidates exist");

    const Point c = cloud.positions[center];
    std::vector<Candidate> cand;
    cand.reserve(cloud.size() - 1);
    for (std::size_t j = 0; j < cloud.size(); ++j) {
        if (j == center) continue;
        const Point d = cloud.positions[j] - c;
        cand.push_back({d.x * d.x + d.y * d.y, j});
    }

    std::vector<std::size_t> chosen;
    chosen.reserve(s);
    if (criterion == StarCriterion::distance) {
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(s), cand.end());
        for (std::size_t k = 0; k < s; ++k) chosen.push_back(cand[k].index);
    } else {
        std::sort(cand.begin(), cand.end());
        std::array<std::vector<std::size_t>, 4> quads;
        for (const Candidate& cd : cand)
            quads[quadrant_of(cloud.positions[cd.index] - c)].push_back(cd.index);
        const std::size_t per = (s + 3) / 4;
        std::vector<std::uint8_t> used(cloud.size(), 0);
        for (std::size_t r = 0; r < per && chosen.size() < s; ++r) {
            for (const auto& q : quads) {
                if (chosen.size() == s) break;
                if (r < q.size()) {
                    chosen.push_back(q[r]);
                    used[q[r]] = 1;
                }
            }
        }
        for (const Candidate& cd : cand) {
            if (chosen.size() == s) break;
            if (!used[cd.index]) {
                chosen.push_back(cd.index);
                used[cd.index] = 1;
            }
        }
    }

    Star star;
    star.center = center;
    star.neighbors = std::move(chosen);
    star.offsets.reserve(s);
    for (std::size_t j : star.neighbors) {
        const Point d = cloud.positions[j] - c;
        star.offsets.push_back(d);
        star.radius = std::max(star.radius, norm(d));
    }
    return star;
}

}  // namespace meshless
