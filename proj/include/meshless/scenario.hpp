#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshless/cloud.hpp"
#include "meshless/model.hpp"
#include "meshless/scheme.hpp"
#include "meshless/state.hpp"
#include "meshless/stencil.hpp"

namespace meshless {

enum class CloudKind { regular, jittered, file };

struct CloudSpec {
    CloudKind kind = CloudKind::regular;
    int dim = 1;
    int nodes_per_axis = 21;
    double length = 1.0;
    double jitter = 0.0;
    std::uint64_t seed = 0;
    std::filesystem::path path;
};

enum class FieldKind { constant, piecewise, gaussian_sum, file };

struct GaussianBump {
    double amplitude = 0.0;
    Point center{};
    double sigma = 1.0;
};

/// Initial condition for one field.
struct FieldSpec {
    FieldKind kind = FieldKind::constant;
    double value = 1.0;                 // constant
    std::vector<double> breakpoints;    // piecewise: sorted, inside (0, L)
    std::vector<double> slopes;         // piecewise: one per piece
    std::vector<double> intercepts;     // piecewise: value = intercept + slope * x
    double base = 0.0;                  // gaussian_sum
    std::vector<GaussianBump> bumps;    // gaussian_sum
    std::filesystem::path path;         // file: snapshot CSV
};

struct InitialSpec {
    FieldSpec k0{};
    FieldSpec A0{};
};

struct Scenario {
    std::string name;
    CloudSpec cloud{};
    StarConfig star{};
    ModelParams model{};
    InitialSpec initial{};
    SchemeConfig scheme{};
    bool dt_given = true;  // false: first step size comes from the stability bound
    std::filesystem::path output_dir = "out";
};

/// Flat `key = value` text with `[section]` headers; `#` starts a comment.
/// Unknown keys, missing required keys and range violations throw
/// ParseError/ValidationError naming the key path (section.key).
Scenario parse_scenario_text(const std::string& text,
                             const std::filesystem::path& base_dir = {});
Scenario parse_scenario(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Scenario text of a built-in preset; throws InvalidArgument for unknown names.
std::string preset_text(const std::string& name);
Scenario load_preset(const std::string& name);

NodeCloud build_cloud(const Scenario& scenario);
double evaluate_field(const FieldSpec& spec, Point x);
State initial_state(const Scenario& scenario, const NodeCloud& cloud);

/// Parameter listing (key = value lines) as used in the README preset table.
void describe(const Scenario& scenario, std::ostream& out);

/// Writes one snapshot CSV per snapshot, run_log.csv and plot.gp into dir.
std::vector<std::filesystem::path> write_snapshots(const Trajectory& trajectory,
                                                   const NodeCloud& cloud,
                                                   const std::filesystem::path& dir);

}  // namespace meshless
