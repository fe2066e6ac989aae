#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshless/cloud.hpp"
#include "meshless/model.hpp"
#include "meshless/stability.hpp"
#include "meshless/state.hpp"
#include "meshless/stencil.hpp"

namespace meshless {

/// Values of a field over one star: the center and the neighbors in star order.
struct StarValues {
    double center = 0.0;
    std::span<const double> neighbors;
};

/// -chi (k_x A_x) - chi k0 (Laplacian A), all derivatives by GFD.
double flux_term_1d(const Stencil& stencil, StarValues k, StarValues A, double chi);

/// -chi (k_x A_x + k_y A_y) - chi k0 (Laplacian A).
double flux_term_2d(const Stencil& stencil, StarValues k, StarValues A, double chi);

/**
 * Zero-normal-derivative projection.
 *
 * For every boundary node the GFD normal derivative
 *   -(n.m0) U0 + sum_i (n.mi) Ui
 * is set to zero. Boundary stars may contain other boundary nodes, so all
 * boundary values are solved for together; the dense system is inverted
 * once at construction.
 */
class NeumannProjector {
public:
    NeumannProjector() = default;
    NeumannProjector(const NodeCloud& cloud, const StencilTable& table);

    /// Overwrites the boundary entries of `field` from its interior entries.
    void apply(std::span<double> field) const;

    /// GFD normal derivative of `field` at boundary node `node`.
    double normal_derivative(std::size_t node, std::span<const double> field) const;

    const std::vector<std::size_t>& boundary_nodes() const noexcept { return nodes_; }

private:
    struct Row {
        double diag = 0.0;  // n.m0
        std::vector<std::size_t> interior;
        std::vector<double> interior_coeff;  // n.mi
    };
    const StencilTable* table_ = nullptr;
    std::vector<Point> normals_;
    std::vector<std::size_t> nodes_;
    std::vector<Row> rows_;
    std::vector<double> inverse_;  // row-major nb x nb
};

State enforce_neumann(const State& state, const StencilTable& table, const NodeCloud& cloud);

/**
 * Everything one explicit step needs, assembled once per run.
 * Holds references: the cloud, table and params must outlive it.
 */
struct SchemeContext {
    SchemeContext(const NodeCloud& cloud, const StencilTable& table, const ModelParams& params);

    const NodeCloud& cloud;
    const StencilTable& table;
    const ModelParams& params;
    NeumannProjector neumann;
    std::vector<std::size_t> interior;
    std::vector<double> growth;  // g(x) per node
};

struct StepResult {
    State state;
    std::size_t clamps = 0;  // interior nodes where k < 0 was clamped inside f
};

/// Nodes with max|k| above this abort a run.
inline constexpr double kDivergenceThreshold = 1e12;

/**
 * One explicit step: interior update from level-n values, then the Neumann
 * projection. `k_source`, when non-empty, is added to the k right-hand side
 * (manufactured-solution forcing). OpenMP over interior nodes. Throws
 * DivergenceError naming the lowest offending node.
 */
StepResult step(const SchemeContext& ctx, const State& state, double dt,
                std::span<const double> k_source = {});

/// Serial reference built from apply() and the flux-term functions.
/// `order` permutes the update order (empty: natural order).
StepResult step_reference(const SchemeContext& ctx, const State& state, double dt,
                          std::span<const double> k_source = {},
                          std::span<const std::size_t> order = {});

enum class StabilityMode { off, check, adapt };

struct SchemeConfig {
    double dt = 1e-3;
    double t_final = 0.0;
    std::vector<double> snapshot_times;
    StabilityMode stability_mode = StabilityMode::off;
    std::size_t stability_interval = 10;  // steps between bound evaluations
    std::size_t log_interval = 1;         // steps between run-log rows
    StabilityOptions stability{};
};

void validate(const SchemeConfig& config);

/// Number of steps a fixed-dt run takes; the last step is truncated to
/// land on t_final.
std::size_t step_count(double t_final, double dt);

struct Snapshot {
    double requested_time = 0.0;
    State state;
};

struct LogEntry {
    std::size_t step = 0;
    double time = 0.0;
    double dt = 0.0;
    double max_k = 0.0;
    double min_k = 0.0;
    std::size_t clamp_count = 0;  // cumulative
    std::optional<double> dt_bound;
    std::size_t violations = 0;
};

struct DivergenceInfo {
    std::size_t step = 0;
    double time = 0.0;
    std::size_t node = 0;
    std::string message;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    State final_state;
    std::vector<LogEntry> log;
    std::optional<DivergenceInfo> divergence;
    std::size_t steps = 0;
    std::size_t clamp_count = 0;
    std::size_t bound_exceeded = 0;  // bound evaluations where dt > global_dt
    std::size_t dt_reductions = 0;
    double final_dt = 0.0;
};

/// Time-dependent forcing for the k equation: fills one value per node at time t.
using Forcing = std::function<void(double t, std::span<double> out)>;

/**
 * Advances `initial` to config.t_final. The initial state is first projected
 * onto the boundary condition. Snapshots take the completed step nearest to
 * each requested time. A divergence ends the run early; the partial
 * trajectory is returned with `divergence` set.
 */
Trajectory run(const SchemeContext& ctx, State initial, const SchemeConfig& config,
               const Forcing& forcing = {});

/// `node,x[,y],k,A`
void write_snapshot_csv(const NodeCloud& cloud, const State& state,
                        const std::filesystem::path& path);

/// File name `snap_t<time>.csv`, time printed with 6 decimals.
std::string snapshot_file_name(double time);

}  // namespace meshless
