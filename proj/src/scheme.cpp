#include "meshless/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "meshless/errors.hpp"

namespace meshless {

namespace {

double gfd(const Stencil& st, std::size_t slot, StarValues u) {
    double acc = -st.center[slot] * u.center;
    for (std::size_t i = 0; i < st.size(); ++i) acc += st.neighbors[i][slot] * u.neighbors[i];
    return acc;
}

double gfd_laplacian(const Stencil& st, StarValues u) {
    double acc = -st.laplacian_center * u.center;
    for (std::size_t i = 0; i < st.size(); ++i) acc += st.laplacian_neighbors[i] * u.neighbors[i];
    return acc;
}

void check_arity(const Stencil& st, StarValues k, StarValues A) {
    if (k.neighbors.size() != st.size() || A.neighbors.size() != st.size())
        throw InvalidArgument("flux term: value lists do not match the stencil arity " +
                              std::to_string(st.size()));
}

// Shared by the kernel and the reference so both round identically.
inline double taxis(double chi, double kx, double Ax, double ky, double Ay, double k0,
                    double lapA, bool two_d) {
    if (two_d) return -chi * (kx * Ax + ky * Ay) - chi * k0 * lapA;
    return -chi * (kx * Ax) - chi * k0 * lapA;
}

inline double k_rhs(double lapk, double flux, double k0, double A0, double src,
                    const ModelParams& m) {
    return lapk + flux + A0 * production_clamped(k0, m) - m.delta * k0 + src;
}

inline double A_rhs(double lapA, double A0, double g, const ModelParams& m) {
    return m.tech_diffusion * lapA + A0 * g;
}

void check_state(const State& s, double time) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s.k[i])) throw DivergenceError(i, time, "non-finite capital");
        if (!std::isfinite(s.A[i])) throw DivergenceError(i, time, "non-finite technology");
        if (std::abs(s.k[i]) > kDivergenceThreshold)
            throw DivergenceError(i, time, "|k| exceeds " + std::to_string(kDivergenceThreshold));
    }
}

void check_inputs(const SchemeContext& ctx, const State& state, double dt,
                  std::span<const double> k_source) {
    if (state.k.size() != ctx.cloud.size() || state.A.size() != ctx.cloud.size())
        throw InvalidArgument("step: state size does not match the cloud");
    if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
    if (!k_source.empty() && k_source.size() != ctx.cloud.size())
        throw InvalidArgument("step: forcing size does not match the cloud");
}

// Dense inverse with partial pivoting; returns the reciprocal 1-norm condition.
double invert_dense(std::vector<double> a, std::size_t n, std::vector<double>& inv) {
    auto at = [n](std::vector<double>& m, std::size_t i, std::size_t j) -> double& {
        return m[i * n + j];
    };
    double anorm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i * n + j]);
        anorm = std::max(anorm, col);
    }
    inv.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) at(inv, i, i) = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(at(a, r, c)) > std::abs(at(a, piv, c))) piv = r;
        if (at(a, piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(at(a, c, j), at(a, piv, j));
                std::swap(at(inv, c, j), at(inv, piv, j));
            }
        }
        const double d = at(a, c, c);
        for (std::size_t j = 0; j < n; ++j) {
            at(a, c, j) /= d;
            at(inv, c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = at(a, r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                at(a, r, j) -= f * at(a, c, j);
                at(inv, r, j) -= f * at(inv, c, j);
            }
        }
    }
    double inorm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::abs(inv[i * n + j]);
        inorm = std::max(inorm, col);
    }
    return 1.0 / (anorm * inorm);
}

double normal_dot(Point nrm, const Coeffs& m, int dim) {
    return dim == 2 ? nrm.x * m[0] + nrm.y * m[1] : nrm.x * m[0];
}

}  // namespace

double flux_term_1d(const Stencil& st, StarValues k, StarValues A, double chi) {
    check_arity(st, k, A);
    if (st.dim != 1) throw InvalidArgument("flux_term_1d: stencil is not 1D");
    const double kx = gfd(st, 0, k);
    const double Ax = gfd(st, 0, A);
    const double lapA = gfd_laplacian(st, A);
    return taxis(chi, kx, Ax, 0.0, 0.0, k.center, lapA, false);
}

double flux_term_2d(const Stencil& st, StarValues k, StarValues A, double chi) {
    check_arity(st, k, A);
    if (st.dim != 2) throw InvalidArgument("flux_term_2d: stencil is not 2D");
    const double kx = gfd(st, 0, k);
    const double Ax = gfd(st, 0, A);
    const double ky = gfd(st, 1, k);
    const double Ay = gfd(st, 1, A);
    const double lapA = gfd_laplacian(st, A);
    return taxis(chi, kx, Ax, ky, Ay, k.center, lapA, true);
}

// ---------------------------------------------------------------------------
// Neumann projection

NeumannProjector::NeumannProjector(const NodeCloud& cloud, const StencilTable& table)
    : table_(&table), normals_(cloud.normals) {
    if (table.size() != cloud.size())
        throw InvalidArgument("NeumannProjector: table does not cover the cloud");
    std::vector<std::ptrdiff_t> bindex(cloud.size(), -1);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.is_boundary(i)) {
            bindex[i] = static_cast<std::ptrdiff_t>(nodes_.size());
            nodes_.push_back(i);
        }
    }
    const std::size_t nb = nodes_.size();
    if (nb == 0) return;

    std::vector<double> mat(nb * nb, 0.0);
    rows_.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t p = nodes_[b];
        const Stencil& st = table.stencils[p];
        const Star& star = table.stars[p];
        const Point nrm = cloud.normals[p];
        Row& row = rows_[b];
        row.diag = normal_dot(nrm, st.center, cloud.dim);
        double m0norm = 0.0;
        for (std::size_t j = 0; j < deriv_count(cloud.dim); ++j)
            m0norm = std::max(m0norm, std::abs(st.center[j]));
        if (!(std::abs(row.diag) >= 1e-14 * m0norm))
            throw DegenerateBoundary(p, "normal-derivative center coefficient vanishes");
        mat[b * nb + b] = row.diag;
        for (std::size_t i = 0; i < star.size(); ++i) {
            const double c = normal_dot(nrm, st.neighbors[i], cloud.dim);
            const std::size_t q = star.neighbors[i];
            if (bindex[q] >= 0) {
                mat[b * nb + static_cast<std::size_t>(bindex[q])] -= c;
            } else {
                row.interior.push_back(q);
                row.interior_coeff.push_back(c);
            }
        }
    }
    const double rcond = invert_dense(std::move(mat), nb, inverse_);
    if (!(rcond >= 1e-14))
        throw DegenerateBoundary(nodes_.front(), "coupled boundary system is singular (rcond " +
                                                     std::to_string(rcond) + ")");
}

void NeumannProjector::apply(std::span<double> field) const {
    const std::size_t nb = nodes_.size();
    if (nb == 0) return;
    std::vector<double> rhs(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const Row& row = rows_[b];
        double v = 0.0;
        for (std::size_t i = 0; i < row.interior.size(); ++i)
            v += row.interior_coeff[i] * field[row.interior[i]];
        rhs[b] = v;
    }
    for (std::size_t b = 0; b < nb; ++b) {
        double v = 0.0;
        const double* r = &inverse_[b * nb];
        for (std::size_t c = 0; c < nb; ++c) v += r[c] * rhs[c];
        field[nodes_[b]] = v;
    }
}

double NeumannProjector::normal_derivative(std::size_t node, std::span<const double> field) const {
    const Stencil& st = table_->stencils[node];
    const Star& star = table_->stars[node];
    const Point nrm = normals_[node];
    double acc = -normal_dot(nrm, st.center, st.dim) * field[node];
    for (std::size_t i = 0; i < star.size(); ++i)
        acc += normal_dot(nrm, st.neighbors[i], st.dim) * field[star.neighbors[i]];
    return acc;
}

State enforce_neumann(const State& state, const StencilTable& table, const NodeCloud& cloud) {
    const NeumannProjector proj(cloud, table);
    State out = state;
    proj.apply(out.k);
    proj.apply(out.A);
    return out;
}

// ---------------------------------------------------------------------------
// Stepping

SchemeContext::SchemeContext(const NodeCloud& c, const StencilTable& t, const ModelParams& p)
    : cloud(c), table(t), params(p), neumann(c, t) {
    validate(p);
    growth.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        growth[i] = tech_rate(c.positions[i], p.g);
        if (!c.is_boundary(i)) interior.push_back(i);
    }
}

namespace {

template <bool TwoD>
std::size_t interior_kernel(const SchemeContext& ctx, const State& in, State& out, double dt,
                            std::span<const double> src) {
    const StencilTable& t = ctx.table;
    const ModelParams& m = ctx.params;
    const std::size_t s = t.s;
    const double* k = in.k.data();
    const double* A = in.A.data();
    double* kn = out.k.data();
    double* An = out.A.data();
    const auto n = static_cast<std::ptrdiff_t>(ctx.interior.size());
    std::size_t clamps = 0;

#pragma omp parallel for schedule(static) reduction(+ : clamps)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const std::size_t p = ctx.interior[static_cast<std::size_t>(ii)];
        const std::size_t base = p * s;
        const double k0 = k[p];
        const double A0 = A[p];
        double kx = -t.cx0[p] * k0, Ax = -t.cx0[p] * A0;
        double ky = 0.0, Ay = 0.0;
        if constexpr (TwoD) {
            ky = -t.cy0[p] * k0;
            Ay = -t.cy0[p] * A0;
        }
        double lapk = -t.clap0[p] * k0, lapA = -t.clap0[p] * A0;
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t q = t.nbr[base + i];
            const double kq = k[q], Aq = A[q];
            kx += t.cx[base + i] * kq;
            Ax += t.cx[base + i] * Aq;
            if constexpr (TwoD) {
                ky += t.cy[base + i] * kq;
                Ay += t.cy[base + i] * Aq;
            }
            lapk += t.clap[base + i] * kq;
            lapA += t.clap[base + i] * Aq;
        }
        const double flux = taxis(m.chi, kx, Ax, ky, Ay, k0, lapA, TwoD);
        const double f = src.empty() ? 0.0 : src[p];
        kn[p] = k0 + dt * k_rhs(lapk, flux, k0, A0, f, m);
        An[p] = A0 + dt * A_rhs(lapA, A0, ctx.growth[p], m);
        if (k0 < 0.0) ++clamps;
    }
    return clamps;
}

}  // namespace

StepResult step(const SchemeContext& ctx, const State& state, double dt,
                std::span<const double> k_source) {
    check_inputs(ctx, state, dt, k_source);
    StepResult r;
    r.state = state;
    r.state.time = state.time + dt;
    r.clamps = ctx.table.dim == 2 ? interior_kernel<true>(ctx, state, r.state, dt, k_source)
                                  : interior_kernel<false>(ctx, state, r.state, dt, k_source);
    ctx.neumann.apply(r.state.k);
    ctx.neumann.apply(r.state.A);
    check_state(r.state, r.state.time);
    return r;
}

StepResult step_reference(const SchemeContext& ctx, const State& state, double dt,
                          std::span<const double> k_source, std::span<const std::size_t> order) {
    check_inputs(ctx, state, dt, k_source);
    const ModelParams& m = ctx.params;
    StepResult r;
    r.state = state;
    r.state.time = state.time + dt;

    std::vector<std::size_t> natural;
    if (order.empty()) {
        natural.resize(ctx.cloud.size());
        std::iota(natural.begin(), natural.end(), std::size_t{0});
        order = natural;
    }
    std::vector<double> kv, Av;
    for (std::size_t p : order) {
        if (ctx.cloud.is_boundary(p)) continue;
        const Star& star = ctx.table.stars[p];
        const Stencil& st = ctx.table.stencils[p];
        kv.resize(star.size());
        Av.resize(star.size());
        for (std::size_t i = 0; i < star.size(); ++i) {
            kv[i] = state.k[star.neighbors[i]];
            Av[i] = state.A[star.neighbors[i]];
        }
        const StarValues ks{state.k[p], kv};
        const StarValues As{state.A[p], Av};
        const double lapk = gfd_laplacian(st, ks);
        const double lapA = gfd_laplacian(st, As);
        const double flux = st.dim == 2 ? flux_term_2d(st, ks, As, m.chi)
                                        : flux_term_1d(st, ks, As, m.chi);
        const double f = k_source.empty() ? 0.0 : k_source[p];
        r.state.k[p] = ks.center + dt * k_rhs(lapk, flux, ks.center, As.center, f, m);
        r.state.A[p] = As.center + dt * A_rhs(lapA, As.center, ctx.growth[p], m);
        if (ks.center < 0.0) ++r.clamps;
    }
    ctx.neumann.apply(r.state.k);
    ctx.neumann.apply(r.state.A);
    check_state(r.state, r.state.time);
    return r;
}

// ---------------------------------------------------------------------------
// Run loop

void validate(const SchemeConfig& c) {
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ValidationError("scheme: dt must be > 0");
    if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final))
        throw ValidationError("scheme: t_final must be >= 0");
    if (!std::is_sorted(c.snapshot_times.begin(), c.snapshot_times.end()))
        throw ValidationError("scheme: snapshot times must be sorted");
    for (double t : c.snapshot_times) {
        if (t < 0.0 || t > c.t_final)
            throw ValidationError("scheme: snapshot time " + std::to_string(t) +
                                  " outside [0, t_final]");
    }
    if (c.stability_interval == 0) throw ValidationError("scheme: stability interval must be >= 1");
    if (c.log_interval == 0) throw ValidationError("scheme: log interval must be >= 1");
}

namespace {

// Time after `j` steps of size dt from t0, snapped onto t_final when the
// remainder is negligible.
double segment_time(double t0, std::size_t j, double dt, double t_final) {
    const double t = t0 + static_cast<double>(j) * dt;
    if (t > t_final || t_final - t <= 1e-9 * dt) return t_final;
    return t;
}

LogEntry make_entry(std::size_t step, const State& s, double dt, std::size_t clamps) {
    LogEntry e;
    e.step = step;
    e.time = s.time;
    e.dt = dt;
    e.clamp_count = clamps;
    e.max_k = -std::numeric_limits<double>::infinity();
    e.min_k = std::numeric_limits<double>::infinity();
    for (double v : s.k) {
        e.max_k = std::max(e.max_k, v);
        e.min_k = std::min(e.min_k, v);
    }
    return e;
}

}  // namespace

std::size_t step_count(double t_final, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("step_count: dt must be positive");
    std::size_t n = 0;
    while (segment_time(0.0, n, dt, t_final) < t_final) ++n;
    return n;
}

Trajectory run(const SchemeContext& ctx, State initial, const SchemeConfig& config,
               const Forcing& forcing) {
    validate(config);
    if (initial.k.size() != ctx.cloud.size() || initial.A.size() != ctx.cloud.size())
        throw InvalidArgument("run: initial state size does not match the cloud");

    Trajectory traj;
    State cur = std::move(initial);
    cur.time = 0.0;
    ctx.neumann.apply(cur.k);
    ctx.neumann.apply(cur.A);

    const auto& times = config.snapshot_times;
    std::size_t next_snap = 0;
    while (next_snap < times.size() && times[next_snap] <= 0.0)
        traj.snapshots.push_back({times[next_snap++], cur});

    double dt = config.dt;
    double seg_t0 = 0.0;
    std::size_t seg_j = 0;
    std::size_t nstep = 0;
    std::vector<double> source;
    if (forcing) source.resize(ctx.cloud.size());

    try {
        check_state(cur, 0.0);
    } catch (const DivergenceError& e) {
        traj.divergence = DivergenceInfo{0, 0.0, e.node(), e.what()};
        traj.final_state = cur;
        traj.final_dt = dt;
        return traj;
    }

    std::optional<double> pending_bound;
    std::size_t pending_violations = 0;
    auto log_row = [&](std::size_t step) {
        LogEntry e = make_entry(step, cur, dt, traj.clamp_count);
        e.dt_bound = pending_bound;
        e.violations = pending_violations;
        traj.log.push_back(e);
    };

    while (cur.time < config.t_final) {
        if (config.stability_mode != StabilityMode::off && nstep % config.stability_interval == 0) {
            try {
                const StabilityReport rep =
                    dt_bound(ctx.cloud, ctx.table, cur, ctx.params, config.stability);
                pending_bound = rep.global_dt;
                pending_violations = rep.violations.size();
                if (dt > rep.global_dt) {
                    ++traj.bound_exceeded;
                    if (config.stability_mode == StabilityMode::adapt) {
                        dt = 0.9 * rep.global_dt;
                        ++traj.dt_reductions;
                        seg_t0 = cur.time;
                        seg_j = 0;
                    }
                }
            } catch (const NoAdmissibleDt&) {
                pending_bound.reset();
                pending_violations = 0;
            }
        }
        if (nstep == 0) log_row(0);

        const double t_next = segment_time(seg_t0, seg_j + 1, dt, config.t_final);
        const double h = t_next - cur.time;
        if (forcing) forcing(cur.time, source);
        StepResult r;
        try {
            r = step(ctx, cur, h, source);
        } catch (const DivergenceError& e) {
            traj.divergence = DivergenceInfo{nstep + 1, e.time(), e.node(), e.what()};
            break;
        }
        r.state.time = t_next;
        ++seg_j;
        ++nstep;
        traj.clamp_count += r.clamps;

        while (next_snap < times.size() && times[next_snap] <= t_next) {
            const double ts = times[next_snap];
            const bool take_prev = (ts - cur.time) < (t_next - ts);
            traj.snapshots.push_back({ts, take_prev ? cur : r.state});
            ++next_snap;
        }
        cur = std::move(r.state);
        const bool last = cur.time >= config.t_final;
        if (nstep % config.log_interval == 0 || last) {
            log_row(nstep);
            pending_bound.reset();
            pending_violations = 0;
        }
    }
    if (traj.log.empty()) log_row(0);
    traj.steps = nstep;
    traj.final_dt = dt;
    traj.final_state = std::move(cur);
    return traj;
}

// ---------------------------------------------------------------------------

std::string snapshot_file_name(double time) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_t%.6f.csv", time);
    return buf;
}

void write_snapshot_csv(const NodeCloud& cloud, const State& state,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write snapshot " + path.string());
    out << (cloud.dim == 2 ? "node,x,y,k,A\n" : "node,x,k,A\n") << std::setprecision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        out << i << ',' << cloud.positions[i].x;
        if (cloud.dim == 2) out << ',' << cloud.positions[i].y;
        out << ',' << state.k[i] << ',' << state.A[i] << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace meshless
