#include "meshless/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "meshless/errors.hpp"

namespace meshless {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

class KeyValues {
public:
    explicit KeyValues(const std::string& text) {
        std::istringstream in(text);
        std::string raw, section;
        std::size_t lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ParseError("unterminated section header", lineno);
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw ParseError("empty section name", lineno);
                sections_.insert(section);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw ParseError("empty key", lineno);
            const std::string path = section.empty() ? key : section + "." + key;
            if (entries_.count(path)) throw ParseError("duplicate key '" + path + "'", lineno);
            entries_[path] = {trim(line.substr(eq + 1)), lineno, false};
        }
    }

    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> str(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::string str_or(const std::string& key, const std::string& def) {
        return str(key).value_or(def);
    }

    std::optional<double> num(const std::string& key) {
        auto v = str(key);
        if (!v) return std::nullopt;
        return to_double(key, *v);
    }

    double num_or(const std::string& key, double def) { return num(key).value_or(def); }

    double require_num(const std::string& key) {
        auto v = num(key);
        if (!v) throw ParseError("missing required key '" + key + "'", 0);
        return *v;
    }

    std::optional<long long> integer(const std::string& key) {
        auto v = str(key);
        if (!v) return std::nullopt;
        std::size_t used = 0;
        long long out = 0;
        try {
            out = std::stoll(*v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v->size())
            throw ParseError("key '" + key + "': expected an integer, got '" + *v + "'", line(key));
        return out;
    }

    std::vector<double> list(const std::string& key) {
        auto v = str(key);
        if (!v) return {};
        std::vector<double> out;
        std::istringstream ss(*v);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::string t = trim(cell);
            if (t.empty()) continue;
            out.push_back(to_double(key, t));
        }
        return out;
    }

    std::size_t line(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    void reject_unused() const {
        for (const auto& [key, e] : entries_) {
            if (!e.used) throw ParseError("unknown key '" + key + "'", e.line);
        }
    }

    double to_double(const std::string& key, const std::string& v) const {
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size() || !std::isfinite(out))
            throw ParseError("key '" + key + "': expected a number, got '" + v + "'", line(key));
        return out;
    }

private:
    std::map<std::string, Entry> entries_;
    std::set<std::string> sections_;
};

[[noreturn]] void range_error(const std::string& key, const std::string& why) {
    throw ValidationError("key '" + key + "': " + why);
}

template <class Enum>
Enum parse_enum(KeyValues& kv, const std::string& key,
                const std::vector<std::pair<std::string, Enum>>& options, Enum def) {
    const auto v = kv.str(key);
    if (!v) return def;
    for (const auto& [name, value] : options)
        if (*v == name) return value;
    std::string allowed;
    for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + name;
    throw ParseError("key '" + key + "': expected " + allowed + ", got '" + *v + "'", kv.line(key));
}

FieldSpec parse_field(KeyValues& kv, const std::string& prefix, int dim, double length,
                      const std::filesystem::path& base_dir, double default_value) {
    FieldSpec f;
    const std::string k = "initial." + prefix + "_";
    f.kind = parse_enum<FieldKind>(kv, k + "kind",
                                   {{"constant", FieldKind::constant},
                                    {"piecewise", FieldKind::piecewise},
                                    {"gaussian_sum", FieldKind::gaussian_sum},
                                    {"file", FieldKind::file}},
                                   FieldKind::constant);
    switch (f.kind) {
    case FieldKind::constant:
        f.value = kv.num_or(k + "value", default_value);
        break;
    case FieldKind::piecewise: {
        if (dim != 1) range_error(k + "kind", "piecewise initial data is 1D only");
        f.breakpoints = kv.list(k + "breakpoints");
        f.slopes = kv.list(k + "slopes");
        f.intercepts = kv.list(k + "intercepts");
        const std::size_t pieces = f.breakpoints.size() + 1;
        if (f.slopes.size() != pieces || f.intercepts.size() != pieces)
            range_error(k + "slopes", "need one slope and one intercept per piece (" +
                                          std::to_string(pieces) + ")");
        if (!std::is_sorted(f.breakpoints.begin(), f.breakpoints.end()))
            range_error(k + "breakpoints", "must be sorted");
        for (double b : f.breakpoints)
            if (b <= 0.0 || b >= length) range_error(k + "breakpoints", "must lie inside (0, L)");
        break;
    }
    case FieldKind::gaussian_sum: {
        f.base = kv.num_or(k + "base", 0.0);
        const std::string key = k + "bumps";
        const auto text = kv.str(key);
        if (!text) range_error(key, "gaussian_sum needs bumps");
        std::istringstream groups(*text);
        std::string group;
        while (std::getline(groups, group, ';')) {
            if (trim(group).empty()) continue;
            std::istringstream nums(group);
            std::vector<double> v;
            std::string tok;
            while (nums >> tok) v.push_back(kv.to_double(key, tok));
            const std::size_t want = dim == 2 ? 4 : 3;
            if (v.size() != want)
                range_error(key, "each bump needs " + std::to_string(want) +
                                     " numbers (amplitude, center, sigma)");
            GaussianBump b;
            b.amplitude = v[0];
            b.center = dim == 2 ? Point{v[1], v[2]} : Point{v[1], 0.0};
            b.sigma = v.back();
            if (!(b.sigma > 0.0)) range_error(key, "bump sigma must be > 0");
            f.bumps.push_back(b);
        }
        if (f.bumps.empty()) range_error(key, "gaussian_sum needs at least one bump");
        break;
    }
    case FieldKind::file: {
        const auto p = kv.str(k + "path");
        if (!p) range_error(k + "path", "file initial data needs a path");
        f.path = base_dir.empty() ? std::filesystem::path(*p) : base_dir / *p;
        if (!std::filesystem::exists(f.path)) range_error(k + "path", "file not found: " + f.path.string());
        break;
    }
    }
    return f;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir) {
    KeyValues kv(text);
    Scenario sc;
    sc.name = kv.str_or("name", "scenario");

    // cloud
    if (!kv.has("cloud.kind")) throw ParseError("missing required key 'cloud.kind'", 0);
    CloudSpec& c = sc.cloud;
    c.kind = parse_enum<CloudKind>(
        kv, "cloud.kind",
        {{"regular", CloudKind::regular}, {"jittered", CloudKind::jittered}, {"file", CloudKind::file}},
        CloudKind::regular);
    if (c.kind == CloudKind::file) {
        const auto p = kv.str("cloud.path");
        if (!p) range_error("cloud.path", "file clouds need a path");
        c.path = base_dir.empty() ? std::filesystem::path(*p) : base_dir / *p;
        if (!std::filesystem::exists(c.path)) range_error("cloud.path", "file not found: " + c.path.string());
        // dim and length come from the file
        const NodeCloud probe = load_cloud(c.path);
        c.dim = probe.dim;
        c.length = probe.length;
    } else {
        c.dim = static_cast<int>(kv.integer("cloud.dim").value_or(1));
        if (c.dim != 1 && c.dim != 2) range_error("cloud.dim", "must be 1 or 2");
        c.nodes_per_axis = static_cast<int>(kv.integer("cloud.nodes_per_axis").value_or(21));
        if (c.nodes_per_axis < 2) range_error("cloud.nodes_per_axis", "must be >= 2");
        c.length = kv.num_or("cloud.length", 1.0);
        if (!(c.length > 0.0)) range_error("cloud.length", "must be > 0");
        if (c.kind == CloudKind::jittered) {
            c.jitter = kv.num_or("cloud.jitter", 0.3);
            if (!(c.jitter >= 0.0 && c.jitter < 0.49)) range_error("cloud.jitter", "must lie in [0, 0.49)");
            const long long seed = kv.integer("cloud.seed").value_or(0);
            if (seed < 0) range_error("cloud.seed", "must be >= 0");
            c.seed = static_cast<std::uint64_t>(seed);
        }
    }

    // star
    StarConfig& st = sc.star;
    const long long s = kv.integer("star.s").value_or(c.dim == 1 ? 2 : 8);
    if (s < static_cast<long long>(min_star_size(c.dim)))
        range_error("star.s", "must be >= " + std::to_string(min_star_size(c.dim)) + " in " +
                                  std::to_string(c.dim) + "D");
    st.s = static_cast<std::size_t>(s);
    st.criterion = parse_enum<StarCriterion>(
        kv, "star.criterion",
        {{"distance", StarCriterion::distance}, {"quadrant", StarCriterion::quadrant}},
        StarCriterion::distance);
    if (st.criterion == StarCriterion::quadrant && c.dim != 2)
        range_error("star.criterion", "quadrant criterion requires dim = 2");
    st.weight.kind = parse_enum<WeightKind>(
        kv, "star.weight",
        {{"potential", WeightKind::potential}, {"exponential", WeightKind::exponential}},
        WeightKind::potential);
    st.weight.exponent = kv.num_or("star.exponent", 3.0);
    st.weight.shape = kv.num_or("star.shape", 1.0);
    if (!(st.weight.exponent >= 0.0)) range_error("star.exponent", "must be >= 0");
    if (!(st.weight.shape > 0.0)) range_error("star.shape", "must be > 0");

    // model
    if (!kv.has_section("model")) throw ParseError("missing required section [model]", 0);
    ModelParams& m = sc.model;
    m.alpha1 = kv.num_or("model.alpha1", m.alpha1);
    m.alpha2 = kv.num_or("model.alpha2", m.alpha2);
    m.p = kv.num_or("model.p", m.p);
    m.q = kv.num_or("model.q", m.q);
    m.delta = kv.num_or("model.delta", m.delta);
    m.chi = kv.num_or("model.chi", m.chi);
    m.tech_diffusion = kv.num_or("model.tech_diffusion", m.tech_diffusion);
    m.g.kind = parse_enum<GrowthKind>(
        kv, "model.g_kind", {{"constant", GrowthKind::constant}, {"gaussian", GrowthKind::gaussian}},
        GrowthKind::constant);
    m.g.level = kv.num_or("model.g_level", 0.0);
    m.g.sigma = kv.num_or("model.g_sigma", 1.0);
    const std::vector<double> gc = kv.list("model.g_center");
    if (!gc.empty()) {
        if (gc.size() != static_cast<std::size_t>(c.dim))
            range_error("model.g_center", "needs " + std::to_string(c.dim) + " coordinate(s)");
        m.g.center = {gc[0], c.dim == 2 ? gc[1] : 0.0};
    }
    try {
        validate(m);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("[model] ") + e.what());
    }

    // initial
    sc.initial.k0 = parse_field(kv, "k0", c.dim, c.length, base_dir, 1.0);
    sc.initial.A0 = parse_field(kv, "A0", c.dim, c.length, base_dir, 1.0);

    // scheme
    SchemeConfig& sch = sc.scheme;
    sch.stability_mode = parse_enum<StabilityMode>(
        kv, "scheme.stability_mode",
        {{"off", StabilityMode::off}, {"check", StabilityMode::check}, {"adapt", StabilityMode::adapt}},
        StabilityMode::off);
    const auto dt = kv.num("scheme.dt");
    if (dt) {
        sch.dt = *dt;
    } else if (sch.stability_mode == StabilityMode::adapt) {
        sc.dt_given = false;
    } else {
        throw ParseError("missing required key 'scheme.dt' (only stability_mode = adapt may omit it)", 0);
    }
    sch.t_final = kv.require_num("scheme.t_final");
    if (kv.has("scheme.snapshots")) sch.snapshot_times = kv.list("scheme.snapshots");
    else sch.snapshot_times = {0.0, sch.t_final};
    sch.stability_interval =
        static_cast<std::size_t>(std::max(1LL, kv.integer("scheme.stability_interval").value_or(10)));
    sch.log_interval =
        static_cast<std::size_t>(std::max(1LL, kv.integer("scheme.log_interval").value_or(1)));
    sch.stability.proxy = parse_enum<FPrimeProxy>(
        kv, "scheme.fprime",
        {{"current", FPrimeProxy::current}, {"conservative", FPrimeProxy::conservative}},
        FPrimeProxy::current);
    if (sc.dt_given) {
        try {
            validate(sch);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("[scheme] ") + e.what());
        }
    }

    sc.output_dir = kv.str_or("output.dir", "out");
    kv.reject_unused();
    return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Presets

namespace {

// Shared by every preset. The production parameters and d are not given for
// the reference experiments; with these f is S-shaped and saturates at
// alpha1/alpha2, and d keeps A compatible with the no-flux boundary.
constexpr const char* kPresetModel = R"(
alpha1 = 0.0225
alpha2 = 0.02
p = 2
q = 2
tech_diffusion = 0.03
)";

constexpr const char* kCloud1d = R"(
[cloud]
kind = jittered
dim = 1
nodes_per_axis = 16
length = 1
jitter = 0.2
seed = 7

[star]
s = 2
criterion = distance
weight = potential
exponent = 3
)";

constexpr const char* kCloud2d = R"(
[cloud]
kind = jittered
dim = 2
nodes_per_axis = 13
length = 1
jitter = 0.2
seed = 11

[star]
s = 8
criterion = distance
weight = potential
exponent = 3
)";

// k0 = 5 on [0,0.25], 40x-5 on (0.25,0.75), 25 on [0.75,1]; A0 = 1.
constexpr const char* kInitial1d = R"(
[initial]
k0_kind = piecewise
k0_breakpoints = 0.25, 0.75
k0_slopes = 0, 40, 0
k0_intercepts = 5, -5, 25
A0_kind = constant
A0_value = 1
)";

// Two-bump stand-in for the figure-only 2D initial capital.
constexpr const char* kInitial2d = R"(
[initial]
k0_kind = gaussian_sum
k0_base = 2
k0_bumps = 20 0.3 0.3 0.12; 12 0.7 0.65 0.15
A0_kind = constant
A0_value = 1
)";

struct Preset {
    const char* name;
    const char* cloud;
    const char* initial;
    const char* model;   // appended after the shared production parameters
    const char* scheme;
};

// The time horizons read the reference "L" values (20 in 1D, 150 in 2D) as
// final times; "mu" in the 2D runs is read as the depreciation rate.
constexpr Preset kPresets[] = {
    {"paper-1d-delta005", kCloud1d, kInitial1d,
     "delta = 0.05\nchi = 0\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.5\ng_sigma = 0.2\n",
     "t_final = 20\nsnapshots = 0, 5, 10, 20\n"},
    {"paper-1d-delta002", kCloud1d, kInitial1d,
     "delta = 0.02\nchi = 0\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.5\ng_sigma = 0.2\n",
     "t_final = 20\nsnapshots = 0, 5, 10, 20\n"},
    {"paper-1d-chi1", kCloud1d, kInitial1d,
     "delta = 0.02\nchi = 1\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.1\ng_sigma = 0.2\n",
     "t_final = 20\nsnapshots = 0, 5, 10, 20\n"},
    {"paper-2d-delta005", kCloud2d, kInitial2d,
     "delta = 0.05\nchi = 0\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.5, 0.5\ng_sigma = 0.2\n",
     "t_final = 150\nsnapshots = 0, 10, 50, 150\n"},
    {"paper-2d-delta0085-constA", kCloud2d, kInitial2d,
     "delta = 0.085\nchi = 0\ng_kind = constant\ng_level = 0\n",
     "t_final = 150\nsnapshots = 0, 10, 50, 150\n"},
    {"paper-2d-delta0085", kCloud2d, kInitial2d,
     "delta = 0.085\nchi = 0\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.5, 0.5\ng_sigma = 0.2\n",
     "t_final = 150\nsnapshots = 0, 10, 50, 150\n"},
    {"paper-2d-delta03-chi0", kCloud2d, kInitial2d,
     "delta = 0.3\nchi = 0\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.5, 0.5\ng_sigma = 0.2\n",
     "t_final = 150\nsnapshots = 0, 10, 50, 150\n"},
    {"paper-2d-delta03-chi1", kCloud2d, kInitial2d,
     "delta = 0.3\nchi = 1\ng_kind = gaussian\ng_level = 0.1\ng_center = 0.5, 0.5\ng_sigma = 0.2\n",
     "t_final = 150\nsnapshots = 0, 10, 50, 150\n"},
};

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const Preset& p : kPresets) out.emplace_back(p.name);
    return out;
}

std::string preset_text(const std::string& name) {
    for (const Preset& p : kPresets) {
        if (name != p.name) continue;
        std::string t = "name = " + name + "\n";
        t += p.cloud;
        t += "\n[model]";
        t += kPresetModel;
        t += p.model;
        t += p.initial;
        t += "\n[scheme]\ndt = 0.001\nstability_mode = check\nstability_interval = 100\n"
             "log_interval = 100\n";
        t += p.scheme;
        t += "\n[output]\ndir = out/" + name + "\n";
        return t;
    }
    throw InvalidArgument("unknown preset '" + name + "'");
}

Scenario load_preset(const std::string& name) { return parse_scenario_text(preset_text(name)); }

// ---------------------------------------------------------------------------

NodeCloud build_cloud(const Scenario& sc) {
    const CloudSpec& c = sc.cloud;
    switch (c.kind) {
    case CloudKind::regular:
        return generate_regular(c.nodes_per_axis, c.length, c.dim);
    case CloudKind::jittered:
        return generate_jittered(c.nodes_per_axis, c.length, c.dim, c.jitter, c.seed);
    case CloudKind::file:
        return load_cloud(c.path);
    }
    throw InvalidArgument("unknown cloud kind");
}

double evaluate_field(const FieldSpec& f, Point x) {
    switch (f.kind) {
    case FieldKind::constant:
        return f.value;
    case FieldKind::piecewise: {
        std::size_t piece = 0;
        while (piece < f.breakpoints.size() && x.x > f.breakpoints[piece]) ++piece;
        return f.intercepts[piece] + f.slopes[piece] * x.x;
    }
    case FieldKind::gaussian_sum: {
        double v = f.base;
        for (const GaussianBump& b : f.bumps) {
            const double dx = x.x - b.center.x, dy = x.y - b.center.y;
            v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
        }
        return v;
    }
    case FieldKind::file:
        throw InvalidArgument("file fields are read per node, not evaluated");
    }
    return 0.0;
}

namespace {

std::vector<double> read_field_file(const std::filesystem::path& path, const std::string& column,
                                    std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError("empty field file " + path.string(), 1);
    std::vector<std::string> header;
    {
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
    }
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end())
        throw ParseError(path.string() + ": no column '" + column + "'", lineno);
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() != header.size())
            throw ParseError(path.string() + ": wrong column count", lineno);
        try {
            out.push_back(std::stod(cells[col]));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": not a number '" + cells[col] + "'", lineno);
        }
    }
    if (out.size() != expected)
        throw ValidationError(path.string() + ": has " + std::to_string(out.size()) +
                              " rows, cloud has " + std::to_string(expected) + " nodes");
    return out;
}

std::vector<double> field_values(const FieldSpec& f, const NodeCloud& cloud,
                                 const std::string& column) {
    if (f.kind == FieldKind::file) return read_field_file(f.path, column, cloud.size());
    std::vector<double> v(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) v[i] = evaluate_field(f, cloud.positions[i]);
    return v;
}

const char* name_of(CloudKind k) {
    switch (k) {
    case CloudKind::regular: return "regular";
    case CloudKind::jittered: return "jittered";
    case CloudKind::file: return "file";
    }
    return "?";
}

const char* name_of(FieldKind k) {
    switch (k) {
    case FieldKind::constant: return "constant";
    case FieldKind::piecewise: return "piecewise";
    case FieldKind::gaussian_sum: return "gaussian_sum";
    case FieldKind::file: return "file";
    }
    return "?";
}

const char* name_of(StabilityMode m) {
    switch (m) {
    case StabilityMode::off: return "off";
    case StabilityMode::check: return "check";
    case StabilityMode::adapt: return "adapt";
    }
    return "?";
}

}  // namespace

State initial_state(const Scenario& sc, const NodeCloud& cloud) {
    State s;
    s.k = field_values(sc.initial.k0, cloud, "k");
    s.A = field_values(sc.initial.A0, cloud, "A");
    s.time = 0.0;
    return s;
}

void describe(const Scenario& sc, std::ostream& out) {
    const auto& c = sc.cloud;
    const auto& m = sc.model;
    out << "name = " << sc.name << '\n'
        << "cloud = " << name_of(c.kind) << ", dim " << c.dim << ", " << c.nodes_per_axis
        << " per axis, jitter " << c.jitter << ", seed " << c.seed << '\n'
        << "star = s " << sc.star.s << ", "
        << (sc.star.criterion == StarCriterion::distance ? "distance" : "quadrant") << ", "
        << (sc.star.weight.kind == WeightKind::potential ? "potential " : "exponential ")
        << (sc.star.weight.kind == WeightKind::potential ? sc.star.weight.exponent
                                                          : sc.star.weight.shape)
        << '\n'
        << "f = alpha1 " << m.alpha1 << ", alpha2 " << m.alpha2 << ", p " << m.p << ", q " << m.q
        << '\n'
        << "delta = " << m.delta << ", chi = " << m.chi << ", d = " << m.tech_diffusion << '\n'
        << "g = " << (m.g.kind == GrowthKind::constant ? "constant " : "gaussian ") << m.g.level;
    if (m.g.kind == GrowthKind::gaussian) {
        out << " at (" << m.g.center.x;
        if (c.dim == 2) out << ", " << m.g.center.y;
        out << "), sigma " << m.g.sigma;
    }
    out << '\n'
        << "k0 = " << name_of(sc.initial.k0.kind) << ", A0 = " << name_of(sc.initial.A0.kind);
    if (sc.initial.A0.kind == FieldKind::constant) out << ' ' << sc.initial.A0.value;
    out << '\n'
        << "dt = " << sc.scheme.dt << ", t_final = " << sc.scheme.t_final
        << ", stability = " << name_of(sc.scheme.stability_mode) << '\n';
}

// ---------------------------------------------------------------------------
// Output

std::vector<std::filesystem::path> write_snapshots(const Trajectory& traj, const NodeCloud& cloud,
                                                   const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> files;
    for (const Snapshot& s : traj.snapshots) {
        const auto p = dir / snapshot_file_name(s.requested_time);
        write_snapshot_csv(cloud, s.state, p);
        files.push_back(p);
    }

    const auto log_path = dir / "run_log.csv";
    {
        std::ofstream out(log_path);
        if (!out) throw IoError("cannot write " + log_path.string());
        out << "step,time,max_k,min_k,clamp_count,dt_bound\n" << std::setprecision(17);
        for (const LogEntry& e : traj.log) {
            out << e.step << ',' << e.time << ',' << e.max_k << ',' << e.min_k << ','
                << e.clamp_count << ',';
            if (e.dt_bound) out << *e.dt_bound;
            out << '\n';
        }
        if (!out) throw IoError("write failed for " + log_path.string());
    }
    files.push_back(log_path);

    const auto plot_path = dir / "plot.gp";
    {
        std::ofstream out(plot_path);
        if (!out) throw IoError("cannot write " + plot_path.string());
        out << "# gnuplot script: capital k per snapshot\n"
            << "set datafile separator ','\n"
            << "set key outside\n";
        if (cloud.dim == 1) {
            out << "set xlabel 'x'\nset ylabel 'k'\nplot ";
            for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
                out << (i ? ", \\\n     " : "") << "'" << snapshot_file_name(traj.snapshots[i].requested_time)
                    << "' every ::1 using 2:3 with linespoints title 't=" << traj.snapshots[i].requested_time << "'";
            }
            out << '\n';
        } else {
            out << "set xlabel 'x'\nset ylabel 'y'\nset zlabel 'k'\n";
            for (const Snapshot& s : traj.snapshots) {
                out << "splot '" << snapshot_file_name(s.requested_time)
                    << "' every ::1 using 2:3:4 with points pt 7 title 't=" << s.requested_time
                    << "'\npause -1\n";
            }
        }
        if (!out) throw IoError("write failed for " + plot_path.string());
    }
    files.push_back(plot_path);
    return files;
}

}  // namespace meshless
