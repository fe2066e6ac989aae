#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "meshless/errors.hpp"
#include "meshless/scenario.hpp"

using namespace meshless;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[cloud]
kind = regular
[model]
[scheme]
dt = 0.001
t_final = 0.1
)";

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
    const Scenario sc = parse_scenario_text(kMinimal);
    const ModelParams def;
    CHECK(sc.cloud.dim == 1);
    CHECK(sc.star.s == 2);
    CHECK(sc.model.alpha1 == def.alpha1);
    CHECK(sc.model.delta == def.delta);
    CHECK(sc.scheme.dt == 0.001);
    REQUIRE(sc.scheme.snapshot_times.size() == 2);
    CHECK(sc.scheme.snapshot_times[1] == 0.1);
    CHECK(sc.dt_given);
}

TEST_CASE("malformed configs") {
    const std::string no_dt = "[cloud]\nkind = regular\n[model]\n[scheme]\nt_final = 1\n";
    CHECK_THROWS_AS(parse_scenario_text(no_dt), ParseError);
    const Scenario adapt = parse_scenario_text(no_dt + "stability_mode = adapt\n");
    CHECK_FALSE(adapt.dt_given);

    try {
        parse_scenario_text(std::string(kMinimal) + "[model]\nbeta = 2\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("model.beta") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scenario_text("[cloud]\nkind = hexagonal\n[model]\n[scheme]\ndt=1\nt_final=1\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_scenario_text(std::string(kMinimal) + "[scheme]\ndt = 0.002\n"), ParseError);
    CHECK_THROWS(parse_scenario_text("[cloud]\nkind = regular\n[model]\np = -1\n[scheme]\ndt=1\nt_final=1\n"));
    CHECK_THROWS_AS(load_preset("no-such-preset"), InvalidArgument);
}

TEST_CASE("presets") {
    const auto names = preset_names();
    CHECK(names.size() == 8);
    for (const std::string& n : names) {
        const Scenario sc = load_preset(n);
        CHECK(sc.name == n);
        const NodeCloud c = build_cloud(sc);
        CHECK(c.size() > 0);
        const State s = initial_state(sc, c);
        CHECK(s.k.size() == c.size());
        std::ostringstream d;
        describe(sc, d);
        CHECK_FALSE(d.str().empty());
    }
    const Scenario p = load_preset("paper-1d-delta002");
    CHECK(p.cloud.dim == 1);
    CHECK(p.model.delta == 0.02);
    CHECK(p.model.chi == 0.0);
    CHECK(p.scheme.t_final == 20.0);
    CHECK(load_preset("paper-1d-chi1").model.chi == 1.0);
    CHECK(load_preset("paper-2d-delta03-chi1").cloud.dim == 2);
}

TEST_CASE("piecewise initial capital") {
    const Scenario sc = load_preset("paper-1d-delta002");
    CHECK(evaluate_field(sc.initial.k0, {0.0, 0.0}) == doctest::Approx(5.0));
    CHECK(evaluate_field(sc.initial.k0, {1.0, 0.0}) == doctest::Approx(25.0));
    CHECK(evaluate_field(sc.initial.A0, {0.4, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("snapshot files") {
    const fs::path dir = fs::temp_directory_path() / "meshless_test_snapshots";
    fs::remove_all(dir);
    Scenario sc = parse_scenario_text(std::string(kMinimal) + "snapshots = 0, 0.05, 0.1\n");
    const NodeCloud c = build_cloud(sc);
    const StencilTable t = build_all_stencils(c, sc.star);
    const SchemeContext ctx(c, t, sc.model);
    const Trajectory tr = run(ctx, initial_state(sc, c), sc.scheme);
    const auto files = write_snapshots(tr, c, dir);
    CHECK(files.size() == 5);
    for (double s : {0.0, 0.05, 0.1}) {
        const fs::path p = dir / snapshot_file_name(s);
        REQUIRE(fs::exists(p));
        CHECK(line_count(p) == c.size() + 1);
    }
    const std::string first = slurp(dir / snapshot_file_name(0.1));
    write_snapshots(tr, c, dir);
    CHECK(slurp(dir / snapshot_file_name(0.1)) == first);
    fs::remove_all(dir);
}
