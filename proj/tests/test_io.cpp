#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "nlot/io.hpp"

using namespace nlot;

TEST_CASE("config digest is canonical over key order and sensitive to values", "[io]") {
    json a = json::parse(R"({"space": {"type": "lattice", "extents": [16]}, "seed": 3})");
    json b = json::parse(R"({"seed": 3, "space": {"extents": [16], "type": "lattice"}})");
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a).size() == 16);
    json c = a;
    c["seed"] = 4;
    CHECK(config_digest(a) != config_digest(c));
}

TEST_CASE("space round trip and validation", "[io]") {
    auto sp = space_from_json(json::parse(R"({"type": "lattice", "extents": [4, 6], "h": 0.5})"));
    CHECK(sp.n() == 24);
    CHECK(sp.h == 0.5);
    auto gen = space_from_json(
        json::parse(R"({"type": "general", "positions": [[0], [1], [2.5]], "m": [1, 2, 1]})"));
    CHECK(gen.n() == 3);
    CHECK(gen.m[1] == 2.0);

    CHECK_THROWS_AS(space_from_json(json::parse(R"({"type": "torus"})")), ConfigError);
    CHECK_THROWS_AS(space_from_json(json::parse(R"({"type": "lattice"})")), ConfigError);
    CHECK_THROWS_AS(space_from_json(json::parse(R"({"type": "lattice", "extents": [4, 4, 4]})")),
                    ConfigError);
    CHECK_THROWS_AS(space_from_json(json::parse(R"({"type": "lattice", "extents": [0]})")),
                    ConfigError);
    CHECK_THROWS_AS(
        space_from_json(json::parse(R"({"type": "general", "positions": [[0]], "m": [1, 2]})")),
        ConfigError);
}

TEST_CASE("kernel constructors from json", "[io]") {
    auto sp = make_lattice({16}, 1.0);
    auto frac = kernel_from_json(
        sp, json::parse(R"({"type": "fractional", "alpha": 1.0, "R": 7, "c": 1.0})"));
    CHECK(frac.form == KernelForm::TranslationInvariant);
    auto ti = kernel_from_json(
        sp, json::parse(R"({"type": "translation_invariant", "disp": [[1], [-1]], "nu": [1, 1]})"));
    CHECK(ti.disp.size() == 2);
    auto two = make_general({{0.0}, {1.0}}, {1.0, 1.0});
    auto dense = kernel_from_json(two, json::parse(R"({"type": "dense", "J": [0, 1, 1, 0]})"));
    CHECK(dense.form == KernelForm::Dense);

    CHECK_THROWS_AS(kernel_from_json(sp, json::parse(R"({"type": "unknown"})")), ConfigError);
    CHECK_THROWS_AS(kernel_from_json(sp, json::parse(R"({"type": "fractional", "alpha": 1.0})")),
                    ConfigError);
}

TEST_CASE("solver config parsing and validation", "[io]") {
    auto cfg = solver_from_json(json::parse(R"({"K": 48, "tol_res": 1e-6, "horizon": 2.0})"));
    CHECK(cfg.K == 48);
    CHECK(cfg.tol_res == 1e-6);
    CHECK(cfg.horizon == 2.0);
    SolverConfig defaults;
    CHECK(cfg.max_iter == defaults.max_iter);
    CHECK(solver_from_json(json()).K == defaults.K);

    CHECK_THROWS_AS(solver_from_json(json::parse(R"({"K": 0})")), ConfigError);
    CHECK_THROWS_AS(solver_from_json(json::parse(R"({"tol_res": -1e-6})")), ConfigError);
    CHECK_THROWS_AS(solver_from_json(json::parse(R"({"step_scale": 1.5})")), ConfigError);
    CHECK_THROWS_AS(solver_from_json(json::parse(R"({"delta_ladder": [1e-3, 1e-2]})")), ConfigError);
    CHECK_THROWS_AS(solver_from_json(json::parse(R"({"delta_ladder": [2.0]})")), ConfigError);
}

TEST_CASE("density specs", "[io]") {
    auto sp = make_lattice({8}, 1.0);
    auto u = density_from_spec(sp, "uniform");
    CHECK(mass(sp, u) == Catch::Approx(1.0).epsilon(1e-12));
    auto d = density_from_spec(sp, "delta:3");
    CHECK(d[3] == Catch::Approx(1.0));
    auto b = density_from_spec(sp, "bump:2:1.5");
    CHECK(mass(sp, b) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(b[2] == *std::max_element(b.begin(), b.end()));

    auto tmp = std::filesystem::temp_directory_path() / "nlot_density_test.txt";
    write_text_file(tmp.string(), "# comment\n1.0\n2.0\n3.0\n0.5\n0.5\n0.5\n0.5\n0.0\n");
    auto f = density_from_spec(sp, "file:" + tmp.string());
    CHECK(mass(sp, f) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(f[1] == Catch::Approx(2.0 * f[0]).epsilon(1e-12));
    std::filesystem::remove(tmp);

    CHECK_THROWS_AS(density_from_spec(sp, "delta:x"), ConfigError);
    CHECK_THROWS_AS(density_from_spec(sp, "spike:1"), ConfigError);
    CHECK_THROWS_AS(density_from_spec(sp, "bump:1"), ConfigError);
    CHECK_THROWS_AS(density_from_spec(sp, "file:/nonexistent/path.txt"), ConfigError);
}

TEST_CASE("csv documents carry the version header", "[io]") {
    json cfg = json::parse(R"({"seed": 1})");
    std::string head = "# nlot " + std::string(library_version()) + " config " + config_digest(cfg);

    Path p;
    p.T = 1.0;
    p.rho = {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
    p.nu = {{0.4}, {0.6}};
    auto csv = path_to_csv(p, cfg);
    CHECK(csv.rfind(head, 0) == 0);
    CHECK(csv.find("kind,step,index,value\n") != std::string::npos);
    CHECK(csv.find("rho,0,0,1\n") != std::string::npos);
    CHECK(csv.find("rho,2,1,1\n") != std::string::npos);
    CHECK(csv.find("nu,1,0,0.40000000000000002\n") != std::string::npos);
    CHECK(csv.find("nu,2,0,0.59999999999999998\n") != std::string::npos);

    CHECK(density_to_csv({0.25, 0.75}, cfg).rfind(head, 0) == 0);
    CHECK(symbol_to_csv({0.0, -1.5}, cfg).find("frequency,eta\n0,0\n1,-1.5\n") !=
          std::string::npos);

    CheckReport r;
    r.name = "demo";
    r.pass = true;
    r.slack = 0.5;
    r.tolerance = 1.0;
    auto lines = reports_to_jsonl({r}, cfg);
    auto meta = json::parse(lines.substr(0, lines.find('\n')));
    CHECK(meta["config_digest"] == config_digest(cfg));
    CHECK(meta["version"] == library_version());
    auto sum = summary_csv({r}, cfg);
    CHECK(sum.find("demo,1,0.5,1,0\n") != std::string::npos);
}

TEST_CASE("geodesic result json reports infinities as a string", "[io]") {
    GeodesicResult res;  // default W is infinite
    res.message = "no admissible path";
    json out = geodesic_result_json(res, json::object());
    CHECK(out["W"] == json("infinite"));
    CHECK(out["message"] == "no admissible path");

    res.W = 1.25;
    res.converged = true;
    res.per_interval_action = {1.0, 1.0};
    out = geodesic_result_json(res, json::object());
    CHECK(out["W"] == json(1.25));
    CHECK(out["constant_speed_deviation"] == json(0.0));
}
