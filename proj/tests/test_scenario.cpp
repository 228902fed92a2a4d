#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakval/errors.hpp"
#include "weakval/scenario.hpp"

using namespace weakval;
namespace fs = std::filesystem;

namespace {

const char* kPtScenario = R"({
  "system": {
    "dim": 2,
    "pre": {"re": [0.0, 1.0]},
    "post": {"re": [0.70710678118654746, 0.70710678118654746]},
    "H_i": {"re": [[1.0, 0.0], [0.0, -1.0]]},
    "H_f": {"re": [[1.0, 0.0], [0.0, -1.0]]},
    "A": {"re": [[0.0, 1.0], [1.0, 0.0]]},
    "omega": 1.0
  },
  "timing": {"t0": 0.0, "half_width": 2.0, "n": 1601},
  "coupling": {"kind": "boxcar", "gamma0": 1.0, "epsilon": 0.1, "picture": "momentum"},
  "pointer": {"var_q": 1.0},
  "run": {
    "outputs": ["series", "symmetry", "pointer"],
    "tolerance": 1e-9,
    "closed_form": {"example": "pt"},
    "sweeps": {"gamma0": [0.04, 0.02, 0.01], "epsilon": [0.5, 0.05]}
  }
})";

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_scenario(const std::string& name, const std::string& text) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::trunc);
    out << text;
    out.close();
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string parse_error_message(const std::string& name, const std::string& text) {
    const fs::path path = write_scenario(name, text);
    try {
        parse_scenario(path.string());
    } catch (const validation_error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("a minimal scenario file picks up every default") {
    const fs::path path = write_scenario("minimal.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      }
    })");
    const RunConfig config = parse_scenario(path.string());
    CHECK(config.scenario.hbar == 1.0);
    CHECK(config.tolerance == 1e-9);
    CHECK(config.grid.n() == 1001);
    CHECK(config.grid.center() == 0.0);
    CHECK(config.grid.half_width() == 1.0);
    CHECK(config.coupling.kind == CouplingKind::impulse);
    CHECK(config.coupling.strength == 0.01);
    CHECK(config.pointer.grid_n == 4096);
    CHECK(config.out_series);
    CHECK(config.out_symmetry);
    CHECK(config.out_pointer);
    CHECK_FALSE(config.grid_refined);
    CHECK(config.warnings.empty());
}

TEST_CASE("parse errors name the offending field") {
    CHECK(parse_error_message("unknown.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]},
        "extra": 1
      }
    })").find("system.extra") != std::string::npos);

    CHECK(parse_error_message("nonherm.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[0.0, 1.0], [0.0, 0.0]]}
      }
    })").find("system.A") != std::string::npos);

    CHECK(parse_error_message("evenn.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      },
      "timing": {"n": 1000}
    })").find("timing.n") != std::string::npos);

    CHECK(parse_error_message("negdt.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      },
      "timing": {"dt_i": -0.5}
    })").find("timing.dt_i") != std::string::npos);

    CHECK(parse_error_message("noeps.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      },
      "coupling": {"kind": "boxcar", "gamma0": 1.0}
    })").find("coupling.epsilon") != std::string::npos);

    CHECK(parse_error_message("badjson.json", "{ not json").find("JSON") !=
          std::string::npos);

    CHECK(parse_error_message("emptysweep.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      },
      "run": {"sweeps": {"gamma0": []}}
    })").find("run.sweeps.gamma0") != std::string::npos);
}

TEST_CASE("misaligned boxcar windows refine the grid") {
    const fs::path path = write_scenario("refine.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [0.0, 1.0]},
        "post": {"re": [0.70710678118654746, 0.70710678118654746]},
        "H_i": {"re": [[1.0, 0.0], [0.0, -1.0]]},
        "H_f": {"re": [[1.0, 0.0], [0.0, -1.0]]},
        "A": {"re": [[0.0, 1.0], [1.0, 0.0]]}
      },
      "timing": {"half_width": 1.0, "n": 1001},
      "coupling": {"kind": "boxcar", "gamma0": 1.0, "epsilon": 0.05}
    })");
    const RunConfig config = parse_scenario(path.string());
    // 0.05/2 = 12.5 steps of 0.002: refined to 13 steps of 0.05/26.
    CHECK(config.grid_refined);
    CHECK(config.grid.n() == 1041);
    CHECK(config.grid.half_width() == doctest::Approx(1.0));
    CHECK(config.grid.step() == doctest::Approx(0.05 / 26.0));
}

TEST_CASE("aligned boxcar windows leave the grid alone") {
    const fs::path path = write_scenario("aligned.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    CHECK_FALSE(config.grid_refined);
    CHECK(config.grid.n() == 1601);
    CHECK(config.sweep_gamma0 == std::vector<double>{0.04, 0.02, 0.01});
}

TEST_CASE("unnormalized input states are renormalized with a warning") {
    const fs::path path = write_scenario("renorm.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [2.0, 0.0]},
        "post": {"re": [0.6, 0.8]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      }
    })");
    const RunConfig config = parse_scenario(path.string());
    REQUIRE(config.warnings.size() == 1);
    CHECK(config.warnings[0].find("system.pre") != std::string::npos);
    CHECK(std::abs(std::abs(config.scenario.pre_state[0]) - 1.0) < 1e-15);
}

TEST_CASE("run produces the three reports and is byte-reproducible") {
    const fs::path path = write_scenario("pt_run.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());

    const fs::path dir1 = fresh_dir("weakval_run1");
    const fs::path dir2 = fresh_dir("weakval_run2");
    run(config, dir1.string());
    run(config, dir2.string());

    for (const char* name : {"series.csv", "symmetry.json", "pointer.json"}) {
        CHECK(fs::exists(dir1 / name));
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }

    const std::string series = slurp(dir1 / "series.csv");
    CHECK(series.rfind("t,re_Aw,im_Aw,re_Aw_dot,im_Aw_dot,re_weak_energy,im_weak_energy\n",
                       0) == 0);

    const std::string symmetry = slurp(dir1 / "symmetry.json");
    CHECK(symmetry.find("\"verdict\": \"PT\"") != std::string::npos);
    CHECK(symmetry.find("\"predicted_vanishing\": \"IMAGINARY_PART\"") !=
          std::string::npos);
    CHECK(symmetry.find("\"translation\"") != std::string::npos);
    CHECK(symmetry.find("\"refined\": false") != std::string::npos);

    const std::string pointer = slurp(dir1 / "pointer.json");
    CHECK(pointer.find("\"aw0\"") != std::string::npos);
    CHECK(pointer.find("\"residual_ratio\"") != std::string::npos);
}

TEST_CASE("a failed run leaves no partial reports") {
    const fs::path path = write_scenario("orth.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [1.0, 0.0]},
        "post": {"re": [0.0, 1.0]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      }
    })");
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_orth");
    CHECK_THROWS_AS(run(config, dir.string()), near_orthogonality_error);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("gamma0 sweeps keep input order and satisfy the closed form") {
    const fs::path path = write_scenario("pt_sweep.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_sweep_gamma");
    sweep(config, SweepParam::gamma0, {}, dir.string());

    std::ifstream in(dir / "sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "param,value,re_translation,im_translation,re_closed_form,im_closed_form,"
          "oracle_shift,first_order_residual");

    const double sinc = std::sin(0.1) / 0.1;
    std::vector<double> expected{0.04, 0.02, 0.01};
    for (double gamma : expected) {
        std::string line;
        REQUIRE(std::getline(in, line));
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 8);
        CHECK(cells[0] == "gamma0");
        CHECK(std::stod(cells[1]) == doctest::Approx(gamma));
        CHECK(std::stod(cells[2]) == doctest::Approx(gamma * sinc).epsilon(1e-9));
        CHECK(std::abs(std::stod(cells[3])) < 1e-12);
        CHECK(std::stod(cells[4]) == doctest::Approx(gamma * sinc).epsilon(1e-12));
        CHECK(std::stod(cells[5]) == 0.0);
        CHECK(std::stod(cells[6]) == doctest::Approx(gamma).epsilon(1e-3));
    }
}

TEST_CASE("epsilon sweeps realign the grid per point") {
    const fs::path path = write_scenario("pt_sweep_eps.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_sweep_eps");
    sweep(config, SweepParam::epsilon, {}, dir.string());

    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);  // header
    for (double eps : {0.5, 0.05}) {
        REQUIRE(std::getline(in, line));
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 8);
        const double expected = std::sin(eps) / eps;  // gamma0 = omega = 1
        CHECK(std::stod(cells[2]) == doctest::Approx(expected).epsilon(1e-8));
        CHECK(std::stod(cells[4]) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("omega sweeps rescale both Hamiltonians") {
    const fs::path path = write_scenario("pt_sweep_omega.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_sweep_omega");
    sweep(config, SweepParam::omega, {0.5, 2.0}, dir.string());

    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);  // header
    for (double omega : {0.5, 2.0}) {
        REQUIRE(std::getline(in, line));
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        const double expected = std::sin(omega * 0.1) / (omega * 0.1);
        CHECK(std::stod(cells[2]) == doctest::Approx(expected).epsilon(1e-8));
        CHECK(std::stod(cells[4]) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("gamma0 sweep residuals shrink quadratically") {
    // Flat-Hamiltonian scenario with a real weak value sqrt(2): the exact
    // mean shift departs from the first-order prediction at O(gamma0^3), so
    // the per-gamma residual column must drop by ~4x per halving.
    const fs::path path = write_scenario("quad_resid.json", R"({
      "system": {
        "dim": 2,
        "pre": {"re": [0.92387953251128674, 0.38268343236508978]},
        "post": {"re": [0.92387953251128674, -0.38268343236508978]},
        "A": {"re": [[1.0, 0.0], [0.0, -1.0]]}
      },
      "coupling": {"kind": "impulse", "gamma0": 0.04},
      "run": {"sweeps": {"gamma0": [0.04, 0.02, 0.01]}}
    })");
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_sweep_quad");
    sweep(config, SweepParam::gamma0, {}, dir.string());

    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> residuals;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 8);
        CHECK(cells[4].empty());  // impulse coupling has no closed form
        residuals.push_back(std::stod(cells[7]));
    }
    REQUIRE(residuals.size() == 3);
    CHECK(residuals[0] / residuals[1] == doctest::Approx(4.0).epsilon(0.1));
    CHECK(residuals[1] / residuals[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("symmetry verdicts are re-checkable from the report alone") {
    const fs::path path = write_scenario("pt_recheck.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_recheck");
    run(config, dir.string());

    const nlohmann::json sym = nlohmann::json::parse(slurp(dir / "symmetry.json"));
    const double tolerance = sym.at("tolerance").get<double>();
    const bool pt_ok = sym.at("residuals").at("pt").get<double>() <= tolerance;
    const bool anti_ok =
        sym.at("residuals").at("anti_pt").get<double>() <= tolerance;
    const std::string expected = pt_ok && anti_ok ? "BOTH"
                                 : pt_ok          ? "PT"
                                 : anti_ok        ? "ANTI_PT"
                                                  : "NEITHER";
    CHECK(sym.at("verdict").get<std::string>() == expected);

    // The part predicted to vanish is the one that vanished.
    CHECK(sym.at("predicted_vanishing").get<std::string>() == "IMAGINARY_PART");
    CHECK(sym.at("translation").at("abs_im").get<double>() < 1e-10);
    CHECK(sym.at("translation").at("abs_re").get<double>() > 0.9);
}

TEST_CASE("sweeps with no declared values are rejected") {
    const fs::path path = write_scenario("pt_sweep_none.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    CHECK_THROWS_AS(sweep(config, SweepParam::omega, {}, "."), validation_error);
}

TEST_CASE("classify certifies run output and validates external traces") {
    const fs::path path = write_scenario("pt_classify.json", kPtScenario);
    const RunConfig config = parse_scenario(path.string());
    const fs::path dir = fresh_dir("weakval_classify");
    run(config, dir.string());

    const fs::path reports = fresh_dir("weakval_classify_out");
    classify_csv((dir / "series.csv").string(), 0.0, 1e-9, reports.string());
    const std::string symmetry = slurp(reports / "symmetry.json");
    CHECK(symmetry.find("\"verdict\": \"PT\"") != std::string::npos);

    // Hand-built anti-PT trace with only the three mandatory columns.
    const fs::path anti = fs::temp_directory_path() / "anti_trace.csv";
    {
        std::ofstream out(anti, std::ios::trunc);
        out << "t,re_Aw,im_Aw\n";
        const int n = 101;
        for (int k = 0; k < n; ++k) {
            const double tau = (k - 50) * 0.02;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", tau,
                          std::sin(2 * tau), std::cos(2 * tau));
            out << buf;
        }
    }
    classify_csv(anti.string(), 0.0, 1e-9, reports.string());
    CHECK(slurp(reports / "symmetry.json").find("\"verdict\": \"ANTI_PT\"") !=
          std::string::npos);

    // Center mismatch.
    CHECK_THROWS_AS(classify_csv(anti.string(), 0.5, 1e-9, reports.string()),
                    validation_error);

    // Non-uniform spacing.
    const fs::path ragged = fs::temp_directory_path() / "ragged_trace.csv";
    {
        std::ofstream out(ragged, std::ios::trunc);
        out << "t,re_Aw,im_Aw\n-0.1,1,0\n0.0,1,0\n0.15,1,0\n";
    }
    CHECK_THROWS_AS(classify_csv(ragged.string(), 0.0, 1e-9, reports.string()),
                    validation_error);

    // Even sample count.
    const fs::path even = fs::temp_directory_path() / "even_trace.csv";
    {
        std::ofstream out(even, std::ios::trunc);
        out << "t,re_Aw,im_Aw\n-0.1,1,0\n0.0,1,0\n0.1,1,0\n0.2,1,0\n";
    }
    CHECK_THROWS_AS(classify_csv(even.string(), 0.05, 1e-9, reports.string()),
                    validation_error);
}
