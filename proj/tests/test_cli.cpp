#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"
#include <sys/wait.h>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

RunResult run_cli(const std::string& args, const std::string& env = {}) {
    const auto out = testsupport::temp_path("cli_stdout");
    const auto err = testsupport::temp_path("cli_stderr");
    const std::string command = env + (env.empty() ? "" : " ") + std::string(PHONON_CLI_BIN) +
                                " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.stdout_text = testsupport::read_file(out);
    result.stderr_text = testsupport::read_file(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return result;
}

std::string fixture(const std::string& name) { return testsupport::fixture_path(name); }

// rows of a CSV emission, comments skipped, fields split on commas
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

TEST_CASE("couplings emits the expected table at 4 K") {
    const auto result =
        run_cli("couplings --modes " + fixture("modes_no_dbr.csv") + " --temperature 4 --no-timestamp");
    REQUIRE(result.exit_code == 0);
    const auto rows = csv_rows(result.stdout_text);
    REQUIRE(rows.size() == 62);  // header + 61 modes
    REQUIRE(rows[0][0] == "family");
    // F1 at the sidewall: theta_sq within 3% of 5.11e8
    CHECK(rows[1][0] == "F");
    CHECK(rows[1][1] == "1");
    const double theta = std::stod(rows[1][4]);
    CHECK(std::abs(theta - 5.11e8) / 5.11e8 < 0.03);
}

TEST_CASE("couplings at zero temperature zeroes every theta_sq") {
    const auto result =
        run_cli("couplings --modes " + fixture("modes_no_dbr.csv") + " --temperature 0 --no-timestamp");
    REQUIRE(result.exit_code == 0);
    const auto rows = csv_rows(result.stdout_text);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][4]) == 0.0);
    }
}

TEST_CASE("missing input file exits with code 2 and names the path") {
    const auto result = run_cli("couplings --modes /nonexistent/modes.csv");
    CHECK(result.exit_code == 2);
    CHECK(result.stderr_text.find("/nonexistent/modes.csv") != std::string::npos);
}

TEST_CASE("validate passes on both fixture pairs") {
    for (const auto& [modes, reference] :
         {std::pair{"modes_no_dbr.csv", "ref_couplings_no_dbr.csv"},
          std::pair{"modes_with_dbr.csv", "ref_couplings_with_dbr.csv"}}) {
        const auto result = run_cli("validate --modes " + fixture(modes) + " --reference " +
                                    fixture(reference) + " --no-timestamp");
        CHECK(result.exit_code == 0);
        CHECK(result.stdout_text.find("# status: PASS") != std::string::npos);
    }
}

TEST_CASE("validate fails on a corrupted reference row and names the mode") {
    // copy the reference table with one theta_sq inflated by 50%
    const auto corrupted = testsupport::temp_path("ref_corrupted.csv");
    {
        std::ifstream in(fixture("ref_couplings_no_dbr.csv"));
        std::ofstream out(corrupted);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("F,20,", 0) == 0) {
                out << "F,20,8.10e0,5.90e-4\n";  // true value is near 5.40e0
            } else {
                out << line << '\n';
            }
        }
    }
    const auto result = run_cli("validate --modes " + fixture("modes_no_dbr.csv") +
                                " --reference " + corrupted.string() + " --no-timestamp");
    CHECK(result.exit_code == 1);
    CHECK(result.stdout_text.find("# status: FAIL") != std::string::npos);
    CHECK(result.stderr_text.find("F20") != std::string::npos);
    std::filesystem::remove(corrupted);
}

TEST_CASE("validate rejects mismatched mode keys") {
    const auto truncated = testsupport::temp_path("ref_truncated.csv");
    {
        std::ifstream in(fixture("ref_couplings_no_dbr.csv"));
        std::ofstream out(truncated);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("L,21,", 0) == 0) continue;
            out << line << '\n';
        }
    }
    const auto result = run_cli("validate --modes " + fixture("modes_no_dbr.csv") +
                                " --reference " + truncated.string());
    CHECK(result.exit_code == 2);
    CHECK(result.stderr_text.find("L21") != std::string::npos);
    std::filesystem::remove(truncated);
}

TEST_CASE("indist on a zero-coupling catalog reports I = 1") {
    const auto synthetic = testsupport::temp_path("zero_coupling.csv");
    {
        std::ofstream out(synthetic);
        out << "family,index,freq_mhz,m_eff_pg,u_zpf_fm,g_max_khz\n";
        out << "L,1,1.0,100.0,,0\n";
        out << "F,1,0.5,100.0,,0\n";
    }
    const auto result = run_cli("indist --modes " + synthetic.string() +
                                " --position axis --purcell 1.0 --efficiency 1.0 --no-timestamp");
    REQUIRE(result.exit_code == 0);
    const auto rows = csv_rows(result.stdout_text);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][8]) == 1.0);
    CHECK(result.stderr_text.find("quadrature error estimate") != std::string::npos);
    std::filesystem::remove(synthetic);
}

TEST_CASE("indist presets reproduce the merit-table configurations") {
    const std::string env = "PHONON_FIXTURES_DIR=" + testsupport::fixtures_dir();
    const auto c = run_cli("indist --preset table1-c --no-timestamp", env);
    REQUIRE(c.exit_code == 0);
    const auto rows_c = csv_rows(c.stdout_text);
    CHECK(std::abs(std::stod(rows_c[1][8]) - 0.9999) <= 0.0005);
    CHECK(std::abs(std::stod(rows_c[1][9]) - 0.978) <= 0.001);

    const auto b = run_cli("indist --preset b --no-timestamp", env);
    REQUIRE(b.exit_code == 0);
    CHECK(std::abs(std::stod(csv_rows(b.stdout_text)[1][8]) - 0.034) <= 0.01);

    // explicit flags override the preset
    const auto cold = run_cli("indist --preset table1-c --temperature 0 --no-timestamp", env);
    REQUIRE(cold.exit_code == 0);
    CHECK(std::stod(csv_rows(cold.stdout_text)[1][8]) >= std::stod(rows_c[1][8]));

    CHECK(run_cli("indist --preset nonsense", env).exit_code == 2);
}

TEST_CASE("indist emission is byte-identical across reruns with --no-timestamp") {
    const auto out1 = testsupport::temp_path("indist1.csv");
    const auto out2 = testsupport::temp_path("indist2.csv");
    const std::string base = "indist --modes " + fixture("modes_with_dbr.csv") +
                             " --temperature 4 --position axis --purcell 44.20 --efficiency "
                             "0.978 --no-timestamp --out ";
    REQUIRE(run_cli(base + out1.string()).exit_code == 0);
    REQUIRE(run_cli(base + out2.string()).exit_code == 0);
    CHECK(testsupport::read_file(out1) == testsupport::read_file(out2));
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
}

TEST_CASE("csv and json emissions agree at 12 significant digits") {
    const std::string base = "indist --modes " + fixture("modes_with_dbr.csv") +
                             " --temperature 4 --position axis --purcell 44.20 --efficiency "
                             "0.978 --no-timestamp";
    const auto csv = run_cli(base + " --format csv");
    const auto js = run_cli(base + " --format json");
    REQUIRE(csv.exit_code == 0);
    REQUIRE(js.exit_code == 0);
    const auto rows = csv_rows(csv.stdout_text);
    const json parsed = json::parse(js.stdout_text);
    const double csv_indist = std::stod(rows[1][8]);
    const double csv_product = std::stod(rows[1][9]);
    CHECK(std::abs(csv_indist - parsed["indistinguishability"].get<double>()) <=
          1e-11 * std::abs(csv_indist));
    CHECK(std::abs(csv_product - parsed["product"].get<double>()) <= 1e-11 * std::abs(csv_product));
}

TEST_CASE("sweep with count 1 equals indist at that temperature") {
    const std::string scenario = " --modes " + fixture("modes_no_dbr.csv") +
                                 " --position sidewall --purcell 0.08 --efficiency 0.207 "
                                 "--no-timestamp";
    const auto sweep = run_cli("sweep" + scenario + " --range 4:4:1");
    const auto indist = run_cli("indist" + scenario);
    REQUIRE(sweep.exit_code == 0);
    REQUIRE(indist.exit_code == 0);
    const double sweep_value = std::stod(csv_rows(sweep.stdout_text)[1][1]);
    const double indist_value = std::stod(csv_rows(indist.stdout_text)[1][8]);
    CHECK(std::abs(sweep_value - indist_value) < 1e-10);
}

TEST_CASE("sweep output is ordered and parses as a series") {
    const auto result = run_cli("sweep --modes " + fixture("modes_with_dbr.csv") +
                                " --position axis --purcell 44.20 --range 1:9:5 --no-timestamp");
    REQUIRE(result.exit_code == 0);
    const auto rows = csv_rows(result.stdout_text);
    REQUIRE(rows.size() == 6);
    double previous = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = std::stod(rows[i][0]);
        CHECK(t > previous);
        previous = t;
    }
    CHECK(std::stod(rows[1][0]) == 1.0);
    CHECK(std::stod(rows[5][0]) == 9.0);
}

TEST_CASE("malformed and inverted ranges are usage errors") {
    const std::string scenario = "sweep --modes " + fixture("modes_no_dbr.csv") +
                                 " --position axis --purcell 1.0";
    CHECK(run_cli(scenario + " --range nonsense").exit_code == 2);
    CHECK(run_cli(scenario + " --range 10:1:5").exit_code == 2);
    CHECK(run_cli(scenario + " --range 1:10:0").exit_code == 2);
}

TEST_CASE("unknown position is a usage error") {
    CHECK(run_cli("indist --modes " + fixture("modes_no_dbr.csv") +
                  " --position nowhere --purcell 1 --efficiency 1")
              .exit_code == 2);
}

TEST_CASE("spectrum of a zero-coupling catalog peaks at 2/Gamma") {
    const auto synthetic = testsupport::temp_path("zero_coupling_spec.csv");
    {
        std::ofstream out(synthetic);
        out << "family,index,freq_mhz,m_eff_pg,u_zpf_fm,g_max_khz\n";
        out << "L,1,1.0,100.0,,0\n";
    }
    const auto result = run_cli("spectrum --modes " + synthetic.string() +
                                " --position axis --purcell 1.0 --range -200:200:5 --no-timestamp");
    REQUIRE(result.exit_code == 0);
    const auto rows = csv_rows(result.stdout_text);
    REQUIRE(rows.size() == 6);
    // detuning 0 sits in the middle of the grid
    CHECK(std::stod(rows[3][0]) == 0.0);
    const double peak = std::stod(rows[3][1]);
    CHECK(std::abs(peak - 2.0 / 1e9) / (2.0 / 1e9) < 1e-8);
    std::filesystem::remove(synthetic);
}

TEST_CASE("table1 runs the presets and writes atomically") {
    const auto out = testsupport::temp_path("table1.csv");
    const auto result = run_cli("table1 --no-timestamp --out " + out.string(),
                                "PHONON_FIXTURES_DIR=" + testsupport::fixtures_dir());
    REQUIRE(result.exit_code == 0);
    const auto rows = csv_rows(testsupport::read_file(out));
    REQUIRE(rows.size() == 5);
    CHECK(rows[1][0] == "a");
    CHECK(rows[4][0] == "d");
    // configuration (c): product within 0.001 of 0.978
    CHECK(std::abs(std::stod(rows[3][6]) - 0.978) <= 1e-3);
    CHECK(!std::filesystem::exists(out.string() + ".tmp"));
    std::filesystem::remove(out);
}

TEST_CASE("usage without a subcommand exits 2") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}
