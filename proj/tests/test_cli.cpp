#include "doctest.h"

#include "sddhopf/cli.hpp"
#include "sddhopf/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sddhopf;
namespace fs = std::filesystem;

namespace {

const std::string config_dir = SDDHOPF_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sddhopf_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* minimal = R"({"mu_m": 1, "mu_p": 1, "mu_e": 1, "alpha_m": 6.0, "alpha_p": 1, "alpha_e": 1,
                          "c": 0.1, "z_tilde": 1, "h": 10, "eps0": 0})";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::string& command, const RunConfig& cfg, std::optional<std::string> dir = std::nullopt) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(command, cfg, dir, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string c; std::getline(s, c, ',');) cells.push_back(c);
    return cells;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto dir = scratch("parse");
    write(dir / "min.json", minimal);
    const auto cfg = parse_config((dir / "min.json").string());
    CHECK(cfg.params.alpha_m == 6.0);
    CHECK(cfg.params.h == 10);
    CHECK(parse_config((dir / "min.json").string(), {"alpha_m=7.0"}).params.alpha_m == 7.0);
    CHECK(parse_config((dir / "min.json").string(), {"x0=[1, 2, 3]"}).options.x0->at(2) == 3.0);

    write(dir / "missing.json", R"({"mu_m": 1, "mu_p": 1, "mu_e": 1, "alpha_m": 6.0, "alpha_p": 1, "alpha_e": 1,
                                   "c": 0.1, "z_tilde": 1, "eps0": 0})");
    try {
        (void)parse_config((dir / "missing.json").string());
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.field() == "h");
    }

    CHECK_THROWS_AS((void)parse_config((dir / "min.json").string(), {"bogus=1"}), SchemaError);
    CHECK_THROWS_AS((void)parse_config((dir / "min.json").string(), {"h=3"}), SchemaError);
    CHECK_THROWS_AS((void)parse_config((dir / "min.json").string(), {"h=2.5"}), SchemaError);
    CHECK_THROWS_AS((void)parse_config((dir / "min.json").string(), {"c=fast"}), SchemaError);
    CHECK_THROWS_AS((void)parse_config((dir / "min.json").string(), {"noequals"}), ParseError);
    CHECK_THROWS_AS((void)parse_config((dir / "absent.json").string()), ParseError);
    write(dir / "broken.json", "{\"mu_m\": ");
    CHECK_THROWS_AS((void)parse_config((dir / "broken.json").string()), ParseError);
}

TEST_CASE("flat TOML configs") {
    const auto cfg = parse_config(config_dir + "/goodwin_h2.toml");
    CHECK(cfg.params.h == 2);
    CHECK(cfg.params.alpha_m == 2.0);
    const auto doc = parse_flat_toml("a = 1_000  # comment\nb = \"x # y\"\nc = [1, +2.5]\nd = true\n");
    CHECK(doc["a"] == 1000);
    CHECK(doc["b"] == "x # y");
    CHECK(doc["c"][1] == 2.5);
    CHECK(doc["d"] == true);
    CHECK_THROWS_AS((void)parse_flat_toml("[table]\na = 1\n"), ParseError);
    CHECK_THROWS_AS((void)parse_flat_toml("a = 1\na = 2\n"), ParseError);
    CHECK_THROWS_AS((void)parse_flat_toml("a = [1,\n"), ParseError);
}

TEST_CASE("hopf command") {
    const auto cfg = parse_config(config_dir + "/goodwin_h10.json");
    const auto r = run("hopf", cfg);
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::string row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "exists,alpha_m_star,x_star,v_star,c0_star,du_dalpha,gamma");
    const auto cells = split(row);
    REQUIRE(cells.size() == 7);
    CHECK(cells[0] == "true");
    CHECK(std::abs(std::stod(cells[1]) - 5.743492) < 1e-6);
    CHECK(cells[6] == "-1");

    const auto none = run("hopf", parse_config(config_dir + "/goodwin_h2.toml"));
    CHECK(none.code == 0);
    CHECK(none.out.find("\nfalse,") != std::string::npos);
}

TEST_CASE("exit codes") {
    const auto cfg = parse_config(config_dir + "/goodwin_h10.json", {"t1=-1"});
    const auto r = run("simulate", cfg);
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    CHECK(r.out.empty());
    const auto crossing = run("crossing", parse_config(config_dir + "/goodwin_h2.toml"));
    CHECK(crossing.code == 1);
    CHECK(run("nonsense", cfg).code == 2);
}

TEST_CASE("every command writes CSV and a summary") {
    const auto dir = scratch("all");
    const auto cfg = parse_config(config_dir + "/goodwin_h10.json", {"t1=20", "t_end=300", "branch_lo=7",
                                                                     "branch_hi=8", "branch_points=2"});
    for (const char* cmd : {"stationary", "eigs", "crossing", "hopf", "simulate", "orbit", "branch", "bounds"}) {
        const auto r = run(cmd, cfg, dir.string());
        CHECK_MESSAGE(r.code == 0, cmd << ": " << r.err);
        const auto csv = slurp(dir / (std::string(cmd) + ".csv"));
        CHECK(csv.find('\n') != std::string::npos);
        const auto summary = nlohmann::json::parse(slurp(dir / (std::string(cmd) + ".json")));
        CHECK(summary["command"] == cmd);
        CHECK(summary.contains("checks"));
        for (const auto& [name, ok] : summary["checks"].items()) CHECK_MESSAGE(ok == true, cmd << " " << name);
    }
}

TEST_CASE("a summary fed back as config reproduces the CSV") {
    const auto first = scratch("round1");
    const auto second = scratch("round2");
    const std::string src = config_dir + "/goodwin_h10.json";
    const auto before = slurp(src);
    const auto cfg = parse_config(src, {"t1=15", "step=0.005", "eps0=0.25", "alpha_m=6.62"});
    for (const char* cmd : {"simulate", "eigs", "stationary", "bounds"}) {
        REQUIRE(run(cmd, cfg, first.string()).code == 0);
        const auto again = parse_config((first / (std::string(cmd) + ".json")).string());
        REQUIRE(run(cmd, again, second.string()).code == 0);
        CHECK(slurp(first / (std::string(cmd) + ".csv")) == slurp(second / (std::string(cmd) + ".csv")));
    }
    CHECK(slurp(src) == before);
}

TEST_CASE("CSV uses full precision") {
    const auto r = run("stationary", parse_config(config_dir + "/goodwin_h10.json"));
    std::istringstream lines(r.out);
    std::string row;
    std::getline(lines, row);
    std::getline(lines, row);
    const auto x = split(row)[0];
    CHECK(std::stod(x) == doctest::Approx(1.1737638633807042).epsilon(1e-16));
    CHECK(x.size() >= 17);
}
