#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

#include "helpers.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string cli = MSS_CLI_PATH;
const std::string repo = MSS_REPO_DIR;

/// Run the tool quietly and return its exit code.
int run(const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("mss_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string curve(const char* name) {
    return repo + "/curves/" + name;
}

} // namespace

TEST_CASE("analyze emits a valid report with the circle's lightlike structure") {
    fs::path out = work_dir() / "circle_analysis.json";
    int rc = run("analyze --curve " + curve("circle.json") + " --u 0 --grid 96 --out " +
                 out.string());
    REQUIRE(rc == 0);
    json rep = json::parse(slurp(out));
    CHECK(rep["curve_name"] == "circle");
    REQUIRE(rep["lightlike_ts"].size() == 4);
    const double expect[4] = {th::pi / 4, 3 * th::pi / 4, 5 * th::pi / 4,
                              7 * th::pi / 4};
    for (int i = 0; i < 4; ++i)
        CHECK(rep["lightlike_ts"][i].get<double>() ==
              doctest::Approx(expect[i]).epsilon(1e-9));
    CHECK(rep["config_echo"]["grid_n"].get<int>() == 96);
}

TEST_CASE("analyze is byte-deterministic") {
    fs::path a = work_dir() / "det_a.json";
    fs::path b = work_dir() / "det_b.json";
    REQUIRE(run("analyze --curve " + curve("egg.json") + " --u 0.1 --grid 96 --out " +
                a.string()) == 0);
    REQUIRE(run("analyze --curve " + curve("egg.json") + " --u 0.1 --grid 96 --out " +
                b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("render reproduces the analyze-time svg byte for byte") {
    fs::path rep = work_dir() / "render_rep.json";
    fs::path svg1 = work_dir() / "render_a.svg";
    fs::path svg2 = work_dir() / "render_b.svg";
    fs::path svg3 = work_dir() / "render_c.svg";
    REQUIRE(run("analyze --curve " + curve("quadfold.json") +
                " --u 0 --grid 96 --out " + rep.string() + " --svg " +
                svg1.string()) == 0);
    REQUIRE(run("render --report " + rep.string() + " --out " + svg2.string()) == 0);
    REQUIRE(run("render --report " + rep.string() + " --out " + svg3.string()) == 0);
    std::string s1 = slurp(svg1), s2 = slurp(svg2), s3 = slurp(svg3);
    CHECK(s1 == s2);
    CHECK(s2 == s3);
    CHECK(s1.rfind("<svg", 0) == 0);
}

TEST_CASE("malformed inputs exit with the input-error code") {
    SUBCASE("curve spec with an unknown key") {
        fs::path bad = work_dir() / "bad_key.json";
        spit(bad, R"({"name": "bad", "x": {"cos": [1.0]}, "y": {"sin": [1.0]}, "extra": 1})");
        fs::path out = work_dir() / "bad_key_out.json";
        CHECK(run("analyze --curve " + bad.string() + " --u 0 --out " +
                  out.string()) == 2);
    }
    SUBCASE("curve spec that is not json") {
        fs::path bad = work_dir() / "not_json.json";
        spit(bad, "not json at all {");
        fs::path out = work_dir() / "not_json_out.json";
        CHECK(run("analyze --curve " + bad.string() + " --u 0 --out " +
                  out.string()) == 2);
    }
    SUBCASE("missing curve file") {
        fs::path out = work_dir() / "missing_out.json";
        CHECK(run("analyze --curve " + (work_dir() / "nope.json").string() +
                  " --u 0 --out " + out.string()) == 2);
    }
    SUBCASE("missing required flag") {
        CHECK(run("analyze --u 0") == 2);
    }
    SUBCASE("unknown subcommand") {
        CHECK(run("frobnicate") == 2);
    }
    SUBCASE("render on a non-report document") {
        fs::path notrep = work_dir() / "not_report.json";
        spit(notrep, R"({"some": "object"})");
        fs::path out = work_dir() / "not_report.svg";
        CHECK(run("render --report " + notrep.string() + " --out " +
                  out.string()) == 2);
    }
}

TEST_CASE("scan argument validation") {
    fs::path out = work_dir() / "scan_out.json";
    SUBCASE("reversed range") {
        CHECK(run("scan --curve " + curve("translate_family.json") +
                  " --u-min 0.2 --u-max -0.2 --steps 5 --out " + out.string()) == 2);
    }
    SUBCASE("curve without a family") {
        CHECK(run("scan --curve " + curve("egg.json") +
                  " --u-min -0.1 --u-max 0.1 --steps 5 --out " + out.string()) == 2);
    }
}

TEST_CASE("scan of a translation family reports no events") {
    fs::path out = work_dir() / "scan_trans.json";
    REQUIRE(run("scan --curve " + curve("translate_family.json") +
                " --u-min -0.15 --u-max 0.15 --steps 7 --grid 96 --out " +
                out.string()) == 0);
    json rep = json::parse(slurp(out));
    CHECK(rep["curve_name"] == "translate_family");
    CHECK(rep["events"].empty());
    CHECK(rep["steps"].get<int>() == 7);
    CHECK(rep["u_min"].get<double>() == doctest::Approx(-0.15));
}

TEST_CASE("oracle csv contract") {
    fs::path out = work_dir() / "oracle.csv";
    REQUIRE(run("oracle --curve " + curve("circle.json") + " --u 0 --grid 48 --out " +
                out.string()) == 0);
    std::string csv = slurp(out);
    REQUIRE(csv.rfind("t1,t2,g\n", 0) == 0);
    CHECK(csv.find(",nan\n") != std::string::npos);

    std::size_t rows = 0;
    for (std::size_t at = csv.find('\n'); at != std::string::npos;
         at = csv.find('\n', at + 1))
        ++rows;
    CHECK(rows - 1 <= std::size_t(48) * 47 / 2); // header excluded

    fs::path again = work_dir() / "oracle2.csv";
    REQUIRE(run("oracle --curve " + curve("circle.json") + " --u 0 --grid 48 --out " +
                again.string()) == 0);
    CHECK(slurp(again) == csv);
}

TEST_CASE("configuration precedence: flags beat the config file") {
    fs::path cfgfile = work_dir() / "cfg.json";
    spit(cfgfile, R"({"grid_n": 64, "tol": 2e-6})");
    fs::path out = work_dir() / "cfg_out.json";

    REQUIRE(run("analyze --curve " + curve("egg.json") + " --u 0 --config " +
                cfgfile.string() + " --out " + out.string()) == 0);
    json rep = json::parse(slurp(out));
    CHECK(rep["config_echo"]["grid_n"].get<int>() == 64);
    CHECK(rep["config_echo"]["tol"].get<double>() == doctest::Approx(2e-6));

    REQUIRE(run("analyze --curve " + curve("egg.json") + " --u 0 --config " +
                cfgfile.string() + " --grid 96 --out " + out.string()) == 0);
    rep = json::parse(slurp(out));
    CHECK(rep["config_echo"]["grid_n"].get<int>() == 96);
    CHECK(rep["config_echo"]["tol"].get<double>() == doctest::Approx(2e-6));

    fs::path badcfg = work_dir() / "bad_cfg.json";
    spit(badcfg, R"({"grid": 64})");
    CHECK(run("analyze --curve " + curve("egg.json") + " --u 0 --config " +
              badcfg.string() + " --out " + out.string()) == 2);
}
