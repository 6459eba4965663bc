#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oscihom/runner.hpp"

using namespace oscihom;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("oscihom_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const json& j) {
    fs::path p = dir / "config.json";
    std::ofstream f(p);
    f << j.dump(2) << "\n";
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json result_of(const fs::path& out_dir) {
    return json::parse(slurp(out_dir / "result.json"));
}

} // namespace

TEST_CASE("classify command writes a complete result.json") {
    fs::path d = temp_dir("classify");
    RunConfig cfg;
    cfg.command = "classify";
    cfg.config_path = write_config(d, {{"v", {3.0, 4.0}}}).string();
    cfg.out_dir = (d / "out").string();
    CHECK(run(cfg) == 0);

    json r = result_of(d / "out");
    CHECK(r["command"] == "classify");
    CHECK(r["exit_code"] == 0);
    CHECK(r["result"]["direction"]["class"] == "rational");
    CHECK(r["result"]["direction"]["m"][0] == 3);
    CHECK(r["result"]["direction"]["m"][1] == 4);
    double nx = r["result"]["direction"]["nu"][0].get<double>();
    CHECK(nx == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(r["config"]["v"][1] == 4.0);
}

TEST_CASE("unknown config keys are rejected") {
    fs::path d = temp_dir("unknown_key");
    RunConfig cfg;
    cfg.command = "classify";
    cfg.config_path = write_config(d, {{"v", {3.0, 4.0}}, {"bogus", 1}}).string();
    cfg.out_dir = (d / "out").string();
    CHECK_THROWS_AS(run(cfg), ParseError);
}

TEST_CASE("strict mode turns undetermined classifications into errors") {
    fs::path d = temp_dir("strict");
    // land in the promotion band: distance just above tol
    json conf = {{"v", {1.0, 2.0 + 1e-5}}, {"Q", 10}, {"tol", 1e-9},
                 {"promotion_margin", 1e7}};
    RunConfig cfg;
    cfg.command = "classify";
    cfg.config_path = write_config(d, conf).string();
    cfg.out_dir = (d / "out").string();
    cfg.strict = false;
    REQUIRE(run(cfg) == 0);
    json r = result_of(d / "out");
    REQUIRE(r["result"]["direction"]["class"] == "undetermined");
    cfg.strict = true;
    CHECK_THROWS_AS(run(cfg), DomainError);
}

TEST_CASE("identical runs produce byte-identical result.json") {
    json conf = {{"g", "abs(sin(pi*y1)*sin(pi*y2))"},
                 {"z", {0.0, 0.0}},
                 {"v", {0.0, 1.0}}};
    fs::path d1 = temp_dir("det1");
    fs::path d2 = temp_dir("det2");
    for (const fs::path& d : {d1, d2}) {
        RunConfig cfg;
        cfg.command = "triple";
        cfg.config_path = write_config(d, conf).string();
        cfg.out_dir = (d / "out").string();
        REQUIRE(run(cfg) == 0);
    }
    CHECK(slurp(d1 / "out" / "result.json") == slurp(d2 / "out" / "result.json"));
}

TEST_CASE("sandwich command exit codes follow the verdict") {
    json conf = {{"curve", {{"shape", "circle"}, {"radius", 1.0}}},
                 {"g", "abs(sin(pi*y1)*sin(pi*y2))"},
                 {"schedule",
                  {{"kind", "geometric"}, {"eps0", 0.05}, {"ratio", 0.7}, {"count", 8}}},
                 {"ppw", 8},
                 {"tail_window", 4},
                 {"slack", 0.5}};
    fs::path d = temp_dir("sandwich");
    RunConfig cfg;
    cfg.command = "sandwich";
    cfg.config_path = write_config(d, conf).string();
    cfg.out_dir = (d / "out").string();
    CHECK(run(cfg) == 0);
    json r = result_of(d / "out");
    CHECK(r["result"]["verdict"]["pass"] == true);
    // the sweep table lands next to the json
    CHECK(fs::exists(d / "out" / "result.csv"));
    CHECK(fs::exists(d / "out" / "sweep.dat"));

    // an impossible slack fails with exit code 2
    conf["slack"] = -1.0;
    cfg.config_path = write_config(d, conf).string();
    CHECK(run(cfg) == 2);
}

TEST_CASE("curves parse from explicit segment lists") {
    json j = {{"orientation", "cw"},
              {"segments",
               {{{"kind", "line"}, {"p0", {1.0, -1.0}}, {"p1", {1.0, 1.0}}},
                {{"kind", "arc"},
                 {"center", {0.0, 0.0}},
                 {"radius", std::sqrt(2.0)},
                 {"angle0", 0.78539816339744831},
                 {"angle1", 2.3561944901923449}},
                {{"kind", "line"}, {"p0", {-1.0, 1.0}}, {"p1", {-1.0, -1.0}}},
                {{"kind", "arc"},
                 {"center", {0.0, 0.0}},
                 {"radius", std::sqrt(2.0)},
                 {"angle0", 3.9269908169872414},
                 {"angle1", 5.497787143782138}}}}};
    Curve c = curve_from_json(j);
    CHECK(c.closed());
    double expect = 4.0 + 2.0 * 3.14159265358979323846 * std::sqrt(2.0) / 2.0;
    CHECK(c.length() == doctest::Approx(expect).epsilon(1e-12));

    json g = {{"segments",
               {{{"kind", "graph"}, {"expr", "sin(x1)"}, {"a", 0.0}, {"b", 3.0}}}}};
    Curve gc = curve_from_json(g);
    CHECK_FALSE(gc.closed());

    CHECK_THROWS_AS(curve_from_json(json{{"shape", "pentagon"}}), ParseError);
    CHECK_THROWS_AS(curve_from_json(json{{"orientation", "widdershins"},
                                         {"segments", json::array()}}),
                    ParseError);
}

TEST_CASE("json output keeps 17 significant digits and a stable layout") {
    json j;
    j["a"] = 0.1;
    j["b"] = 1.0 / 3.0;
    j["c"] = {{"n", 42}, {"t", true}, {"s", "x"}};
    std::string s = dump_json17(j);
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("42") != std::string::npos);
    CHECK(s.find("true") != std::string::npos);
    CHECK(dump_json17(j) == s);
    double back = json::parse(s)["b"].get<double>();
    CHECK(back == 1.0 / 3.0); // round trip is exact
}
