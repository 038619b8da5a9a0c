#include "adelic/cli.hpp"
#include "adelic/radial.hpp"

#include <doctest.h>
#include <json.hpp>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace adelic;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

/// Scratch directory removed on scope exit.
struct Scratch {
    fs::path dir = fs::temp_directory_path() / ("adelic-cli-test-" + std::to_string(::getpid()));
    Scratch() { fs::create_directories(dir); }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("arithmetic commands") {
    CHECK(cli({"phi", "10"}).out == "2520\n");
    CHECK(cli({"phi", "0.25"}).out == "1/6\n");
    CHECK(cli({"ppow", "next", "5"}).out == "7\n");
    CHECK(cli({"ppow", "prev", "1/3"}).out == "1/4\n");
    CHECK(cli({"ppow", "range", "1/4", "4"}).out == "1/3\n1/2\n2\n3\n4\n");
    CHECK(cli({"norm", "2:0:101;13:-2:1,12,0"}).out == "169\n");
    CHECK(cli({"norm", "3:0:1", "3:0:2"}).out == "1/3\n");
    CHECK(cli({"volume", "sphere", "2^2"}).out == "6\n");
    CHECK(cli({"volume", "ball", "1/3"}).out == "1/2\n");
}

TEST_CASE("exit codes") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"phi"}).code == kExitUsage);
    CHECK(cli({"phi", "-2"}).code == kExitUsage);
    CHECK(cli({"volume", "ball", "6"}).code == kExitUsage);
    CHECK(cli({"kernel", "eval", "--alpha", "1"}).code == kExitUsage);
    CHECK(cli({"--format", "xml", "kernel", "normalize"}).code == kExitUsage);
    CHECK(cli({"norm", "3:0:1", "3:0:1"}).out == "0\n");
    CHECK(cli({"norm", "3:0:1", "3:0:2;3:1:1"}).code == kExitUsage);  // duplicate component
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cancellation and tolerance failures have their own codes") {
    Scratch s;
    // 1 and 1 + 2*3 agree modulo 3, the only digit both carry at depth 1.
    const Result cancel = cli({"norm", "--depth", "1", "3:0:1", "3:0:12"});
    CHECK(cancel.code == kExitCancellation);
    CHECK(cancel.err.find("cancellation") != std::string::npos);
    CHECK(cli({"norm", "--depth", "2", "3:0:1", "3:0:12"}).out == "1/9\n");
    CHECK(cli({"simulate", "--t-step", "1", "--steps", "2", "--r-min", "1/2", "--r-max", "2"}).code ==
          kExitTolerance);
    std::string csv = "x,value\n";
    for (int i = 0; i <= 100; ++i) csv += std::to_string(-1 + 0.02 * i) + ",1\n";
    const std::string real = s.file("real.csv", csv);
    const std::string u0 = s.file("u0.json", to_json(ball_indicator(PrimePower(2, 1))).dump());
    const Result tol = cli({"solve", "adelic", "--in", u0, "--real", real, "--real-out", s.path("o.csv"), "--t", "0.5",
                            "--alpha", "2", "--beta", "2"});
    CHECK(tol.code == kExitTolerance);
    CHECK(tol.err.find("tolerance") != std::string::npos);
}

TEST_CASE("kernel commands in both formats") {
    const Result csv = cli({"kernel", "eval", "--t", "1", "--alpha", "2", "--radius", "2", "--tol", "1e-13"});
    CHECK(csv.code == 0);
    REQUIRE(csv.out.rfind("value,error_bound\n", 0) == 0);
    const std::string row = csv.out.substr(csv.out.find('\n') + 1);
    const double value = std::stod(row), bound = std::stod(row.substr(row.find(',') + 1));
    CHECK(bound <= 1e-13);
    CHECK(std::abs(value - 0.067563137936753187559) <= bound + 1e-15);
    const Result js = cli({"--format", "json", "kernel", "normalize", "--t", "0.5", "--tol", "1e-8"});
    const auto j = nlohmann::json::parse(js.out);
    CHECK(std::abs(j.at("value").get<double>() - 1) <= j.at("error_bound").get<double>() + 1e-12);
    const Result tail = cli({"kernel", "tail", "--eps", "2", "--t", "0.01"});
    CHECK(tail.out.rfind("tail,error_bound,bound\n", 0) == 0);
}

TEST_CASE("output file, sidecar and config") {
    Scratch s;
    const std::string cfg = s.file("cfg.json", R"({"t": 0.25, "alpha": 3, "tol": 1e-9})");
    const std::string out = s.path("norm.csv");
    const Result r = cli({"--config", cfg, "--out", out, "kernel", "normalize", "--alpha", "2.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(out).rfind("value,error_bound,radii\n", 0) == 0);
    const auto meta = nlohmann::json::parse(slurp(out + ".meta.json"));
    CHECK(meta.at("config").at("alpha") == "2.5");
    CHECK(meta.at("config").at("t") == "0.25");
    CHECK(meta.contains("wall_time_s"));
    CHECK(meta.contains("threads"));
    CHECK(meta.at("seed").is_null());
    CHECK(meta.at("error_bound").get<double>() <= 1e-9);
    CHECK(cli({"--config", s.path("missing.json"), "phi", "2"}).code == kExitUsage);
}

TEST_CASE("simulation is reproducible and records its seed") {
    Scratch s;
    const std::vector<std::string> args{"simulate", "--t-step", "0.1", "--steps", "50", "--seed", "5", "--beta", "2"};
    const Result a = cli(args), b = cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("step,time,radius,real_coord,point\n", 0) == 0);
    std::vector<std::string> to_file{"--out", s.path("p.csv"), "--threads", "2"};
    to_file.insert(to_file.end(), args.begin(), args.end());
    CHECK(cli(to_file).code == 0);
    CHECK(slurp(s.path("p.csv")) == a.out);
    CHECK(nlohmann::json::parse(slurp(s.path("p.csv.meta.json"))).at("seed") == 5);
}

TEST_CASE("transform and solver commands") {
    Scratch s;
    const RadialStep liz = combine(sphere_indicator(PrimePower(2, 1)), ball_indicator(PrimePower(2, -1)),
                                   CombineOp::Add, ComplexRational(-1));
    const std::string u0 = s.file("u0.json", to_json(liz).dump());
    const Result ft = cli({"ft", "--in", u0});
    REQUIRE(ft.code == 0);
    CHECK(radial_step_from_json(nlohmann::json::parse(ft.out)).same_function(ft_radial_step(liz)));

    const Result hom = cli({"solve", "homogeneous", "--in", u0, "--t", "0.5", "--strict", "--radii", "0", "2"});
    REQUIRE(hom.code == 0);
    const auto j = nlohmann::json::parse(hom.out);
    CHECK(j.at("exact") == true);
    CHECK(j.at("samples").size() == 2);

    const std::string ball = s.file("ball.json", to_json(ball_indicator(PrimePower(2, 1))).dump());
    CHECK(cli({"solve", "homogeneous", "--in", ball, "--strict"}).code == kExitUsage);
    const auto ev = nlohmann::json::parse(cli({"solve", "homogeneous", "--in", ball, "--t", "1"}).out);
    CHECK(ev.at("exact") == false);

    nlohmann::json forcing;
    forcing["times"] = {0.0, 1.0};
    forcing["values"] = {to_json(liz), to_json(liz)};
    const std::string f = s.file("f.json", forcing.dump());
    const Result duh = cli({"solve", "duhamel", "--forcing", f, "--t", "1", "--intervals", "8", "--rule", "trapezoid"});
    CHECK(duh.code == 0);
    CHECK(cli({"solve", "duhamel", "--forcing", f, "--t", "2"}).code == kExitUsage);
}

}  // TEST_SUITE
