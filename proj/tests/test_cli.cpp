#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcube/cli.hpp"
#include "pcube/cube.hpp"
#include "pcube/io.hpp"
#include "pcube/product.hpp"
#include "pcube/zoo.hpp"

using namespace pcube;
using nlohmann::json;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace

TEST_CASE("identical arguments produce byte-identical output") {
    std::vector<std::string> args{"check-hyper", "--theorem", "13",
                                  "--fn",        "antitribes:s=2,w=3", "--p", "0.2"};
    auto a = invoke(args);
    auto b = invoke(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());

    auto doc = json::parse(a.out);
    CHECK(doc["schema"] == 1);
    CHECK(doc["subcommand"] == "check-hyper");
    REQUIRE(doc["rows"].size() == 1);
    CHECK(doc["rows"][0]["theorem"] == "hyper.smoothing");
    CHECK(doc["rows"][0]["pass"] == true);

    // The descriptive name also reports the derivative-based variant.
    auto full = invoke({"check-hyper", "--theorem", "smoothing", "--fn", "antitribes:s=2,w=3",
                        "--p", "0.2"});
    CHECK(full.code == 0);
    CHECK(json::parse(full.out)["rows"].size() == 2);
}

TEST_CASE("dictator measure curve as csv") {
    auto r = invoke({"threshold", "--fn", "dictator", "--n", "4", "--check", "profile", "--grid",
                     "5", "--format", "csv"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "p,mu");
    int rows = 0;
    while (std::getline(lines, line)) {
        auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        double p = std::stod(line.substr(0, comma));
        double mu = std::stod(line.substr(comma + 1));
        CHECK(std::abs(mu - p) <= 1e-12);
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("verdict rows use the fixed column set") {
    auto r = invoke({"threshold", "--fn", "and", "--n", "2", "--check", "russo", "--p", "0.35",
                     "--format", "csv"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    REQUIRE(std::getline(lines, header));
    CHECK(header == "instance,theorem,params,lhs,rhs,margin,pass");
}

TEST_CASE("failed checks exit 1, config errors exit 2") {
    auto fail = invoke({"threshold", "--fn", "dictator", "--n", "4", "--check", "certificate",
                        "--M", "1"});
    CHECK(fail.code == 1);
    auto doc = json::parse(fail.out);
    CHECK(doc["rows"][0]["pass"] == false);

    auto bad = invoke({"transform", "--fn", "bogus:a=1"});
    CHECK(bad.code == 2);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("error:") != std::string::npos);

    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
    CHECK(!invoke({"--help"}).out.empty());
}

TEST_CASE("timing fields appear only on request") {
    std::vector<std::string> base{"stability", "--fn", "majority", "--n", "5", "--p", "0.5",
                                  "--check", "warmup"};
    auto plain = invoke(base);
    CHECK(plain.code == 0);
    CHECK(json::parse(plain.out)["rows"][0].count("runtime_ms") == 0);

    auto timed_args = base;
    timed_args.push_back("--timings");
    auto timed = invoke(timed_args);
    CHECK(timed.code == 0);
    CHECK(json::parse(timed.out)["rows"][0].count("runtime_ms") == 1);
}

TEST_CASE("zoo listing covers the whole catalog") {
    auto r = invoke({"zoo"});
    CHECK(r.code == 0);
    auto doc = json::parse(r.out);
    CHECK(doc["rows"].size() == zoo_catalog().size());
    CHECK(doc["summary"]["generators"].size() == generator_names().size());
    for (const auto& row : doc["rows"]) {
        CHECK(row.count("id") == 1);
        CHECK(row.count("spec") == 1);
        CHECK(row.count("n") == 1);
        CHECK(row.count("monotone") == 1);
    }
}

TEST_CASE("every registered checker is reachable and passes on its home instance") {
    const auto& registry = cli::checker_registry();
    CHECK(registry.size() == 20);
    std::set<std::string> ids;
    for (const auto& info : registry) CHECK(ids.insert(info.id).second);

    // Temp inputs for the file-driven subcommands.
    auto space = ProductSpace::make({{0.2, 0.8}, {0.3, 0.3, 0.4}});
    {
        std::ofstream f("cli_tmp_rand.tbl");
        std::vector<double> v(space.points);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 3 == 0) ? 1.0 : -0.5;
        write_product_table(f, ProductFunction(space, v));
    }
    {
        std::ofstream f("cli_tmp_const_a.tbl");
        write_product_table(f, ProductFunction::constant(space, 2.0));
    }
    {
        std::ofstream f("cli_tmp_const_b.tbl");
        write_product_table(f, ProductFunction::constant(space, -0.5));
    }
    {
        std::ofstream f("cli_tmp_poly.txt");
        std::vector<PolyTerm> terms;
        for (int i = 0; i + 1 < 6; ++i)
            terms.push_back({(mask_t{1} << i) | (mask_t{1} << (i + 1)), 1.0 / std::sqrt(5.0)});
        write_poly(f, MultilinearPoly::make(6, terms));
    }

    const std::map<std::string, std::vector<std::string>> canonical = {
        {"hyper.fourth_moment", {"check-hyper", "--theorem", "fourth_moment", "--fn", "and", "--n", "2"}},
        {"hyper.smoothing", {"check-hyper", "--theorem", "smoothing", "--fn", "and", "--n", "2"}},
        {"hyper.practice", {"check-hyper", "--theorem", "practice", "--fn", "and", "--n", "2"}},
        {"hyper.qnorm", {"check-hyper", "--theorem", "qnorm", "--fn", "and", "--n", "2"}},
        {"hyper.replacement", {"check-hyper", "--theorem", "replacement", "--fn", "and", "--n", "3"}},
        {"noise.sensitivity",
         {"stability", "--check", "sensitivity", "--fn", "and", "--n", "12", "--p", "0.3", "--rho",
          "0.5", "--eps", "0.9"}},
        {"stability.warmup",
         {"stability", "--check", "warmup", "--fn", "majority", "--n", "5", "--p", "0.5"}},
        {"stability.concentration",
         {"stability", "--check", "concentration", "--fn", "and", "--n", "4"}},
        {"stability.truncated_norm",
         {"stability", "--check", "truncated_norm", "--fn", "and", "--n", "4"}},
        {"stability.expectation_search",
         {"isoperimetry", "--check", "expectation_search", "--fn", "and", "--n", "6", "--p", "0.5",
          "--K", "7", "--C", "1"}},
        {"stability.influence_search",
         {"isoperimetry", "--check", "influence_search", "--fn", "tribes:s=2,w=2", "--p", "0.5",
          "--K", "3.1"}},
        {"stability.sharpness_table",
         {"isoperimetry", "--check", "sharpness", "--s", "2", "--w", "2", "--p", "0.5"}},
        {"threshold.russo",
         {"threshold", "--check", "russo", "--fn", "and", "--n", "2", "--p", "0.35"}},
        {"threshold.global_certificate",
         {"threshold", "--check", "certificate", "--fn", "antitribes:s=2,w=2", "--M", "1"}},
        {"threshold.sharp",
         {"threshold", "--check", "sharp", "--fn", "antitribes:s=3,w=2", "--p", "0.48", "--q",
          "0.6", "--M", "2", "--C", "2"}},
        {"threshold.noise_route",
         {"threshold", "--check", "noise_route", "--fn", "antitribes:s=4,w=3", "--p", "0.05",
          "--q", "0.15", "--eps", "0.5", "--C", "1.5"}},
        {"threshold.two_bias",
         {"threshold", "--check", "two_bias", "--fn", "majority", "--n", "5", "--p", "0.2", "--q",
          "0.4"}},
        {"product.es_moment",
         {"product", "--space", "cli_tmp_rand.tbl", "--check", "es_moment"}},
        {"product.holder",
         {"product", "--space", "cli_tmp_const_a.tbl", "--space", "cli_tmp_const_b.tbl", "--check",
          "holder", "--deps", "0,0"}},
        {"invariance.bound", {"invariance", "--poly", "cli_tmp_poly.txt"}},
    };

    for (const auto& info : registry) {
        auto it = canonical.find(info.id);
        REQUIRE_MESSAGE(it != canonical.end(), info.id);
        CHECK(it->second.front() == info.subcommand);
        auto r = invoke(it->second);
        CHECK_MESSAGE(r.code == 0, info.id, ": ", r.err);
        CHECK_MESSAGE(r.out.find("\"theorem\": \"" + info.id + "\"") != std::string::npos, info.id);
    }

    std::remove("cli_tmp_rand.tbl");
    std::remove("cli_tmp_const_a.tbl");
    std::remove("cli_tmp_const_b.tbl");
    std::remove("cli_tmp_poly.txt");
}

TEST_CASE("dimension cap respects the environment override") {
    setenv("PCUBE_NCAP", "4", 1);
    auto blocked = invoke({"transform", "--fn", "parity", "--n", "5"});
    CHECK(blocked.code == 2);
    CHECK(blocked.out.empty());

    auto allowed = invoke({"transform", "--fn", "parity", "--n", "4"});
    CHECK(allowed.code == 0);

    setenv("PCUBE_NCAP", "0", 1);
    CHECK(invoke({"zoo"}).code == 2);
    setenv("PCUBE_NCAP", "notanumber", 1);
    auto bad = invoke({"zoo"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("PCUBE_NCAP") != std::string::npos);

    unsetenv("PCUBE_NCAP");
    set_dimension_cap(24);
    CHECK(invoke({"transform", "--fn", "parity", "--n", "5"}).code == 0);
}
