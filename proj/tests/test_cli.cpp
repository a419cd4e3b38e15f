// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "replaysim/detail/json_util.hpp"

#include "support/paths.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(REPLAYSIM_CLI_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) { return replaysim::detail::read_file(path); }

}  // namespace

TEST_CASE("no arguments prints usage and exits 2") {
    RunResult r = run_cli("");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("usage") != std::string::npos);
}

TEST_CASE("missing input exits 1 and names the path") {
    RunResult r = run_cli("derive-efg missing.json -o /tmp/nothing.json");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("missing.json") != std::string::npos);
}

TEST_CASE("--random without --seed is a usage error") {
    RunResult r =
        run_cli("generate " + testpaths::fixture("menu3.json") + " --random 3 -o /tmp/x.json");
    CHECK(r.exit_code == 2);
}

TEST_CASE("generate is deterministic across runs") {
    std::string dir = testpaths::scratch("cli-generate");
    std::string model = testpaths::fixture("chain/v0.json");
    RunResult ra = run_cli("generate " + model +
                           " --length2-all --random 3 --count 50 --seed 42 -o " + dir + "/a.json");
    RunResult rb = run_cli("generate " + model +
                           " --length2-all --random 3 --count 50 --seed 42 -o " + dir + "/b.json");
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);
    CHECK(slurp(dir + "/a.all2.json") == slurp(dir + "/b.all2.json"));
    CHECK(slurp(dir + "/a.rand3.json") == slurp(dir + "/b.rand3.json"));
}

TEST_CASE("strict mode rejects unknown keys; --lenient and the env var accept them") {
    std::string dir = testpaths::scratch("cli-strict");
    std::string model = dir + "/model.json";
    std::string text = slurp(testpaths::fixture("menu3.json"));
    text.insert(text.find("\"version_label\""), "\"vendor_extra\": true, ");
    replaysim::detail::write_file(model, text);

    CHECK(run_cli("derive-efg " + model + " -o " + dir + "/e1.json").exit_code == 1);
    CHECK(run_cli("--lenient derive-efg " + model + " -o " + dir + "/e2.json").exit_code == 0);
    RunResult env_run = [&] {
        std::string cmd = "REPLAY_SIM_STRICT=0 " + std::string(REPLAYSIM_CLI_BIN) +
                          " derive-efg " + model + " -o " + dir + "/e3.json 2>&1";
        RunResult r;
        FILE* pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 4096> buf{};
        while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
            r.output.append(buf.data(), n);
        int status = pclose(pipe);
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return r;
    }();
    CHECK(env_run.exit_code == 0);
}

TEST_CASE("full pipeline: synth, generate, classify, chain, report") {
    std::string dir = testpaths::scratch("cli-pipeline");
    std::string v0 = testpaths::fixture("chain/v0.json");

    // synthesize v1 and v2
    REQUIRE(run_cli("synth " + v0 + " --script " + testpaths::fixture("chain/step1.json") +
                    " -o " + dir + "/v1.json -m " + dir + "/m01.json")
                .exit_code == 0);
    REQUIRE(run_cli("synth " + dir + "/v1.json --script " +
                    testpaths::fixture("chain/step2.json") + " -o " + dir + "/v2.json -m " + dir +
                    "/m12.json")
                .exit_code == 0);

    // copy v0 next to the synthesized models and write a manifest
    replaysim::detail::write_file(dir + "/v0.json", slurp(v0));
    replaysim::detail::write_file(dir + "/chain.json", R"({
      "models": ["v0.json", "v1.json", "v2.json"],
      "mappings": ["m01.json", "m12.json"]
    })");

    // per-version suites
    std::filesystem::create_directories(dir + "/suites");
    for (const char* version : {"v0", "v1"}) {
        RunResult r = run_cli("generate " + dir + "/" + version +
                              ".json --length2-all --random 3 --count 40 --seed 7 -o " + dir +
                              "/suites/" + version + ".json");
        REQUIRE(r.exit_code == 0);
    }

    // pairwise classification of v0's exhaustive suite
    RunResult cls = run_cli("classify --old " + dir + "/v0.json --new " + dir +
                            "/v1.json --map " + dir + "/m01.json --suite " + dir +
                            "/suites/v0.all2.json -o " + dir + "/pair.jsonl");
    REQUIRE(cls.exit_code == 0);
    std::string jsonl = slurp(dir + "/pair.jsonl");
    CHECK(jsonl.find("\"category\"") != std::string::npos);
    CHECK(jsonl.find("\"target_version\":\"v1\"") != std::string::npos);

    // whole-chain classification
    RunResult ch = run_cli("chain --manifest " + dir + "/chain.json --suite " + dir +
                           "/suites/v0.rand3.json -o " + dir + "/chain.jsonl");
    REQUIRE(ch.exit_code == 0);
    CHECK(slurp(dir + "/chain.jsonl").find("\"target_version\":\"v2\"") != std::string::npos);

    // reports from the suite directory
    RunResult rep = run_cli("report --mode cross --manifest " + dir + "/chain.json --suites " +
                            dir + "/suites --format csv -o " + dir + "/cross.csv");
    REQUIRE(rep.exit_code == 0);
    std::string csv = slurp(dir + "/cross.csv");
    CHECK(csv.rfind("origin_version,target_version,length,category,count,proportion", 0) == 0);

    RunResult svg = run_cli("report --mode long --manifest " + dir + "/chain.json --suites " +
                            dir + "/suites --format svg -o " + dir + "/long.svg");
    REQUIRE(svg.exit_code == 0);
    CHECK(slurp(dir + "/long.svg").rfind("<svg", 0) == 0);

    SUBCASE("worker count changes no output byte") {
        RunResult w4 = run_cli("--workers 4 chain --manifest " + dir + "/chain.json --suite " +
                               dir + "/suites/v0.rand3.json -o " + dir + "/chain4.jsonl");
        REQUIRE(w4.exit_code == 0);
        CHECK(slurp(dir + "/chain4.jsonl") == slurp(dir + "/chain.jsonl"));
    }
}

TEST_CASE("all command drives the pipeline end to end with replication") {
    std::string dir = testpaths::scratch("cli-all");
    std::string v0 = testpaths::fixture("chain/v0.json");
    replaysim::detail::write_file(dir + "/v0.json", slurp(v0));
    REQUIRE(run_cli("synth " + v0 + " --script " + testpaths::fixture("chain/step1.json") +
                    " -o " + dir + "/v1.json -m " + dir + "/m01.json")
                .exit_code == 0);
    replaysim::detail::write_file(dir + "/chain.json", R"({
      "models": ["v0.json", "v1.json"],
      "mappings": ["m01.json"]
    })");

    RunResult r = run_cli("all --manifest " + dir + "/chain.json --outdir " + dir +
                          "/out --lengths 3,4 --count 30 --seeds 1,2,3 --svg");
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(dir + "/out/cross.seed1.csv"));
    CHECK(std::filesystem::exists(dir + "/out/long.seed3.csv"));
    CHECK(std::filesystem::exists(dir + "/out/cross.mean.csv"));
    CHECK(std::filesystem::exists(dir + "/out/long.mean.csv"));
    CHECK(std::filesystem::exists(dir + "/out/cross.svg"));
    CHECK(std::filesystem::exists(dir + "/out/suites/seed2/v0.rand4.json"));

    // exhaustive rows are seed-independent: identical across per-seed CSVs
    auto pick_length2 = [](const std::string& csv) {
        std::string out;
        std::istringstream in(csv);
        std::string line;
        while (std::getline(in, line)) {
            // third comma-separated field is the length column
            std::size_t c1 = line.find(',');
            std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
            std::size_t c3 = c2 == std::string::npos ? c2 : line.find(',', c2 + 1);
            if (c3 != std::string::npos && line.substr(c2 + 1, c3 - c2 - 1) == "2")
                out += line + "\n";
        }
        return out;
    };
    std::string c1 = pick_length2(slurp(dir + "/out/cross.seed1.csv"));
    std::string c2 = pick_length2(slurp(dir + "/out/cross.seed2.csv"));
    CHECK(c1 == c2);
    CHECK_FALSE(c1.empty());
}
