// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "replaysim/detail/json_util.hpp"
#include "replaysim/efg.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/splitmix64.hpp"

namespace replaysim {

inline constexpr char kCaseIdSep = '|';
inline constexpr std::string_view kGeneratorAllLength2 = "all-length2";
inline constexpr std::string_view kGeneratorRandomWalk = "random-walk";

// An ordered sequence of main events. Executability is supplied at
// classification time by prepending the reaching prefix of the first event.
struct TestCase {
    std::vector<std::string> main_events;
    std::string origin_version;
    std::string case_id;  // main_events joined by '|'
};

inline std::string make_case_id(std::span<const std::string> events) {
    std::string id;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i) id += kCaseIdSep;
        id += events[i];
    }
    return id;
}

// One (generator, length) group of cases, canonically ordered by case_id.
struct SuiteGroup {
    std::string generator;
    std::optional<std::uint64_t> seed;  // absent for the exhaustive generator
    int length = 0;
    std::vector<TestCase> cases;
    std::uint64_t requested = 0;  // random generation only
    bool early_stop = false;      // fewer distinct walks than requested
};

// Per-version aggregate of generated groups.
struct TestSuite {
    std::string origin_version;
    std::vector<SuiteGroup> groups;

    void merge(TestSuite other) {
        if (origin_version.empty()) origin_version = other.origin_version;
        if (origin_version != other.origin_version)
            throw VersionMismatch("cannot merge suites for \"" + origin_version + "\" and \"" +
                                  other.origin_version + "\"");
        for (auto& g : other.groups) groups.push_back(std::move(g));
    }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Reaching prefix of the first main event followed by the main events; the
// full list of actioned events used by classification.
inline std::vector<std::string> effective_sequence(const EventFlowGraph& g, const TestCase& tc) {
    std::vector<std::string> out = reaching_prefix(g, tc.main_events.at(0));
    out.insert(out.end(), tc.main_events.begin(), tc.main_events.end());
    return out;
}

// Event-interaction coverage: exactly one length-2 case per edge.
inline TestSuite generate_all_length2(const EventFlowGraph& g, const std::string& origin_version) {
    SuiteGroup group;
    group.generator = std::string(kGeneratorAllLength2);
    group.length = 2;
    for (std::size_t from = 0; from < g.event_count(); ++from) {
        const std::string& x = g.event_at(static_cast<int>(from)).event_id;
        for (int to : g.follows_at(static_cast<int>(from))) {
            TestCase tc;
            tc.main_events = {x, g.event_at(to).event_id};
            tc.origin_version = origin_version;
            tc.case_id = make_case_id(tc.main_events);
            group.cases.push_back(std::move(tc));
        }
    }
    std::sort(group.cases.begin(), group.cases.end(),
              [](const TestCase& a, const TestCase& b) { return a.case_id < b.case_id; });
    group.requested = group.cases.size();
    return TestSuite{origin_version, {std::move(group)}};
}

// Seeded random walks over the graph: first event uniform over the initial
// events, each successor uniform over follows(current), both via SplitMix64.
// Duplicate and dead-end walks count as rejected attempts; generation stops
// early after 50 * count consecutive rejections. Deterministic given
// (graph, length, count, seed).
inline TestSuite generate_random(const EventFlowGraph& g, int length, std::uint64_t count,
                                 std::uint64_t seed, const std::string& origin_version) {
    if (length < 2) throw std::invalid_argument("random generation requires length >= 2");

    SuiteGroup group;
    group.generator = std::string(kGeneratorRandomWalk);
    group.seed = seed;
    group.length = length;
    group.requested = count;

    if (count == 0) return TestSuite{origin_version, {std::move(group)}};

    bool any_walkable = false;
    for (int i : g.initial_indices())
        if (!g.follows_at(i).empty()) { any_walkable = true; break; }
    if (!any_walkable)
        throw NoWalkPossible("no initial event of version \"" + origin_version +
                             "\" has outgoing edges");

    SplitMix64 rng(seed);
    std::unordered_set<std::string> seen;
    const std::uint64_t reject_limit = 50 * count;
    std::uint64_t consecutive_rejects = 0;
    std::vector<int> walk;

    while (group.cases.size() < count && consecutive_rejects < reject_limit) {
        walk.clear();
        walk.push_back(g.initial_indices()[rng.pick(g.initial_indices().size())]);
        bool dead_end = false;
        for (int i = 1; i < length; ++i) {
            auto opts = g.follows_at(walk.back());
            if (opts.empty()) { dead_end = true; break; }
            walk.push_back(opts[rng.pick(opts.size())]);
        }
        if (dead_end) {
            ++consecutive_rejects;
            continue;
        }
        TestCase tc;
        for (int idx : walk) tc.main_events.push_back(g.event_at(idx).event_id);
        tc.case_id = make_case_id(tc.main_events);
        if (!seen.insert(tc.case_id).second) {
            ++consecutive_rejects;
            continue;
        }
        tc.origin_version = origin_version;
        group.cases.push_back(std::move(tc));
        consecutive_rejects = 0;
    }

    group.early_stop = group.cases.size() < count;
    std::sort(group.cases.begin(), group.cases.end(),
              [](const TestCase& a, const TestCase& b) { return a.case_id < b.case_id; });
    return TestSuite{origin_version, {std::move(group)}};
}

// ---------------------------------------------------------------------------
// Suite files: one (generator, length) group per file
// ---------------------------------------------------------------------------

inline detail::json suite_group_to_json(const std::string& origin_version, const SuiteGroup& g) {
    using detail::json;
    json j;
    j["origin_version"] = origin_version;
    j["generator"] = g.generator;
    j["seed"] = g.seed ? json(*g.seed) : json(nullptr);
    j["length"] = g.length;
    json cases = json::array();
    for (const auto& tc : g.cases) {
        json c = json::array();
        for (const auto& e : tc.main_events) c.push_back(e);
        cases.push_back(std::move(c));
    }
    j["cases"] = std::move(cases);
    return j;
}

inline std::string save_suite_group(const std::string& origin_version, const SuiteGroup& g) {
    return detail::dump_canonical(suite_group_to_json(origin_version, g));
}

inline void write_suite_group(const std::string& origin_version, const SuiteGroup& g,
                              const std::string& path) {
    detail::write_file(path, save_suite_group(origin_version, g));
}

// Loads one group file into a single-group suite.
inline TestSuite load_suite_group(const std::string& path, bool strict = true) {
    using namespace detail;
    json j = parse_json_file(path);
    expect_object(j, path);
    check_keys(j, {"origin_version", "generator", "seed", "length", "cases"}, path, strict);
    TestSuite suite;
    suite.origin_version = require_string(j, "origin_version", path);
    SuiteGroup g;
    g.generator = require_string(j, "generator", path);
    const json& seed = require(j, "seed", path);
    if (seed.is_number_unsigned() || seed.is_number_integer())
        g.seed = seed.get<std::uint64_t>();
    else if (!seed.is_null())
        throw ValidationError(path + ".seed: expected integer or null");
    std::int64_t length = require_int(j, "length", path);
    if (length < 1) throw ValidationError(path + ".length: must be >= 1");
    g.length = static_cast<int>(length);
    const json& cases = require_array(j, "cases", path);
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string at = path + ".cases[" + std::to_string(i) + "]";
        const json& c = cases[i];
        if (!c.is_array()) throw ValidationError(at + ": expected an array of event ids");
        if (static_cast<std::int64_t>(c.size()) != length)
            throw ValidationError(at + ": case length " + std::to_string(c.size()) +
                                  " does not match group length " + std::to_string(length));
        TestCase tc;
        for (const auto& e : c) {
            if (!e.is_string()) throw ValidationError(at + ": event ids must be strings");
            tc.main_events.push_back(e.get<std::string>());
        }
        tc.origin_version = suite.origin_version;
        tc.case_id = make_case_id(tc.main_events);
        if (!ids.insert(tc.case_id).second)
            throw ValidationError(at + ": duplicate case \"" + tc.case_id + "\"");
        g.cases.push_back(std::move(tc));
    }
    g.requested = g.cases.size();
    suite.groups.push_back(std::move(g));
    return suite;
}

}  // namespace replaysim
