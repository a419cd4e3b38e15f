// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used as test oracles. Everything
// here works from raw JSON text (model files, graph exports, mapping files)
// and re-derives hashes, prefixes, validity and categories without touching
// the library's code paths, so agreement is meaningful.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace oracle {

using ojson = nlohmann::json;

// Straight-line FNV-1a 64, written before the main build; frozen reference
// values live in the tests.
inline std::uint64_t fnv64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex16(std::uint64_t v) {
    static const char* d = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = d[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string canonical_string(const std::string& window_title, const std::string& type_name,
                                    const std::string& title, int index) {
    return window_title + '\x1f' + type_name + '\x1f' + title + '\x1f' + std::to_string(index);
}

inline std::string stable_hex(const std::string& window_title, const std::string& type_name,
                              const std::string& title, int index) {
    return hex16(fnv64(canonical_string(window_title, type_name, title, index)));
}

// ---------------------------------------------------------------------------
// Event-flow graph, from the library's export JSON
// ---------------------------------------------------------------------------

struct Graph {
    std::set<std::string> events;
    std::set<std::string> initial;
    std::set<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::set<std::string>> adjacency;  // sorted both levels
};

inline Graph parse_graph(const std::string& efg_json_text) {
    ojson j = ojson::parse(efg_json_text);
    Graph g;
    for (const auto& e : j.at("events")) g.events.insert(e.get<std::string>());
    for (const auto& e : j.at("initial")) g.initial.insert(e.get<std::string>());
    for (const auto& edge : j.at("edges")) {
        std::string from = edge.at(0).get<std::string>();
        std::string to = edge.at(1).get<std::string>();
        g.edges.insert({from, to});
        g.adjacency[from].insert(to);
    }
    return g;
}

inline bool valid(const Graph& g, const std::vector<std::string>& seq) {
    if (seq.empty() || !g.initial.count(seq[0])) return false;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (!g.edges.count({seq[i], seq[i + 1]})) return false;
    return true;
}

// Breadth-first from the sorted initial events with sorted neighbor
// expansion; first discovery fixes the parent.
inline std::optional<std::vector<std::string>> prefix(const Graph& g, const std::string& target) {
    if (!g.events.count(target)) return std::nullopt;
    std::map<std::string, std::string> parent;
    std::set<std::string> seen;
    std::deque<std::string> queue;
    for (const auto& e : g.initial) {  // std::set iterates sorted
        seen.insert(e);
        queue.push_back(e);
    }
    while (!queue.empty()) {
        std::string u = queue.front();
        queue.pop_front();
        if (u == target) break;
        auto it = g.adjacency.find(u);
        if (it == g.adjacency.end()) continue;
        for (const auto& v : it->second)
            if (seen.insert(v).second) {
                parent[v] = u;
                queue.push_back(v);
            }
    }
    if (!seen.count(target)) return std::nullopt;
    std::vector<std::string> path;
    std::string cur = target;
    while (parent.count(cur)) {
        cur = parent.at(cur);
        path.insert(path.begin(), cur);
    }
    return path;
}

// ---------------------------------------------------------------------------
// Models and mappings, from raw file JSON
// ---------------------------------------------------------------------------

struct WidgetFacts {
    std::string window_title;
    std::string type_name;
    std::string title;
    int index = 0;
    std::set<std::string> kinds;
};

struct ModelFacts {
    std::map<std::string, WidgetFacts> widgets;
};

inline ModelFacts parse_model(const std::string& model_json_text) {
    ojson j = ojson::parse(model_json_text);
    ModelFacts m;
    for (const auto& win : j.at("windows")) {
        std::string wtitle = win.at("title").get<std::string>();
        for (const auto& w : win.at("widgets")) {
            WidgetFacts f;
            f.window_title = wtitle;
            f.type_name = w.at("type_name").get<std::string>();
            f.title = w.at("title").get<std::string>();
            f.index = w.at("index").get<int>();
            for (const auto& a : w.at("actions")) f.kinds.insert(a.at("kind").get<std::string>());
            m.widgets.emplace(w.at("widget_id").get<std::string>(), std::move(f));
        }
    }
    return m;
}

struct MappingFacts {
    std::map<std::string, std::string> pairs;
};

inline MappingFacts parse_mapping(const std::string& mapping_json_text) {
    ojson j = ojson::parse(mapping_json_text);
    MappingFacts m;
    for (const auto& p : j.at("pairs"))
        m.pairs.emplace(p.at("from").get<std::string>(), p.at("to").get<std::string>());
    return m;
}

inline std::pair<std::string, std::string> split_event(const std::string& event_id) {
    auto pos = event_id.rfind(':');
    return {event_id.substr(0, pos), event_id.substr(pos + 1)};
}

// ---------------------------------------------------------------------------
// The four-way classification, re-derived from scratch
// ---------------------------------------------------------------------------

// 4 if any effective-sequence widget lacks an equivalent supporting the
// kind; 3 if all map but the mapped sequence is invalid in the new graph;
// 1 if additionally every widget's property hash is unchanged; else 2.
// Returns 0 when the case's first event is missing from the old graph
// (callers treat that as an error case).
inline int classify(const std::vector<std::string>& main_events, const Graph& old_graph,
                    const ModelFacts& old_model, const Graph& new_graph,
                    const ModelFacts& new_model, const MappingFacts& mapping) {
    auto reach = prefix(old_graph, main_events.at(0));
    if (!reach) return 0;
    std::vector<std::string> effective = *reach;
    effective.insert(effective.end(), main_events.begin(), main_events.end());

    std::vector<std::string> mapped;
    for (const auto& e : effective) {
        auto [widget, kind] = split_event(e);
        auto it = mapping.pairs.find(widget);
        if (it == mapping.pairs.end()) return 4;
        auto nw = new_model.widgets.find(it->second);
        if (nw == new_model.widgets.end() || !nw->second.kinds.count(kind)) return 4;
        mapped.push_back(it->second + ":" + kind);
    }
    if (!valid(new_graph, mapped)) return 3;
    for (std::size_t i = 0; i < effective.size(); ++i) {
        const WidgetFacts& ow = old_model.widgets.at(split_event(effective[i]).first);
        const WidgetFacts& nw = new_model.widgets.at(split_event(mapped[i]).first);
        if (stable_hex(ow.window_title, ow.type_name, ow.title, ow.index) !=
            stable_hex(nw.window_title, nw.type_name, nw.title, nw.index))
            return 2;
    }
    return 1;
}

}  // namespace oracle
