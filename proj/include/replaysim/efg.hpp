// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "replaysim/detail/json_util.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/model.hpp"

namespace replaysim {

// One executable interaction: a widget plus one of its action kinds.
struct Event {
    std::string event_id;  // widget_id ":" kind tag
    std::string widget_id;
    std::string window_id;
    EventKind kind = EventKind::SYSTEM;
    std::string open_target;  // window opened, WINDOW_OPEN only
};

// Directed graph over events: an edge (x, y) means y may immediately follow
// x. Immutable after derivation; all queries are read-only.
class EventFlowGraph {
  public:
    EventFlowGraph() = default;

    // `events` sorted by event_id; `follows`/`initial` are index based.
    EventFlowGraph(std::vector<Event> events, std::vector<std::vector<int>> follows,
                   std::vector<int> initial)
        : events_(std::move(events)), follows_(std::move(follows)), initial_(std::move(initial)) {
        for (std::size_t i = 0; i < events_.size(); ++i)
            index_.emplace(events_[i].event_id, static_cast<int>(i));
        edge_count_ = 0;
        for (std::size_t from = 0; from < follows_.size(); ++from) {
            edge_count_ += follows_[from].size();
            for (int to : follows_[from]) edge_set_.insert(edge_key(static_cast<int>(from), to));
        }
        compute_bfs_tree();
    }

    const std::vector<Event>& events() const { return events_; }
    std::size_t event_count() const { return events_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    int index_of(std::string_view event_id) const {
        auto it = index_.find(std::string(event_id));
        return it == index_.end() ? -1 : it->second;
    }
    bool has_event(std::string_view event_id) const { return index_of(event_id) >= 0; }
    const Event& event_at(int idx) const { return events_[static_cast<std::size_t>(idx)]; }

    std::span<const int> follows_at(int idx) const { return follows_[static_cast<std::size_t>(idx)]; }
    std::span<const int> initial_indices() const { return initial_; }

    bool is_initial(int idx) const {
        return std::binary_search(initial_.begin(), initial_.end(), idx);
    }
    bool is_edge(int from, int to) const { return edge_set_.count(edge_key(from, to)) != 0; }

    // Events that may immediately follow `event_id`, in canonical order.
    std::vector<std::string> follows_of(std::string_view event_id) const {
        int idx = index_of(event_id);
        if (idx < 0) throw Unreachable("unknown event id \"" + std::string(event_id) + "\"");
        std::vector<std::string> out;
        for (int to : follows_[static_cast<std::size_t>(idx)])
            out.push_back(events_[static_cast<std::size_t>(to)].event_id);
        return out;
    }

    std::vector<std::string> initial_events() const {
        std::vector<std::string> out;
        for (int i : initial_) out.push_back(events_[static_cast<std::size_t>(i)].event_id);
        return out;
    }

    // BFS distance from the initial set; parent pointers reconstruct the
    // canonical shortest path.
    int bfs_parent(int idx) const { return bfs_parent_[static_cast<std::size_t>(idx)]; }
    int bfs_distance(int idx) const { return bfs_dist_[static_cast<std::size_t>(idx)]; }

  private:
    static std::uint64_t edge_key(int from, int to) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
               static_cast<std::uint32_t>(to);
    }

    // Multi-source BFS from the initial events with sorted neighbor
    // expansion; ties between equal-length paths resolve to the
    // lexicographically smallest event_id sequence.
    void compute_bfs_tree() {
        bfs_parent_.assign(events_.size(), -1);
        bfs_dist_.assign(events_.size(), -1);
        std::deque<int> queue;
        for (int i : initial_) {  // initial_ is sorted by event_id already
            bfs_dist_[static_cast<std::size_t>(i)] = 0;
            queue.push_back(i);
        }
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : follows_[static_cast<std::size_t>(u)]) {
                if (bfs_dist_[static_cast<std::size_t>(v)] >= 0) continue;
                bfs_dist_[static_cast<std::size_t>(v)] = bfs_dist_[static_cast<std::size_t>(u)] + 1;
                bfs_parent_[static_cast<std::size_t>(v)] = u;
                queue.push_back(v);
            }
        }
    }

    std::vector<Event> events_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> follows_;
    std::vector<int> initial_;
    std::unordered_set<std::uint64_t> edge_set_;
    std::size_t edge_count_ = 0;
    std::vector<int> bfs_parent_;
    std::vector<int> bfs_dist_;
};

// ---------------------------------------------------------------------------
// Derivation
// ---------------------------------------------------------------------------

namespace detail {

// Per-window event layout used while deriving the graph.
struct WindowEvents {
    std::vector<int> top_level;   // events of widgets with no menu ancestor
    std::vector<int> all_events;  // every event hosted by the window
};

struct DeriveScratch {
    std::vector<Event> events;                       // all model events, sorted
    std::unordered_map<std::string, int> event_idx;  // event_id -> index
    std::vector<WindowEvents> per_window;            // by window index
    std::unordered_map<std::string, std::size_t> window_idx;
    std::vector<std::vector<int>> children;  // widget-children events per event
};

// A configuration is the stack of open windows in opening order. While any
// modal window is open, only the most recently opened modal contributes
// events; otherwise every open window does.
struct Config {
    std::vector<std::size_t> stack;

    std::string key() const {
        std::string k;
        for (auto w : stack) {
            k += std::to_string(w);
            k += ',';
        }
        return k;
    }
};

inline std::vector<std::size_t> context_windows(const Config& c, const GuiModel& m) {
    for (auto it = c.stack.rbegin(); it != c.stack.rend(); ++it)
        if (m.windows[*it].modal) return {*it};
    return c.stack;
}

}  // namespace detail

// Builds the event-flow graph of a model.
//
// Rules:
//   follows(SYSTEM)       = context
//   follows(MENU_OPEN)    = events of the widget's children + context
//   follows(WINDOW_OPEN)  = top-level events of the target window, plus the
//                           context unless the target is modal
//   follows(WINDOW_CLOSE) = context with the invoking window removed
//   follows(TERMINATE)    = nothing
// where the context of a configuration is the union of top-level events of
// its open windows, restricted to the topmost modal window while one is
// open. Top-level means no ancestor widget carries a MENU_OPEN action: menu
// entries only become available through their menu. Configurations are
// explored breadth-first from the start windows; events with no path from an
// initial event are dropped so generated steps are always executable.
inline EventFlowGraph derive_efg(const GuiModel& m) {
    using namespace detail;
    DeriveScratch s;

    // Collect events in canonical (event_id) order.
    for (const auto& win : m.windows)
        for (const auto& w : win.widgets)
            for (const auto& a : w.actions)
                s.events.push_back(
                    Event{make_event_id(w.widget_id, a.kind), w.widget_id, win.window_id, a.kind,
                          a.target});
    std::sort(s.events.begin(), s.events.end(),
              [](const Event& a, const Event& b) { return a.event_id < b.event_id; });
    for (std::size_t i = 0; i < s.events.size(); ++i)
        s.event_idx.emplace(s.events[i].event_id, static_cast<int>(i));
    for (std::size_t wi = 0; wi < m.windows.size(); ++wi)
        s.window_idx.emplace(m.windows[wi].window_id, wi);

    // Per-window layout: which events are top-level, which are menu-hidden.
    s.per_window.resize(m.windows.size());
    s.children.assign(s.events.size(), {});
    for (std::size_t wi = 0; wi < m.windows.size(); ++wi) {
        const Window& win = m.windows[wi];
        std::unordered_map<std::string, const Widget*> by_id;
        for (const auto& w : win.widgets) by_id.emplace(w.widget_id, &w);
        auto has_menu_action = [](const Widget& w) {
            for (const auto& a : w.actions)
                if (a.kind == EventKind::MENU_OPEN) return true;
            return false;
        };
        auto menu_hidden = [&](const Widget& w) {
            const Widget* cur = &w;
            while (cur->parent) {
                cur = by_id.at(*cur->parent);
                if (has_menu_action(*cur)) return true;
            }
            return false;
        };
        for (const auto& w : win.widgets) {
            bool hidden = menu_hidden(w);
            for (const auto& a : w.actions) {
                int idx = s.event_idx.at(make_event_id(w.widget_id, a.kind));
                s.per_window[wi].all_events.push_back(idx);
                if (!hidden) s.per_window[wi].top_level.push_back(idx);
                if (a.kind == EventKind::MENU_OPEN) {
                    // Events of direct children become reachable through this menu.
                    for (const auto& c : win.widgets)
                        if (c.parent && *c.parent == w.widget_id)
                            for (const auto& ca : c.actions)
                                s.children[static_cast<std::size_t>(idx)].push_back(
                                    s.event_idx.at(make_event_id(c.widget_id, ca.kind)));
                }
            }
        }
    }

    auto context_events = [&](const Config& c) {
        std::set<int> out;
        for (std::size_t wi : context_windows(c, m))
            out.insert(s.per_window[wi].top_level.begin(), s.per_window[wi].top_level.end());
        return out;
    };

    Config start;
    for (std::size_t wi = 0; wi < m.windows.size(); ++wi)
        if (m.windows[wi].open_at_start) start.stack.push_back(wi);
    if (start.stack.empty()) throw ModelError("no window opens at start: no initial configuration");

    std::vector<std::set<int>> follows(s.events.size());
    std::set<int> initial = context_events(start);

    std::deque<Config> queue{start};
    std::set<std::string> seen{start.key()};
    while (!queue.empty()) {
        Config c = queue.front();
        queue.pop_front();
        std::set<int> ctx = context_events(c);

        for (std::size_t wi : context_windows(c, m)) {
            for (int ei : s.per_window[wi].all_events) {
                const Event& e = s.events[static_cast<std::size_t>(ei)];
                auto& out = follows[static_cast<std::size_t>(ei)];
                switch (e.kind) {
                    case EventKind::SYSTEM:
                        out.insert(ctx.begin(), ctx.end());
                        break;
                    case EventKind::MENU_OPEN:
                        out.insert(ctx.begin(), ctx.end());
                        out.insert(s.children[static_cast<std::size_t>(ei)].begin(),
                                   s.children[static_cast<std::size_t>(ei)].end());
                        break;
                    case EventKind::WINDOW_OPEN: {
                        std::size_t ti = s.window_idx.at(e.open_target);
                        const auto& top = s.per_window[ti].top_level;
                        out.insert(top.begin(), top.end());
                        if (!m.windows[ti].modal) out.insert(ctx.begin(), ctx.end());
                        Config next = c;
                        if (std::find(next.stack.begin(), next.stack.end(), ti) ==
                            next.stack.end()) {
                            next.stack.push_back(ti);
                            if (seen.insert(next.key()).second) queue.push_back(next);
                        }
                        break;
                    }
                    case EventKind::WINDOW_CLOSE: {
                        Config next = c;
                        std::erase(next.stack, wi);
                        auto restored = context_events(next);
                        out.insert(restored.begin(), restored.end());
                        if (seen.insert(next.key()).second) queue.push_back(next);
                        break;
                    }
                    case EventKind::TERMINATE:
                        break;
                }
            }
        }
    }

    // Keep only events reachable from the initial set through the edges.
    std::vector<bool> reachable(s.events.size(), false);
    std::deque<int> rq;
    for (int i : initial) {
        reachable[static_cast<std::size_t>(i)] = true;
        rq.push_back(i);
    }
    while (!rq.empty()) {
        int u = rq.front();
        rq.pop_front();
        for (int v : follows[static_cast<std::size_t>(u)])
            if (!reachable[static_cast<std::size_t>(v)]) {
                reachable[static_cast<std::size_t>(v)] = true;
                rq.push_back(v);
            }
    }

    std::vector<int> remap(s.events.size(), -1);
    std::vector<Event> kept;
    for (std::size_t i = 0; i < s.events.size(); ++i)
        if (reachable[i]) {
            remap[i] = static_cast<int>(kept.size());
            kept.push_back(s.events[i]);
        }
    std::vector<std::vector<int>> kept_follows(kept.size());
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        if (!reachable[i]) continue;
        auto& dst = kept_follows[static_cast<std::size_t>(remap[i])];
        for (int v : follows[i]) dst.push_back(remap[static_cast<std::size_t>(v)]);
        // already ascending: remap preserves event_id order
    }
    std::vector<int> kept_initial;
    for (int i : initial) kept_initial.push_back(remap[static_cast<std::size_t>(i)]);

    return EventFlowGraph(std::move(kept), std::move(kept_follows), std::move(kept_initial));
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

// True iff the sequence starts at an initial event and every consecutive
// pair is an edge. Unknown event ids make the sequence invalid, not an error.
inline bool is_valid_sequence(const EventFlowGraph& g, std::span<const std::string> seq) {
    if (seq.empty()) return false;
    int prev = g.index_of(seq[0]);
    if (prev < 0 || !g.is_initial(prev)) return false;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        int cur = g.index_of(seq[i]);
        if (cur < 0 || !g.is_edge(prev, cur)) return false;
        prev = cur;
    }
    return true;
}

// Shortest path from some initial event to `event_id`, excluding the event
// itself; empty when the event is initial. Ties break toward the
// lexicographically smallest event_id sequence. Deterministic.
inline std::vector<std::string> reaching_prefix(const EventFlowGraph& g,
                                                std::string_view event_id) {
    int idx = g.index_of(event_id);
    if (idx < 0) throw Unreachable("unknown event id \"" + std::string(event_id) + "\"");
    if (g.bfs_distance(idx) < 0)
        throw Unreachable("no path from any initial event to \"" + std::string(event_id) + "\"");
    std::vector<std::string> path;
    for (int cur = g.bfs_parent(idx); cur >= 0; cur = g.bfs_parent(cur))
        path.push_back(g.event_at(cur).event_id);
    std::reverse(path.begin(), path.end());
    return path;
}

// ---------------------------------------------------------------------------
// Export (debugging / oracles)
// ---------------------------------------------------------------------------

inline detail::json efg_to_json(const EventFlowGraph& g) {
    using detail::json;
    json j;
    json events = json::array();
    for (const auto& e : g.events()) events.push_back(e.event_id);
    j["events"] = std::move(events);
    json initial = json::array();
    for (const auto& e : g.initial_events()) initial.push_back(e);
    j["initial"] = std::move(initial);
    json edges = json::array();
    for (std::size_t from = 0; from < g.event_count(); ++from)
        for (int to : g.follows_at(static_cast<int>(from)))
            edges.push_back(json::array(
                {g.event_at(static_cast<int>(from)).event_id, g.event_at(to).event_id}));
    j["edges"] = std::move(edges);
    return j;
}

inline std::string save_efg(const EventFlowGraph& g) {
    return detail::dump_canonical(efg_to_json(g));
}

inline void write_efg(const EventFlowGraph& g, const std::string& path) {
    detail::write_file(path, save_efg(g));
}

}  // namespace replaysim
