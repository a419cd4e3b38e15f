// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "replaysim/detail/json_util.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/stable_id.hpp"

namespace replaysim {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class EventKind { SYSTEM, MENU_OPEN, WINDOW_OPEN, WINDOW_CLOSE, TERMINATE };

inline constexpr std::string_view kind_tag(EventKind k) {
    switch (k) {
        case EventKind::SYSTEM: return "SYSTEM";
        case EventKind::MENU_OPEN: return "MENU_OPEN";
        case EventKind::WINDOW_OPEN: return "WINDOW_OPEN";
        case EventKind::WINDOW_CLOSE: return "WINDOW_CLOSE";
        case EventKind::TERMINATE: return "TERMINATE";
    }
    return "SYSTEM";
}

inline std::optional<EventKind> parse_kind(std::string_view tag) {
    if (tag == "SYSTEM") return EventKind::SYSTEM;
    if (tag == "MENU_OPEN") return EventKind::MENU_OPEN;
    if (tag == "WINDOW_OPEN") return EventKind::WINDOW_OPEN;
    if (tag == "WINDOW_CLOSE") return EventKind::WINDOW_CLOSE;
    if (tag == "TERMINATE") return EventKind::TERMINATE;
    return std::nullopt;
}

// One executable action a widget supports. `target` names the opened window
// and is meaningful for WINDOW_OPEN only.
struct WidgetAction {
    EventKind kind = EventKind::SYSTEM;
    std::string target;
};

struct Widget {
    std::string widget_id;   // stable only within one version file
    std::string type_name;   // toolkit widget kind
    std::string title;       // label text, may be empty
    int index = 0;           // position among same-type siblings
    std::optional<std::string> parent;
    std::vector<WidgetAction> actions;  // empty for non-actionable widgets
};

struct Window {
    std::string window_id;
    std::string title;
    bool modal = false;
    bool open_at_start = false;
    std::vector<Widget> widgets;
};

struct GuiModel {
    std::string version_label;
    std::vector<Window> windows;
};

// Canonical event identifier: widget id and kind tag joined by ':'.
inline std::string make_event_id(std::string_view widget_id, EventKind kind) {
    std::string id(widget_id);
    id += ':';
    id += kind_tag(kind);
    return id;
}

// Splits at the last ':' so the kind tag is recovered even if a widget id
// itself contains ':'. Returns nullopt for ids with no recognizable kind.
inline std::optional<std::pair<std::string, EventKind>> split_event_id(std::string_view event_id) {
    auto pos = event_id.rfind(':');
    if (pos == std::string_view::npos) return std::nullopt;
    auto kind = parse_kind(event_id.substr(pos + 1));
    if (!kind) return std::nullopt;
    return std::make_pair(std::string(event_id.substr(0, pos)), *kind);
}

// ---------------------------------------------------------------------------
// Stable widget identity
// ---------------------------------------------------------------------------

// The id is a pure function of exactly four properties: owning window title,
// widget type, widget title, and sibling index. Anything else (parent,
// actions, widget_id) does not participate, so renames and index shifts break
// the id while pure re-parenting does not.
inline StableId compute_widget_id(const Widget& w, const Window& owning_window) {
    std::string canonical;
    canonical.reserve(owning_window.title.size() + w.type_name.size() + w.title.size() + 16);
    canonical += owning_window.title;
    canonical += '\x1f';
    canonical += w.type_name;
    canonical += '\x1f';
    canonical += w.title;
    canonical += '\x1f';
    canonical += std::to_string(w.index);
    return StableId{fnv1a64(canonical)};
}

inline std::set<StableId> model_digest(const GuiModel& m) {
    std::set<StableId> out;
    for (const auto& win : m.windows)
        for (const auto& w : win.widgets) out.insert(compute_widget_id(w, win));
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline std::string widget_path(std::size_t wi, std::size_t gi) {
    return "windows[" + std::to_string(wi) + "].widgets[" + std::to_string(gi) + "]";
}

}  // namespace detail

// Enforces every model invariant. Widget ids are required to be unique across
// the whole model, not just per window: equivalence mappings address widgets
// by id alone, so a cross-window duplicate would make them ambiguous.
inline void validate_gui_model(const GuiModel& m) {
    std::unordered_set<std::string> window_ids;
    bool has_start = false;
    std::unordered_set<std::string> widget_ids;
    std::unordered_set<std::string> event_ids;
    std::vector<std::string> terminate_windows;

    for (const auto& win : m.windows) {
        if (!window_ids.insert(win.window_id).second)
            throw ValidationError("duplicate window_id \"" + win.window_id + "\"");
        if (win.open_at_start) has_start = true;
    }
    if (!has_start) throw ValidationError("no window has open_at_start = true");

    for (std::size_t wi = 0; wi < m.windows.size(); ++wi) {
        const Window& win = m.windows[wi];
        std::unordered_map<std::string, std::size_t> local;  // widget_id -> index in window
        for (std::size_t gi = 0; gi < win.widgets.size(); ++gi) {
            const Widget& w = win.widgets[gi];
            const std::string at = detail::widget_path(wi, gi);
            if (!widget_ids.insert(w.widget_id).second)
                throw ValidationError(at + ": duplicate widget_id \"" + w.widget_id + "\"");
            local.emplace(w.widget_id, gi);
            if (w.index < 0)
                throw ValidationError(at + ": negative index");

            std::unordered_set<int> kinds_seen;
            bool has_terminate = false;
            for (const auto& a : w.actions) {
                if (!kinds_seen.insert(static_cast<int>(a.kind)).second)
                    throw ValidationError(at + ": duplicate action kind " +
                                          std::string(kind_tag(a.kind)));
                if (a.kind == EventKind::WINDOW_OPEN) {
                    if (a.target.empty())
                        throw ValidationError(at + ": WINDOW_OPEN action lacks a target");
                    if (!window_ids.count(a.target))
                        throw ValidationError(at + ": WINDOW_OPEN targets missing window \"" +
                                              a.target + "\"");
                } else if (!a.target.empty()) {
                    throw ValidationError(at + ": only WINDOW_OPEN actions carry a target");
                }
                if (a.kind == EventKind::TERMINATE) has_terminate = true;
                if (!event_ids.insert(make_event_id(w.widget_id, a.kind)).second)
                    throw ValidationError(at + ": duplicate event_id \"" +
                                          make_event_id(w.widget_id, a.kind) + "\"");
            }
            if (has_terminate &&
                (terminate_windows.empty() || terminate_windows.back() != win.window_id))
                terminate_windows.push_back(win.window_id);
        }

        // Parent references: exist in the same window, acyclic.
        for (std::size_t gi = 0; gi < win.widgets.size(); ++gi) {
            const Widget& w = win.widgets[gi];
            if (!w.parent) continue;
            const std::string at = detail::widget_path(wi, gi);
            if (!local.count(*w.parent))
                throw ValidationError(at + ": parent \"" + *w.parent +
                                      "\" not found in window \"" + win.window_id + "\"");
            // Walk up; a chain longer than the window's widget count is a cycle.
            std::size_t steps = 0;
            const Widget* cur = &w;
            while (cur->parent) {
                if (++steps > win.widgets.size())
                    throw ValidationError(at + ": widget hierarchy contains a cycle");
                cur = &win.widgets[local.at(*cur->parent)];
            }
        }

        // Sibling index uniqueness among widgets of the same type under the
        // same parent.
        std::set<std::tuple<std::string, std::string, int>> slots;  // (parent, type, index)
        for (std::size_t gi = 0; gi < win.widgets.size(); ++gi) {
            const Widget& w = win.widgets[gi];
            std::string parent = w.parent ? *w.parent : std::string();
            if (!slots.insert({parent, w.type_name, w.index}).second)
                throw ValidationError(detail::widget_path(wi, gi) + ": index " +
                                      std::to_string(w.index) +
                                      " duplicated among same-type siblings");
        }
    }

    if (terminate_windows.size() > 1)
        throw ValidationError("TERMINATE events found in " +
                              std::to_string(terminate_windows.size()) +
                              " windows; at most one window may host them");
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline Widget widget_from_json(const json& j, const std::string& at, bool strict) {
    expect_object(j, at);
    check_keys(j, {"widget_id", "type_name", "title", "index", "parent", "actions"}, at, strict);
    Widget w;
    w.widget_id = require_string(j, "widget_id", at);
    w.type_name = require_string(j, "type_name", at);
    w.title = require_string(j, "title", at);
    std::int64_t idx = require_int(j, "index", at);
    if (idx < 0) throw ValidationError(at + ".index: negative index");
    w.index = static_cast<int>(idx);
    const json& parent = require(j, "parent", at);
    if (parent.is_string())
        w.parent = parent.get<std::string>();
    else if (!parent.is_null())
        throw ValidationError(at + ".parent: expected string or null");
    const json& actions = require_array(j, "actions", at);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::string aat = at + ".actions[" + std::to_string(i) + "]";
        const json& a = actions[i];
        expect_object(a, aat);
        check_keys(a, {"kind", "target"}, aat, strict);
        WidgetAction act;
        std::string tag = require_string(a, "kind", aat);
        auto kind = parse_kind(tag);
        if (!kind) throw ValidationError(aat + ".kind: unknown kind \"" + tag + "\"");
        act.kind = *kind;
        const json& target = require(a, "target", aat);
        if (target.is_string())
            act.target = target.get<std::string>();
        else if (!target.is_null())
            throw ValidationError(aat + ".target: expected string or null");
        w.actions.push_back(std::move(act));
    }
    return w;
}

}  // namespace detail

// Parses and validates a model from JSON text. `strict` rejects unknown keys.
inline GuiModel parse_gui_model(const std::string& text, const std::string& origin,
                                bool strict = true) {
    using namespace detail;
    json j = parse_json(text, origin);
    expect_object(j, origin);
    check_keys(j, {"version_label", "windows"}, origin, strict);
    GuiModel m;
    m.version_label = require_string(j, "version_label", origin);
    const json& windows = require_array(j, "windows", origin);
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const std::string at = "windows[" + std::to_string(wi) + "]";
        const json& wj = windows[wi];
        expect_object(wj, at);
        check_keys(wj, {"window_id", "title", "modal", "open_at_start", "widgets"}, at, strict);
        Window win;
        win.window_id = require_string(wj, "window_id", at);
        win.title = require_string(wj, "title", at);
        win.modal = require_bool(wj, "modal", at);
        win.open_at_start = require_bool(wj, "open_at_start", at);
        const json& widgets = require_array(wj, "widgets", at);
        for (std::size_t gi = 0; gi < widgets.size(); ++gi)
            win.widgets.push_back(
                widget_from_json(widgets[gi], at + ".widgets[" + std::to_string(gi) + "]", strict));
        m.windows.push_back(std::move(win));
    }
    validate_gui_model(m);
    return m;
}

inline GuiModel load_gui_model(const std::string& path, bool strict = true) {
    return parse_gui_model(detail::read_file(path), path, strict);
}

inline detail::json gui_model_to_json(const GuiModel& m) {
    using detail::json;
    json j;
    j["version_label"] = m.version_label;
    json windows = json::array();
    for (const auto& win : m.windows) {
        json wj;
        wj["window_id"] = win.window_id;
        wj["title"] = win.title;
        wj["modal"] = win.modal;
        wj["open_at_start"] = win.open_at_start;
        json widgets = json::array();
        for (const auto& w : win.widgets) {
            json gj;
            gj["widget_id"] = w.widget_id;
            gj["type_name"] = w.type_name;
            gj["title"] = w.title;
            gj["index"] = w.index;
            gj["parent"] = w.parent ? json(*w.parent) : json(nullptr);
            json actions = json::array();
            for (const auto& a : w.actions) {
                json aj;
                aj["kind"] = std::string(kind_tag(a.kind));
                aj["target"] = a.target.empty() ? json(nullptr) : json(a.target);
                actions.push_back(std::move(aj));
            }
            gj["actions"] = std::move(actions);
            widgets.push_back(std::move(gj));
        }
        wj["widgets"] = std::move(widgets);
        windows.push_back(std::move(wj));
    }
    j["windows"] = std::move(windows);
    return j;
}

// Canonical re-serialization: fixed field order, two-space indent. Loading
// and saving the same file twice yields identical bytes.
inline std::string save_gui_model(const GuiModel& m) {
    return detail::dump_canonical(gui_model_to_json(m));
}

inline void write_gui_model(const GuiModel& m, const std::string& path) {
    detail::write_file(path, save_gui_model(m));
}

// ---------------------------------------------------------------------------
// Lookup helpers
// ---------------------------------------------------------------------------

struct WidgetRef {
    std::size_t window_index = 0;
    std::size_t widget_index = 0;
};

// Model-wide widget index; models are immutable after load, so the index
// stays valid for the model's lifetime.
inline std::unordered_map<std::string, WidgetRef> build_widget_index(const GuiModel& m) {
    std::unordered_map<std::string, WidgetRef> out;
    for (std::size_t wi = 0; wi < m.windows.size(); ++wi)
        for (std::size_t gi = 0; gi < m.windows[wi].widgets.size(); ++gi)
            out.emplace(m.windows[wi].widgets[gi].widget_id, WidgetRef{wi, gi});
    return out;
}

inline const Window* find_window(const GuiModel& m, std::string_view window_id) {
    for (const auto& win : m.windows)
        if (win.window_id == window_id) return &win;
    return nullptr;
}

}  // namespace replaysim
