// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "replaysim/detail/json_util.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/model.hpp"

namespace replaysim {

// ---------------------------------------------------------------------------
// Equivalence mappings
// ---------------------------------------------------------------------------

// Partial, injective widget-level map between two consecutive versions.
// An event maps iff its widget maps and the image widget still supports the
// event's kind (WINDOW_OPEN target correspondence is not required). The
// image widgets' supported kinds are baked in at validation time so event
// mapping needs no model at hand.
struct EquivalenceMapping {
    std::string from_version;
    std::string to_version;
    std::vector<std::pair<std::string, std::string>> pairs;  // sorted by source id
    std::unordered_map<std::string, std::string> forward;
    std::unordered_map<std::string, unsigned> to_kinds;  // image widget -> kind bitmask

    bool maps_widget(const std::string& widget_id) const { return forward.count(widget_id) != 0; }
};

namespace detail {

inline unsigned kind_bit(EventKind k) { return 1u << static_cast<unsigned>(k); }

inline unsigned widget_kind_mask(const Widget& w) {
    unsigned mask = 0;
    for (const auto& a : w.actions) mask |= kind_bit(a.kind);
    return mask;
}

}  // namespace detail

// Validates pair endpoints against both models, rebuilds the lookup tables,
// and canonicalizes pair order. Throws ValidationError on dangling ids or a
// non-injective map, VersionMismatch on label disagreement.
inline void finalize_mapping(EquivalenceMapping& m, const GuiModel& from_model,
                             const GuiModel& to_model) {
    if (m.from_version != from_model.version_label)
        throw VersionMismatch("mapping from_version \"" + m.from_version +
                              "\" does not match model \"" + from_model.version_label + "\"");
    if (m.to_version != to_model.version_label)
        throw VersionMismatch("mapping to_version \"" + m.to_version +
                              "\" does not match model \"" + to_model.version_label + "\"");

    auto from_index = build_widget_index(from_model);
    auto to_index = build_widget_index(to_model);

    m.forward.clear();
    m.to_kinds.clear();
    std::unordered_set<std::string> images;
    for (const auto& [from_id, to_id] : m.pairs) {
        if (!from_index.count(from_id))
            throw ValidationError("mapping names unknown widget \"" + from_id +
                                  "\" in version \"" + m.from_version + "\"");
        auto to_ref = to_index.find(to_id);
        if (to_ref == to_index.end())
            throw ValidationError("mapping names unknown widget \"" + to_id + "\" in version \"" +
                                  m.to_version + "\"");
        if (!m.forward.emplace(from_id, to_id).second)
            throw ValidationError("widget \"" + from_id + "\" mapped twice");
        if (!images.insert(to_id).second)
            throw ValidationError("mapping is not injective: widget \"" + to_id +
                                  "\" is the image of two widgets");
        const Widget& tw =
            to_model.windows[to_ref->second.window_index].widgets[to_ref->second.widget_index];
        m.to_kinds.emplace(to_id, detail::widget_kind_mask(tw));
    }
    std::sort(m.pairs.begin(), m.pairs.end());
}

// Total identity mapping over one model (both sides the same version).
inline EquivalenceMapping identity_mapping(const GuiModel& model) {
    EquivalenceMapping m;
    m.from_version = model.version_label;
    m.to_version = model.version_label;
    for (const auto& win : model.windows)
        for (const auto& w : win.widgets) m.pairs.emplace_back(w.widget_id, w.widget_id);
    finalize_mapping(m, model, model);
    return m;
}

// Maps an event id across versions. None when the widget has no equivalent
// or the equivalent no longer supports the event's kind.
inline std::optional<std::string> map_event(const EquivalenceMapping& m,
                                            std::string_view event_id) {
    auto parts = split_event_id(event_id);
    if (!parts) return std::nullopt;
    auto it = m.forward.find(parts->first);
    if (it == m.forward.end()) return std::nullopt;
    auto kinds = m.to_kinds.find(it->second);
    if (kinds == m.to_kinds.end() || !(kinds->second & detail::kind_bit(parts->second)))
        return std::nullopt;
    return make_event_id(it->second, parts->second);
}

// Stepwise composition of two consecutive mappings. Partial: a widget maps
// through iff both legs map it. Injectivity is preserved by construction.
inline EquivalenceMapping compose(const EquivalenceMapping& m12, const EquivalenceMapping& m23) {
    if (m12.to_version != m23.from_version)
        throw VersionMismatch("cannot compose mapping to \"" + m12.to_version +
                              "\" with mapping from \"" + m23.from_version + "\"");
    EquivalenceMapping out;
    out.from_version = m12.from_version;
    out.to_version = m23.to_version;
    for (const auto& [a, b] : m12.pairs) {
        auto it = m23.forward.find(b);
        if (it == m23.forward.end()) continue;
        out.pairs.emplace_back(a, it->second);
        out.forward.emplace(a, it->second);
        out.to_kinds.emplace(it->second, m23.to_kinds.at(it->second));
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

// ---------------------------------------------------------------------------
// Mapping files
// ---------------------------------------------------------------------------

inline detail::json mapping_to_json(const EquivalenceMapping& m) {
    using detail::json;
    json j;
    j["from_version"] = m.from_version;
    j["to_version"] = m.to_version;
    json pairs = json::array();
    for (const auto& [from_id, to_id] : m.pairs) {
        json p;
        p["from"] = from_id;
        p["to"] = to_id;
        pairs.push_back(std::move(p));
    }
    j["pairs"] = std::move(pairs);
    return j;
}

inline std::string save_mapping(const EquivalenceMapping& m) {
    return detail::dump_canonical(mapping_to_json(m));
}

inline void write_mapping(const EquivalenceMapping& m, const std::string& path) {
    detail::write_file(path, save_mapping(m));
}

inline EquivalenceMapping parse_mapping(const std::string& text, const std::string& origin,
                                        const GuiModel& from_model, const GuiModel& to_model,
                                        bool strict = true) {
    using namespace detail;
    json j = parse_json(text, origin);
    expect_object(j, origin);
    check_keys(j, {"from_version", "to_version", "pairs"}, origin, strict);
    EquivalenceMapping m;
    m.from_version = require_string(j, "from_version", origin);
    m.to_version = require_string(j, "to_version", origin);
    const json& pairs = require_array(j, "pairs", origin);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string at = origin + ".pairs[" + std::to_string(i) + "]";
        const json& p = pairs[i];
        expect_object(p, at);
        check_keys(p, {"from", "to"}, at, strict);
        m.pairs.emplace_back(require_string(p, "from", at), require_string(p, "to", at));
    }
    finalize_mapping(m, from_model, to_model);
    return m;
}

inline EquivalenceMapping load_mapping(const std::string& path, const GuiModel& from_model,
                                       const GuiModel& to_model, bool strict = true) {
    return parse_mapping(detail::read_file(path), path, from_model, to_model, strict);
}

// ---------------------------------------------------------------------------
// Synthetic evolution
// ---------------------------------------------------------------------------

enum class MutationKind {
    RENAME_TITLE,
    MOVE,
    CHANGE_INDEX,
    DELETE_WIDGET,
    DELETE_WINDOW,
    ADD_WIDGET,
    REWIRE_MENU,
};

inline constexpr std::string_view mutation_tag(MutationKind k) {
    switch (k) {
        case MutationKind::RENAME_TITLE: return "RENAME_TITLE";
        case MutationKind::MOVE: return "MOVE";
        case MutationKind::CHANGE_INDEX: return "CHANGE_INDEX";
        case MutationKind::DELETE_WIDGET: return "DELETE_WIDGET";
        case MutationKind::DELETE_WINDOW: return "DELETE_WINDOW";
        case MutationKind::ADD_WIDGET: return "ADD_WIDGET";
        case MutationKind::REWIRE_MENU: return "REWIRE_MENU";
    }
    return "RENAME_TITLE";
}

inline std::optional<MutationKind> parse_mutation_tag(std::string_view tag) {
    if (tag == "RENAME_TITLE") return MutationKind::RENAME_TITLE;
    if (tag == "MOVE") return MutationKind::MOVE;
    if (tag == "CHANGE_INDEX") return MutationKind::CHANGE_INDEX;
    if (tag == "DELETE_WIDGET") return MutationKind::DELETE_WIDGET;
    if (tag == "DELETE_WINDOW") return MutationKind::DELETE_WINDOW;
    if (tag == "ADD_WIDGET") return MutationKind::ADD_WIDGET;
    if (tag == "REWIRE_MENU") return MutationKind::REWIRE_MENU;
    return std::nullopt;
}

struct MutationOp {
    MutationKind kind = MutationKind::RENAME_TITLE;
    std::string widget_id;                 // RENAME_TITLE, MOVE, CHANGE_INDEX,
                                           // DELETE_WIDGET, REWIRE_MENU
    std::string window_id;                 // DELETE_WINDOW, ADD_WIDGET
    std::string title;                     // RENAME_TITLE
    std::optional<std::string> new_parent; // MOVE (null reparents to the window root)
    int new_index = 0;                     // CHANGE_INDEX
    std::string menu_id;                   // REWIRE_MENU
    Widget widget;                         // ADD_WIDGET
};

namespace detail {

struct Located {
    std::size_t window = 0;
    std::size_t widget = 0;
};

inline Located locate_widget(const GuiModel& m, const std::string& widget_id,
                             std::string_view op_tag) {
    for (std::size_t wi = 0; wi < m.windows.size(); ++wi)
        for (std::size_t gi = 0; gi < m.windows[wi].widgets.size(); ++gi)
            if (m.windows[wi].widgets[gi].widget_id == widget_id) return {wi, gi};
    throw MutationError(std::string(op_tag) + ": widget \"" + widget_id + "\" not found");
}

inline bool index_slot_free(const Window& win, const std::optional<std::string>& parent,
                            const std::string& type_name, int index,
                            const std::string& except_widget) {
    for (const auto& w : win.widgets) {
        if (w.widget_id == except_widget) continue;
        if (w.parent == parent && w.type_name == type_name && w.index == index) return false;
    }
    return true;
}

inline bool is_ancestor(const Window& win, const std::string& maybe_ancestor,
                        const std::string& widget_id) {
    std::unordered_map<std::string, const Widget*> by_id;
    for (const auto& w : win.widgets) by_id.emplace(w.widget_id, &w);
    const Widget* cur = by_id.at(widget_id);
    while (cur->parent) {
        if (*cur->parent == maybe_ancestor) return true;
        cur = by_id.at(*cur->parent);
    }
    return false;
}

inline void reparent(GuiModel& m, const std::string& widget_id,
                     const std::optional<std::string>& new_parent, std::string_view op_tag) {
    auto loc = locate_widget(m, widget_id, op_tag);
    Window& win = m.windows[loc.window];
    Widget& w = win.widgets[loc.widget];
    if (new_parent) {
        bool found = false;
        for (const auto& other : win.widgets)
            if (other.widget_id == *new_parent) { found = true; break; }
        if (!found)
            throw MutationError(std::string(op_tag) + ": parent \"" + *new_parent +
                                "\" not found in window \"" + win.window_id + "\"");
        if (*new_parent == widget_id || is_ancestor(win, widget_id, *new_parent))
            throw MutationError(std::string(op_tag) + ": reparenting \"" + widget_id +
                                "\" under its own subtree");
    }
    if (!index_slot_free(win, new_parent, w.type_name, w.index, widget_id))
        throw MutationError(std::string(op_tag) + ": index " + std::to_string(w.index) +
                            " already taken among same-type siblings of the new parent");
    w.parent = new_parent;
}

}  // namespace detail

// Applies a mutation script to a model, producing the next version and the
// ground-truth equivalence mapping: surviving widgets map to themselves,
// deleted widgets and fresh additions stay unmapped. Deleting a window also
// strips WINDOW_OPEN actions that targeted it, so openers survive but their
// open event loses its equivalent.
inline std::pair<GuiModel, EquivalenceMapping> mutate(const GuiModel& model,
                                                      const std::vector<MutationOp>& ops,
                                                      const std::string& new_label) {
    GuiModel next = model;
    next.version_label = new_label;

    for (const auto& op : ops) {
        const std::string_view tag = mutation_tag(op.kind);
        switch (op.kind) {
            case MutationKind::RENAME_TITLE: {
                auto loc = detail::locate_widget(next, op.widget_id, tag);
                next.windows[loc.window].widgets[loc.widget].title = op.title;
                break;
            }
            case MutationKind::MOVE:
                detail::reparent(next, op.widget_id, op.new_parent, tag);
                break;
            case MutationKind::CHANGE_INDEX: {
                auto loc = detail::locate_widget(next, op.widget_id, tag);
                Window& win = next.windows[loc.window];
                Widget& w = win.widgets[loc.widget];
                if (op.new_index < 0)
                    throw MutationError(std::string(tag) + ": negative index");
                if (!detail::index_slot_free(win, w.parent, w.type_name, op.new_index,
                                             w.widget_id))
                    throw MutationError(std::string(tag) + ": index " +
                                        std::to_string(op.new_index) +
                                        " already taken among same-type siblings");
                w.index = op.new_index;
                break;
            }
            case MutationKind::DELETE_WIDGET: {
                auto loc = detail::locate_widget(next, op.widget_id, tag);
                Window& win = next.windows[loc.window];
                // Remove the widget together with its subtree.
                std::unordered_set<std::string> doomed{op.widget_id};
                bool grew = true;
                while (grew) {
                    grew = false;
                    for (const auto& w : win.widgets)
                        if (w.parent && doomed.count(*w.parent) && doomed.insert(w.widget_id).second)
                            grew = true;
                }
                std::erase_if(win.widgets,
                              [&](const Widget& w) { return doomed.count(w.widget_id) != 0; });
                break;
            }
            case MutationKind::DELETE_WINDOW: {
                auto it = std::find_if(next.windows.begin(), next.windows.end(),
                                       [&](const Window& w) { return w.window_id == op.window_id; });
                if (it == next.windows.end())
                    throw MutationError(std::string(tag) + ": window \"" + op.window_id +
                                        "\" not found");
                next.windows.erase(it);
                bool any_start = false;
                for (const auto& w : next.windows) any_start |= w.open_at_start;
                if (!any_start)
                    throw MutationError(std::string(tag) + ": deleting \"" + op.window_id +
                                        "\" would leave no start window");
                // Openers survive; the orphaned open actions do not.
                for (auto& win : next.windows)
                    for (auto& w : win.widgets)
                        std::erase_if(w.actions, [&](const WidgetAction& a) {
                            return a.kind == EventKind::WINDOW_OPEN && a.target == op.window_id;
                        });
                break;
            }
            case MutationKind::ADD_WIDGET: {
                auto it = std::find_if(next.windows.begin(), next.windows.end(),
                                       [&](const Window& w) { return w.window_id == op.window_id; });
                if (it == next.windows.end())
                    throw MutationError(std::string(tag) + ": window \"" + op.window_id +
                                        "\" not found");
                it->widgets.push_back(op.widget);
                break;
            }
            case MutationKind::REWIRE_MENU: {
                auto menu = detail::locate_widget(next, op.menu_id, tag);
                const Widget& mw = next.windows[menu.window].widgets[menu.widget];
                bool is_menu = false;
                for (const auto& a : mw.actions) is_menu |= a.kind == EventKind::MENU_OPEN;
                if (!is_menu)
                    throw MutationError(std::string(tag) + ": \"" + op.menu_id +
                                        "\" has no MENU_OPEN action");
                auto wloc = detail::locate_widget(next, op.widget_id, tag);
                if (wloc.window != menu.window)
                    throw MutationError(std::string(tag) + ": \"" + op.widget_id + "\" and \"" +
                                        op.menu_id + "\" live in different windows");
                detail::reparent(next, op.widget_id, op.menu_id, tag);
                break;
            }
        }
    }

    try {
        validate_gui_model(next);
    } catch (const ValidationError& e) {
        throw MutationError(std::string("mutation result is not a valid model: ") + e.what());
    }

    // Ground truth: whatever survived maps to itself.
    auto old_index = build_widget_index(model);
    EquivalenceMapping mapping;
    mapping.from_version = model.version_label;
    mapping.to_version = new_label;
    for (const auto& win : next.windows)
        for (const auto& w : win.widgets)
            if (old_index.count(w.widget_id)) mapping.pairs.emplace_back(w.widget_id, w.widget_id);
    finalize_mapping(mapping, model, next);
    return {std::move(next), std::move(mapping)};
}

// ---------------------------------------------------------------------------
// Mutation scripts
// ---------------------------------------------------------------------------

struct MutationScript {
    std::string new_label;
    std::vector<MutationOp> ops;
};

inline MutationScript parse_mutation_script(const std::string& text, const std::string& origin,
                                            bool strict = true) {
    using namespace detail;
    json j = parse_json(text, origin);
    expect_object(j, origin);
    check_keys(j, {"new_label", "ops"}, origin, strict);
    MutationScript script;
    script.new_label = require_string(j, "new_label", origin);
    const json& ops = require_array(j, "ops", origin);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::string at = origin + ".ops[" + std::to_string(i) + "]";
        const json& o = ops[i];
        expect_object(o, at);
        std::string tag = require_string(o, "op", at);
        auto kind = parse_mutation_tag(tag);
        if (!kind) throw ValidationError(at + ".op: unknown op \"" + tag + "\"");
        MutationOp op;
        op.kind = *kind;
        switch (*kind) {
            case MutationKind::RENAME_TITLE:
                check_keys(o, {"op", "widget", "title"}, at, strict);
                op.widget_id = require_string(o, "widget", at);
                op.title = require_string(o, "title", at);
                break;
            case MutationKind::MOVE: {
                check_keys(o, {"op", "widget", "parent"}, at, strict);
                op.widget_id = require_string(o, "widget", at);
                const json& parent = require(o, "parent", at);
                if (parent.is_string())
                    op.new_parent = parent.get<std::string>();
                else if (!parent.is_null())
                    throw ValidationError(at + ".parent: expected string or null");
                break;
            }
            case MutationKind::CHANGE_INDEX:
                check_keys(o, {"op", "widget", "index"}, at, strict);
                op.widget_id = require_string(o, "widget", at);
                op.new_index = static_cast<int>(require_int(o, "index", at));
                break;
            case MutationKind::DELETE_WIDGET:
                check_keys(o, {"op", "widget"}, at, strict);
                op.widget_id = require_string(o, "widget", at);
                break;
            case MutationKind::DELETE_WINDOW:
                check_keys(o, {"op", "window"}, at, strict);
                op.window_id = require_string(o, "window", at);
                break;
            case MutationKind::ADD_WIDGET:
                check_keys(o, {"op", "window", "widget"}, at, strict);
                op.window_id = require_string(o, "window", at);
                op.widget = widget_from_json(require(o, "widget", at), at + ".widget", strict);
                break;
            case MutationKind::REWIRE_MENU:
                check_keys(o, {"op", "widget", "menu"}, at, strict);
                op.widget_id = require_string(o, "widget", at);
                op.menu_id = require_string(o, "menu", at);
                break;
        }
        script.ops.push_back(std::move(op));
    }
    return script;
}

inline MutationScript load_mutation_script(const std::string& path, bool strict = true) {
    return parse_mutation_script(detail::read_file(path), path, strict);
}

// ---------------------------------------------------------------------------
// Version chains
// ---------------------------------------------------------------------------

// Ordered versions with one mapping per consecutive pair.
struct VersionChain {
    std::vector<GuiModel> models;
    std::vector<EquivalenceMapping> mappings;
};

inline void validate_chain(const VersionChain& chain) {
    if (chain.models.empty()) throw ValidationError("chain has no models");
    if (chain.mappings.size() + 1 != chain.models.size())
        throw ValidationError("chain needs exactly one mapping per consecutive model pair");
    std::unordered_set<std::string> labels;
    for (const auto& m : chain.models)
        if (!labels.insert(m.version_label).second)
            throw ValidationError("duplicate version label \"" + m.version_label + "\" in chain");
    for (std::size_t i = 0; i < chain.mappings.size(); ++i) {
        if (chain.mappings[i].from_version != chain.models[i].version_label ||
            chain.mappings[i].to_version != chain.models[i + 1].version_label)
            throw VersionMismatch("mapping " + std::to_string(i) + " connects \"" +
                                  chain.mappings[i].from_version + "\"->\"" +
                                  chain.mappings[i].to_version + "\" but the chain expects \"" +
                                  chain.models[i].version_label + "\"->\"" +
                                  chain.models[i + 1].version_label + "\"");
    }
}

// Chain manifest: model and mapping paths, resolved relative to the manifest.
inline VersionChain load_chain(const std::string& manifest_path, bool strict = true) {
    using namespace detail;
    json j = parse_json_file(manifest_path);
    expect_object(j, manifest_path);
    check_keys(j, {"models", "mappings"}, manifest_path, strict);
    const json& models = require_array(j, "models", manifest_path);
    const json& mappings = require_array(j, "mappings", manifest_path);

    auto base = std::filesystem::path(manifest_path).parent_path();
    auto resolve = [&](const json& v, const std::string& at) {
        if (!v.is_string()) throw ValidationError(at + ": expected a path string");
        std::filesystem::path p = v.get<std::string>();
        return (p.is_absolute() ? p : base / p).string();
    };

    VersionChain chain;
    for (std::size_t i = 0; i < models.size(); ++i)
        chain.models.push_back(load_gui_model(
            resolve(models[i], manifest_path + ".models[" + std::to_string(i) + "]"), strict));
    if (mappings.size() + 1 != models.size())
        throw ValidationError(manifest_path + ": " + std::to_string(models.size()) +
                              " models need " + std::to_string(models.size() - 1) +
                              " mappings, found " + std::to_string(mappings.size()));
    for (std::size_t i = 0; i < mappings.size(); ++i)
        chain.mappings.push_back(
            load_mapping(resolve(mappings[i], manifest_path + ".mappings[" + std::to_string(i) + "]"),
                         chain.models[i], chain.models[i + 1], strict));
    validate_chain(chain);
    return chain;
}

}  // namespace replaysim
