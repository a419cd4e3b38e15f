// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthesis of valid GUI models and applicable mutation scripts.
// Drives the property tests and the acceptance suite's randomized runs.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "replaysim/evolution.hpp"
#include "replaysim/model.hpp"
#include "replaysim/splitmix64.hpp"

namespace synth {

using namespace replaysim;

inline Widget make_widget(std::string id, std::string type, std::string title, int index,
                          std::optional<std::string> parent,
                          std::vector<WidgetAction> actions) {
    Widget w;
    w.widget_id = std::move(id);
    w.type_name = std::move(type);
    w.title = std::move(title);
    w.index = index;
    w.parent = std::move(parent);
    w.actions = std::move(actions);
    return w;
}

// Random valid model with at most `max_events` events. The first widget is
// always an actionable button in the start window, so walks always exist.
inline GuiModel random_model(SplitMix64& rng, int max_events = 12,
                             const std::string& label = "v0") {
    GuiModel m;
    m.version_label = label;
    std::size_t n_windows = 1 + rng.pick(3);
    for (std::size_t wi = 0; wi < n_windows; ++wi) {
        Window win;
        win.window_id = "win" + std::to_string(wi);
        win.title = "Window " + std::to_string(wi);
        win.modal = wi > 0 && rng.pick(2) == 0;
        win.open_at_start = wi == 0;
        m.windows.push_back(std::move(win));
    }

    int events = 0;
    int counter = 0;
    bool terminate_used = false;
    auto next_id = [&] { return "w" + std::to_string(counter++); };
    auto sibling_index = [&](const Window& win, const std::optional<std::string>& parent,
                             const std::string& type) {
        int idx = 0;
        for (const auto& w : win.widgets)
            if (w.parent == parent && w.type_name == type) ++idx;
        return idx;
    };

    // Guaranteed first event.
    m.windows[0].widgets.push_back(make_widget(next_id(), "Button", "Start", 0, std::nullopt,
                                               {{EventKind::SYSTEM, ""}}));
    ++events;

    while (events < max_events) {
        std::size_t wi = rng.pick(m.windows.size());
        Window& win = m.windows[wi];
        switch (rng.pick(6)) {
            case 0:
            case 1: {  // plain button
                win.widgets.push_back(make_widget(next_id(), "Button", "B" + std::to_string(counter),
                                                  sibling_index(win, std::nullopt, "Button"),
                                                  std::nullopt, {{EventKind::SYSTEM, ""}}));
                ++events;
                break;
            }
            case 2: {  // menu with children
                std::string menu_id = next_id();
                win.widgets.push_back(make_widget(menu_id, "Menu", "M" + std::to_string(counter),
                                                  sibling_index(win, std::nullopt, "Menu"),
                                                  std::nullopt, {{EventKind::MENU_OPEN, ""}}));
                ++events;
                std::size_t children = 1 + rng.pick(3);
                for (std::size_t c = 0; c < children && events < max_events; ++c) {
                    std::vector<WidgetAction> acts{{EventKind::SYSTEM, ""}};
                    if (!terminate_used && wi == 0 && rng.pick(6) == 0) {
                        acts = {{EventKind::TERMINATE, ""}};
                        terminate_used = true;
                    }
                    win.widgets.push_back(make_widget(next_id(), "Item",
                                                      "I" + std::to_string(counter),
                                                      sibling_index(win, menu_id, "Item"), menu_id,
                                                      std::move(acts)));
                    ++events;
                }
                break;
            }
            case 3: {  // window opener
                if (m.windows.size() < 2) break;
                std::size_t target = rng.pick(m.windows.size());
                if (target == wi) break;
                win.widgets.push_back(make_widget(
                    next_id(), "Button", "O" + std::to_string(counter),
                    sibling_index(win, std::nullopt, "Button"), std::nullopt,
                    {{EventKind::WINDOW_OPEN, m.windows[target].window_id}}));
                ++events;
                break;
            }
            case 4: {  // closer, secondary windows only
                if (wi == 0) break;
                win.widgets.push_back(make_widget(next_id(), "Button", "C" + std::to_string(counter),
                                                  sibling_index(win, std::nullopt, "Button"),
                                                  std::nullopt, {{EventKind::WINDOW_CLOSE, ""}}));
                ++events;
                break;
            }
            case 5: {  // structural noise
                win.widgets.push_back(make_widget(next_id(), "Label", "L" + std::to_string(counter),
                                                  sibling_index(win, std::nullopt, "Label"),
                                                  std::nullopt, {}));
                break;
            }
        }
    }
    validate_gui_model(m);
    return m;
}

// One random mutation proposal; may be inapplicable, callers retry.
inline MutationOp propose_op(const GuiModel& m, SplitMix64& rng, MutationKind kind, int salt) {
    std::vector<std::pair<std::size_t, std::size_t>> all;  // (window, widget)
    std::vector<std::pair<std::size_t, std::size_t>> menus;
    for (std::size_t wi = 0; wi < m.windows.size(); ++wi)
        for (std::size_t gi = 0; gi < m.windows[wi].widgets.size(); ++gi) {
            all.push_back({wi, gi});
            for (const auto& a : m.windows[wi].widgets[gi].actions)
                if (a.kind == EventKind::MENU_OPEN) menus.push_back({wi, gi});
        }

    MutationOp op;
    op.kind = kind;
    auto pick_widget = [&] {
        auto [wi, gi] = all[rng.pick(all.size())];
        return m.windows[wi].widgets[gi].widget_id;
    };
    switch (kind) {
        case MutationKind::RENAME_TITLE:
            op.widget_id = pick_widget();
            op.title = "Renamed " + std::to_string(salt);
            break;
        case MutationKind::MOVE: {
            auto [wi, gi] = all[rng.pick(all.size())];
            op.widget_id = m.windows[wi].widgets[gi].widget_id;
            if (rng.pick(3) == 0 || m.windows[wi].widgets.size() < 2) {
                op.new_parent = std::nullopt;
            } else {
                auto& candidates = m.windows[wi].widgets;
                op.new_parent = candidates[rng.pick(candidates.size())].widget_id;
            }
            break;
        }
        case MutationKind::CHANGE_INDEX:
            op.widget_id = pick_widget();
            op.new_index = static_cast<int>(rng.pick(24));
            break;
        case MutationKind::DELETE_WIDGET:
            op.widget_id = pick_widget();
            break;
        case MutationKind::DELETE_WINDOW:
            op.window_id = m.windows[rng.pick(m.windows.size())].window_id;
            break;
        case MutationKind::ADD_WIDGET: {
            op.window_id = m.windows[rng.pick(m.windows.size())].window_id;
            std::vector<WidgetAction> acts{{EventKind::SYSTEM, ""}};
            if (m.windows.size() > 1 && rng.pick(4) == 0)
                acts = {{EventKind::WINDOW_OPEN, m.windows[rng.pick(m.windows.size())].window_id}};
            op.widget = make_widget("aw" + std::to_string(salt), "Button",
                                    "Added " + std::to_string(salt),
                                    static_cast<int>(rng.pick(32)), std::nullopt, std::move(acts));
            break;
        }
        case MutationKind::REWIRE_MENU: {
            if (menus.empty()) { op.kind = MutationKind::RENAME_TITLE; op.widget_id = pick_widget();
                                 op.title = "Renamed " + std::to_string(salt); break; }
            auto [mwi, mgi] = menus[rng.pick(menus.size())];
            op.menu_id = m.windows[mwi].widgets[mgi].widget_id;
            op.widget_id = pick_widget();
            break;
        }
    }
    return op;
}

// Builds a script of up to `n_ops` applicable ops, preferring `first_kind`
// for the opening op so a driver can force coverage of every kind. Returns
// the ops together with the mutated model and ground-truth mapping.
struct Evolution {
    std::vector<MutationOp> ops;
    GuiModel next;
    EquivalenceMapping mapping;
};

inline Evolution random_evolution(const GuiModel& model, SplitMix64& rng, int n_ops,
                                  const std::string& new_label,
                                  std::optional<MutationKind> first_kind = std::nullopt,
                                  std::set<MutationKind>* used = nullptr) {
    std::vector<MutationOp> ops;
    GuiModel working = model;
    int salt = 0;
    for (int i = 0; i < n_ops; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 24 && !placed; ++attempt) {
            MutationKind kind = (i == 0 && first_kind && attempt < 12)
                                    ? *first_kind
                                    : static_cast<MutationKind>(rng.pick(7));
            MutationOp op = propose_op(working, rng, kind, salt++);
            try {
                auto [next, mapping] = mutate(working, {op}, "tmp");
                (void)mapping;
                working = std::move(next);
                working.version_label = model.version_label;
                ops.push_back(std::move(op));
                placed = true;
            } catch (const MutationError&) {
                // inapplicable proposal, try another
            }
        }
    }
    auto [next, mapping] = mutate(model, ops, new_label);
    if (used)
        for (const auto& op : ops) used->insert(op.kind);
    return Evolution{std::move(ops), std::move(next), std::move(mapping)};
}

}  // namespace synth
