// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "replaysim/detail/json_util.hpp"
#include "replaysim/efg.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/evolution.hpp"
#include "replaysim/generator.hpp"
#include "replaysim/model.hpp"

namespace replaysim {

// Replayability of a test case on a newer version, ordered worst-last:
// larger values never improve along a chain.
enum class Category : int {
    REPLAYABLE_BY_ID = 1,      // ids unchanged, sequence still valid
    REPLAYABLE_AFTER_REPAIR = 2,  // equivalents exist, sequence still valid
    REPAIRABLE = 3,            // equivalents exist, sequence broken
    UNREPAIRABLE = 4,          // some actioned widget has no equivalent
};

inline Category worse(Category a, Category b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

// One version with its derived artifacts: the event-flow graph plus the
// property-derived id of every widget. Immutable once built; classification
// of distinct cases can share it across threads freely.
struct VersionContext {
    GuiModel model;
    EventFlowGraph efg;
    std::unordered_map<std::string, StableId> widget_ids;

    explicit VersionContext(GuiModel m) : model(std::move(m)), efg(derive_efg(model)) {
        for (const auto& win : model.windows)
            for (const auto& w : win.widgets)
                widget_ids.emplace(w.widget_id, compute_widget_id(w, win));
    }
};

// Version contexts plus the consecutive mappings of a chain.
struct ChainContext {
    std::vector<VersionContext> versions;
    std::vector<EquivalenceMapping> mappings;

    explicit ChainContext(VersionChain chain) {
        validate_chain(chain);
        for (auto& m : chain.models) versions.emplace_back(std::move(m));
        mappings = std::move(chain.mappings);
    }

    std::size_t size() const { return versions.size(); }
};

namespace detail {

// Classifies one already-effective sequence (old-version event ids) against
// the next version. On success stores the forward-mapped sequence in
// `mapped`, which is left untouched when the result is UNREPAIRABLE.
inline Category classify_step(const std::vector<std::string>& sequence,
                              const VersionContext& oldv, const VersionContext& newv,
                              const EquivalenceMapping& m, std::vector<std::string>& mapped) {
    std::vector<std::string> image;
    image.reserve(sequence.size());
    for (const auto& e : sequence) {
        auto mapped_event = map_event(m, e);
        if (!mapped_event) return Category::UNREPAIRABLE;
        image.push_back(std::move(*mapped_event));
    }
    if (!is_valid_sequence(newv.efg, image)) {
        mapped = std::move(image);
        return Category::REPAIRABLE;
    }
    bool ids_match = true;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        auto old_parts = split_event_id(sequence[i]);
        auto new_parts = split_event_id(image[i]);
        if (oldv.widget_ids.at(old_parts->first) != newv.widget_ids.at(new_parts->first)) {
            ids_match = false;
            break;
        }
    }
    mapped = std::move(image);
    return ids_match ? Category::REPLAYABLE_BY_ID : Category::REPLAYABLE_AFTER_REPAIR;
}

}  // namespace detail

// Assigns one of the four categories for a consecutive version pair:
//   UNREPAIRABLE            some effective-sequence event has no equivalent;
//   REPAIRABLE              all map, but the mapped sequence is invalid in
//                           the new event-flow graph;
//   REPLAYABLE_BY_ID        valid and every actioned widget keeps its
//                           property-derived id;
//   REPLAYABLE_AFTER_REPAIR valid but at least one id changed.
// The effective sequence is the old version's reaching prefix plus the main
// events; the prefix participates in every check.
inline Category classify_pair(const TestCase& tc, const VersionContext& oldv,
                              const VersionContext& newv, const EquivalenceMapping& m) {
    if (tc.origin_version != oldv.model.version_label)
        throw VersionMismatch("test case originates from \"" + tc.origin_version +
                              "\", not \"" + oldv.model.version_label + "\"");
    if (m.from_version != oldv.model.version_label || m.to_version != newv.model.version_label)
        throw VersionMismatch("mapping \"" + m.from_version + "\"->\"" + m.to_version +
                              "\" does not connect \"" + oldv.model.version_label + "\"->\"" +
                              newv.model.version_label + "\"");
    std::vector<std::string> sequence = effective_sequence(oldv.efg, tc);
    std::vector<std::string> mapped;
    return detail::classify_step(sequence, oldv, newv, m, mapped);
}

// Classifies a case of the chain's version `start` on every subsequent
// version. The effective sequence is mapped forward step by step and the
// reported category is the running maximum: categories never improve, and
// once UNREPAIRABLE the case stays so even if a deleted widget reappears
// later.
inline std::vector<Category> classify_chain(const TestCase& tc, const ChainContext& chain,
                                            std::size_t start = 0) {
    if (start + 1 >= chain.size())
        throw ValidationError("chain classification needs at least one subsequent version");
    if (tc.origin_version != chain.versions[start].model.version_label)
        throw VersionMismatch("test case originates from \"" + tc.origin_version +
                              "\", not \"" + chain.versions[start].model.version_label + "\"");

    std::vector<Category> out;
    out.reserve(chain.size() - start - 1);
    std::vector<std::string> sequence = effective_sequence(chain.versions[start].efg, tc);
    Category reported = Category::REPLAYABLE_BY_ID;
    for (std::size_t k = start; k + 1 < chain.size(); ++k) {
        std::vector<std::string> mapped;
        Category step = detail::classify_step(sequence, chain.versions[k], chain.versions[k + 1],
                                              chain.mappings[k], mapped);
        reported = worse(reported, step);
        out.push_back(reported);
        if (step == Category::UNREPAIRABLE) {
            // No resurrection: mapping stops, the tail is unrepairable.
            while (out.size() < chain.size() - start - 1) out.push_back(Category::UNREPAIRABLE);
            break;
        }
        sequence = std::move(mapped);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Suite-level classification
// ---------------------------------------------------------------------------

struct ClassificationRecord {
    std::string case_id;
    std::string origin_version;
    std::string target_version;
    int length = 0;
    Category category = Category::REPLAYABLE_BY_ID;
};

namespace detail {

// Runs fn(i) for i in [0, n) across `workers` threads in contiguous blocks.
// Results must be written to preallocated slots; the split affects wall time
// only, never output content or order.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned use = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::vector<std::thread> threads;
    std::size_t chunk = (n + use - 1) / use;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < use; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Classifies every case of a group against one version pair. Output order
// follows the group's canonical case order regardless of worker count.
inline std::vector<ClassificationRecord> classify_group_pair(const SuiteGroup& group,
                                                             const std::string& origin_version,
                                                             const VersionContext& oldv,
                                                             const VersionContext& newv,
                                                             const EquivalenceMapping& m,
                                                             unsigned workers = 1) {
    std::vector<ClassificationRecord> records(group.cases.size());
    detail::parallel_for(group.cases.size(), workers, [&](std::size_t i) {
        const TestCase& tc = group.cases[i];
        records[i] = ClassificationRecord{tc.case_id, origin_version, newv.model.version_label,
                                          group.length, classify_pair(tc, oldv, newv, m)};
    });
    return records;
}

// Chain classification of a whole group; `sink` receives each case's
// per-version categories in canonical case order.
inline void classify_group_chain(
    const SuiteGroup& group, const ChainContext& chain, std::size_t start, unsigned workers,
    const std::function<void(const TestCase&, const std::vector<Category>&)>& sink) {
    std::vector<std::vector<Category>> results(group.cases.size());
    detail::parallel_for(group.cases.size(), workers, [&](std::size_t i) {
        results[i] = classify_chain(group.cases[i], chain, start);
    });
    for (std::size_t i = 0; i < group.cases.size(); ++i) sink(group.cases[i], results[i]);
}

// ---------------------------------------------------------------------------
// Record files (JSON lines)
// ---------------------------------------------------------------------------

inline std::string record_to_jsonl(const ClassificationRecord& r) {
    detail::json j;
    j["case_id"] = r.case_id;
    j["origin_version"] = r.origin_version;
    j["target_version"] = r.target_version;
    j["length"] = r.length;
    j["category"] = static_cast<int>(r.category);
    return j.dump();
}

inline std::string records_to_jsonl(std::span<const ClassificationRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_jsonl(r);
        out += '\n';
    }
    return out;
}

}  // namespace replaysim
