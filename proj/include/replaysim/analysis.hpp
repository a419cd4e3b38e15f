// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "replaysim/classifier.hpp"
#include "replaysim/detail/json_util.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/evolution.hpp"
#include "replaysim/generator.hpp"
#include "replaysim/stable_id.hpp"

namespace replaysim {

// Category counts and proportions for one (origin, target, length) cell.
// Counts are integral for a single run and fractional for replication means.
struct CategoryDistribution {
    std::string origin_version;
    std::string target_version;
    int length = 0;
    std::array<double, 4> counts{};       // indexed by category - 1
    std::array<double, 4> proportions{};

    double total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }

    void add(Category c) { counts[static_cast<std::size_t>(static_cast<int>(c) - 1)] += 1.0; }

    void finalize() {
        double t = total();
        for (std::size_t i = 0; i < 4; ++i) proportions[i] = t > 0 ? counts[i] / t : 0.0;
    }
};

namespace detail {

struct CellKey {
    std::string origin, target;
    int length;
    bool operator<(const CellKey& o) const {
        return std::tie(origin, target, length) < std::tie(o.origin, o.target, o.length);
    }
};

}  // namespace detail

// Order-independent aggregation of classification records into one
// distribution per (origin, target, length), sorted by that key.
inline std::vector<CategoryDistribution> aggregate_records(
    std::span<const ClassificationRecord> records) {
    std::map<detail::CellKey, CategoryDistribution> cells;
    for (const auto& r : records) {
        detail::CellKey key{r.origin_version, r.target_version, r.length};
        auto [it, fresh] = cells.try_emplace(key);
        if (fresh) {
            it->second.origin_version = r.origin_version;
            it->second.target_version = r.target_version;
            it->second.length = r.length;
        }
        it->second.add(r.category);
    }
    std::vector<CategoryDistribution> out;
    out.reserve(cells.size());
    for (auto& [key, dist] : cells) {
        dist.finalize();
        out.push_back(std::move(dist));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cross-sectional and longitudinal views
// ---------------------------------------------------------------------------

namespace detail {

inline const TestSuite& suite_for(const std::vector<TestSuite>& suites, const std::string& label) {
    for (const auto& s : suites)
        if (s.origin_version == label) return s;
    throw ValidationError("no suite provided for version \"" + label + "\"");
}

}  // namespace detail

// Classifies each version's suite on the version immediately following it.
// One distribution per consecutive pair per length group.
inline std::vector<CategoryDistribution> cross_sectional(const ChainContext& chain,
                                                         const std::vector<TestSuite>& suites,
                                                         unsigned workers = 1) {
    std::vector<ClassificationRecord> records;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const std::string& label = chain.versions[k].model.version_label;
        const TestSuite& suite = detail::suite_for(suites, label);
        for (const auto& group : suite.groups) {
            auto part = classify_group_pair(group, label, chain.versions[k], chain.versions[k + 1],
                                            chain.mappings[k], workers);
            records.insert(records.end(), part.begin(), part.end());
        }
    }
    return aggregate_records(records);
}

// Classifies each version's suite on the chain's final version, degrading
// monotonically through every intermediate version.
inline std::vector<CategoryDistribution> longitudinal(const ChainContext& chain,
                                                      const std::vector<TestSuite>& suites,
                                                      unsigned workers = 1) {
    std::vector<ClassificationRecord> records;
    const std::string& final_label = chain.versions.back().model.version_label;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const std::string& label = chain.versions[k].model.version_label;
        const TestSuite& suite = detail::suite_for(suites, label);
        for (const auto& group : suite.groups) {
            classify_group_chain(group, chain, k, workers,
                                 [&](const TestCase& tc, const std::vector<Category>& cats) {
                                     records.push_back(ClassificationRecord{
                                         tc.case_id, label, final_label, group.length,
                                         cats.back()});
                                 });
        }
    }
    return aggregate_records(records);
}

// ---------------------------------------------------------------------------
// Replication
// ---------------------------------------------------------------------------

enum class AnalysisMode { CROSS_SECTIONAL, LONGITUDINAL };

struct GenerationParams {
    bool length2_all = true;
    std::vector<int> random_lengths = {3, 4, 5};
    std::uint64_t count = 0;
};

// Per-group stream derived from a base seed so each (version, length) walks
// an independent portion of the stream while staying reproducible.
inline std::uint64_t derive_group_seed(std::uint64_t base_seed, const std::string& origin_version,
                                       int length) {
    std::string tag = origin_version;
    tag += '\x1f';
    tag += std::to_string(length);
    tag += '\x1f';
    tag += std::to_string(base_seed);
    return fnv1a64(tag);
}

// Suites for every non-final version: the exhaustive length-2 group plus one
// random group per requested length.
inline std::vector<TestSuite> generate_suites(const ChainContext& chain,
                                              const GenerationParams& params,
                                              std::uint64_t base_seed) {
    std::vector<TestSuite> out;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const auto& v = chain.versions[k];
        const std::string& label = v.model.version_label;
        TestSuite suite;
        suite.origin_version = label;
        if (params.length2_all) suite.merge(generate_all_length2(v.efg, label));
        for (int length : params.random_lengths)
            suite.merge(generate_random(v.efg, length, params.count,
                                        derive_group_seed(base_seed, label, length), label));
        out.push_back(std::move(suite));
    }
    return out;
}

// One full generate-and-classify run per seed plus the arithmetic mean of
// the per-seed proportions (and counts). Exhaustive length-2 groups do not
// depend on the seed, so their rows are identical across seeds.
struct ReplicationSet {
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<CategoryDistribution>> per_seed;
    std::vector<CategoryDistribution> mean;
};

// Cell-wise arithmetic mean over several runs of the same analysis.
inline std::vector<CategoryDistribution> mean_distributions(
    const std::vector<std::vector<CategoryDistribution>>& runs) {
    std::map<detail::CellKey, CategoryDistribution> cells;
    std::map<detail::CellKey, std::size_t> hits;
    for (const auto& run : runs) {
        for (const auto& dist : run) {
            detail::CellKey key{dist.origin_version, dist.target_version, dist.length};
            auto [it, fresh] = cells.try_emplace(key);
            if (fresh) {
                it->second.origin_version = dist.origin_version;
                it->second.target_version = dist.target_version;
                it->second.length = dist.length;
            }
            for (std::size_t i = 0; i < 4; ++i) {
                it->second.counts[i] += dist.counts[i];
                it->second.proportions[i] += dist.proportions[i];
            }
            hits[key] += 1;
        }
    }
    std::vector<CategoryDistribution> out;
    for (auto& [key, dist] : cells) {
        double n = static_cast<double>(hits.at(key));
        for (std::size_t i = 0; i < 4; ++i) {
            dist.counts[i] /= n;
            dist.proportions[i] /= n;
        }
        out.push_back(std::move(dist));
    }
    return out;
}

inline ReplicationSet replicate(const ChainContext& chain, const GenerationParams& params,
                                const std::vector<std::uint64_t>& seeds, AnalysisMode mode,
                                unsigned workers = 1) {
    if (seeds.empty()) throw ValidationError("replication needs at least one seed");
    ReplicationSet rep;
    rep.seeds = seeds;
    for (auto seed : seeds) {
        auto suites = generate_suites(chain, params, seed);
        rep.per_seed.push_back(mode == AnalysisMode::CROSS_SECTIONAL
                                   ? cross_sectional(chain, suites, workers)
                                   : longitudinal(chain, suites, workers));
    }
    rep.mean = mean_distributions(rep.per_seed);
    return rep;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { CSV, SVG };

namespace detail {

inline std::string format_fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

// Integral counts print bare; replication means keep six decimals.
inline std::string format_count(double v) {
    double rounded = std::round(v);
    if (std::abs(v - rounded) < 1e-12)
        return std::to_string(static_cast<long long>(rounded));
    return format_fixed(v, 6);
}

}  // namespace detail

inline std::string emit_csv(std::span<const CategoryDistribution> distributions) {
    std::vector<const CategoryDistribution*> sorted;
    for (const auto& d : distributions) sorted.push_back(&d);
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return std::tie(a->origin_version, a->target_version, a->length) <
               std::tie(b->origin_version, b->target_version, b->length);
    });
    std::string out = "origin_version,target_version,length,category,count,proportion\n";
    for (const auto* d : sorted)
        for (int c = 0; c < 4; ++c) {
            out += d->origin_version;
            out += ',';
            out += d->target_version;
            out += ',';
            out += std::to_string(d->length);
            out += ',';
            out += std::to_string(c + 1);
            out += ',';
            out += detail::format_count(d->counts[static_cast<std::size_t>(c)]);
            out += ',';
            out += detail::format_fixed(d->proportions[static_cast<std::size_t>(c)], 6);
            out += '\n';
        }
    return out;
}

namespace detail {

inline constexpr std::array<std::string_view, 4> kCategoryColors = {
    "#2e7d32",  // replayable by id
    "#9ccc65",  // replayable after repair
    "#ffb300",  // repairable
    "#e53935",  // unrepairable
};
inline constexpr std::array<std::string_view, 4> kCategoryLabels = {
    "by id", "after repair", "repairable", "unrepairable"};

}  // namespace detail

// Deterministic stacked-bar chart: one group per (origin, target) pair, one
// bar per length 2..5, four stacked segments per bar. Byte-identical output
// for identical inputs.
inline std::string emit_svg(std::span<const CategoryDistribution> distributions) {
    using detail::format_fixed;

    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& d : distributions) {
        std::pair<std::string, std::string> key{d.origin_version, d.target_version};
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    std::sort(groups.begin(), groups.end());

    constexpr double bar_w = 22, bar_gap = 6, group_gap = 30;
    constexpr double plot_h = 240, margin_left = 56, margin_top = 40, margin_bottom = 64;
    constexpr int lengths[4] = {2, 3, 4, 5};
    const double group_w = 4 * bar_w + 3 * bar_gap;
    const double width = margin_left + groups.size() * (group_w + group_gap) + 180;
    const double height = margin_top + plot_h + margin_bottom;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(width, 0) +
         "\" height=\"" + format_fixed(height, 0) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axis and gridlines at 0%, 25%, 50%, 75%, 100%.
    for (int i = 0; i <= 4; ++i) {
        double frac = i / 4.0;
        double y = margin_top + plot_h * (1.0 - frac);
        s += "<line x1=\"" + format_fixed(margin_left - 4, 2) + "\" y1=\"" + format_fixed(y, 2) +
             "\" x2=\"" + format_fixed(width - 150, 2) + "\" y2=\"" + format_fixed(y, 2) +
             "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + format_fixed(margin_left - 8, 2) + "\" y=\"" + format_fixed(y + 4, 2) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
             format_fixed(frac * 100, 0) + "%</text>\n";
    }

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        double gx = margin_left + gi * (group_w + group_gap);
        for (int li = 0; li < 4; ++li) {
            const CategoryDistribution* d = nullptr;
            for (const auto& cand : distributions)
                if (cand.origin_version == groups[gi].first &&
                    cand.target_version == groups[gi].second && cand.length == lengths[li]) {
                    d = &cand;
                    break;
                }
            if (!d) continue;
            double x = gx + li * (bar_w + bar_gap);
            double y = margin_top + plot_h;
            for (std::size_t c = 0; c < 4; ++c) {
                double h = d->proportions[c] * plot_h;
                if (h <= 0) continue;
                y -= h;
                s += "<rect x=\"" + format_fixed(x, 2) + "\" y=\"" + format_fixed(y, 2) +
                     "\" width=\"" + format_fixed(bar_w, 2) + "\" height=\"" + format_fixed(h, 2) +
                     "\" fill=\"" + std::string(detail::kCategoryColors[c]) + "\"/>\n";
            }
        }
        std::string label = groups[gi].first == groups[gi].second
                                ? groups[gi].first
                                : groups[gi].first + " to " + groups[gi].second;
        s += "<text x=\"" + format_fixed(gx + group_w / 2, 2) + "\" y=\"" +
             format_fixed(margin_top + plot_h + 16, 2) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + label +
             "</text>\n";
        s += "<text x=\"" + format_fixed(gx + group_w / 2, 2) + "\" y=\"" +
             format_fixed(margin_top + plot_h + 32, 2) +
             "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">lengths 2-5"
             "</text>\n";
    }

    // Legend.
    double lx = width - 140, ly = margin_top;
    for (std::size_t c = 0; c < 4; ++c) {
        s += "<rect x=\"" + format_fixed(lx, 2) + "\" y=\"" + format_fixed(ly + c * 20, 2) +
             "\" width=\"14\" height=\"14\" fill=\"" + std::string(detail::kCategoryColors[c]) +
             "\"/>\n";
        s += "<text x=\"" + format_fixed(lx + 20, 2) + "\" y=\"" +
             format_fixed(ly + c * 20 + 11, 2) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" +
             std::string(detail::kCategoryLabels[c]) + "</text>\n";
    }

    s += "</svg>\n";
    return s;
}

inline void emit_report(std::span<const CategoryDistribution> distributions, ReportFormat format,
                        const std::string& path) {
    if (distributions.empty()) throw IoError("nothing to report: no distributions");
    detail::write_file(path, format == ReportFormat::CSV ? emit_csv(distributions)
                                                         : emit_svg(distributions));
}

}  // namespace replaysim
