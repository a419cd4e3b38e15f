// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "replaysim/errors.hpp"

namespace replaysim::detail {

// ordered_json keeps insertion order, which gives every writer in this
// project a fixed field order and byte-stable output.
using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

inline json parse_json(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON in " + origin);
    return j;
}

inline json parse_json_file(const std::string& path) {
    return parse_json(read_file(path), path);
}

inline void expect_object(const json& j, const std::string& at) {
    if (!j.is_object()) throw ValidationError(at + ": expected an object");
}

// Strict mode rejects keys the schema does not name; lenient mode skips them.
inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& at, bool strict) {
    if (!strict) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (auto k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) throw ValidationError(at + ": unknown key \"" + it.key() + "\"");
    }
}

inline const json& require(const json& obj, const char* key, const std::string& at) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(at + ": missing key \"" + key + "\"");
    return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& at) {
    const json& v = require(obj, key, at);
    if (!v.is_string()) throw ValidationError(at + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline bool require_bool(const json& obj, const char* key, const std::string& at) {
    const json& v = require(obj, key, at);
    if (!v.is_boolean()) throw ValidationError(at + "." + key + ": expected a boolean");
    return v.get<bool>();
}

inline std::int64_t require_int(const json& obj, const char* key, const std::string& at) {
    const json& v = require(obj, key, at);
    if (!v.is_number_integer()) throw ValidationError(at + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

inline const json& require_array(const json& obj, const char* key, const std::string& at) {
    const json& v = require(obj, key, at);
    if (!v.is_array()) throw ValidationError(at + "." + key + ": expected an array");
    return v;
}

// Canonical file rendering: two-space indent, trailing newline.
inline std::string dump_canonical(const json& j) {
    return j.dump(2) + "\n";
}

}  // namespace replaysim::detail
