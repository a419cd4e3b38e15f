// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace replaysim {

// Input file is not syntactically valid JSON.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input parses but violates a schema or model invariant. The message
// names the offending element (JSON path and/or identifier).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A model admits no initial configuration (no window opens at start).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Version labels of two artifacts that must line up do not.
struct VersionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An event has no path from any initial event. Cannot occur for events
// kept by EFG derivation; raised for unknown event ids.
struct Unreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Random generation was asked for walks that cannot exist.
struct NoWalkPossible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mutation op references elements that do not exist or would produce
// an invalid model. The message names the op.
struct MutationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure, or a report request with nothing to report.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace replaysim
