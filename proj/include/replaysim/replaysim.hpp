// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header: GUI-model ingestion, event-flow-graph derivation, test
// generation, cross-version replayability classification, and reporting.

#include "replaysim/analysis.hpp"
#include "replaysim/classifier.hpp"
#include "replaysim/efg.hpp"
#include "replaysim/errors.hpp"
#include "replaysim/evolution.hpp"
#include "replaysim/generator.hpp"
#include "replaysim/model.hpp"
#include "replaysim/splitmix64.hpp"
#include "replaysim/stable_id.hpp"
