// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "replaysim/model.hpp"
#include "replaysim/splitmix64.hpp"
#include "replaysim/stable_id.hpp"

#include "support/oracles.hpp"

using namespace replaysim;

// Reference values computed with an independent straight-line FNV-1a
// implementation before the library was written.
TEST_CASE("fnv1a64 matches frozen reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);  // offset basis
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("Main\x1f"
                  "Button\x1f"
                  "OK\x1f"
                  "0") == 0x660c115843497adbULL);
}

TEST_CASE("stable id renders as 16 lowercase hex digits") {
    CHECK(StableId{0}.hex() == "0000000000000000");
    CHECK(StableId{0x660c115843497adbULL}.hex() == "660c115843497adb");
    CHECK(StableId{0xffffffffffffffffULL}.hex() == "ffffffffffffffff");
}

TEST_CASE("compute_widget_id hashes the canonical four-property string") {
    Window win;
    win.window_id = "main";
    win.title = "Main";
    Widget w;
    w.widget_id = "ok";
    w.type_name = "Button";
    w.title = "OK";
    w.index = 0;

    CHECK(compute_widget_id(w, win).hex() == "660c115843497adb");
    // agrees with the oracle's independent canonical-string construction
    CHECK(compute_widget_id(w, win).hex() == oracle::stable_hex("Main", "Button", "OK", 0));
}

TEST_CASE("only the four identifying properties participate") {
    Window win;
    win.window_id = "main";
    win.title = "Main";
    Widget a;
    a.widget_id = "first";
    a.type_name = "Button";
    a.title = "Open";
    a.index = 2;
    Widget b = a;
    b.widget_id = "second";             // non-identifying
    b.parent = "toolbar";               // non-identifying
    b.actions = {{EventKind::SYSTEM, ""}};  // non-identifying

    CHECK(compute_widget_id(a, win) == compute_widget_id(b, win));

    SUBCASE("title rename changes the id") {
        b.title = "Open File...";
        CHECK(compute_widget_id(a, win) != compute_widget_id(b, win));
    }
    SUBCASE("index shift changes the id") {
        b.index = 3;
        CHECK(compute_widget_id(a, win) != compute_widget_id(b, win));
    }
    SUBCASE("type change changes the id") {
        b.type_name = "MenuItem";
        CHECK(compute_widget_id(a, win) != compute_widget_id(b, win));
    }
    SUBCASE("window title changes the id") {
        Window other = win;
        other.title = "Secondary";
        CHECK(compute_widget_id(a, win) != compute_widget_id(a, other));
    }
}

TEST_CASE("splitmix64 matches frozen reference streams") {
    SplitMix64 zero(0);
    CHECK(zero() == 0xe220a8397b1dcdafULL);
    CHECK(zero() == 0x6e789e6aa1b965f4ULL);
    CHECK(zero() == 0x06c45d188009454fULL);

    SplitMix64 forty_two(42);
    CHECK(forty_two() == 0xbdd732262feb6e95ULL);
    CHECK(forty_two() == 0x28efe333b266f103ULL);
    CHECK(forty_two() == 0x47526757130f9f52ULL);

    SplitMix64 big(0x123456789abcdef0ULL);
    CHECK(big() == 0x161922c645ce50e8ULL);
    CHECK(big() == 0xad760cafa1697b60ULL);
    CHECK(big() == 0x3501ff44902ca50dULL);
}

TEST_CASE("identical seeds replay identical streams") {
    SplitMix64 a(777), b(777);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}
