/*
 * Copyright 2026 The pbisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pbisim/aut_io.hpp"
#include "pbisim/lts.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace pbisim;

namespace {

const char* kF = "des (0,3,4)\n(0,\"a\",1)\n(1,\"b\",2)\n(1,\"c\",3)\n";

std::size_t error_line(const std::string& text) {
    try {
        parse_aut_string(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("parse the small reference system") {
    Diagnostics diag;
    const Lts f = parse_aut_string(kF, &diag);
    CHECK(f.num_states() == 4);
    CHECK(f.num_transitions() == 3);
    CHECK(f.label_names() == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(f.initial());
    CHECK(*f.initial() == 0);
    CHECK(f.terminating_states().empty());
    CHECK(diag.warnings.empty());
    CHECK(validate(f).empty());
}

TEST_CASE("labels are interned in order of first appearance") {
    const Lts l = parse_aut_string("des (0,3,2)\n(0,\"z\",1)\n(1,\"a\",0)\n(0,\"z\",0)\n");
    CHECK(l.label_names() == std::vector<std::string>{"z", "a"});
}

TEST_CASE("empty system") {
    const Lts l = parse_aut_string("des (0,0,1)\n");
    CHECK(l.num_states() == 1);
    CHECK(l.num_transitions() == 0);
}

TEST_CASE("duplicate transitions collapse with a warning") {
    Diagnostics diag;
    const Lts l = parse_aut_string("des (0,2,2)\n(0,\"a\",1)\n(0,\"a\",1)\n", &diag);
    CHECK(l.num_transitions() == 1);
    CHECK(l.duplicates_collapsed() == 1);
    CHECK(diag.warnings.size() == 1);
}

TEST_CASE("malformed input reports the line") {
    CHECK(error_line("des 0,1,2\n") == 1);
    CHECK(error_line("des (0,2,2)\n(0,\"a\",1)\n") != 0);
    CHECK(error_line("des (0,1,2)\n(0,\"a\",5)\n") == 2);
    CHECK(error_line("des (0,1,2)\n(0,\"a,1)\n") == 2);
    CHECK(error_line("des (7,0,2)\n") == 1);
}

TEST_CASE("termination lists") {
    const Lts f = parse_aut_string(kF);
    CHECK(parse_termination_string("2 3", f).terminating_states() == std::vector<StateId>{2, 3});
    CHECK(parse_termination_string("", f).terminating_states().empty());
    CHECK_THROWS(parse_termination_string("9", f));
    CHECK_THROWS(parse_termination_string("x", f));
}

TEST_CASE("termination marker label") {
    const Lts l = parse_aut_string("des (0,3,2)\n(0,\"a\",1)\n(1,\"done\",1)\n(0,\"b\",0)\n");
    const Lts m = apply_termination_label(l, "done");
    CHECK(m.terminating_states() == std::vector<StateId>{1});
    CHECK(m.num_transitions() == 2);
    CHECK(!m.find_label("done"));
    CHECK(m.label_names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("serialization is canonical") {
    const Lts f = parse_aut_string(kF);
    const std::string text = serialize_aut_string(f);
    CHECK(text.rfind("des (0,3,4)\n", 0) == 0);
    CHECK(text == kF);
    CHECK(serialize_aut_string(Lts()) == "des (0,0,1)\n");
}

TEST_CASE("round trip on random systems") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto c = testing::random_case(rng);
        const std::string once = serialize_aut_string(c.lts);
        const Lts back = parse_aut_string(once);
        CHECK(back.num_states() == c.lts.num_states());
        CHECK(back.num_transitions() == c.lts.num_transitions());
        CHECK(serialize_aut_string(back) == once);
    }
}

TEST_CASE("forward and backward adjacency agree") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const Lts l = testing::random_case(rng).lts;
        for (const auto& t : l.transitions()) {
            const auto fwd = l.out(t.source, t.label);
            CHECK(std::find(fwd.begin(), fwd.end(), t) != fwd.end());
            bool found = false;
            for (auto idx : l.in(t.target, t.label)) {
                found = found || l.transitions()[idx] == t;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("validate flags out-of-range entries") {
    CHECK(validate(testing::system_f()).empty());
    CHECK(validate(Lts(4, {"a"}, {{0, 0, 99}})).size() == 1);
    CHECK(validate(Lts(4, {"a"}, {{0, 3, 1}})).size() == 1);
}

TEST_CASE("bisimulation action sets") {
    const Lts f = testing::system_f();
    CHECK(BisimActionSet::none(f).empty());
    CHECK(BisimActionSet::all(f).members() == std::vector<LabelId>{0, 1, 2});
    CHECK(BisimActionSet::from_names(f, {"c"}).members() == std::vector<LabelId>{2});
    CHECK_THROWS_AS(BisimActionSet::from_names(f, {"q"}), std::invalid_argument);
}
