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
#include "pbisim/oracle.hpp"
#include "pbisim/quotient.hpp"
#include "pbisim/refine.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace pbisim;

namespace {

// Every original state is equivalent to the quotient state of its class.
bool sound(const Lts& lts, const BisimActionSet& b, const QuotientLts& q) {
    const auto u = disjoint_union(lts, q.lts);
    const auto rel = naive_partial_bisim(u.lts, testing::lift_b(lts, b, u.lts));
    const auto cls = q.class_of_state(lts.num_states());
    for (StateId s = 0; s < lts.num_states(); ++s) {
        if (!cls[s]) {
            continue;
        }
        const StateId c = u.offset + *cls[s];
        if (!rel.contains(s, c) || !rel.contains(c, s)) {
            return false;
        }
    }
    return true;
}

// Same counts and, with classes numbered by smallest state, same text.
bool same_shape(const QuotientLts& x, const QuotientLts& y) {
    if (x.lts.num_states() != y.lts.num_states() || x.lts.num_transitions() != y.lts.num_transitions()) {
        return false;
    }
    return serialize_aut_string(x.lts) == serialize_aut_string(y.lts);
}

} // namespace

TEST_CASE("merging mutual pairs") {
    const auto part = Partition::from_assignment(std::vector<BlockId>{0, 1, 2, 2});
    LittleBrotherRelation order(3);
    order.add(2, 0);
    const auto [same, same_lb] = merge_mutual(part, order);
    CHECK(same.num_blocks() == 3);
    CHECK(same_lb.pairs() == order.pairs());

    LittleBrotherRelation cycle(3);
    cycle.add(0, 1);
    cycle.add(1, 0);
    cycle.add(2, 1);
    const auto [merged, merged_lb] = merge_mutual(part, cycle);
    CHECK(merged.num_blocks() == 2);
    CHECK(merged.block_of(0) == merged.block_of(1));
    CHECK(merged_lb.pairs() == std::vector<std::pair<BlockId, BlockId>>{{1, 0}});
}

TEST_CASE("F and G merge when only b is bisimulated") {
    auto u = disjoint_union(testing::system_f(), testing::system_g());
    const auto b = BisimActionSet::from_names(u.lts, {"b"});
    const auto r = run(u.lts, b);
    const auto [merged, lb] = merge_mutual(r.partition, r.lb);
    CHECK(merged.block_of(0) == merged.block_of(u.offset));
}

TEST_CASE("quotient of G keeps only the biggest a-brother") {
    const Lts g = testing::system_g();
    const auto none = BisimActionSet::none(g);
    const auto q = minimize(g, none, false);
    REQUIRE(q.lts.num_states() == 4);
    CHECK(q.class_members == std::vector<std::vector<StateId>>{{0}, {1}, {2}, {3, 4, 5}});
    CHECK(q.class_lb.contains_strict(2, 1));
    const auto a = *q.lts.find_label("a");
    const auto moves = q.lts.out(0, a);
    REQUIRE(moves.size() == 1);
    CHECK(moves.front().target == 1);
    CHECK(sound(g, none, q));

    const auto pruned = prune_unreachable(q);
    CHECK(pruned.lts.num_states() == 3);
    const Lts f = testing::system_f();
    CHECK(serialize_aut_string(pruned.lts) == serialize_aut_string(minimize(f, BisimActionSet::none(f)).lts));
    CHECK(pruned.class_of_state(6)[2] == std::nullopt);
}

TEST_CASE("bisimulating everything keeps every forall move") {
    const Lts g = testing::system_g();
    const auto q = minimize(g, BisimActionSet::all(g));
    CHECK(q.lts.num_states() == 4);
    CHECK(q.lts.num_transitions() == 5);
    CHECK(q.class_lb.num_pairs() == 0);
}

TEST_CASE("a bisimulated move into the middle of a chain is dropped") {
    // p -b-> r1, q, r2 with r1 < q < r2 under the preorder for B = {b}.
    const Lts l(6, {"b", "c", "d"},
                {{0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {2, 1, 4}, {3, 1, 4}, {3, 2, 4}, {5, 1, 5}}, {}, 0);
    const auto b = BisimActionSet::from_names(l, {"b"});
    const auto q = minimize(l, b, false);
    CHECK(q.suppressed_middle == 1);
    const auto cls = q.class_of_state(6);
    const auto out = q.lts.out(*cls[0], 0);
    std::vector<StateId> targets;
    for (const auto& t : out) {
        targets.push_back(t.target);
    }
    CHECK(targets == std::vector<StateId>{*cls[1], *cls[3]});
    CHECK(sound(l, b, q));
}

TEST_CASE("pruning without an initial state changes nothing") {
    const Lts g = testing::system_g().with_initial(std::nullopt);
    const auto q = minimize(g, BisimActionSet::none(g), false);
    Diagnostics diag;
    const auto p = prune_unreachable(q, &diag);
    CHECK(p.lts.num_states() == q.lts.num_states());
    CHECK(diag.warnings.size() == 1);
    CHECK(minimize(g, BisimActionSet::none(g), true).lts.num_states() == 4);
}

TEST_CASE("class order dump") {
    const Lts g = testing::system_g();
    const auto q = minimize(g, BisimActionSet::none(g));
    std::ostringstream out;
    dump_class_order(out, q);
    CHECK(out.str() == "B0: {0}\nB1: {1}\nB2: {3,4,5}\nB2 <= B0\nB2 <= B1\n");
}

TEST_CASE("quotients of random systems") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 100; ++i) {
        const auto c = testing::random_case(rng, 40, 160, 4);
        const auto q = minimize(c.lts, c.b, false);
        CHECK(sound(c.lts, c.b, q));
        // Termination is uniform per class; the class order is a partial order.
        for (StateId k = 0; k < q.class_members.size(); ++k) {
            for (StateId s : q.class_members[k]) {
                CHECK(c.lts.is_terminating(s) == q.lts.is_terminating(k));
            }
            for (BlockId other : q.class_lb.bigger(k)) {
                CHECK(!q.class_lb.contains_strict(other, k));
            }
        }
        const auto again = minimize(q.lts, testing::lift_b(c.lts, c.b, q.lts), false);
        CHECK(same_shape(q, again));
    }
}

TEST_CASE("bigger B never gives a smaller quotient") {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 60; ++i) {
        const auto c = testing::random_case(rng, 40, 160, 4);
        BisimActionSet b = BisimActionSet::none(c.lts);
        std::size_t last = minimize(c.lts, b, false).lts.num_states();
        for (LabelId a = 0; a < c.lts.num_labels(); ++a) {
            b.insert(a);
            const std::size_t now = minimize(c.lts, b, false).lts.num_states();
            CHECK(last <= now);
            last = now;
        }
    }
}
