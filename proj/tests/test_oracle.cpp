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
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace pbisim;

namespace {

bool has_condition(const std::vector<StabilityViolation>& v, char c) {
    return std::any_of(v.begin(), v.end(), [c](const StabilityViolation& x) { return x.condition == c; });
}

} // namespace

TEST_CASE("reference preorder is a preorder") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 80; ++i) {
        const auto c = testing::random_case(rng, 30, 100, 3);
        const auto r = naive_partial_bisim(c.lts, c.b);
        CHECK(r.is_reflexive());
        CHECK(r.is_transitive());
    }
}

TEST_CASE("the two small systems under the reference preorder") {
    const auto u = disjoint_union(testing::system_f(), testing::system_g());
    const StateId g0 = u.offset;
    const auto with_b = naive_partial_bisim(u.lts, BisimActionSet::from_names(u.lts, {"b"}));
    CHECK(with_b.contains(0, g0));
    CHECK(with_b.contains(g0, 0));
    // With c bisimulated, G's b-only branch cannot follow f1's c-move back.
    const auto with_c = naive_partial_bisim(u.lts, BisimActionSet::from_names(u.lts, {"c"}));
    CHECK(!with_c.contains(g0, 0));
    CHECK(with_c.contains(0, g0));
    const auto with_all = naive_partial_bisim(u.lts, BisimActionSet::all(u.lts));
    CHECK(!with_all.contains(0, g0));
    CHECK(!with_all.contains(g0, 0));
}

TEST_CASE("comparing initial states") {
    const Lts f = testing::system_f();
    const Lts g = testing::system_g();
    CHECK(preorder_holds(f, f, {}));
    CHECK(preorder_holds(f, f, {"a", "b", "c"}));
    CHECK(!preorder_holds(f, g, {"a", "b", "c"}));
    CHECK(preorder_holds(f, g, {}));
    CHECK(preorder_holds(g, f, {}));
    CHECK(preorder_holds(f, g, {"b"}));
    CHECK(preorder_holds(g, f, {"b"}));
    CHECK(!preorder_holds(g, f, {"c"}));
    CHECK_THROWS_AS(preorder_holds(f, g, {"zz"}), std::invalid_argument);
    CHECK_THROWS_AS(preorder_holds(f.with_initial(std::nullopt), g, {}), std::invalid_argument);
}

TEST_CASE("endpoints match textbook similarity and bisimilarity") {
    std::mt19937_64 rng(59);
    for (int i = 0; i < 80; ++i) {
        const Lts l = testing::random_case(rng, 30, 100, 3).lts;
        CHECK(naive_partial_bisim(l, BisimActionSet::none(l)) == naive_similarity(l));
        CHECK(naive_partial_bisim(l, BisimActionSet::all(l)).symmetric_core() == naive_bisimilarity(l));
    }
}

TEST_CASE("growing B shrinks the preorder") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 60; ++i) {
        const auto c = testing::random_case(rng, 30, 100, 4);
        BisimActionSet more = c.b;
        more.insert(static_cast<LabelId>(rng() % c.lts.num_labels()));
        CHECK(naive_partial_bisim(c.lts, more).subset_of(naive_partial_bisim(c.lts, c.b)));
    }
}

TEST_CASE("stability of induced pairs and constructed violations") {
    std::mt19937_64 rng(67);
    for (int i = 0; i < 60; ++i) {
        const auto c = testing::random_case(rng, 30, 100, 3);
        const auto [p, lb] = induced_pair(naive_partial_bisim(c.lts, c.b));
        CHECK(stable_check(c.lts, p, lb, c.b).empty());
        CHECK(induced_relation(p, lb) == naive_partial_bisim(c.lts, c.b));
    }

    const Lts mixed(2, {"a"}, {}, {1});
    CHECK(has_condition(stable_check(mixed, Partition(2), LittleBrotherRelation(1), BisimActionSet::none(mixed)),
                        'a'));

    // Block 0 has an a-move the bigger block 1 cannot follow.
    const Lts l(3, {"a"}, {{0, 0, 2}});
    LittleBrotherRelation rel(3);
    rel.add(0, 1);
    const auto discrete = Partition::from_assignment(std::vector<BlockId>{0, 1, 2});
    const auto v = stable_check(l, discrete, rel, BisimActionSet::none(l));
    REQUIRE(!v.empty());
    CHECK(has_condition(v, 'c'));
    CHECK(v.front().p == 0);
    CHECK(v.front().q == 1);
}

TEST_CASE("finer order") {
    const Lts g = testing::system_g();
    const auto [p, lb] = induced_pair(naive_partial_bisim(g, BisimActionSet::none(g)));
    CHECK(finer_than(p, lb, p, lb));
    CHECK(finer_than(p, lb, Partition(6), LittleBrotherRelation(1)));
    std::vector<BlockId> ids{0, 1, 2, 3, 4, 5};
    CHECK(finer_than(Partition::from_assignment(ids), LittleBrotherRelation(6), p, lb));
    CHECK(!finer_than(Partition(6), LittleBrotherRelation(1), p, lb));

    // finer_than agrees with inclusion of the induced relations.
    std::mt19937_64 rng(71);
    for (int i = 0; i < 60; ++i) {
        const auto c = testing::random_case(rng, 25, 80, 3);
        const auto other = BisimActionSet::from_ids(c.lts.num_labels(), {static_cast<LabelId>(rng() % c.lts.num_labels())});
        const auto r1 = naive_partial_bisim(c.lts, c.b);
        const auto r2 = naive_partial_bisim(c.lts, other);
        const auto [p1, lb1] = induced_pair(r1);
        const auto [p2, lb2] = induced_pair(r2);
        CHECK(finer_than(p1, lb1, p2, lb2) == r1.subset_of(r2));
        CHECK(finer_than(p2, lb2, p1, lb1) == r2.subset_of(r1));
    }
}

TEST_CASE("random systems") {
    const Lts one = random_lts(1, 0, 1, 0.0, 9);
    CHECK(one.num_states() == 1);
    CHECK(one.num_transitions() == 0);
    CHECK(one.terminating_states().empty());

    const Lts a = random_lts(50, 200, 3, 0.2, 77);
    CHECK(a.num_states() == 50);
    CHECK(a.num_transitions() == 200);
    CHECK(a.duplicates_collapsed() == 0);
    CHECK(a.label_names() == std::vector<std::string>{"a", "b", "c"});
    CHECK(*a.initial() == 0);
    CHECK(serialize_aut_string(a) == serialize_aut_string(random_lts(50, 200, 3, 0.2, 77)));
    CHECK(random_lts(2, 8, 2, 0.0, 1).num_transitions() == 8);
    CHECK_THROWS_AS(random_lts(2, 9, 2, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_lts(0, 0, 1, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_lts(3, 1, 1, 1.5, 1), std::invalid_argument);
    CHECK(generated_label_name(0) == "a");
    CHECK(generated_label_name(25) == "z");
}
