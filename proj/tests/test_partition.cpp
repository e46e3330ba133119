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

#include "pbisim/partition.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace pbisim;
using pbisim::testing::audit_counters;

TEST_CASE("partition splitting keeps coverage") {
    Partition p(6);
    CHECK(p.num_blocks() == 1);
    const std::vector<StateId> moved{4, 1};
    const BlockId fresh = p.split_off(0, moved);
    CHECK(p.num_blocks() == 2);
    CHECK(p.sorted_members(fresh) == std::vector<StateId>{1, 4});
    CHECK(p.sorted_members(0) == std::vector<StateId>{0, 2, 3, 5});
    CHECK(p.block_of(4) == fresh);
    CHECK(p.check_invariants());

    const auto q = Partition::from_assignment(std::vector<BlockId>{1, 0, 1, 2});
    CHECK(q.num_blocks() == 3);
    CHECK(q.sorted_members(1) == std::vector<StateId>{0, 2});
    CHECK(q.check_invariants());
    CHECK(Partition(0).num_blocks() == 0);
}

TEST_CASE("brother closures") {
    LittleBrotherRelation single(1);
    CHECK(lbc(0, single) == std::vector<BlockId>{0});
    CHECK(bbc(0, single) == std::vector<BlockId>{0});

    LittleBrotherRelation chain(4);
    chain.add(0, 1);
    chain.add(1, 2);
    CHECK(lbc(2, chain) == std::vector<BlockId>{0, 1, 2});
    CHECK(bbc(0, chain) == std::vector<BlockId>{0, 1, 2});
    CHECK(lbc(3, chain) == std::vector<BlockId>{3});
    CHECK(chain.related(1, 1));
    CHECK(!chain.contains_strict(1, 1));
    CHECK(chain.num_pairs() == 2);
    CHECK(chain.remove(0, 1));
    CHECK(!chain.remove(0, 1));
    CHECK(bbc(0, chain) == std::vector<BlockId>{0});
}

TEST_CASE("debug dump format") {
    LittleBrotherRelation rel(3);
    rel.add(2, 0);
    std::ostringstream out;
    dump_partition_pair(out, Partition::from_assignment(std::vector<BlockId>{0, 1, 2, 2}), rel);
    CHECK(out.str() == "B0: {0}\nB1: {1}\nB2: {2,3}\nB2 <= B0\n");
}

TEST_CASE("exists and forall over parents") {
    const Lts f = testing::system_f();
    const auto part = Partition::from_assignment(std::vector<BlockId>{0, 1, 2, 2});
    const std::vector<ParentId> parents{0, 0, 1};
    PartitionPair pp(f, part, LittleBrotherRelation(3), parents);
    const LabelId a = 0;
    const LabelId b = 1;
    CHECK(pp.exists_tr(1, b, 1));
    CHECK(!pp.exists_tr(0, b, 0));
    CHECK(!pp.exists_tr(0, b, 1));
    CHECK(!pp.exists_tr(2, a, 0));
    // Singletons: forall coincides with exists.
    for (LabelId l = 0; l < 3; ++l) {
        for (ParentId q = 0; q < 2; ++q) {
            const std::vector<ParentId> one{q};
            CHECK(pp.forall_tr(1, l, one) == pp.exists_tr(1, l, q));
        }
    }
    CHECK(audit_counters(pp).empty());

    const Lts g = testing::system_g();
    PartitionPair pg(g, Partition::from_assignment(std::vector<BlockId>{0, 1, 1, 2, 2, 2}), LittleBrotherRelation(3));
    const std::vector<ParentId> all{0};
    CHECK(!pg.forall_tr(1, 2, all));
    CHECK(pg.forall_tr(1, 1, all));
    CHECK(pg.exists_tr(1, 2, 0));
}

TEST_CASE("splitter selection") {
    const Lts f = testing::system_f();
    PartitionPair same(f, Partition::from_assignment(std::vector<BlockId>{0, 1, 2, 3}), LittleBrotherRelation(4),
                       std::vector<ParentId>{0, 1, 2, 3});
    CHECK(!same.find_splitter());

    // Children of sizes 1 and 3 in one parent.
    const Lts l(4, {"a"}, {});
    PartitionPair pp(l, Partition::from_assignment(std::vector<BlockId>{0, 1, 1, 1}), LittleBrotherRelation(2));
    const auto s = pp.find_splitter();
    REQUIRE(s);
    CHECK(s->blocks == std::vector<BlockId>{0});
    const auto split = pp.split_parent(*s);
    CHECK(split.fresh != split.kept);
    CHECK(pp.parents().state_count(split.fresh) == 1);
    CHECK(!pp.find_splitter());
    CHECK_THROWS_AS(pp.split_parent(Splitter{0, {}}), std::invalid_argument);
}

TEST_CASE("splitting the parent by termination") {
    const Lts l = Lts(4, {"a"}, {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}}, {1, 3});
    PartitionPair pp(l, Partition::from_assignment(std::vector<BlockId>{0, 1, 0, 1}), LittleBrotherRelation(2));
    const auto split = pp.split_parent(Splitter{0, {1}});
    CHECK(pp.parent_states(split.splitter_side) == std::vector<StateId>{1, 3});
    CHECK(audit_counters(pp).empty());
}

TEST_CASE("counters survive random splits and deletions") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 60; ++round) {
        const auto c = testing::random_case(rng, 20, 60, 3);
        const std::size_t n = c.lts.num_states();
        const std::size_t k = 1 + rng() % n;
        std::vector<BlockId> assign(n);
        for (StateId s = 0; s < n; ++s) {
            assign[s] = s < k ? s : static_cast<BlockId>(rng() % k);
        }
        LittleBrotherRelation rel(k);
        for (BlockId x = 0; x < k; ++x) {
            for (BlockId y = 0; y < k; ++y) {
                if (x != y && rng() % 3 == 0) {
                    rel.add(x, y);
                }
            }
        }
        PartitionPair pp(c.lts, Partition::from_assignment(assign), rel);
        REQUIRE(audit_counters(pp).empty());
        for (int step = 0; step < 10; ++step) {
            const auto pick = rng() % 3;
            if (pick == 0) {
                const auto s = pp.find_splitter();
                if (!s) {
                    break;
                }
                pp.split_parent(*s);
            } else if (pick == 1) {
                const BlockId b = static_cast<BlockId>(rng() % pp.partition().num_blocks());
                const auto members = pp.partition().members(b);
                if (members.size() > 1) {
                    const std::vector<StateId> moved{members.front()};
                    const BlockId fresh = pp.split_block(b, moved);
                    CHECK(pp.relation().contains_strict(fresh, b));
                    CHECK(pp.relation().contains_strict(b, fresh));
                }
            } else {
                const auto pairs = pp.relation().pairs();
                if (!pairs.empty()) {
                    const auto [x, y] = pairs[rng() % pairs.size()];
                    pp.remove_pair(x, y);
                }
            }
            CHECK(pp.partition().check_invariants());
            const auto errors = audit_counters(pp);
            INFO((errors.empty() ? std::string() : errors.front()));
            CHECK(errors.empty());
        }
    }
}

TEST_CASE("forall implies exists and shrinks to sub-blocks") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 30; ++round) {
        const auto c = testing::random_case(rng, 15, 50, 3);
        const std::size_t n = c.lts.num_states();
        std::vector<BlockId> coarse(n);
        for (StateId s = 0; s < n; ++s) {
            coarse[s] = static_cast<BlockId>(rng() % 2);
        }
        coarse[0] = 0;
        if (n > 1) {
            coarse[n - 1] = 1;
        } else {
            continue;
        }
        PartitionPair big(c.lts, Partition::from_assignment(coarse), LittleBrotherRelation(2),
                          std::vector<ParentId>{0, 1});
        // Finer partition: block 0 is split into singletons, same parents.
        std::vector<BlockId> fine(n);
        std::vector<ParentId> fine_parent;
        BlockId next = 0;
        for (StateId s = 0; s < n; ++s) {
            if (coarse[s] == 0) {
                fine[s] = next++;
                fine_parent.push_back(0);
            }
        }
        const BlockId rest = next++;
        fine_parent.push_back(1);
        for (StateId s = 0; s < n; ++s) {
            if (coarse[s] == 1) {
                fine[s] = rest;
            }
        }
        PartitionPair small(c.lts, Partition::from_assignment(fine), LittleBrotherRelation(next), fine_parent);
        for (LabelId a = 0; a < c.lts.num_labels(); ++a) {
            for (ParentId q = 0; q < 2; ++q) {
                const std::vector<ParentId> one{q};
                for (BlockId b = 0; b < 2; ++b) {
                    if (big.forall_tr(b, a, one)) {
                        CHECK(big.exists_tr(b, a, q));
                    }
                }
                if (big.forall_tr(0, a, one)) {
                    for (BlockId b = 0; b < rest; ++b) {
                        CHECK(small.forall_tr(b, a, one));
                    }
                }
            }
        }
    }
}
