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

// Shared fixtures for the test binaries.

#ifndef PBISIM_TESTS_SUPPORT_HPP
#define PBISIM_TESTS_SUPPORT_HPP

#include "pbisim/lts.hpp"
#include "pbisim/oracle.hpp"
#include "pbisim/partition.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace pbisim::testing {

// f0 -a-> f1, f1 -b-> f2, f1 -c-> f3.
inline Lts system_f() {
    return Lts(4, {"a", "b", "c"}, {{0, 0, 1}, {1, 1, 2}, {1, 2, 3}}, {}, 0);
}

// g0 -a-> g1, g0 -a-> g2, g1 -b-> g3, g1 -c-> g4, g2 -b-> g5.
inline Lts system_g() {
    return Lts(6, {"a", "b", "c"}, {{0, 0, 1}, {0, 0, 2}, {1, 1, 3}, {1, 2, 4}, {2, 1, 5}}, {}, 0);
}

struct RandomCase {
    Lts lts;
    BisimActionSet b;
};

// Small random system with a random B; sizes vary with the generator.
inline RandomCase random_case(std::mt19937_64& rng, std::size_t max_states = 60, std::size_t max_transitions = 240,
                              std::size_t max_labels = 4) {
    const std::size_t n = 1 + rng() % max_states;
    const std::size_t labels = 1 + rng() % max_labels;
    const std::size_t cap = std::min(max_transitions, n * n * labels);
    const std::size_t m = rng() % (cap + 1);
    const double density = static_cast<double>(rng() % 5) / 10.0;
    Lts lts = random_lts(n, m, labels, density, rng());
    std::vector<LabelId> ids;
    for (LabelId a = 0; a < labels; ++a) {
        if (rng() % 2) {
            ids.push_back(a);
        }
    }
    auto b = BisimActionSet::from_ids(labels, ids);
    return {std::move(lts), std::move(b)};
}

// B over the union alphabet with the same names as @p b over @p from.
inline BisimActionSet lift_b(const Lts& from, const BisimActionSet& b, const Lts& to) {
    BisimActionSet result = BisimActionSet::none(to);
    for (LabelId a : b.members()) {
        if (auto id = to.find_label(from.label_name(a))) {
            result.insert(*id);
        }
    }
    return result;
}

// Recounts every counter of @p pp from the child partition, the relation
// and the transitions. Returns one message per mismatch.
inline std::vector<std::string> audit_counters(const PartitionPair& pp) {
    std::vector<std::string> errors;
    const Lts& lts = pp.lts();
    const auto& part = pp.partition();
    const auto& parents = pp.parents();
    const std::size_t np = parents.num_parents();

    std::set<std::pair<ParentId, ParentId>> induced;
    std::vector<std::vector<std::uint32_t>> lb_count(np, std::vector<std::uint32_t>(np, 0));
    for (const auto& [little, big] : pp.relation().pairs()) {
        const ParentId x = parents.parent_of(little);
        const ParentId y = parents.parent_of(big);
        ++lb_count[x][y];
        induced.insert({x, y});
    }
    for (ParentId x = 0; x < np; ++x) {
        for (ParentId y = 0; y < np; ++y) {
            if (pp.cnt_lb(x, y) != lb_count[x][y]) {
                errors.push_back("cnt_lb(" + std::to_string(x) + "," + std::to_string(y) + ")");
            }
        }
    }

    for (BlockId b = 0; b < part.num_blocks(); ++b) {
        if (parents.parent_of(b) >= np) {
            errors.push_back("block without parent");
            continue;
        }
        for (LabelId a = 0; a < lts.num_labels(); ++a) {
            std::vector<std::uint32_t> reach(np, 0);
            for (StateId s : part.members(b)) {
                std::set<ParentId> hit;
                for (const auto& t : lts.out(s, a)) {
                    hit.insert(pp.parent_of_state(t.target));
                }
                for (ParentId q : hit) {
                    ++reach[q];
                }
            }
            for (ParentId q = 0; q < np; ++q) {
                if (pp.counters().ae(b, a, q) != reach[q]) {
                    errors.push_back("ae(" + std::to_string(b) + "," + std::to_string(a) + "," + std::to_string(q) + ")");
                }
            }
            for (ParentId p = 0; p < np; ++p) {
                std::uint32_t al = 0;
                for (ParentId q = 0; q < np; ++q) {
                    const bool above = p == q || induced.count({p, q}) > 0;
                    al += above && reach[q] == part.size(b) ? 1 : 0;
                }
                if (pp.cnt_al(b, a, p) != al) {
                    errors.push_back("cnt_al(" + std::to_string(b) + "," + std::to_string(a) + "," + std::to_string(p) + ")");
                }
            }
        }
    }
    for (const auto& t : lts.transitions()) {
        std::uint32_t n = 0;
        for (const auto& u : lts.out(t.source, t.label)) {
            n += pp.parent_of_state(u.target) == pp.parent_of_state(t.target) ? 1 : 0;
        }
        const auto idx = static_cast<std::uint32_t>(&t - lts.transitions().data());
        if (pp.counters().state_count(idx) != n) {
            errors.push_back("state counter of transition " + std::to_string(idx));
        }
    }
    return errors;
}

} // namespace pbisim::testing

#endif
