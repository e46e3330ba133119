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

/** @file oracle.hpp
 *  @brief Slow reference algorithms and checkers for testing.
 *
 *  Everything here works on explicit state pairs and is meant for systems
 *  of at most a few hundred states.
 */

#ifndef PBISIM_ORACLE_HPP
#define PBISIM_ORACLE_HPP

#include "pbisim/lts.hpp"
#include "pbisim/partition.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pbisim {

/// Set of ordered state pairs over one state space, stored densely.
class StatePairRelation {
public:
    StatePairRelation() = default;
    explicit StatePairRelation(std::size_t num_states, bool full = false)
        : n_(num_states), bits_(num_states * num_states, full ? 1 : 0) {}

    std::size_t num_states() const { return n_; }
    bool contains(StateId p, StateId q) const { return bits_[p * n_ + q] != 0; }
    void insert(StateId p, StateId q) { bits_[p * n_ + q] = 1; }
    void erase(StateId p, StateId q) { bits_[p * n_ + q] = 0; }
    std::size_t size() const;

    bool is_reflexive() const;
    bool is_transitive() const;
    /// Pairs in both directions.
    StatePairRelation symmetric_core() const;
    bool subset_of(const StatePairRelation& other) const;

    bool operator==(const StatePairRelation&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Greatest partial bisimulation for @p b: start from all pairs that pass
/// the termination test, delete violating pairs until nothing changes.
StatePairRelation naive_partial_bisim(const Lts& lts, const BisimActionSet& b);

/// Plain similarity preorder with termination, computed per state as the
/// set of its simulators.
StatePairRelation naive_similarity(const Lts& lts);

/// Strong bisimilarity with termination by naive signature refinement.
StatePairRelation naive_bisimilarity(const Lts& lts);

/// Classes of the symmetric core of @p preorder (numbered by smallest
/// state) with the preorder lifted to classes.
std::pair<Partition, LittleBrotherRelation> induced_pair(const StatePairRelation& preorder);

/// States of @p p and @p q relabelled into one system, labels matched by
/// name. States of @p q start at @p offset. No initial state.
struct DisjointUnion {
    Lts lts;
    StateId offset = 0;
};
DisjointUnion disjoint_union(const Lts& f, const Lts& g);

/// Whether the initial state of @p f is partially bisimilar to that of
/// @p g for the actions named in @p b_names. Alphabets are joined by name;
/// throws std::invalid_argument if a name in @p b_names occurs in neither
/// system or either system has no initial state.
bool preorder_holds(const Lts& f, const Lts& g, const std::vector<std::string>& b_names);

struct StabilityViolation {
    char condition;  ///< 'a'..'d'
    BlockId p;
    BlockId q;
    std::optional<BlockId> r;
    std::optional<LabelId> label;
    std::string message;
};

/// Stability conditions a-d with brother closures taken inside the same
/// partition. Empty iff stable.
std::vector<StabilityViolation> stable_check(const Lts& lts, const Partition& p,
                                             const LittleBrotherRelation& lb, const BisimActionSet& b);

/// (p1, lb1) finer than (p2, lb2): every P <=1 Q, reflexive pairs included,
/// lies inside some P' <=2 Q'.
bool finer_than(const Partition& p1, const LittleBrotherRelation& lb1, const Partition& p2,
                const LittleBrotherRelation& lb2);

/// Pairs (p, q) with [p] <= [q].
StatePairRelation induced_relation(const Partition& p, const LittleBrotherRelation& lb);

/// Uniformly sampled distinct transitions over labels "a", "b", ...; each
/// state terminates with probability @p termination_density; state 0 is
/// initial. Throws std::invalid_argument on infeasible counts.
Lts random_lts(std::size_t num_states, std::size_t num_transitions, std::size_t num_labels,
               double termination_density, std::uint64_t seed);

/// Label name used by random_lts for id @p a.
std::string generated_label_name(LabelId a);

} // namespace pbisim

#endif
