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

/** @file partition.hpp
 *  @brief Partition-relation pairs with a parent partition and counters.
 *
 *  A partition-relation pair (P, <=) represents a preorder over states: P
 *  groups states considered equivalent and <= ("little brother") relates
 *  blocks whose states are below the states of another block.
 *
 *  Refinement keeps a second, coarser partition P' (the parent partition)
 *  whose blocks are unions of child blocks. The child relation induces
 *  P' <=' Q' iff P' = Q' or some child pair (P, Q), P in P', Q in Q', has
 *  P <= Q. The count of such child pairs is kept in cnt_lb(P', Q').
 *
 *  Transitions are summarised at three levels:
 *   - per state: the number of a-transitions from p into parent block P'
 *     (one counter shared by all those transitions);
 *   - per child block: ae(P, a, P'), the number of states of P with an
 *     a-transition into P'. P exists-a P' iff ae > 0, and P forall-a P'
 *     iff ae = |P|;
 *   - cnt_al(P, a, P'), the number of Q' with P' <=' Q' and P forall-a Q'.
 */

#ifndef PBISIM_PARTITION_HPP
#define PBISIM_PARTITION_HPP

#include "pbisim/lts.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pbisim {

using BlockId = std::uint32_t;
using ParentId = std::uint32_t;

/// Refinable partition over 0..n-1. Members of a block occupy a contiguous
/// range of one permutation array, so splitting off k states costs O(k).
class Partition {
public:
    Partition() = default;
    /// One block holding every state (no blocks when @p num_states is 0).
    explicit Partition(std::size_t num_states);
    /// Blocks numbered as in @p block_of, which must use every id in
    /// 0..max without gaps.
    static Partition from_assignment(std::span<const BlockId> block_of);

    std::size_t num_states() const { return block_of_.size(); }
    std::size_t num_blocks() const { return begin_.size(); }
    BlockId block_of(StateId s) const { return block_of_[s]; }
    std::size_t size(BlockId b) const { return end_[b] - begin_[b]; }
    std::span<const StateId> members(BlockId b) const {
        return std::span<const StateId>(elements_).subspan(begin_[b], end_[b] - begin_[b]);
    }
    std::vector<StateId> sorted_members(BlockId b) const;

    /// Moves @p states (distinct members of @p b, not all of them) into a
    /// new block and returns its id.
    BlockId split_off(BlockId b, std::span<const StateId> states);

    /// Coverage and disjointness of the blocks.
    bool check_invariants() const;

private:
    std::vector<StateId> elements_;
    std::vector<std::uint32_t> position_;
    std::vector<BlockId> block_of_;
    std::vector<std::uint32_t> begin_;
    std::vector<std::uint32_t> end_;
};

/// Little-brother relation between blocks. Only strict pairs (P != Q) are
/// stored; every query treats the relation as reflexive.
class LittleBrotherRelation {
public:
    LittleBrotherRelation() = default;
    explicit LittleBrotherRelation(std::size_t num_blocks) : bigger_(num_blocks), smaller_(num_blocks) {}

    void resize(std::size_t num_blocks);
    std::size_t num_blocks() const { return bigger_.size(); }

    bool add(BlockId little, BlockId big);
    bool remove(BlockId little, BlockId big);
    /// Reflexive membership test.
    bool related(BlockId little, BlockId big) const;
    bool contains_strict(BlockId little, BlockId big) const;

    const std::unordered_set<BlockId>& bigger(BlockId b) const { return bigger_[b]; }
    const std::unordered_set<BlockId>& smaller(BlockId b) const { return smaller_[b]; }

    std::size_t num_pairs() const { return num_pairs_; }
    /// Strict pairs sorted lexicographically.
    std::vector<std::pair<BlockId, BlockId>> pairs() const;

    bool operator==(const LittleBrotherRelation& other) const { return pairs() == other.pairs(); }

private:
    std::vector<std::unordered_set<BlockId>> bigger_;
    std::vector<std::unordered_set<BlockId>> smaller_;
    std::size_t num_pairs_ = 0;
};

/// Blocks Q with Q <= P under the reflexive-transitive closure, sorted.
std::vector<BlockId> lbc(BlockId block, const LittleBrotherRelation& rel);
/// Blocks Q with P <= Q under the reflexive-transitive closure, sorted.
std::vector<BlockId> bbc(BlockId block, const LittleBrotherRelation& rel);

/// Debug dump: one `B<i>: {s,...}` line per block, then one `B<i> <= B<j>`
/// line per strict pair.
void dump_partition_pair(std::ostream& out, const Partition& p, const LittleBrotherRelation& rel);

/// The parent partition P', its induced relation via cnt_lb and the
/// worklist of compound parent blocks.
class ParentState {
public:
    std::size_t num_parents() const { return children_.size(); }
    ParentId parent_of(BlockId b) const { return parent_of_[b]; }
    const std::vector<BlockId>& children(ParentId p) const { return children_[p]; }
    std::size_t state_count(ParentId p) const { return state_count_[p]; }

    std::uint32_t cnt_lb(ParentId little, ParentId big) const;
    /// Reflexive induced relation.
    bool related(ParentId little, ParentId big) const {
        return little == big || cnt_lb(little, big) > 0;
    }
    /// Distinct parents Q' with p <=' Q' (strict, one step).
    const std::unordered_set<ParentId>& bigger(ParentId p) const { return up_[p]; }
    const std::unordered_set<ParentId>& smaller(ParentId p) const { return down_[p]; }
    /// No induced pair with any other parent block.
    bool isolated(ParentId p) const { return up_[p].empty() && down_[p].empty(); }

    /// Reflexive-transitive closures under <=', sorted.
    std::vector<ParentId> up_closure(ParentId p) const;
    std::vector<ParentId> down_closure(ParentId p) const;

    bool is_compound(ParentId p) const { return children_[p].size() > 1; }

private:
    friend class PartitionPair;

    static std::uint64_t key(ParentId x, ParentId y) { return (std::uint64_t{x} << 32) | y; }
    void increment(ParentId little, ParentId big);
    void decrement(ParentId little, ParentId big);
    void add_child(ParentId p, BlockId b, std::size_t states);
    void remove_child(BlockId b, std::size_t states);
    void enqueue(ParentId p);
    static void set_bit(std::vector<std::uint64_t>& row, ParentId q, bool on);

    std::vector<ParentId> parent_of_;
    std::vector<std::uint32_t> child_pos_;
    std::vector<std::vector<BlockId>> children_;
    std::vector<std::size_t> state_count_;
    std::unordered_map<std::uint64_t, std::uint32_t> cnt_lb_;
    std::vector<std::unordered_set<ParentId>> up_;
    std::vector<std::unordered_set<ParentId>> down_;
    // Same edges as up_/down_, one bit per parent.
    std::vector<std::vector<std::uint64_t>> up_bits_;
    std::vector<std::vector<std::uint64_t>> down_bits_;
    std::deque<ParentId> worklist_;
    std::vector<std::uint8_t> queued_;
};

/// Transition counters indexed by states, child blocks and parent blocks.
class CounterTables {
public:
    /// Number of a-transitions from the source of transition @p t into the
    /// parent block containing its target.
    std::uint32_t state_count(std::uint32_t t) const { return value_[ref_[t]]; }

    /// ae(P, a, P'): number of states of P with an a-transition into P'.
    std::uint32_t ae(BlockId b, LabelId a, ParentId p) const;
    /// Nonzero ae entries of one block, ordered by (label, parent).
    const std::map<std::uint64_t, std::uint32_t>& row(BlockId b) const { return ae_[b]; }

    static LabelId row_label(std::uint64_t k) { return static_cast<LabelId>(k >> 32); }
    static ParentId row_parent(std::uint64_t k) { return static_cast<ParentId>(k & 0xffffffffu); }

private:
    friend class PartitionPair;

    static std::uint64_t key(LabelId a, ParentId p) { return (std::uint64_t{a} << 32) | p; }
    void bump(BlockId b, LabelId a, ParentId p, int delta);
    std::uint32_t allocate() {
        value_.push_back(0);
        return static_cast<std::uint32_t>(value_.size() - 1);
    }

    std::vector<std::uint32_t> ref_;
    std::vector<std::uint32_t> value_;
    std::vector<std::map<std::uint64_t, std::uint32_t>> ae_;
};

/// A candidate splitter: child blocks forming a proper part of one parent.
struct Splitter {
    ParentId parent;
    std::vector<BlockId> blocks;
};

struct ParentSplit {
    /// Id still used by the larger half (the old id of the split parent).
    ParentId kept;
    /// Id of the newly created, smaller half.
    ParentId fresh;
    /// Which of the two now holds the splitter's blocks.
    ParentId splitter_side;
    /// Sources of transitions into the fresh half, without duplicates.
    std::vector<StateId> fresh_predecessors;
};

/// Child partition, little-brother relation, parent partition and counters
/// of one refinement run, kept mutually consistent.
class PartitionPair {
public:
    /// Parent of block b is @p parent_of_block[b] (ids without gaps), or
    /// {S} when empty. @p lts must outlive this object.
    PartitionPair(const Lts& lts, Partition partition, LittleBrotherRelation rel,
                  std::span<const ParentId> parent_of_block = {});

    const Lts& lts() const { return *lts_; }
    const Partition& partition() const { return partition_; }
    const LittleBrotherRelation& relation() const { return rel_; }
    const ParentState& parents() const { return parents_; }
    const CounterTables& counters() const { return counters_; }
    ParentId parent_of_state(StateId s) const { return parents_.parent_of(partition_.block_of(s)); }

    bool add_pair(BlockId little, BlockId big);
    /// True when removing the pair would drop an induced pair between two
    /// distinct parent blocks.
    bool removal_drops_parent_edge(BlockId little, BlockId big) const;
    bool remove_pair(BlockId little, BlockId big);

    /// Moves @p moved out of block @p b into a new sibling block under the
    /// same parent. The new block inherits every relation pair of @p b and
    /// is related to @p b in both directions.
    BlockId split_block(BlockId b, std::span<const StateId> moved);

    /// None iff every parent block has exactly one child. Otherwise the
    /// splitter lies in the first compound parent of the worklist and holds
    /// at most half of its states unless the orientation rule (the splitter
    /// must not be strictly below its complement) forces the complement.
    std::optional<Splitter> find_splitter();

    /// Replaces the splitter's parent P' by S' and P' \ S'; the smaller of
    /// the two gets the fresh id. Throws std::invalid_argument if the
    /// splitter is not a proper, non-empty union of children of one parent.
    ParentSplit split_parent(const Splitter& splitter);

    bool exists_tr(BlockId b, LabelId a, ParentId p) const { return counters_.ae(b, a, p) > 0; }
    /// Every state of @p b has an a-transition into the union of the
    /// parent blocks in @p parent_union.
    bool forall_tr(BlockId b, LabelId a, std::span<const ParentId> parent_union) const;
    std::uint32_t cnt_al(BlockId b, LabelId a, ParentId p) const;
    std::uint32_t cnt_lb(ParentId little, ParentId big) const { return parents_.cnt_lb(little, big); }

    std::vector<StateId> parent_states(ParentId p) const;

private:
    void grow_blocks();

    const Lts* lts_;
    Partition partition_;
    LittleBrotherRelation rel_;
    ParentState parents_;
    CounterTables counters_;
};

} // namespace pbisim

#endif
