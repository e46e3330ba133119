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

/** @file refine.hpp
 *  @brief Two-phase refinement to the coarsest stable partition pair.
 *
 *  Each iteration splits one parent block, then
 *   1. splits child blocks until, for every label a and parent R', all
 *      states of a block agree on whether they reach the big-brother
 *      closure of R' by a (and, for a in B, the little-brother closure);
 *   2. deletes little-brother pairs P <= Q whose behaviour is not covered:
 *      whatever P reaches by a must be reachable upwards by Q, and whatever
 *      Q reaches by b in B must be reachable downwards by P.
 *  Deleting a pair can drop an induced parent pair, which shrinks closures
 *  and sends the affected states back through step 1. The loop ends when
 *  the parent partition equals the child partition.
 *
 *  Brother closures are taken reflexive-transitively over the induced
 *  parent relation. With that reading every split and every deletion only
 *  removes what the partial bisimilarity preorder does not contain, so the
 *  fixpoint is exactly that preorder.
 */

#ifndef PBISIM_REFINE_HPP
#define PBISIM_REFINE_HPP

#include "pbisim/lts.hpp"
#include "pbisim/partition.hpp"

#include <deque>
#include <functional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pbisim {

struct RefinementStats {
    std::size_t iterations = 0;
    std::size_t splits = 0;
    std::size_t lb_deletions = 0;
    std::size_t peak_blocks = 0;
};

/// key=value lines.
void write_stats(std::ostream& out, const RefinementStats& stats);

struct RefinementResult {
    /// Blocks numbered by their smallest state.
    Partition partition;
    LittleBrotherRelation lb;
    RefinementStats stats;
};

class RefinementState;

struct RefinementOptions {
    /// Called after every completed iteration (parent split plus both
    /// phases), and once for the initial partition.
    std::function<void(const RefinementState&)> on_iteration;
};

/// Mutable state of one refinement run. Not copyable: it refers to the
/// Lts it was built from, which must outlive it.
class RefinementState {
public:
    /// Blocks by (terminates, outgoing labels, bisimulation class over the
    /// labels in B alone); P <= Q initially iff the labels of P are a subset
    /// of those of Q, both agree on labels in B, termination of P implies
    /// termination of Q and both share the B-bisimulation class. Parent
    /// blocks are the B-bisimulation classes, already stabilized against.
    static RefinementState initial_partition(const Lts& lts, const BisimActionSet& b);

    RefinementState(const RefinementState&) = delete;
    RefinementState& operator=(const RefinementState&) = delete;
    RefinementState(RefinementState&&) = default;

    /// Phase 1: re-keys the states marked since the last call and splits
    /// their blocks until all members agree again.
    void refine_partition_step();
    /// Phase 2: deletes uncovered pairs until none remain, re-running
    /// phase 1 whenever a deletion shrinks a brother closure.
    void refine_lb_step();

    /// One full iteration. False (and no change) when P = P'.
    bool step();
    bool converged() const;

    RefinementResult result() const;

    const PartitionPair& pair() const { return pair_; }
    const BisimActionSet& bisim_actions() const { return b_; }
    const RefinementStats& stats() const { return stats_; }

    /// Per-label description of what a state can reach, in terms of
    /// closures of parent blocks. Exposed for tests.
    std::vector<std::uint32_t> state_key(StateId s);
    std::vector<std::uint32_t> block_key(BlockId b);

private:
    RefinementState(const Lts& lts, const BisimActionSet& b, Partition p, LittleBrotherRelation rel,
                    std::span<const ParentId> parent_of_block);
    static RefinementState make_initial(const Lts& lts, const BisimActionSet& b,
                                        std::span<const BlockId> b_class);

    const std::vector<ParentId>& up_of(ParentId p);
    const std::vector<ParentId>& down_of(ParentId p);
    void append_label(std::vector<std::uint32_t>& key, LabelId a, std::vector<ParentId>& targets);
    /// Closure key plus the reached parents per label, without closures.
    struct BlockKey {
        std::vector<std::uint32_t> closure;
        std::vector<std::uint32_t> targets;
    };
    std::vector<std::uint32_t> target_key(StateId s) const;
    BlockKey member_key(StateId s);
    /// Key of a member, kept until closures change or blocks are re-keyed.
    /// The cache must already cover @p b.
    const BlockKey& cached_key(BlockId b);
    bool covered(const BlockKey& little, const BlockKey& big) const;

    void mark_dirty(StateId s);
    void mark_predecessors(const std::vector<ParentId>& parents, bool bisim_labels_only);
    void enqueue_incident(BlockId b);
    void delete_pair(BlockId little, BlockId big);
    void invalidate_closures();

    const Lts* lts_;
    BisimActionSet b_;
    PartitionPair pair_;
    RefinementStats stats_;

    std::vector<StateId> dirty_;
    std::vector<std::uint8_t> is_dirty_;
    std::deque<std::pair<BlockId, BlockId>> pending_;
    std::unordered_set<std::uint64_t> pending_set_;
    struct ClosureMemo {
        std::vector<std::vector<ParentId>> slot;
        std::vector<std::uint8_t> valid;
        std::vector<ParentId> filled;
        const std::vector<ParentId>& get(ParentId p, const ParentState& parents, bool up);
        void drop(const std::vector<ParentId>& ps);
        void clear();
    };
    ClosureMemo up_memo_;
    ClosureMemo down_memo_;
    std::vector<BlockKey> key_cache_;
    std::vector<std::uint64_t> key_epoch_;
    std::uint64_t epoch_ = 1;
    std::vector<ParentId> scratch_;
    std::vector<ParentId> buffer_;
};

/// Coarsest stable partition pair of @p lts for bisimulation set @p b.
/// Throws std::invalid_argument if the system fails validate().
RefinementResult run(const Lts& lts, const BisimActionSet& b, const RefinementOptions& options = {});

} // namespace pbisim

#endif
