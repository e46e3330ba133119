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

/** @file quotient.hpp
 *  @brief Minimized system over the classes of a stable partition pair.
 *
 *  P -a-> Q is installed when every state of P has an a-move into Q and
 *  no R strictly above Q receives such a move from all of P. For labels
 *  in B the move to Q is dropped only when Q sits strictly between two
 *  such targets R1 < Q < R2.
 */

#ifndef PBISIM_QUOTIENT_HPP
#define PBISIM_QUOTIENT_HPP

#include "pbisim/aut_io.hpp"
#include "pbisim/lts.hpp"
#include "pbisim/partition.hpp"

#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace pbisim {

struct QuotientLts {
    /// State i is class i.
    Lts lts;
    /// Original states per class, sorted.
    std::vector<std::vector<StateId>> class_members;
    /// Antisymmetric order between classes.
    LittleBrotherRelation class_lb;
    /// Moves over labels in B dropped because the target had a smaller and
    /// a bigger sibling target.
    std::size_t suppressed_middle = 0;

    /// Class of each original state; nullopt for states whose class was
    /// pruned. @p num_states is the size of the original system.
    std::vector<std::optional<StateId>> class_of_state(std::size_t num_states) const;
};

/// Class order in the format of dump_partition_pair: members are original
/// states, block ids are class ids.
void dump_class_order(std::ostream& out, const QuotientLts& q);

/// Merges the strongly connected components of @p lb. Merged blocks are
/// numbered by their smallest state.
std::pair<Partition, LittleBrotherRelation> merge_mutual(const Partition& p, const LittleBrotherRelation& lb);

/// Quotient of @p lts by a merged stable pair. The initial class is the
/// class of the initial state, if any.
QuotientLts build_quotient(const Lts& lts, const Partition& p, const LittleBrotherRelation& lb,
                           const BisimActionSet& b);

/// Drops classes not reachable from the initial class. Without an initial
/// class the input is returned unchanged and a warning is added to @p diag.
QuotientLts prune_unreachable(const QuotientLts& q, Diagnostics* diag = nullptr);

/// Refine, merge and build the quotient; prunes when @p prune is set and
/// @p lts has an initial state.
QuotientLts minimize(const Lts& lts, const BisimActionSet& b, bool prune = true, Diagnostics* diag = nullptr);

} // namespace pbisim

#endif
