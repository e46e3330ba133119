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

#include "pbisim/refine.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <stdexcept>

namespace pbisim {

namespace {

std::uint64_t pair_key(BlockId little, BlockId big) { return (std::uint64_t{little} << 32) | big; }

void merge_into(std::vector<ParentId>& acc, const std::vector<ParentId>& more, std::vector<ParentId>& buffer) {
    buffer.clear();
    std::set_union(acc.begin(), acc.end(), more.begin(), more.end(), std::back_inserter(buffer));
    acc.swap(buffer);
}

} // namespace

void write_stats(std::ostream& out, const RefinementStats& stats) {
    out << "iterations=" << stats.iterations << "\n"
        << "splits=" << stats.splits << "\n"
        << "lb_deletions=" << stats.lb_deletions << "\n"
        << "peak_blocks=" << stats.peak_blocks << "\n";
}

RefinementState::RefinementState(const Lts& lts, const BisimActionSet& b, Partition p,
                                 LittleBrotherRelation rel, std::span<const ParentId> parent_of_block)
    : lts_(&lts), b_(b), pair_(lts, std::move(p), std::move(rel), parent_of_block),
      is_dirty_(lts.num_states(), 0) {
    stats_.peak_blocks = pair_.partition().num_blocks();
    if (pair_.parents().num_parents() > 1) {
        // Keys were never computed against these parents.
        for (StateId s = 0; s < lts.num_states(); ++s) {
            mark_dirty(s);
        }
        for (BlockId q = 0; q < pair_.partition().num_blocks(); ++q) {
            enqueue_incident(q);
        }
        refine_lb_step();
    }
}

// p below q forces p and q to be bisimilar over the labels in B alone, with
// termination ignored: the preorder restricted to those moves satisfies both
// transfer conditions. Classes of that bisimulation bound the initial pair.
RefinementState RefinementState::initial_partition(const Lts& lts, const BisimActionSet& b) {
    std::vector<BlockId> b_class(lts.num_states(), 0);
    if (!b.empty()) {
        std::vector<Transition> moves;
        for (const auto& t : lts.transitions()) {
            if (b.contains(t.label)) {
                moves.push_back(t);
            }
        }
        const Lts restricted(lts.num_states(), lts.label_names(), std::move(moves));
        const auto all = BisimActionSet::all(restricted);
        auto inner = make_initial(restricted, all, b_class);
        while (inner.step()) {
        }
        for (StateId s = 0; s < lts.num_states(); ++s) {
            b_class[s] = inner.pair().partition().block_of(s);
        }
    }
    return make_initial(lts, b, b_class);
}

RefinementState RefinementState::make_initial(const Lts& lts, const BisimActionSet& b,
                                              std::span<const BlockId> b_class) {
    // Key: B-class, termination flag, then the sorted outgoing labels.
    std::map<std::vector<LabelId>, BlockId> ids;
    std::vector<std::vector<LabelId>> labels_of_block;
    std::vector<std::uint8_t> term_of_block;
    std::vector<BlockId> class_of_block;
    std::vector<BlockId> block_of(lts.num_states());
    std::vector<LabelId> key;
    for (StateId s = 0; s < lts.num_states(); ++s) {
        key.assign({b_class[s], lts.is_terminating(s) ? 1u : 0u});
        for (const auto& t : lts.out(s)) {
            if (key.size() == 2 || key.back() != t.label) {
                key.push_back(t.label);
            }
        }
        auto [it, fresh] = ids.try_emplace(key, static_cast<BlockId>(labels_of_block.size()));
        if (fresh) {
            labels_of_block.emplace_back(key.begin() + 2, key.end());
            term_of_block.push_back(static_cast<std::uint8_t>(key[1]));
            class_of_block.push_back(key[0]);
        }
        block_of[s] = it->second;
    }

    const std::size_t blocks = labels_of_block.size();
    auto bisim_part = [&b](const std::vector<LabelId>& labels) {
        std::vector<LabelId> result;
        std::copy_if(labels.begin(), labels.end(), std::back_inserter(result),
                     [&b](LabelId a) { return b.contains(a); });
        return result;
    };
    std::vector<std::vector<LabelId>> bisim_labels(blocks);
    for (BlockId p = 0; p < blocks; ++p) {
        bisim_labels[p] = bisim_part(labels_of_block[p]);
    }

    // Candidates share the B-class and the labels in B.
    std::map<std::pair<BlockId, std::vector<LabelId>>, std::vector<BlockId>> groups;
    for (BlockId p = 0; p < blocks; ++p) {
        groups[{class_of_block[p], bisim_labels[p]}].push_back(p);
    }
    LittleBrotherRelation rel(blocks);
    for (const auto& [group_key, members] : groups) {
        for (BlockId p : members) {
            for (BlockId q : members) {
                if (p == q || (term_of_block[p] && !term_of_block[q])) {
                    continue;
                }
                const auto& lp = labels_of_block[p];
                const auto& lq = labels_of_block[q];
                if (std::includes(lq.begin(), lq.end(), lp.begin(), lp.end())) {
                    rel.add(p, q);
                }
            }
        }
    }
    // The B-classes double as the initial parent blocks.
    return RefinementState(lts, b, Partition::from_assignment(block_of), std::move(rel), class_of_block);
}

void RefinementState::invalidate_closures() {
    ++epoch_;
    up_memo_.clear();
    down_memo_.clear();
}

const std::vector<ParentId>& RefinementState::ClosureMemo::get(ParentId p, const ParentState& parents,
                                                                bool up) {
    if (p >= slot.size()) {
        slot.resize(parents.num_parents());
        valid.resize(parents.num_parents(), 0);
    }
    if (!valid[p]) {
        if ((up ? parents.bigger(p) : parents.smaller(p)).empty()) {
            slot[p].assign(1, p);
        } else {
            slot[p] = up ? parents.up_closure(p) : parents.down_closure(p);
        }
        valid[p] = 1;
        filled.push_back(p);
    }
    return slot[p];
}

void RefinementState::ClosureMemo::drop(const std::vector<ParentId>& ps) {
    for (ParentId p : ps) {
        if (p < valid.size()) {
            valid[p] = 0;
        }
    }
}

void RefinementState::ClosureMemo::clear() {
    for (ParentId p : filled) {
        valid[p] = 0;
    }
    filled.clear();
}

const std::vector<ParentId>& RefinementState::up_of(ParentId p) {
    return up_memo_.get(p, pair_.parents(), true);
}

const std::vector<ParentId>& RefinementState::down_of(ParentId p) {
    return down_memo_.get(p, pair_.parents(), false);
}

// Segment per label: label, |down|, down..., and for labels in B also
// |up|, up... . "down" is everything below some reached parent, "up"
// everything above one.
void RefinementState::append_label(std::vector<std::uint32_t>& key, LabelId a,
                                   std::vector<ParentId>& targets) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    auto emit = [&key](const std::vector<ParentId>& set) {
        key.push_back(static_cast<std::uint32_t>(set.size()));
        key.insert(key.end(), set.begin(), set.end());
    };
    key.push_back(a);
    if (targets.size() == 1) {
        emit(down_of(targets[0]));
        if (b_.contains(a)) {
            emit(up_of(targets[0]));
        }
        return;
    }
    scratch_.clear();
    for (ParentId p : targets) {
        merge_into(scratch_, down_of(p), buffer_);
    }
    emit(scratch_);
    if (b_.contains(a)) {
        scratch_.clear();
        for (ParentId p : targets) {
            merge_into(scratch_, up_of(p), buffer_);
        }
        emit(scratch_);
    }
}

std::vector<std::uint32_t> RefinementState::state_key(StateId s) {
    std::vector<std::uint32_t> key;
    std::vector<ParentId> targets;
    const auto out = lts_->out(s);
    for (std::size_t i = 0; i < out.size();) {
        const LabelId a = out[i].label;
        targets.clear();
        for (; i < out.size() && out[i].label == a; ++i) {
            targets.push_back(pair_.parent_of_state(out[i].target));
        }
        append_label(key, a, targets);
    }
    return key;
}

RefinementState::BlockKey RefinementState::member_key(StateId s) {
    return {state_key(s), target_key(s)};
}

const RefinementState::BlockKey& RefinementState::cached_key(BlockId b) {
    if (key_epoch_[b] != epoch_) {
        key_cache_[b] = member_key(pair_.partition().members(b).front());
        key_epoch_[b] = epoch_;
    }
    return key_cache_[b];
}

std::vector<std::uint32_t> RefinementState::block_key(BlockId b) {
    std::vector<std::uint32_t> key;
    std::vector<ParentId> targets;
    const auto& row = pair_.counters().row(b);
    for (auto it = row.begin(); it != row.end();) {
        const LabelId a = CounterTables::row_label(it->first);
        targets.clear();
        for (; it != row.end() && CounterTables::row_label(it->first) == a; ++it) {
            targets.push_back(CounterTables::row_parent(it->first));
        }
        append_label(key, a, targets);
    }
    return key;
}

std::vector<std::uint32_t> RefinementState::target_key(StateId s) const {
    std::vector<std::uint32_t> key;
    const auto out = lts_->out(s);
    for (std::size_t i = 0; i < out.size();) {
        const LabelId a = out[i].label;
        const std::size_t head = key.size();
        key.push_back(a);
        key.push_back(0);
        for (; i < out.size() && out[i].label == a; ++i) {
            key.push_back(pair_.parent_of_state(out[i].target));
        }
        std::sort(key.begin() + static_cast<std::ptrdiff_t>(head + 2), key.end());
        key.erase(std::unique(key.begin() + static_cast<std::ptrdiff_t>(head + 2), key.end()), key.end());
        key[head + 1] = static_cast<std::uint32_t>(key.size() - head - 2);
    }
    return key;
}

// Whether a block may stay below another: every parent little reaches by a
// lies in big's down set for a, and for labels in B every parent big reaches
// lies in little's up set. Down and up sets are closed, so testing the
// reached parents alone suffices.
bool RefinementState::covered(const BlockKey& little, const BlockKey& big) const {
    auto skip = [this](const std::vector<std::uint32_t>& k, std::size_t pos) {
        const LabelId a = k[pos];
        pos += 2 + k[pos + 1];
        if (b_.contains(a)) {
            pos += 1 + k[pos];
        }
        return pos;
    };
    // Every entry of the counted run at t[pt] occurs in the counted run at
    // c[pc].
    auto inside = [](const std::vector<std::uint32_t>& t, std::size_t pt, const std::vector<std::uint32_t>& c,
                     std::size_t pc) {
        const auto first = c.begin() + static_cast<std::ptrdiff_t>(pc + 1);
        const auto last = first + c[pc];
        for (std::size_t k = 0; k < t[pt]; ++k) {
            if (!std::binary_search(first, last, t[pt + 1 + k])) {
                return false;
            }
        }
        return true;
    };
    const auto& lt = little.targets;
    const auto& bt = big.targets;
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t ic = 0;
    std::size_t jc = 0;
    while (i < lt.size() || j < bt.size()) {
        if (j >= bt.size() || (i < lt.size() && lt[i] < bt[j])) {
            // little reaches something with a label big lacks entirely
            return false;
        }
        if (i >= lt.size() || bt[j] < lt[i]) {
            if (b_.contains(bt[j])) {
                return false;
            }
            j += 2 + bt[j + 1];
            jc = skip(big.closure, jc);
            continue;
        }
        const LabelId a = lt[i];
        if (!inside(lt, i + 1, big.closure, jc + 1)) {
            return false;
        }
        if (b_.contains(a) && !inside(bt, j + 1, little.closure, ic + 2 + little.closure[ic + 1])) {
            return false;
        }
        i += 2 + lt[i + 1];
        j += 2 + bt[j + 1];
        ic = skip(little.closure, ic);
        jc = skip(big.closure, jc);
    }
    return true;
}

void RefinementState::mark_dirty(StateId s) {
    if (!is_dirty_[s]) {
        is_dirty_[s] = 1;
        dirty_.push_back(s);
    }
}

void RefinementState::mark_predecessors(const std::vector<ParentId>& parents, bool bisim_labels_only) {
    const auto transitions = lts_->transitions();
    for (ParentId p : parents) {
        for (BlockId c : pair_.parents().children(p)) {
            for (StateId r : pair_.partition().members(c)) {
                for (std::uint32_t t : lts_->in(r)) {
                    if (!bisim_labels_only || b_.contains(transitions[t].label)) {
                        mark_dirty(transitions[t].source);
                    }
                }
            }
        }
    }
}

void RefinementState::enqueue_incident(BlockId b) {
    auto push = [this](BlockId little, BlockId big) {
        if (pending_set_.insert(pair_key(little, big)).second) {
            pending_.emplace_back(little, big);
        }
    };
    const auto& rel = pair_.relation();
    for (BlockId q : rel.bigger(b)) {
        push(b, q);
    }
    for (BlockId q : rel.smaller(b)) {
        push(q, b);
    }
}

void RefinementState::refine_partition_step() {
    if (dirty_.empty()) {
        return;
    }
    std::vector<StateId> dirty = std::move(dirty_);
    dirty_.clear();
    ++epoch_;
    const auto& part = pair_.partition();
    std::sort(dirty.begin(), dirty.end(), [&part](StateId x, StateId y) {
        return std::pair(part.block_of(x), x) < std::pair(part.block_of(y), y);
    });

    using Key = std::vector<std::uint32_t>;
    for (std::size_t lo = 0; lo < dirty.size();) {
        const BlockId b = part.block_of(dirty[lo]);
        std::size_t hi = lo;
        while (hi < dirty.size() && part.block_of(dirty[hi]) == b) {
            ++hi;
        }
        const std::span<const StateId> states(dirty.data() + lo, hi - lo);
        lo = hi;

        // States never marked keep the block's common key; one of them
        // stands in for all.
        const bool has_rest = states.size() < part.size(b);
        Key rest_key;
        StateId rest_state = 0;
        if (has_rest) {
            for (StateId s : part.members(b)) {
                if (!is_dirty_[s]) {
                    rest_state = s;
                    rest_key = state_key(s);
                    break;
                }
            }
        }
        std::map<Key, std::vector<StateId>> groups;
        for (StateId s : states) {
            Key k = state_key(s);
            if (has_rest && k == rest_key) {
                continue;
            }
            groups[std::move(k)].push_back(s);
        }
        if (groups.empty() || (!has_rest && groups.size() == 1)) {
            enqueue_incident(b);
            continue;
        }

        std::vector<BlockId> pieces{b};
        std::vector<BlockKey> keys;
        if (has_rest) {
            keys.push_back({std::move(rest_key), target_key(rest_state)});
        } else {
            auto largest = groups.begin();
            for (auto it = groups.begin(); it != groups.end(); ++it) {
                if (it->second.size() > largest->second.size()) {
                    largest = it;
                }
            }
            keys.push_back({largest->first, target_key(largest->second.front())});
            groups.erase(largest);
        }
        for (auto& [k, members] : groups) {
            pieces.push_back(pair_.split_block(b, members));
            keys.push_back({k, target_key(members.front())});
            ++stats_.splits;
        }
        // Siblings share a parent, so these deletions never change the
        // parent relation.
        for (std::size_t x = 0; x < pieces.size(); ++x) {
            for (std::size_t y = 0; y < pieces.size(); ++y) {
                if (x != y && pair_.relation().contains_strict(pieces[x], pieces[y]) &&
                    !covered(keys[x], keys[y])) {
                    pair_.remove_pair(pieces[x], pieces[y]);
                    ++stats_.lb_deletions;
                }
            }
        }
        for (BlockId piece : pieces) {
            enqueue_incident(piece);
        }
    }
    for (StateId s : dirty) {
        is_dirty_[s] = 0;
    }
    stats_.peak_blocks = std::max(stats_.peak_blocks, part.num_blocks());
}

void RefinementState::delete_pair(BlockId little, BlockId big) {
    if (pair_.removal_drops_parent_edge(little, big)) {
        // A parent above the big one keeps its down closure iff it still
        // reaches the little one once the edge is gone; dually below.
        const ParentId lp = pair_.parents().parent_of(little);
        const ParentId bp = pair_.parents().parent_of(big);
        const auto& parents = pair_.parents();
        const auto above = parents.up_closure(bp);
        const auto below = b_.empty() ? std::vector<ParentId>{} : parents.down_closure(lp);
        pair_.remove_pair(little, big);
        std::vector<ParentId> changed;
        const auto still_above = parents.up_closure(lp);
        std::set_difference(above.begin(), above.end(), still_above.begin(), still_above.end(),
                            std::back_inserter(changed));
        down_memo_.drop(changed);
        mark_predecessors(changed, false);
        bool moved = !changed.empty();
        changed.clear();
        if (b_.empty()) {
            up_memo_.clear();
        } else {
            const auto still_below = parents.down_closure(bp);
            std::set_difference(below.begin(), below.end(), still_below.begin(), still_below.end(),
                                std::back_inserter(changed));
            up_memo_.drop(changed);
            mark_predecessors(changed, true);
        }
        if (moved || !changed.empty()) {
            ++epoch_;
        }
    } else {
        pair_.remove_pair(little, big);
    }
    ++stats_.lb_deletions;
}

void RefinementState::refine_lb_step() {
    while (!pending_.empty() || !dirty_.empty()) {
        if (!dirty_.empty()) {
            refine_partition_step();
            continue;
        }
        const auto [little, big] = pending_.front();
        pending_.pop_front();
        pending_set_.erase(pair_key(little, big));
        if (!pair_.relation().contains_strict(little, big)) {
            continue;
        }
        // Blocks are uniform here, so any member speaks for its block.
        if (key_cache_.size() < pair_.partition().num_blocks()) {
            key_cache_.resize(pair_.partition().num_blocks());
            key_epoch_.resize(pair_.partition().num_blocks(), 0);
        }
        if (!covered(cached_key(little), cached_key(big))) {
            delete_pair(little, big);
        }
    }
}

bool RefinementState::step() {
    auto splitter = pair_.find_splitter();
    if (!splitter) {
        return false;
    }
    ++stats_.iterations;
    const ParentId target = splitter->parent;
    const bool isolated = pair_.parents().isolated(target);
    std::vector<ParentId> above;
    std::vector<ParentId> below;
    if (!isolated) {
        above = pair_.parents().up_closure(target);
        below = pair_.parents().down_closure(target);
    }
    const auto split = pair_.split_parent(*splitter);
    // Only closures through the split parent move.
    ++epoch_;
    down_memo_.drop(isolated ? std::vector<ParentId>{target} : above);
    down_memo_.drop({split.fresh});
    up_memo_.drop(isolated ? std::vector<ParentId>{target} : below);
    up_memo_.drop({split.fresh});
    // States reaching the split parent only through its kept half all see
    // the same renaming, unless the kept half's closure lost parents that
    // hung below (above) the fresh half only. Other parents whose closures
    // passed through the split one are re-keyed.
    for (StateId s : split.fresh_predecessors) {
        mark_dirty(s);
    }
    auto strict = [&split](std::vector<ParentId> closure) {
        std::erase(closure, split.kept);
        std::erase(closure, split.fresh);
        return closure;
    };
    if (isolated) {
        above.assign(1, target);
        below.assign(1, target);
    }
    const bool down_kept = strict(pair_.parents().down_closure(split.kept)) == strict(below);
    const bool up_kept = b_.empty() || strict(pair_.parents().up_closure(split.kept)) == strict(above);
    std::erase(above, target);
    std::erase(below, target);
    if (!down_kept) {
        above.push_back(target);
    } else if (!up_kept) {
        below.push_back(target);
    }
    mark_predecessors(above, false);
    if (!b_.empty()) {
        mark_predecessors(below, true);
    }
    refine_partition_step();
    refine_lb_step();
    return true;
}

bool RefinementState::converged() const {
    return pair_.parents().num_parents() == pair_.partition().num_blocks();
}

RefinementResult RefinementState::result() const {
    const auto& part = pair_.partition();
    const std::size_t blocks = part.num_blocks();
    std::vector<std::pair<StateId, BlockId>> order;
    order.reserve(blocks);
    for (BlockId b = 0; b < blocks; ++b) {
        auto m = part.members(b);
        order.emplace_back(*std::min_element(m.begin(), m.end()), b);
    }
    std::sort(order.begin(), order.end());
    std::vector<BlockId> renumber(blocks);
    for (BlockId i = 0; i < blocks; ++i) {
        renumber[order[i].second] = i;
    }
    std::vector<BlockId> block_of(part.num_states());
    for (StateId s = 0; s < part.num_states(); ++s) {
        block_of[s] = renumber[part.block_of(s)];
    }
    RefinementResult r{Partition::from_assignment(block_of), LittleBrotherRelation(blocks), stats_};
    for (const auto& [little, big] : pair_.relation().pairs()) {
        r.lb.add(renumber[little], renumber[big]);
    }
    return r;
}

RefinementResult run(const Lts& lts, const BisimActionSet& b, const RefinementOptions& options) {
    if (auto violations = validate(lts); !violations.empty()) {
        throw std::invalid_argument("invalid transition system: " + violations.front());
    }
    if (b.universe() != lts.num_labels()) {
        throw std::invalid_argument("bisimulation action set does not match the alphabet");
    }
    auto state = RefinementState::initial_partition(lts, b);
    if (options.on_iteration) {
        options.on_iteration(state);
    }
    while (state.step()) {
        if (options.on_iteration) {
            options.on_iteration(state);
        }
    }
    return state.result();
}

} // namespace pbisim
