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

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace pbisim {

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::size_t num_states)
    : elements_(num_states), position_(num_states), block_of_(num_states, 0) {
    for (StateId s = 0; s < num_states; ++s) {
        elements_[s] = s;
        position_[s] = s;
    }
    if (num_states > 0) {
        begin_.push_back(0);
        end_.push_back(static_cast<std::uint32_t>(num_states));
    }
}

Partition Partition::from_assignment(std::span<const BlockId> block_of) {
    Partition p;
    const std::size_t n = block_of.size();
    BlockId num_blocks = 0;
    for (BlockId b : block_of) {
        num_blocks = std::max<BlockId>(num_blocks, b + 1);
    }
    std::vector<std::uint32_t> counts(num_blocks + 1, 0);
    for (BlockId b : block_of) {
        ++counts[b + 1];
    }
    for (BlockId b = 0; b < num_blocks; ++b) {
        if (counts[b + 1] == 0) {
            throw std::invalid_argument("block ids must be contiguous; block " + std::to_string(b) +
                                        " is empty");
        }
        counts[b + 1] += counts[b];
    }
    p.begin_.assign(counts.begin(), counts.end() - 1);
    p.end_ = p.begin_;
    p.elements_.resize(n);
    p.position_.resize(n);
    p.block_of_.assign(block_of.begin(), block_of.end());
    for (StateId s = 0; s < n; ++s) {
        const BlockId b = block_of[s];
        p.position_[s] = p.end_[b];
        p.elements_[p.end_[b]++] = s;
    }
    return p;
}

std::vector<StateId> Partition::sorted_members(BlockId b) const {
    auto m = members(b);
    std::vector<StateId> result(m.begin(), m.end());
    std::sort(result.begin(), result.end());
    return result;
}

BlockId Partition::split_off(BlockId b, std::span<const StateId> states) {
    assert(!states.empty() && states.size() < size(b));
    const auto fresh = static_cast<BlockId>(begin_.size());
    // Swap the moved states to the tail of b's range; the tail becomes the
    // new block.
    std::uint32_t tail = end_[b];
    for (StateId s : states) {
        assert(block_of_[s] == b);
        --tail;
        const std::uint32_t pos = position_[s];
        const StateId other = elements_[tail];
        elements_[pos] = other;
        position_[other] = pos;
        elements_[tail] = s;
        position_[s] = tail;
    }
    begin_.push_back(tail);
    end_.push_back(end_[b]);
    end_[b] = tail;
    for (std::uint32_t i = tail; i < end_[fresh]; ++i) {
        block_of_[elements_[i]] = fresh;
    }
    return fresh;
}

bool Partition::check_invariants() const {
    std::vector<std::uint8_t> seen(block_of_.size(), 0);
    for (BlockId b = 0; b < num_blocks(); ++b) {
        if (size(b) == 0) {
            return false;
        }
        for (StateId s : members(b)) {
            if (s >= seen.size() || seen[s] || block_of_[s] != b) {
                return false;
            }
            seen[s] = 1;
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](std::uint8_t x) { return x != 0; });
}

// ---------------------------------------------------------------------------
// Little-brother relation

void LittleBrotherRelation::resize(std::size_t num_blocks) {
    bigger_.resize(num_blocks);
    smaller_.resize(num_blocks);
}

bool LittleBrotherRelation::add(BlockId little, BlockId big) {
    if (little == big) {
        return false;
    }
    if (!bigger_[little].insert(big).second) {
        return false;
    }
    smaller_[big].insert(little);
    ++num_pairs_;
    return true;
}

bool LittleBrotherRelation::remove(BlockId little, BlockId big) {
    if (little == big || bigger_[little].erase(big) == 0) {
        return false;
    }
    smaller_[big].erase(little);
    --num_pairs_;
    return true;
}

bool LittleBrotherRelation::related(BlockId little, BlockId big) const {
    return little == big || contains_strict(little, big);
}

bool LittleBrotherRelation::contains_strict(BlockId little, BlockId big) const {
    return little != big && bigger_[little].count(big) > 0;
}

std::vector<std::pair<BlockId, BlockId>> LittleBrotherRelation::pairs() const {
    std::vector<std::pair<BlockId, BlockId>> result;
    result.reserve(num_pairs_);
    for (BlockId p = 0; p < bigger_.size(); ++p) {
        for (BlockId q : bigger_[p]) {
            result.emplace_back(p, q);
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

namespace {

template <typename Next>
std::vector<BlockId> closure(BlockId start, std::size_t universe, Next next) {
    std::vector<BlockId> result{start};
    if (next(start).empty()) {
        return result;
    }
    thread_local std::vector<std::uint32_t> stamp;
    thread_local std::uint32_t epoch = 0;
    if (stamp.size() < universe) {
        stamp.resize(universe, 0);
    }
    if (++epoch == 0) {
        std::fill(stamp.begin(), stamp.end(), 0);
        epoch = 1;
    }
    stamp[start] = epoch;
    for (std::size_t i = 0; i < result.size(); ++i) {
        for (BlockId q : next(result[i])) {
            if (stamp[q] != epoch) {
                stamp[q] = epoch;
                result.push_back(q);
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace

std::vector<BlockId> lbc(BlockId block, const LittleBrotherRelation& rel) {
    return closure(block, rel.num_blocks(), [&rel](BlockId b) -> const auto& { return rel.smaller(b); });
}

std::vector<BlockId> bbc(BlockId block, const LittleBrotherRelation& rel) {
    return closure(block, rel.num_blocks(), [&rel](BlockId b) -> const auto& { return rel.bigger(b); });
}

void dump_partition_pair(std::ostream& out, const Partition& p, const LittleBrotherRelation& rel) {
    for (BlockId b = 0; b < p.num_blocks(); ++b) {
        out << "B" << b << ": {";
        bool first = true;
        for (StateId s : p.sorted_members(b)) {
            out << (first ? "" : ",") << s;
            first = false;
        }
        out << "}\n";
    }
    for (const auto& [little, big] : rel.pairs()) {
        out << "B" << little << " <= B" << big << "\n";
    }
}

// ---------------------------------------------------------------------------
// Parent partition

std::uint32_t ParentState::cnt_lb(ParentId little, ParentId big) const {
    auto it = cnt_lb_.find(key(little, big));
    return it == cnt_lb_.end() ? 0 : it->second;
}

void ParentState::increment(ParentId little, ParentId big) {
    if (++cnt_lb_[key(little, big)] == 1 && little != big) {
        up_[little].insert(big);
        down_[big].insert(little);
        set_bit(up_bits_[little], big, true);
        set_bit(down_bits_[big], little, true);
    }
}

void ParentState::decrement(ParentId little, ParentId big) {
    auto it = cnt_lb_.find(key(little, big));
    assert(it != cnt_lb_.end() && it->second > 0);
    if (--it->second == 0) {
        cnt_lb_.erase(it);
        if (little != big) {
            up_[little].erase(big);
            down_[big].erase(little);
            set_bit(up_bits_[little], big, false);
            set_bit(down_bits_[big], little, false);
        }
    }
}

void ParentState::add_child(ParentId p, BlockId b, std::size_t states) {
    if (parent_of_.size() <= b) {
        parent_of_.resize(b + 1);
        child_pos_.resize(b + 1);
    }
    parent_of_[b] = p;
    child_pos_[b] = static_cast<std::uint32_t>(children_[p].size());
    children_[p].push_back(b);
    state_count_[p] += states;
}

void ParentState::remove_child(BlockId b, std::size_t states) {
    const ParentId p = parent_of_[b];
    auto& list = children_[p];
    const std::uint32_t pos = child_pos_[b];
    list[pos] = list.back();
    child_pos_[list[pos]] = pos;
    list.pop_back();
    state_count_[p] -= states;
}

void ParentState::enqueue(ParentId p) {
    if (!queued_[p] && is_compound(p)) {
        queued_[p] = 1;
        worklist_.push_back(p);
    }
}

namespace {

std::vector<ParentId> bit_closure(ParentId start, std::size_t universe,
                                  const std::vector<std::vector<std::uint64_t>>& rows) {
    std::vector<ParentId> result{start};
    if (rows[start].empty()) {
        return result;
    }
    thread_local std::vector<std::uint64_t> seen;
    seen.assign((universe + 63) / 64, 0);
    seen[start / 64] |= std::uint64_t{1} << (start % 64);
    for (std::size_t i = 0; i < result.size(); ++i) {
        const auto& row = rows[result[i]];
        for (std::size_t w = 0; w < row.size(); ++w) {
            std::uint64_t fresh = row[w] & ~seen[w];
            seen[w] |= fresh;
            while (fresh != 0) {
                result.push_back(static_cast<ParentId>(w * 64 + std::countr_zero(fresh)));
                fresh &= fresh - 1;
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace

void ParentState::set_bit(std::vector<std::uint64_t>& row, ParentId q, bool on) {
    const std::size_t w = q / 64;
    if (row.size() <= w) {
        if (!on) {
            return;
        }
        row.resize(w + 1, 0);
    }
    const std::uint64_t mask = std::uint64_t{1} << (q % 64);
    row[w] = on ? row[w] | mask : row[w] & ~mask;
}

std::vector<ParentId> ParentState::up_closure(ParentId p) const {
    return bit_closure(p, children_.size(), up_bits_);
}

std::vector<ParentId> ParentState::down_closure(ParentId p) const {
    return bit_closure(p, children_.size(), down_bits_);
}

// ---------------------------------------------------------------------------
// Counters

std::uint32_t CounterTables::ae(BlockId b, LabelId a, ParentId p) const {
    const auto& r = ae_[b];
    auto it = r.find(key(a, p));
    return it == r.end() ? 0 : it->second;
}

void CounterTables::bump(BlockId b, LabelId a, ParentId p, int delta) {
    auto& r = ae_[b];
    auto [it, fresh] = r.try_emplace(key(a, p), 0);
    assert(delta > 0 || it->second >= static_cast<std::uint32_t>(-delta));
    it->second = static_cast<std::uint32_t>(static_cast<int>(it->second) + delta);
    if (it->second == 0) {
        r.erase(it);
    }
}

// ---------------------------------------------------------------------------
// PartitionPair

PartitionPair::PartitionPair(const Lts& lts, Partition partition, LittleBrotherRelation rel,
                             std::span<const ParentId> parent_of_block)
    : lts_(&lts), partition_(std::move(partition)), rel_(std::move(rel)) {
    if (partition_.num_states() != lts.num_states()) {
        throw std::invalid_argument("partition does not cover the states of the system");
    }
    const std::size_t blocks = partition_.num_blocks();
    if (!parent_of_block.empty() && parent_of_block.size() != blocks) {
        throw std::invalid_argument("parent assignment does not cover the blocks");
    }
    rel_.resize(blocks);

    std::size_t num_parents = blocks > 0 ? 1 : 0;
    for (ParentId p : parent_of_block) {
        num_parents = std::max<std::size_t>(num_parents, p + 1);
    }
    parents_.children_.resize(num_parents);
    parents_.state_count_.resize(num_parents, 0);
    parents_.up_.resize(num_parents);
    parents_.down_.resize(num_parents);
    parents_.up_bits_.resize(num_parents);
    parents_.down_bits_.resize(num_parents);
    parents_.queued_.resize(num_parents, 0);
    for (BlockId b = 0; b < blocks; ++b) {
        parents_.add_child(parent_of_block.empty() ? 0 : parent_of_block[b], b, partition_.size(b));
    }
    for (ParentId p = 0; p < num_parents; ++p) {
        if (parents_.children_[p].empty()) {
            throw std::invalid_argument("parent assignment leaves a parent block empty");
        }
    }
    for (const auto& [little, big] : rel_.pairs()) {
        parents_.increment(parents_.parent_of(little), parents_.parent_of(big));
    }
    for (ParentId p = 0; p < num_parents; ++p) {
        parents_.enqueue(p);
    }

    // One state counter per (source, label, target parent); transitions are
    // sorted by (source, label, target).
    const auto transitions = lts.transitions();
    counters_.ref_.resize(transitions.size());
    counters_.ae_.resize(blocks);
    std::vector<std::pair<ParentId, std::uint32_t>> run;
    for (std::uint32_t t = 0; t < transitions.size(); ++t) {
        const auto& tr = transitions[t];
        if (t == 0 || transitions[t - 1].source != tr.source || transitions[t - 1].label != tr.label) {
            run.clear();
        }
        const ParentId target = parent_of_state(tr.target);
        auto it = std::find_if(run.begin(), run.end(), [target](const auto& e) { return e.first == target; });
        if (it == run.end()) {
            run.emplace_back(target, counters_.allocate());
            counters_.bump(partition_.block_of(tr.source), tr.label, target, +1);
            it = run.end() - 1;
        }
        counters_.ref_[t] = it->second;
        ++counters_.value_[it->second];
    }
}

void PartitionPair::grow_blocks() {
    const std::size_t blocks = partition_.num_blocks();
    rel_.resize(blocks);
    counters_.ae_.resize(blocks);
}

bool PartitionPair::add_pair(BlockId little, BlockId big) {
    if (!rel_.add(little, big)) {
        return false;
    }
    parents_.increment(parents_.parent_of(little), parents_.parent_of(big));
    return true;
}

bool PartitionPair::removal_drops_parent_edge(BlockId little, BlockId big) const {
    const ParentId pl = parents_.parent_of(little);
    const ParentId pb = parents_.parent_of(big);
    return pl != pb && rel_.contains_strict(little, big) && parents_.cnt_lb(pl, pb) == 1;
}

bool PartitionPair::remove_pair(BlockId little, BlockId big) {
    if (!rel_.remove(little, big)) {
        return false;
    }
    parents_.decrement(parents_.parent_of(little), parents_.parent_of(big));
    return true;
}

BlockId PartitionPair::split_block(BlockId b, std::span<const StateId> moved) {
    const BlockId fresh = partition_.split_off(b, moved);
    grow_blocks();

    const ParentId parent = parents_.parent_of(b);
    parents_.state_count_[parent] -= moved.size();
    parents_.add_child(parent, fresh, moved.size());
    parents_.enqueue(parent);

    std::vector<std::pair<LabelId, ParentId>> targets;
    for (StateId s : moved) {
        targets.clear();
        for (const auto& t : lts_->out(s)) {
            targets.emplace_back(t.label, parent_of_state(t.target));
        }
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        for (const auto& [a, p] : targets) {
            counters_.bump(b, a, p, -1);
            counters_.bump(fresh, a, p, +1);
        }
    }

    const std::vector<BlockId> up(rel_.bigger(b).begin(), rel_.bigger(b).end());
    const std::vector<BlockId> down(rel_.smaller(b).begin(), rel_.smaller(b).end());
    for (BlockId q : up) {
        add_pair(fresh, q);
    }
    for (BlockId q : down) {
        add_pair(q, fresh);
    }
    add_pair(fresh, b);
    add_pair(b, fresh);
    return fresh;
}

std::optional<Splitter> PartitionPair::find_splitter() {
    auto& work = parents_.worklist_;
    while (!work.empty()) {
        const ParentId p = work.front();
        if (!parents_.is_compound(p)) {
            work.pop_front();
            parents_.queued_[p] = 0;
            continue;
        }
        const auto& kids = parents_.children(p);
        // Smaller of the first two children: at most half of the parent.
        const BlockId pick =
            partition_.size(kids[1]) < partition_.size(kids[0]) ? kids[1] : kids[0];
        bool pick_below_rest = false;
        bool rest_below_pick = false;
        for (BlockId q : rel_.bigger(pick)) {
            pick_below_rest |= parents_.parent_of(q) == p;
        }
        for (BlockId q : rel_.smaller(pick)) {
            rest_below_pick |= parents_.parent_of(q) == p;
        }
        Splitter s{p, {}};
        if (rest_below_pick && !pick_below_rest) {
            for (BlockId c : kids) {
                if (c != pick) {
                    s.blocks.push_back(c);
                }
            }
        } else {
            s.blocks.push_back(pick);
        }
        std::sort(s.blocks.begin(), s.blocks.end());
        return s;
    }
    return std::nullopt;
}

ParentSplit PartitionPair::split_parent(const Splitter& splitter) {
    const ParentId old = splitter.parent;
    if (old >= parents_.num_parents()) {
        throw std::invalid_argument("splitter names an unknown parent block");
    }
    std::vector<BlockId> chosen = splitter.blocks;
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    if (chosen.empty() || chosen.size() >= parents_.children(old).size()) {
        throw std::invalid_argument("splitter must be a proper, non-empty part of its parent");
    }
    std::size_t chosen_states = 0;
    for (BlockId c : chosen) {
        if (c >= partition_.num_blocks() || parents_.parent_of(c) != old) {
            throw std::invalid_argument("splitter is not a union of child blocks of one parent");
        }
        chosen_states += partition_.size(c);
    }

    // The smaller half moves to the fresh parent id.
    std::vector<BlockId> moving;
    const bool move_chosen = 2 * chosen_states <= parents_.state_count(old);
    if (move_chosen) {
        moving = chosen;
    } else {
        for (BlockId c : parents_.children(old)) {
            if (!std::binary_search(chosen.begin(), chosen.end(), c)) {
                moving.push_back(c);
            }
        }
    }

    const auto fresh = static_cast<ParentId>(parents_.num_parents());
    parents_.children_.emplace_back();
    parents_.state_count_.push_back(0);
    parents_.up_.emplace_back();
    parents_.down_.emplace_back();
    parents_.up_bits_.emplace_back();
    parents_.down_bits_.emplace_back();
    parents_.queued_.push_back(0);

    // Redistribute cnt_lb: retract every pair touching a moving child, move
    // the children, then re-add the pairs under their new parents.
    std::unordered_set<BlockId> moving_set(moving.begin(), moving.end());
    std::vector<std::pair<BlockId, BlockId>> incident;
    for (BlockId c : moving) {
        for (BlockId q : rel_.bigger(c)) {
            incident.emplace_back(c, q);
        }
        for (BlockId q : rel_.smaller(c)) {
            if (!moving_set.count(q)) {
                incident.emplace_back(q, c);
            }
        }
    }
    for (const auto& [x, y] : incident) {
        parents_.decrement(parents_.parent_of(x), parents_.parent_of(y));
    }
    for (BlockId c : moving) {
        parents_.remove_child(c, partition_.size(c));
        parents_.add_child(fresh, c, partition_.size(c));
    }
    for (const auto& [x, y] : incident) {
        parents_.increment(parents_.parent_of(x), parents_.parent_of(y));
    }

    // Move the per-state counters of transitions into the fresh half.
    ParentSplit result{old, fresh, move_chosen ? fresh : old, {}};
    std::unordered_map<std::uint32_t, std::uint32_t> moved_counter;
    struct Touched {
        std::uint32_t old_counter;
        StateId source;
        LabelId label;
    };
    std::vector<Touched> touched;
    const auto transitions = lts_->transitions();
    for (BlockId c : moving) {
        for (StateId r : partition_.members(c)) {
            for (std::uint32_t t : lts_->in(r)) {
                const std::uint32_t old_counter = counters_.ref_[t];
                auto [it, fresh_counter] = moved_counter.try_emplace(old_counter, 0);
                if (fresh_counter) {
                    it->second = counters_.allocate();
                    touched.push_back({old_counter, transitions[t].source, transitions[t].label});
                }
                --counters_.value_[old_counter];
                ++counters_.value_[it->second];
                counters_.ref_[t] = it->second;
            }
        }
    }
    for (const auto& tc : touched) {
        const BlockId b = partition_.block_of(tc.source);
        counters_.bump(b, tc.label, fresh, +1);
        if (counters_.value_[tc.old_counter] == 0) {
            counters_.bump(b, tc.label, old, -1);
        }
        result.fresh_predecessors.push_back(tc.source);
    }
    std::sort(result.fresh_predecessors.begin(), result.fresh_predecessors.end());
    result.fresh_predecessors.erase(
        std::unique(result.fresh_predecessors.begin(), result.fresh_predecessors.end()),
        result.fresh_predecessors.end());

    parents_.enqueue(old);
    parents_.enqueue(fresh);
    return result;
}

bool PartitionPair::forall_tr(BlockId b, LabelId a, std::span<const ParentId> parent_union) const {
    std::vector<ParentId> u(parent_union.begin(), parent_union.end());
    std::sort(u.begin(), u.end());
    const std::size_t size = partition_.size(b);
    for (ParentId p : u) {
        if (counters_.ae(b, a, p) == size) {
            return true;
        }
    }
    for (StateId s : partition_.members(b)) {
        bool hit = false;
        for (const auto& t : lts_->out(s, a)) {
            if (std::binary_search(u.begin(), u.end(), parent_of_state(t.target))) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            return false;
        }
    }
    return size > 0;
}

std::uint32_t PartitionPair::cnt_al(BlockId b, LabelId a, ParentId p) const {
    const auto& r = counters_.row(b);
    const std::size_t size = partition_.size(b);
    std::uint32_t count = 0;
    for (auto it = r.lower_bound(std::uint64_t{a} << 32);
         it != r.end() && CounterTables::row_label(it->first) == a; ++it) {
        if (it->second == size && parents_.related(p, CounterTables::row_parent(it->first))) {
            ++count;
        }
    }
    return count;
}

std::vector<StateId> PartitionPair::parent_states(ParentId p) const {
    std::vector<StateId> result;
    for (BlockId c : parents_.children(p)) {
        auto m = partition_.members(c);
        result.insert(result.end(), m.begin(), m.end());
    }
    return result;
}

} // namespace pbisim
