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

#include "pbisim/quotient.hpp"

#include "pbisim/refine.hpp"

#include <algorithm>
#include <limits>

namespace pbisim {

namespace {

constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();

// Iterative Tarjan over the strict pairs of @p lb; returns a component id
// per block.
std::vector<std::uint32_t> components(const LittleBrotherRelation& lb) {
    const std::size_t n = lb.num_blocks();
    std::vector<std::uint32_t> index(n, kUnvisited);
    std::vector<std::uint32_t> low(n, 0);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::uint32_t> comp(n, kUnvisited);
    std::vector<BlockId> stack;
    std::uint32_t next_index = 0;
    std::uint32_t next_comp = 0;

    struct Frame {
        BlockId block;
        std::vector<BlockId> succ;
        std::size_t pos;
    };
    std::vector<Frame> calls;
    auto enter = [&](BlockId v) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
        calls.push_back({v, std::vector<BlockId>(lb.bigger(v).begin(), lb.bigger(v).end()), 0});
    };
    for (BlockId root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) {
            continue;
        }
        enter(root);
        while (!calls.empty()) {
            auto& frame = calls.back();
            const BlockId v = frame.block;
            if (frame.pos < frame.succ.size()) {
                const BlockId w = frame.succ[frame.pos++];
                if (index[w] == kUnvisited) {
                    enter(w);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                BlockId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = next_comp;
                } while (w != v);
                ++next_comp;
            }
            calls.pop_back();
            if (!calls.empty()) {
                const BlockId parent = calls.back().block;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

Lts rebuild(const Lts& base, std::size_t num_states, std::vector<Transition> transitions,
            const std::vector<StateId>& terminating, std::optional<StateId> initial) {
    return Lts(num_states, base.label_names(), std::move(transitions), terminating, initial);
}

} // namespace

std::vector<std::optional<StateId>> QuotientLts::class_of_state(std::size_t num_states) const {
    std::vector<std::optional<StateId>> result(num_states);
    for (StateId c = 0; c < class_members.size(); ++c) {
        for (StateId s : class_members[c]) {
            if (s < num_states) {
                result[s] = c;
            }
        }
    }
    return result;
}

void dump_class_order(std::ostream& out, const QuotientLts& q) {
    for (StateId c = 0; c < q.class_members.size(); ++c) {
        out << "B" << c << ": {";
        const char* sep = "";
        for (StateId s : q.class_members[c]) {
            out << sep << s;
            sep = ",";
        }
        out << "}\n";
    }
    for (const auto& [little, big] : q.class_lb.pairs()) {
        out << "B" << little << " <= B" << big << "\n";
    }
}

std::pair<Partition, LittleBrotherRelation> merge_mutual(const Partition& p, const LittleBrotherRelation& lb) {
    const auto comp = components(lb);
    const std::size_t n = p.num_states();

    // Renumber components by smallest member state.
    std::vector<BlockId> id(comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1, kUnvisited);
    std::vector<BlockId> block_of(n);
    BlockId next = 0;
    for (StateId s = 0; s < n; ++s) {
        const auto c = comp[p.block_of(s)];
        if (id[c] == kUnvisited) {
            id[c] = next++;
        }
        block_of[s] = id[c];
    }
    LittleBrotherRelation merged(next);
    for (const auto& [little, big] : lb.pairs()) {
        const BlockId x = id[comp[little]];
        const BlockId y = id[comp[big]];
        if (x != y) {
            merged.add(x, y);
        }
    }
    return {Partition::from_assignment(block_of), std::move(merged)};
}

QuotientLts build_quotient(const Lts& lts, const Partition& p, const LittleBrotherRelation& lb,
                           const BisimActionSet& b) {
    const std::size_t classes = p.num_blocks();
    QuotientLts q;
    q.class_members.resize(classes);
    for (BlockId c = 0; c < classes; ++c) {
        q.class_members[c] = p.sorted_members(c);
    }
    q.class_lb = lb;

    std::vector<Transition> moves;
    std::vector<StateId> terminating;
    std::vector<std::pair<LabelId, BlockId>> reach;
    std::vector<std::pair<LabelId, BlockId>> per_state;
    std::vector<BlockId> targets;
    for (BlockId c = 0; c < classes; ++c) {
        const auto& members = q.class_members[c];
        if (lts.is_terminating(members.front())) {
            terminating.push_back(c);
        }
        reach.clear();
        for (StateId s : members) {
            per_state.clear();
            for (const auto& t : lts.out(s)) {
                per_state.emplace_back(t.label, p.block_of(t.target));
            }
            std::sort(per_state.begin(), per_state.end());
            per_state.erase(std::unique(per_state.begin(), per_state.end()), per_state.end());
            reach.insert(reach.end(), per_state.begin(), per_state.end());
        }
        std::sort(reach.begin(), reach.end());

        // Runs of equal (label, class) with one entry per member are the
        // forall-targets; group them by label.
        std::size_t i = 0;
        while (i < reach.size()) {
            const LabelId a = reach[i].first;
            targets.clear();
            while (i < reach.size() && reach[i].first == a) {
                std::size_t j = i;
                while (j < reach.size() && reach[j] == reach[i]) {
                    ++j;
                }
                if (j - i == members.size()) {
                    targets.push_back(reach[i].second);
                }
                i = j;
            }
            const bool bisim = b.contains(a);
            for (BlockId target : targets) {
                bool below = false;
                bool above = false;
                for (BlockId r : targets) {
                    if (r == target) {
                        continue;
                    }
                    below = below || lb.related(r, target);
                    above = above || lb.related(target, r);
                }
                const bool keep = bisim ? !(below && above) : !above;
                if (keep) {
                    moves.push_back({c, a, target});
                } else if (bisim) {
                    ++q.suppressed_middle;
                }
            }
        }
    }
    std::optional<StateId> initial;
    if (lts.initial() && *lts.initial() < p.num_states()) {
        initial = p.block_of(*lts.initial());
    }
    q.lts = rebuild(lts, classes, std::move(moves), terminating, initial);
    return q;
}

QuotientLts prune_unreachable(const QuotientLts& q, Diagnostics* diag) {
    if (!q.lts.initial()) {
        if (diag) {
            diag->warnings.push_back("no initial state; unreachable classes kept");
        }
        return q;
    }
    const std::size_t n = q.lts.num_states();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<StateId> todo{*q.lts.initial()};
    seen[*q.lts.initial()] = 1;
    while (!todo.empty()) {
        const StateId s = todo.back();
        todo.pop_back();
        for (const auto& t : q.lts.out(s)) {
            if (!seen[t.target]) {
                seen[t.target] = 1;
                todo.push_back(t.target);
            }
        }
    }
    std::vector<StateId> id(n, kUnvisited);
    StateId next = 0;
    for (StateId s = 0; s < n; ++s) {
        if (seen[s]) {
            id[s] = next++;
        }
    }
    if (next == n) {
        return q;
    }

    QuotientLts result;
    result.suppressed_middle = q.suppressed_middle;
    result.class_lb = LittleBrotherRelation(next);
    for (const auto& [little, big] : q.class_lb.pairs()) {
        if (seen[little] && seen[big]) {
            result.class_lb.add(id[little], id[big]);
        }
    }
    std::vector<Transition> moves;
    std::vector<StateId> terminating;
    for (StateId s = 0; s < n; ++s) {
        if (!seen[s]) {
            continue;
        }
        result.class_members.push_back(q.class_members[s]);
        if (q.lts.is_terminating(s)) {
            terminating.push_back(id[s]);
        }
        for (const auto& t : q.lts.out(s)) {
            moves.push_back({id[s], t.label, id[t.target]});
        }
    }
    result.lts = rebuild(q.lts, next, std::move(moves), terminating, id[*q.lts.initial()]);
    return result;
}

QuotientLts minimize(const Lts& lts, const BisimActionSet& b, bool prune, Diagnostics* diag) {
    const auto refined = run(lts, b);
    const auto [partition, lb] = merge_mutual(refined.partition, refined.lb);
    auto q = build_quotient(lts, partition, lb, b);
    if (prune && lts.initial()) {
        return prune_unreachable(q, diag);
    }
    return q;
}

} // namespace pbisim
