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

#include "pbisim/oracle.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pbisim {

std::size_t StatePairRelation::size() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool StatePairRelation::is_reflexive() const {
    for (StateId p = 0; p < n_; ++p) {
        if (!contains(p, p)) {
            return false;
        }
    }
    return true;
}

bool StatePairRelation::is_transitive() const {
    for (StateId p = 0; p < n_; ++p) {
        for (StateId q = 0; q < n_; ++q) {
            if (!contains(p, q)) {
                continue;
            }
            for (StateId r = 0; r < n_; ++r) {
                if (contains(q, r) && !contains(p, r)) {
                    return false;
                }
            }
        }
    }
    return true;
}

StatePairRelation StatePairRelation::symmetric_core() const {
    StatePairRelation core(n_);
    for (StateId p = 0; p < n_; ++p) {
        for (StateId q = 0; q < n_; ++q) {
            if (contains(p, q) && contains(q, p)) {
                core.insert(p, q);
            }
        }
    }
    return core;
}

bool StatePairRelation::subset_of(const StatePairRelation& other) const {
    if (n_ != other.n_) {
        return false;
    }
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i]) {
            return false;
        }
    }
    return true;
}

StatePairRelation naive_partial_bisim(const Lts& lts, const BisimActionSet& b) {
    const std::size_t n = lts.num_states();
    StatePairRelation rel(n);
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            if (!lts.is_terminating(p) || lts.is_terminating(q)) {
                rel.insert(p, q);
            }
        }
    }
    // Does some move of x by a land on a y-move target related as asked?
    auto matched = [&](StateId x, LabelId a, StateId target, bool x_is_little) {
        for (const auto& t : lts.out(x, a)) {
            if (x_is_little ? rel.contains(t.target, target) : rel.contains(target, t.target)) {
                return true;
            }
        }
        return false;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (StateId p = 0; p < n; ++p) {
            for (StateId q = 0; q < n; ++q) {
                if (!rel.contains(p, q)) {
                    continue;
                }
                bool ok = true;
                for (const auto& t : lts.out(p)) {
                    if (!matched(q, t.label, t.target, false)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    for (const auto& t : lts.out(q)) {
                        if (b.contains(t.label) && !matched(p, t.label, t.target, true)) {
                            ok = false;
                            break;
                        }
                    }
                }
                if (!ok) {
                    rel.erase(p, q);
                    changed = true;
                }
            }
        }
    }
    return rel;
}

StatePairRelation naive_similarity(const Lts& lts) {
    const std::size_t n = lts.num_states();
    // sim[p]: candidate simulators of p.
    std::vector<std::vector<bool>> sim(n, std::vector<bool>(n, false));
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            sim[p][q] = !lts.is_terminating(p) || lts.is_terminating(q);
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& move : lts.transitions()) {
            auto& candidates = sim[move.source];
            for (StateId q = 0; q < n; ++q) {
                if (!candidates[q]) {
                    continue;
                }
                const auto answers = lts.out(q, move.label);
                const bool simulated = std::any_of(answers.begin(), answers.end(), [&](const Transition& t) {
                    return sim[move.target][t.target];
                });
                if (!simulated) {
                    candidates[q] = false;
                    changed = true;
                }
            }
        }
    }
    StatePairRelation rel(n);
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            if (sim[p][q]) {
                rel.insert(p, q);
            }
        }
    }
    return rel;
}

StatePairRelation naive_bisimilarity(const Lts& lts) {
    const std::size_t n = lts.num_states();
    std::vector<std::uint32_t> cls(n, 0);
    std::size_t count = n == 0 ? 0 : 1;
    while (true) {
        std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
        std::vector<std::uint32_t> next(n);
        for (StateId s = 0; s < n; ++s) {
            std::vector<std::uint32_t> sig{cls[s], lts.is_terminating(s) ? 1u : 0u};
            std::vector<std::pair<LabelId, std::uint32_t>> moves;
            for (const auto& t : lts.out(s)) {
                moves.emplace_back(t.label, cls[t.target]);
            }
            std::sort(moves.begin(), moves.end());
            moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
            for (const auto& [a, c] : moves) {
                sig.push_back(a);
                sig.push_back(c);
            }
            next[s] = ids.try_emplace(std::move(sig), static_cast<std::uint32_t>(ids.size())).first->second;
        }
        cls.swap(next);
        if (ids.size() == count) {
            break;
        }
        count = ids.size();
    }
    StatePairRelation rel(n);
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            if (cls[p] == cls[q]) {
                rel.insert(p, q);
            }
        }
    }
    return rel;
}

std::pair<Partition, LittleBrotherRelation> induced_pair(const StatePairRelation& preorder) {
    const std::size_t n = preorder.num_states();
    std::vector<BlockId> block_of(n);
    std::vector<StateId> reps;
    std::vector<BlockId> block_of_rep(n, 0);
    for (StateId s = 0; s < n; ++s) {
        StateId rep = s;
        for (StateId r = 0; r < s; ++r) {
            if (preorder.contains(s, r) && preorder.contains(r, s)) {
                rep = r;
                break;
            }
        }
        if (rep == s) {
            block_of_rep[s] = static_cast<BlockId>(reps.size());
            reps.push_back(s);
        }
        block_of[s] = block_of_rep[rep];
    }
    LittleBrotherRelation lb(reps.size());
    for (BlockId x = 0; x < reps.size(); ++x) {
        for (BlockId y = 0; y < reps.size(); ++y) {
            if (x != y && preorder.contains(reps[x], reps[y])) {
                lb.add(x, y);
            }
        }
    }
    return {Partition::from_assignment(block_of), std::move(lb)};
}

DisjointUnion disjoint_union(const Lts& f, const Lts& g) {
    std::vector<std::string> labels = f.label_names();
    std::vector<LabelId> g_label(g.num_labels());
    for (LabelId a = 0; a < g.num_labels(); ++a) {
        const auto& name = g.label_name(a);
        const auto it = std::find(labels.begin(), labels.end(), name);
        g_label[a] = static_cast<LabelId>(it - labels.begin());
        if (it == labels.end()) {
            labels.push_back(name);
        }
    }
    const auto offset = static_cast<StateId>(f.num_states());
    std::vector<Transition> transitions(f.transitions().begin(), f.transitions().end());
    for (const auto& t : g.transitions()) {
        transitions.push_back({t.source + offset, g_label[t.label], t.target + offset});
    }
    auto term = f.terminating_states();
    for (StateId s : g.terminating_states()) {
        term.push_back(s + offset);
    }
    return {Lts(f.num_states() + g.num_states(), std::move(labels), std::move(transitions), std::move(term)),
            offset};
}

bool preorder_holds(const Lts& f, const Lts& g, const std::vector<std::string>& b_names) {
    if (!f.initial() || !g.initial()) {
        throw std::invalid_argument("both systems need an initial state");
    }
    const auto u = disjoint_union(f, g);
    const auto b = BisimActionSet::from_names(u.lts, b_names);
    return naive_partial_bisim(u.lts, b).contains(*f.initial(), *g.initial() + u.offset);
}

namespace {

std::string block_name(BlockId b) { return "B" + std::to_string(b); }

/// Blocks reached from @p block by @p a, sorted.
std::vector<BlockId> exists_targets(const Lts& lts, const Partition& p, BlockId block, LabelId a) {
    std::vector<BlockId> result;
    for (StateId s : p.members(block)) {
        for (const auto& t : lts.out(s, a)) {
            result.push_back(p.block_of(t.target));
        }
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

/// Every state of @p block has an a-move into one of @p targets.
bool forall_into(const Lts& lts, const Partition& p, BlockId block, LabelId a,
                 const std::unordered_set<BlockId>& targets) {
    for (StateId s : p.members(block)) {
        const auto moves = lts.out(s, a);
        if (std::none_of(moves.begin(), moves.end(),
                         [&](const Transition& t) { return targets.contains(p.block_of(t.target)); })) {
            return false;
        }
    }
    return true;
}

} // namespace

std::vector<StabilityViolation> stable_check(const Lts& lts, const Partition& p,
                                             const LittleBrotherRelation& lb, const BisimActionSet& b) {
    std::vector<StabilityViolation> out;
    const auto blocks = static_cast<BlockId>(p.num_blocks());
    std::vector<bool> terminates(blocks, false);
    for (BlockId x = 0; x < blocks; ++x) {
        const auto m = p.members(x);
        const auto term = std::count_if(m.begin(), m.end(), [&](StateId s) { return lts.is_terminating(s); });
        terminates[x] = term > 0;
        if (term > 0 && static_cast<std::size_t>(term) != m.size()) {
            out.push_back({'a', x, x, std::nullopt, std::nullopt,
                           "condition a: " + block_name(x) + " mixes terminating and non-terminating states"});
        }
    }
    auto bigger = [&lb](BlockId r) {
        std::unordered_set<BlockId> s(lb.bigger(r).begin(), lb.bigger(r).end());
        s.insert(r);
        return s;
    };
    auto smaller = [&lb](BlockId r) {
        std::unordered_set<BlockId> s(lb.smaller(r).begin(), lb.smaller(r).end());
        s.insert(r);
        return s;
    };
    for (BlockId x = 0; x < blocks; ++x) {
        for (BlockId y = 0; y < blocks; ++y) {
            if (!lb.related(x, y)) {
                continue;
            }
            const std::string pair_text = block_name(x) + " <= " + block_name(y);
            if (x != y && terminates[x] && !terminates[y]) {
                out.push_back({'b', x, y, std::nullopt, std::nullopt,
                               "condition b: " + pair_text + " but only " + block_name(x) + " terminates"});
            }
            for (LabelId a = 0; a < lts.num_labels(); ++a) {
                for (BlockId r : exists_targets(lts, p, x, a)) {
                    if (!forall_into(lts, p, y, a, bigger(r))) {
                        out.push_back({'c', x, y, r, a,
                                       "condition c: " + pair_text + ", " + block_name(x) + " -" +
                                           lts.label_name(a) + "-> " + block_name(r) + " not matched by " +
                                           block_name(y)});
                    }
                }
                if (!b.contains(a)) {
                    continue;
                }
                for (BlockId r : exists_targets(lts, p, y, a)) {
                    if (!forall_into(lts, p, x, a, smaller(r))) {
                        out.push_back({'d', x, y, r, a,
                                       "condition d: " + pair_text + ", " + block_name(y) + " -" +
                                           lts.label_name(a) + "-> " + block_name(r) + " not matched by " +
                                           block_name(x)});
                    }
                }
            }
        }
    }
    return out;
}

bool finer_than(const Partition& p1, const LittleBrotherRelation& lb1, const Partition& p2,
                const LittleBrotherRelation& lb2) {
    if (p1.num_states() != p2.num_states()) {
        return false;
    }
    std::vector<BlockId> outer(p1.num_blocks());
    for (BlockId x = 0; x < p1.num_blocks(); ++x) {
        const auto m = p1.members(x);
        outer[x] = p2.block_of(m.front());
        for (StateId s : m) {
            if (p2.block_of(s) != outer[x]) {
                return false;
            }
        }
    }
    for (const auto& [x, y] : lb1.pairs()) {
        if (!lb2.related(outer[x], outer[y])) {
            return false;
        }
    }
    return true;
}

StatePairRelation induced_relation(const Partition& p, const LittleBrotherRelation& lb) {
    StatePairRelation rel(p.num_states());
    for (StateId s = 0; s < p.num_states(); ++s) {
        for (StateId t = 0; t < p.num_states(); ++t) {
            if (lb.related(p.block_of(s), p.block_of(t))) {
                rel.insert(s, t);
            }
        }
    }
    return rel;
}

std::string generated_label_name(LabelId a) {
    if (a < 26) {
        return std::string(1, static_cast<char>('a' + a));
    }
    return "l" + std::to_string(a);
}

Lts random_lts(std::size_t num_states, std::size_t num_transitions, std::size_t num_labels,
               double termination_density, std::uint64_t seed) {
    if (num_states == 0 || num_labels == 0) {
        throw std::invalid_argument("random_lts: state and label counts must be positive");
    }
    if (termination_density < 0.0 || termination_density > 1.0) {
        throw std::invalid_argument("random_lts: termination density must lie in [0,1]");
    }
    const std::uint64_t space = std::uint64_t{num_states} * num_states * num_labels;
    if (num_transitions > space) {
        throw std::invalid_argument("random_lts: more transitions than distinct (source, label, target) triples");
    }
    std::mt19937_64 rng(seed);
    // Floyd's algorithm: num_transitions distinct indices from [0, space).
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(num_transitions * 2);
    std::vector<std::uint64_t> order;
    order.reserve(num_transitions);
    for (std::uint64_t j = space - num_transitions; j < space; ++j) {
        const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
        const std::uint64_t pick = chosen.contains(t) ? j : t;
        chosen.insert(pick);
        order.push_back(pick);
    }
    std::vector<Transition> transitions;
    transitions.reserve(num_transitions);
    for (std::uint64_t k : order) {
        const auto target = static_cast<StateId>(k % num_states);
        k /= num_states;
        const auto label = static_cast<LabelId>(k % num_labels);
        const auto source = static_cast<StateId>(k / num_labels);
        transitions.push_back({source, label, target});
    }
    std::vector<StateId> term;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (StateId s = 0; s < num_states; ++s) {
        if (coin(rng) < termination_density) {
            term.push_back(s);
        }
    }
    std::vector<std::string> labels;
    for (LabelId a = 0; a < num_labels; ++a) {
        labels.push_back(generated_label_name(a));
    }
    return Lts(num_states, std::move(labels), std::move(transitions), std::move(term), StateId{0});
}

} // namespace pbisim
