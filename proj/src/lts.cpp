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

#include "pbisim/lts.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pbisim {

Lts::Lts(std::size_t num_states, std::vector<std::string> label_names,
         std::vector<Transition> transitions, std::vector<StateId> terminating,
         std::optional<StateId> initial)
    : num_states_(num_states), labels_(std::move(label_names)),
      transitions_(std::move(transitions)), terminating_(num_states, 0), initial_(initial) {
    for (LabelId i = 0; i < labels_.size(); ++i) {
        label_index_.emplace(labels_[i], i);
    }

    std::sort(transitions_.begin(), transitions_.end());
    const auto last = std::unique(transitions_.begin(), transitions_.end());
    duplicates_ = static_cast<std::size_t>(transitions_.end() - last);
    transitions_.erase(last, transitions_.end());

    for (StateId s : terminating) {
        if (s < num_states_) {
            terminating_[s] = 1;
        } else {
            bad_terminating_.push_back(s);
        }
    }

    auto in_range = [this](const Transition& t) {
        return t.source < num_states_ && t.target < num_states_ && t.label < labels_.size();
    };

    // Sorted by source first, so each state's outgoing run is contiguous.
    // Malformed transitions are indexed nowhere.
    out_offsets_.assign(num_states_ + 1, 0);
    for (const auto& t : transitions_) {
        if (in_range(t)) {
            ++out_offsets_[t.source + 1];
        }
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    if (out_offsets_.back() != transitions_.size()) {
        // Keep well-formed transitions addressable by moving the bad ones to
        // the back; the sort order of the good prefix is preserved.
        std::stable_partition(transitions_.begin(), transitions_.end(), in_range);
    }

    in_offsets_.assign(num_states_ + 1, 0);
    for (std::uint32_t i = 0; i < out_offsets_.back(); ++i) {
        ++in_offsets_[transitions_[i].target + 1];
    }
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    in_index_.resize(in_offsets_.back());
    std::vector<std::uint32_t> fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::uint32_t i = 0; i < out_offsets_.back(); ++i) {
        in_index_[fill[transitions_[i].target]++] = i;
    }
    for (StateId s = 0; s < num_states_; ++s) {
        std::sort(in_index_.begin() + in_offsets_[s], in_index_.begin() + in_offsets_[s + 1],
                  [this](std::uint32_t x, std::uint32_t y) {
                      const auto& tx = transitions_[x];
                      const auto& ty = transitions_[y];
                      return std::tie(tx.label, tx.source) < std::tie(ty.label, ty.source);
                  });
    }
}

std::optional<LabelId> Lts::find_label(std::string_view name) const {
    auto it = label_index_.find(std::string(name));
    if (it == label_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<const Transition> Lts::out(StateId s) const {
    return std::span<const Transition>(transitions_).subspan(out_offsets_[s],
                                                             out_offsets_[s + 1] - out_offsets_[s]);
}

std::span<const Transition> Lts::out(StateId s, LabelId a) const {
    auto all = out(s);
    auto lo = std::lower_bound(all.begin(), all.end(), a,
                               [](const Transition& t, LabelId l) { return t.label < l; });
    auto hi = std::upper_bound(lo, all.end(), a,
                               [](LabelId l, const Transition& t) { return l < t.label; });
    return {lo, hi};
}

std::span<const std::uint32_t> Lts::in(StateId s) const {
    return std::span<const std::uint32_t>(in_index_).subspan(in_offsets_[s],
                                                             in_offsets_[s + 1] - in_offsets_[s]);
}

std::span<const std::uint32_t> Lts::in(StateId s, LabelId a) const {
    auto all = in(s);
    auto lo = std::lower_bound(all.begin(), all.end(), a, [this](std::uint32_t t, LabelId l) {
        return transitions_[t].label < l;
    });
    auto hi = std::upper_bound(lo, all.end(), a, [this](LabelId l, std::uint32_t t) {
        return l < transitions_[t].label;
    });
    return {lo, hi};
}

std::vector<StateId> Lts::terminating_states() const {
    std::vector<StateId> result;
    for (StateId s = 0; s < num_states_; ++s) {
        if (terminating_[s]) {
            result.push_back(s);
        }
    }
    return result;
}

Lts Lts::with_terminating(std::vector<StateId> terminating) const {
    return Lts(num_states_, labels_, transitions_, std::move(terminating), initial_);
}

Lts Lts::with_initial(std::optional<StateId> initial) const {
    auto term = terminating_states();
    term.insert(term.end(), bad_terminating_.begin(), bad_terminating_.end());
    return Lts(num_states_, labels_, transitions_, std::move(term), initial);
}

BisimActionSet BisimActionSet::all(const Lts& lts) {
    BisimActionSet b(lts.num_labels());
    std::fill(b.member_.begin(), b.member_.end(), 1);
    return b;
}

BisimActionSet BisimActionSet::from_names(const Lts& lts, const std::vector<std::string>& names) {
    BisimActionSet b(lts.num_labels());
    for (const auto& name : names) {
        auto id = lts.find_label(name);
        if (!id) {
            throw std::invalid_argument("unknown action label '" + name + "'");
        }
        b.member_[*id] = 1;
    }
    return b;
}

BisimActionSet BisimActionSet::from_ids(std::size_t num_labels, const std::vector<LabelId>& ids) {
    BisimActionSet b(num_labels);
    for (LabelId a : ids) {
        b.insert(a);
    }
    return b;
}

void BisimActionSet::insert(LabelId a) {
    if (a >= member_.size()) {
        throw std::out_of_range("label id " + std::to_string(a) + " outside the alphabet");
    }
    member_[a] = 1;
}

std::vector<LabelId> BisimActionSet::members() const {
    std::vector<LabelId> result;
    for (LabelId a = 0; a < member_.size(); ++a) {
        if (member_[a]) {
            result.push_back(a);
        }
    }
    return result;
}

bool BisimActionSet::empty() const {
    return std::none_of(member_.begin(), member_.end(), [](std::uint8_t m) { return m != 0; });
}

std::vector<std::string> validate(const Lts& lts) {
    std::vector<std::string> violations;
    const auto n = lts.num_states_;
    for (const auto& t : lts.transitions_) {
        if (t.source >= n || t.target >= n) {
            violations.push_back("transition (" + std::to_string(t.source) + ", " +
                                 std::to_string(t.label) + ", " + std::to_string(t.target) +
                                 ") has an endpoint outside 0.." + std::to_string(n));
        }
        if (t.label >= lts.labels_.size()) {
            violations.push_back("transition (" + std::to_string(t.source) + ", " +
                                 std::to_string(t.label) + ", " + std::to_string(t.target) +
                                 ") uses undeclared label id " + std::to_string(t.label));
        }
    }
    if (lts.label_index_.size() != lts.labels_.size()) {
        violations.push_back("action label names are not unique");
    }
    for (StateId s : lts.bad_terminating_) {
        violations.push_back("terminating state " + std::to_string(s) + " out of range");
    }
    if (lts.initial_ && *lts.initial_ >= n) {
        violations.push_back("initial state " + std::to_string(*lts.initial_) + " out of range");
    }
    return violations;
}

std::vector<ActionLabel> action_labels(const Lts& lts) {
    std::vector<ActionLabel> result;
    result.reserve(lts.num_labels());
    for (LabelId i = 0; i < lts.num_labels(); ++i) {
        result.push_back({i, lts.label_name(i)});
    }
    return result;
}

} // namespace pbisim
