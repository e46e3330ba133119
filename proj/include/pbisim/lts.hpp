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

/** @file lts.hpp
 *  @brief Labeled transition systems with a termination predicate.
 *
 *  States and action labels are dense integers. The transition relation is
 *  a set: duplicates handed to the constructor are collapsed. Forward
 *  adjacency is the sorted transition array itself (source, label, target);
 *  backward adjacency is an index array sorted by (target, label, source).
 *  An Lts never changes after construction, so it can be shared freely
 *  between concurrently running minimizations.
 */

#ifndef PBISIM_LTS_HPP
#define PBISIM_LTS_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pbisim {

using StateId = std::uint32_t;
using LabelId = std::uint32_t;

struct Transition {
    StateId source;
    LabelId label;
    StateId target;

    auto operator<=>(const Transition&) const = default;
};

struct ActionLabel {
    LabelId id;
    std::string name;
};

class Lts {
public:
    Lts() = default;

    /// Transitions and terminating ids are taken as given; out-of-range
    /// entries are kept for validate() to report but left out of the
    /// adjacency indices.
    Lts(std::size_t num_states, std::vector<std::string> label_names,
        std::vector<Transition> transitions,
        std::vector<StateId> terminating = {},
        std::optional<StateId> initial = std::nullopt);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_labels() const { return labels_.size(); }
    std::size_t num_transitions() const { return transitions_.size(); }

    const std::vector<std::string>& label_names() const { return labels_; }
    const std::string& label_name(LabelId id) const { return labels_.at(id); }
    std::optional<LabelId> find_label(std::string_view name) const;

    std::span<const Transition> transitions() const { return transitions_; }

    /// Outgoing transitions of @p s, sorted by (label, target).
    std::span<const Transition> out(StateId s) const;
    std::span<const Transition> out(StateId s, LabelId a) const;

    /// Indices into transitions() of the incoming transitions of @p s,
    /// sorted by (label, source).
    std::span<const std::uint32_t> in(StateId s) const;
    std::span<const std::uint32_t> in(StateId s, LabelId a) const;

    bool is_terminating(StateId s) const { return s < terminating_.size() && terminating_[s] != 0; }
    std::vector<StateId> terminating_states() const;

    const std::optional<StateId>& initial() const { return initial_; }

    /// Number of duplicate transitions dropped at construction.
    std::size_t duplicates_collapsed() const { return duplicates_; }

    /// Copy with the termination predicate replaced.
    Lts with_terminating(std::vector<StateId> terminating) const;
    Lts with_initial(std::optional<StateId> initial) const;

private:
    std::size_t num_states_ = 0;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, LabelId> label_index_;
    std::vector<Transition> transitions_;
    std::vector<std::uint8_t> terminating_;
    std::vector<StateId> bad_terminating_;
    std::optional<StateId> initial_;
    std::size_t duplicates_ = 0;

    std::vector<std::uint32_t> out_offsets_;
    std::vector<std::uint32_t> in_offsets_;
    std::vector<std::uint32_t> in_index_;

    friend std::vector<std::string> validate(const Lts& lts);
};

/// The set B of actions that are bisimulated; every other action is only
/// simulated.
class BisimActionSet {
public:
    BisimActionSet() = default;
    explicit BisimActionSet(std::size_t num_labels) : member_(num_labels, 0) {}

    static BisimActionSet none(const Lts& lts) { return BisimActionSet(lts.num_labels()); }
    static BisimActionSet all(const Lts& lts);
    /// Throws std::invalid_argument naming the first unknown label.
    static BisimActionSet from_names(const Lts& lts, const std::vector<std::string>& names);
    static BisimActionSet from_ids(std::size_t num_labels, const std::vector<LabelId>& ids);

    bool contains(LabelId a) const { return a < member_.size() && member_[a] != 0; }
    void insert(LabelId a);
    std::size_t universe() const { return member_.size(); }
    std::vector<LabelId> members() const;
    bool empty() const;

    bool operator==(const BisimActionSet&) const = default;

private:
    std::vector<std::uint8_t> member_;
};

/// Violations of the Lts invariants; empty iff the system is well formed.
std::vector<std::string> validate(const Lts& lts);

/// Names of the labels, resolved per id.
std::vector<ActionLabel> action_labels(const Lts& lts);

} // namespace pbisim

#endif
