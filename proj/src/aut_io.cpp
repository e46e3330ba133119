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

#include "pbisim/aut_io.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace pbisim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::uint64_t parse_number(std::string_view text, std::size_t line, const char* what) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(text) + "'");
    }
    return value;
}

struct Header {
    std::uint64_t initial;
    std::uint64_t transitions;
    std::uint64_t states;
};

Header parse_header(std::string_view line, std::size_t line_no) {
    line = trim(line);
    if (line.substr(0, 3) != "des") {
        throw ParseError(line_no, "malformed header: expected 'des (<initial>, <#transitions>, <#states>)'");
    }
    auto rest = trim(line.substr(3));
    if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') {
        throw ParseError(line_no, "malformed header: missing parentheses");
    }
    rest = rest.substr(1, rest.size() - 2);
    const auto c1 = rest.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(',', c1 + 1);
    if (c2 == std::string_view::npos || rest.find(',', c2 + 1) != std::string_view::npos) {
        throw ParseError(line_no, "malformed header: expected three comma-separated fields");
    }
    Header h{parse_number(rest.substr(0, c1), line_no, "initial state"),
             parse_number(rest.substr(c1 + 1, c2 - c1 - 1), line_no, "transition count"),
             parse_number(rest.substr(c2 + 1), line_no, "state count")};
    if (h.states == 0) {
        throw ParseError(line_no, "malformed header: state count must be positive");
    }
    if (h.states > std::numeric_limits<StateId>::max()) {
        throw ParseError(line_no, "malformed header: state count too large");
    }
    if (h.initial >= h.states) {
        throw ParseError(line_no, "state id " + std::to_string(h.initial) + " out of range");
    }
    return h;
}

} // namespace

Lts parse_aut(std::istream& in, Diagnostics* diag) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<Header> header;
    std::vector<std::string> labels;
    std::unordered_map<std::string, LabelId> label_ids;
    std::vector<Transition> transitions;
    std::size_t transition_lines = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        if (!header) {
            header = parse_header(text, line_no);
            continue;
        }
        if (text.front() != '(') {
            throw ParseError(line_no, "expected a transition '(<from>, \"<label>\", <to>)'");
        }
        const auto first_comma = text.find(',');
        if (first_comma == std::string_view::npos) {
            throw ParseError(line_no, "malformed transition");
        }
        const auto from = parse_number(text.substr(1, first_comma - 1), line_no, "source state");

        auto rest = trim(text.substr(first_comma + 1));
        std::string label;
        std::string_view after_label;
        if (!rest.empty() && rest.front() == '"') {
            const auto close = rest.find('"', 1);
            if (close == std::string_view::npos) {
                throw ParseError(line_no, "unterminated quoted label");
            }
            label = std::string(rest.substr(1, close - 1));
            after_label = trim(rest.substr(close + 1));
            if (after_label.empty() || after_label.front() != ',') {
                throw ParseError(line_no, "expected ',' after label");
            }
            after_label = after_label.substr(1);
        } else {
            // Unquoted labels run up to the last comma on the line.
            const auto last_comma = rest.rfind(',');
            if (last_comma == std::string_view::npos) {
                throw ParseError(line_no, "malformed transition");
            }
            label = std::string(trim(rest.substr(0, last_comma)));
            after_label = rest.substr(last_comma + 1);
        }
        after_label = trim(after_label);
        if (after_label.empty() || after_label.back() != ')') {
            throw ParseError(line_no, "expected ')' at end of transition");
        }
        const auto to =
            parse_number(after_label.substr(0, after_label.size() - 1), line_no, "target state");

        if (from >= header->states || to >= header->states) {
            throw ParseError(line_no, "state id " + std::to_string(std::max(from, to)) +
                                          " out of range (" + std::to_string(header->states) +
                                          " states)");
        }
        auto [it, fresh] = label_ids.emplace(label, static_cast<LabelId>(labels.size()));
        if (fresh) {
            labels.push_back(label);
        }
        transitions.push_back(
            {static_cast<StateId>(from), it->second, static_cast<StateId>(to)});
        ++transition_lines;
    }

    if (!header) {
        throw ParseError(line_no + 1, "malformed header: input is empty");
    }
    if (transition_lines != header->transitions) {
        throw ParseError(line_no, "transition count mismatch: header declares " +
                                      std::to_string(header->transitions) + ", found " +
                                      std::to_string(transition_lines));
    }

    Lts lts(header->states, std::move(labels), std::move(transitions), {},
            static_cast<StateId>(header->initial));
    if (diag && lts.duplicates_collapsed() > 0) {
        diag->warnings.push_back(std::to_string(lts.duplicates_collapsed()) +
                                 " duplicate transition(s) collapsed");
    }
    return lts;
}

Lts parse_aut_string(const std::string& text, Diagnostics* diag) {
    std::istringstream in(text);
    return parse_aut(in, diag);
}

Lts parse_termination(std::istream& in, const Lts& lts) {
    std::vector<StateId> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream words(line);
        std::string word;
        while (words >> word) {
            const auto id = parse_number(word, line_no, "state id");
            if (id >= lts.num_states()) {
                throw ParseError(line_no, "state id " + std::to_string(id) + " out of range (" +
                                              std::to_string(lts.num_states()) + " states)");
            }
            ids.push_back(static_cast<StateId>(id));
        }
    }
    return lts.with_terminating(std::move(ids));
}

Lts parse_termination_string(const std::string& text, const Lts& lts) {
    std::istringstream in(text);
    return parse_termination(in, lts);
}

Lts apply_termination_label(const Lts& lts, const std::string& marker) {
    const auto marker_id = lts.find_label(marker);
    if (!marker_id) {
        return lts;
    }
    std::vector<std::string> labels;
    std::vector<LabelId> remap(lts.num_labels());
    for (LabelId a = 0; a < lts.num_labels(); ++a) {
        if (a != *marker_id) {
            remap[a] = static_cast<LabelId>(labels.size());
            labels.push_back(lts.label_name(a));
        }
    }
    auto term = lts.terminating_states();
    std::vector<Transition> kept;
    for (const auto& t : lts.transitions()) {
        if (t.label == *marker_id) {
            term.push_back(t.source);
        } else {
            kept.push_back({t.source, remap[t.label], t.target});
        }
    }
    return Lts(lts.num_states(), std::move(labels), std::move(kept), std::move(term), lts.initial());
}

void serialize_aut(const Lts& lts, std::ostream& out) {
    const std::size_t states = std::max<std::size_t>(lts.num_states(), 1);
    std::vector<Transition> sorted(lts.transitions().begin(), lts.transitions().end());
    std::sort(sorted.begin(), sorted.end(), [&lts](const Transition& x, const Transition& y) {
        if (x.source != y.source) {
            return x.source < y.source;
        }
        if (x.label != y.label) {
            const auto& nx = lts.label_name(x.label);
            const auto& ny = lts.label_name(y.label);
            if (nx != ny) {
                return nx < ny;
            }
        }
        return x.target < y.target;
    });
    out << "des (" << lts.initial().value_or(0) << "," << sorted.size() << "," << states << ")\n";
    for (const auto& t : sorted) {
        out << "(" << t.source << ",\"" << lts.label_name(t.label) << "\"," << t.target << ")\n";
    }
}

std::string serialize_aut_string(const Lts& lts) {
    std::ostringstream out;
    serialize_aut(lts, out);
    return out.str();
}

} // namespace pbisim
