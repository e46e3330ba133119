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

// Reading and writing the Aldebaran (.aut) exchange format:
//
//   des (<initial>, <#transitions>, <#states>)
//   (<from>, "<label>", <to>)
//   ...
//
// The format cannot express termination, which travels in a companion file
// of whitespace-separated state ids, or as a reserved marker label.

#ifndef PBISIM_AUT_IO_HPP
#define PBISIM_AUT_IO_HPP

#include "pbisim/lts.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbisim {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Non-fatal findings while reading input.
struct Diagnostics {
    std::vector<std::string> warnings;
};

Lts parse_aut(std::istream& in, Diagnostics* diag = nullptr);
Lts parse_aut_string(const std::string& text, Diagnostics* diag = nullptr);

/// Replaces the termination predicate of @p lts with the ids listed in @p in.
Lts parse_termination(std::istream& in, const Lts& lts);
Lts parse_termination_string(const std::string& text, const Lts& lts);

/// Marks every state with an outgoing @p marker transition as terminating
/// and drops those transitions and the marker label. Labels keep their
/// relative order.
Lts apply_termination_label(const Lts& lts, const std::string& marker);

/// Transitions are written sorted by (source, label name, target). A system
/// without states is written as the one-state system `des (0,0,1)`.
void serialize_aut(const Lts& lts, std::ostream& out);
std::string serialize_aut_string(const Lts& lts);

} // namespace pbisim

#endif
