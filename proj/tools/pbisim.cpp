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

// pbisim: minimize, compare, verify, generate and bench.
//
// Exit codes: 0 success, 1 compare found no equivalence, 2 parse or usage
// error, 3 verification failure, 4 I/O error.

#include "pbisim/aut_io.hpp"
#include "pbisim/lts.hpp"
#include "pbisim/oracle.hpp"
#include "pbisim/quotient.hpp"
#include "pbisim/refine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pbisim;

constexpr int kExitNotEquivalent = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerify = 3;
constexpr int kExitIo = 4;

struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Failure{kExitIo, "cannot open " + path};
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) {
        throw Failure{kExitIo, "cannot read " + path};
    }
    return text.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw Failure{kExitIo, "cannot write " + path};
    }
}

// Writes to @p path, or to stdout when @p path is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        if (!std::cout) {
            throw Failure{kExitIo, "cannot write to standard output"};
        }
        return;
    }
    write_file(path, text);
}

void print_warnings(const Diagnostics& diag) {
    for (const auto& w : diag.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
}

struct TermSource {
    std::string file;
    std::string label;
};

Lts load(const std::string& path, const TermSource& term) {
    Diagnostics diag;
    Lts lts;
    try {
        lts = parse_aut_string(read_file(path), &diag);
        if (!term.file.empty()) {
            lts = parse_termination_string(read_file(term.file), lts);
        } else if (!term.label.empty()) {
            lts = apply_termination_label(lts, term.label);
        }
    } catch (const ParseError& e) {
        throw Failure{kExitUsage, path + ": " + e.what()};
    } catch (const std::invalid_argument& e) {
        throw Failure{kExitUsage, path + ": " + e.what()};
    }
    print_warnings(diag);
    return lts;
}

// Label names of a b_spec: ALL, NONE, @file or a comma separated list.
// nullopt stands for ALL.
std::optional<std::vector<std::string>> parse_b_spec(const std::string& spec) {
    if (spec == "ALL") {
        return std::nullopt;
    }
    std::vector<std::string> names;
    if (spec == "NONE" || spec.empty()) {
        return names;
    }
    std::string text = spec;
    const bool from_file = spec.front() == '@';
    if (from_file) {
        text = read_file(spec.substr(1));
    }
    std::string name;
    for (char ch : text + ",") {
        const bool sep = ch == ',' || (from_file && std::isspace(static_cast<unsigned char>(ch)));
        if (!sep) {
            name.push_back(ch);
        } else if (!name.empty()) {
            if (name == "ALL" || name == "NONE") {
                throw Failure{kExitUsage, "ALL and NONE cannot be mixed with label names"};
            }
            names.push_back(name);
            name.clear();
        }
    }
    return names;
}

BisimActionSet resolve_b(const Lts& lts, const std::optional<std::vector<std::string>>& names) {
    if (!names) {
        return BisimActionSet::all(lts);
    }
    try {
        return BisimActionSet::from_names(lts, *names);
    } catch (const std::invalid_argument& e) {
        throw Failure{kExitUsage, e.what()};
    }
}

// Quotient back in the input's termination encoding.
Lts with_marker(const Lts& q, const std::string& marker) {
    auto names = q.label_names();
    auto found = std::find(names.begin(), names.end(), marker);
    const LabelId id = static_cast<LabelId>(found - names.begin());
    if (found == names.end()) {
        names.push_back(marker);
    }
    std::vector<Transition> moves(q.transitions().begin(), q.transitions().end());
    for (StateId s : q.terminating_states()) {
        moves.push_back({s, id, s});
    }
    return Lts(q.num_states(), names, std::move(moves), {}, q.initial());
}

std::string term_list(const Lts& lts) {
    std::ostringstream out;
    for (StateId s : lts.terminating_states()) {
        out << s << "\n";
    }
    return out.str();
}

struct MinimizeConfig {
    std::string input;
    TermSource term;
    std::string b_spec = "NONE";
    std::string output;
    std::string map_out;
    std::string lb_out;
    std::string stats_out;
    std::string term_out;
    bool keep_unreachable = false;
    bool verify = false;
    bool oracle_check = false;
    std::size_t oracle_cap = 100;
};

// Classes of the oracle preorder must be exactly the merged blocks, with
// the same order between them.
bool agrees_with_oracle(const Lts& lts, const BisimActionSet& b, const Partition& p,
                        const LittleBrotherRelation& lb) {
    const auto oracle = naive_partial_bisim(lts, b);
    return induced_relation(p, lb) == oracle;
}

int cmd_minimize(const MinimizeConfig& cfg) {
    const Lts lts = load(cfg.input, cfg.term);
    const BisimActionSet b = resolve_b(lts, parse_b_spec(cfg.b_spec));

    const auto refined = run(lts, b);
    if (cfg.verify) {
        const auto violations = stable_check(lts, refined.partition, refined.lb, b);
        if (!violations.empty()) {
            for (const auto& v : violations) {
                std::cerr << "unstable (" << v.condition << "): " << v.message << "\n";
            }
            return kExitVerify;
        }
    }
    const auto [partition, lb] = merge_mutual(refined.partition, refined.lb);
    if (cfg.oracle_check) {
        if (lts.num_states() > cfg.oracle_cap) {
            std::cerr << "warning: oracle check skipped, " << lts.num_states() << " states exceed the cap of "
                      << cfg.oracle_cap << "\n";
        } else if (!agrees_with_oracle(lts, b, partition, lb)) {
            std::cerr << "error: classes disagree with the reference preorder\n";
            return kExitVerify;
        }
    }
    QuotientLts q = build_quotient(lts, partition, lb, b);
    if (!cfg.keep_unreachable) {
        Diagnostics diag;
        q = prune_unreachable(q, &diag);
        print_warnings(diag);
    }

    const Lts out = cfg.term.label.empty() ? q.lts : with_marker(q.lts, cfg.term.label);
    emit(cfg.output, serialize_aut_string(out));
    if (!cfg.term_out.empty()) {
        write_file(cfg.term_out, term_list(q.lts));
    }
    if (!cfg.map_out.empty()) {
        std::ostringstream map;
        const auto cls = q.class_of_state(lts.num_states());
        for (StateId s = 0; s < lts.num_states(); ++s) {
            map << s << " ";
            if (cls[s]) {
                map << *cls[s];
            } else {
                map << "-";
            }
            map << "\n";
        }
        write_file(cfg.map_out, map.str());
    }
    if (!cfg.lb_out.empty()) {
        std::ostringstream dump;
        dump_class_order(dump, q);
        write_file(cfg.lb_out, dump.str());
    }
    if (!cfg.stats_out.empty()) {
        std::ostringstream stats;
        stats << "in_states=" << lts.num_states() << "\n"
              << "in_transitions=" << lts.num_transitions() << "\n"
              << "out_states=" << q.lts.num_states() << "\n"
              << "out_transitions=" << q.lts.num_transitions() << "\n"
              << "classes=" << partition.num_blocks() << "\n"
              << "order_pairs=" << lb.num_pairs() << "\n"
              << "suppressed_middle=" << q.suppressed_middle << "\n";
        write_stats(stats, refined.stats);
        write_file(cfg.stats_out, stats.str());
    }
    return 0;
}

int cmd_compare(const std::string& f_path, const std::string& g_path, const TermSource& term,
                const std::string& b_spec) {
    const Lts f = load(f_path, term);
    const Lts g = load(g_path, term);
    auto names = parse_b_spec(b_spec);
    if (!names) {
        std::set<std::string> all(f.label_names().begin(), f.label_names().end());
        all.insert(g.label_names().begin(), g.label_names().end());
        names = std::vector<std::string>(all.begin(), all.end());
    }
    bool fg = false;
    bool gf = false;
    try {
        fg = preorder_holds(f, g, *names);
        gf = preorder_holds(g, f, *names);
    } catch (const std::invalid_argument& e) {
        throw Failure{kExitUsage, e.what()};
    }
    if (fg && gf) {
        std::cout << "F == G\n";
        return 0;
    }
    std::cout << (fg ? "F <= G" : gf ? "G <= F" : "incomparable") << "\n";
    return kExitNotEquivalent;
}

int cmd_verify(const std::string& input, const TermSource& term, const std::string& b_spec, bool oracle_check,
               std::size_t oracle_cap) {
    const Lts lts = load(input, term);
    const BisimActionSet b = resolve_b(lts, parse_b_spec(b_spec));
    const auto refined = run(lts, b);
    const auto violations = stable_check(lts, refined.partition, refined.lb, b);
    for (const auto& v : violations) {
        std::cout << "unstable (" << v.condition << "): " << v.message << "\n";
    }
    if (!violations.empty()) {
        return kExitVerify;
    }
    if (oracle_check) {
        if (lts.num_states() > oracle_cap) {
            std::cerr << "warning: oracle check skipped, " << lts.num_states() << " states exceed the cap of "
                      << oracle_cap << "\n";
        } else if (!agrees_with_oracle(lts, b, refined.partition, refined.lb)) {
            std::cout << "oracle mismatch\n";
            return kExitVerify;
        }
    }
    std::cout << "stable: " << refined.partition.num_blocks() << " classes, " << refined.lb.num_pairs()
              << " order pairs\n";
    return 0;
}

struct GenerateConfig {
    std::size_t states = 100;
    std::size_t transitions = 400;
    std::size_t labels = 4;
    double term_density = 0.0;
    std::uint64_t seed = 1;
};

Lts generate(const GenerateConfig& cfg) {
    try {
        return random_lts(cfg.states, cfg.transitions, cfg.labels, cfg.term_density, cfg.seed);
    } catch (const std::invalid_argument& e) {
        throw Failure{kExitUsage, e.what()};
    }
}

int cmd_generate(const GenerateConfig& cfg, const std::string& output, const std::string& term_out,
                 const std::string& term_label) {
    const Lts lts = generate(cfg);
    const Lts out = term_label.empty() ? lts : with_marker(lts, term_label);
    emit(output, serialize_aut_string(out));
    if (!term_out.empty()) {
        write_file(term_out, term_list(lts));
    }
    return 0;
}

int cmd_bench(const GenerateConfig& gen, std::size_t instances, std::size_t reps,
              const std::vector<std::string>& b_specs, bool keep_unreachable, const std::string& output) {
    std::ostringstream table;
    table << "instance\tb_spec\trep\tin_states\tin_trans\tout_states\tout_trans\ttime_ms\n";
    for (std::size_t i = 0; i < instances; ++i) {
        GenerateConfig cfg = gen;
        cfg.seed = gen.seed + i;
        const Lts lts = generate(cfg);
        for (const auto& spec : b_specs) {
            const BisimActionSet b = resolve_b(lts, parse_b_spec(spec));
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const auto start = std::chrono::steady_clock::now();
                const QuotientLts q = minimize(lts, b, !keep_unreachable);
                const auto stop = std::chrono::steady_clock::now();
                const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
                table << i << "\t" << spec << "\t" << rep << "\t" << lts.num_states() << "\t"
                      << lts.num_transitions() << "\t" << q.lts.num_states() << "\t" << q.lts.num_transitions()
                      << "\t" << std::fixed << std::setprecision(3) << ms << "\n";
                table.unsetf(std::ios::fixed);
            }
        }
    }
    emit(output, table.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial bisimulation minimization of labeled transition systems"};
    app.require_subcommand(1);

    TermSource term;
    std::string b_spec = "NONE";
    auto add_term = [&term](CLI::App* cmd) {
        auto* file = cmd->add_option("--term-file", term.file, "Terminating state ids, whitespace separated");
        auto* label = cmd->add_option("--term-label", term.label, "Label whose transitions mark termination");
        file->excludes(label);
    };
    auto add_b = [&b_spec](CLI::App* cmd) {
        cmd->add_option("--bisim-actions", b_spec, "a,b | @file | ALL | NONE")->capture_default_str();
    };

    MinimizeConfig mcfg;
    auto* minimize_cmd = app.add_subcommand("minimize", "Write the partial bisimulation quotient");
    minimize_cmd->add_option("input", mcfg.input, "Input .aut file")->required();
    add_term(minimize_cmd);
    add_b(minimize_cmd);
    minimize_cmd->add_option("--output,-o", mcfg.output, "Quotient .aut (default: stdout)");
    minimize_cmd->add_option("--map-out", mcfg.map_out, "Lines `<state> <class>`, `-` for pruned states");
    minimize_cmd->add_option("--lb-out", mcfg.lb_out, "Classes and their order");
    minimize_cmd->add_option("--stats", mcfg.stats_out, "key=value statistics");
    minimize_cmd->add_option("--term-out", mcfg.term_out, "Terminating classes of the quotient");
    minimize_cmd->add_flag("--keep-unreachable", mcfg.keep_unreachable, "Keep classes unreachable from the initial one");
    minimize_cmd->add_flag("--verify", mcfg.verify, "Check stability of the result");
    minimize_cmd->add_flag("--oracle-check", mcfg.oracle_check, "Compare with the reference preorder");
    minimize_cmd->add_option("--oracle-cap", mcfg.oracle_cap, "Largest input for --oracle-check")
        ->capture_default_str();

    std::string f_path;
    std::string g_path;
    auto* compare_cmd = app.add_subcommand("compare", "Relate the initial states of two systems");
    compare_cmd->add_option("f", f_path, "First .aut file")->required();
    compare_cmd->add_option("g", g_path, "Second .aut file")->required();
    compare_cmd->add_option("--term-label", term.label, "Label whose transitions mark termination");
    add_b(compare_cmd);

    std::string verify_input;
    bool verify_oracle = false;
    std::size_t verify_cap = 100;
    auto* verify_cmd = app.add_subcommand("verify", "Refine and check stability of the result");
    verify_cmd->add_option("input", verify_input, "Input .aut file")->required();
    add_term(verify_cmd);
    add_b(verify_cmd);
    verify_cmd->add_flag("--oracle-check", verify_oracle, "Compare with the reference preorder");
    verify_cmd->add_option("--oracle-cap", verify_cap, "Largest input for --oracle-check")->capture_default_str();

    GenerateConfig gcfg;
    std::string gen_output;
    std::string gen_term_out;
    std::string gen_term_label;
    auto add_gen = [&gcfg](CLI::App* cmd) {
        cmd->add_option("--states", gcfg.states)->capture_default_str();
        cmd->add_option("--transitions", gcfg.transitions)->capture_default_str();
        cmd->add_option("--labels", gcfg.labels)->capture_default_str();
        cmd->add_option("--term-density", gcfg.term_density)->capture_default_str();
        cmd->add_option("--seed", gcfg.seed)->capture_default_str();
    };
    auto* generate_cmd = app.add_subcommand("generate", "Write a random system");
    add_gen(generate_cmd);
    generate_cmd->add_option("--output,-o", gen_output, "Output .aut (default: stdout)");
    auto* gen_file = generate_cmd->add_option("--term-out", gen_term_out, "Terminating state ids");
    auto* gen_label = generate_cmd->add_option("--term-label", gen_term_label, "Mark termination by self-loops");
    gen_file->excludes(gen_label);

    std::size_t instances = 1;
    std::size_t reps = 1;
    std::vector<std::string> bench_specs;
    bool bench_keep = false;
    std::string bench_output;
    auto* bench_cmd = app.add_subcommand("bench", "Time minimization on random systems");
    add_gen(bench_cmd);
    bench_cmd->add_option("--instances", instances)->capture_default_str();
    bench_cmd->add_option("--reps", reps)->capture_default_str();
    bench_cmd->add_option("--bisim-actions", bench_specs, "Repeatable; default NONE and ALL");
    bench_cmd->add_flag("--keep-unreachable", bench_keep);
    bench_cmd->add_option("--output,-o", bench_output, "Table (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*minimize_cmd) {
            mcfg.term = term;
            mcfg.b_spec = b_spec;
            return cmd_minimize(mcfg);
        }
        if (*compare_cmd) {
            return cmd_compare(f_path, g_path, term, b_spec);
        }
        if (*verify_cmd) {
            return cmd_verify(verify_input, term, b_spec, verify_oracle, verify_cap);
        }
        if (*generate_cmd) {
            return cmd_generate(gcfg, gen_output, gen_term_out, gen_term_label);
        }
        if (bench_specs.empty()) {
            bench_specs = {"NONE", "ALL"};
        }
        return cmd_bench(gcfg, instances, reps, bench_specs, bench_keep, bench_output);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
