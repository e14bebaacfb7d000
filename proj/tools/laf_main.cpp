// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "laf/analysis.hpp"
#include "laf/export.hpp"
#include "laf/text.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kToolError = 3;

struct Options {
    std::string file;
    std::string domain = "all";
    std::string prop_limit = "inf";
    std::string prop_direction = "both";
    std::optional<unsigned> widen_delay;
    unsigned unroll = 0;
    bool no_simplify = false;
    std::string emit_laf;
    std::string emit_smt;
    std::string emit_horn;
    std::string rules;
    std::string report = "text";
    std::string output;
    std::string int_window;
    std::string solver;
    unsigned solver_timeout = 30;
};

std::optional<unsigned> parse_limit(const std::string& s) {
    if (s == "inf") {
        return std::nullopt;
    }
    return static_cast<unsigned>(std::stoul(s));
}

laf::OracleWindow parse_window(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        throw laf::Error("--int-window expects LO..HI, got '" + s + "'");
    }
    laf::OracleWindow w{laf::Integer(std::stoll(s.substr(0, dots))), laf::Integer(std::stoll(s.substr(dots + 2)))};
    if (w.hi < w.lo) {
        throw laf::Error("--int-window is empty");
    }
    return w;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw laf::Error("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw laf::Error("cannot write " + path);
    }
    out << text;
}

// One output file per assertion; the name is inserted before the extension
// when there are several.
std::string per_assert_path(const std::string& path, const std::string& name, std::size_t count) {
    if (count <= 1) {
        return path;
    }
    std::filesystem::path p(path);
    std::string stem = p.filename().string();
    const auto dot = stem.find('.');
    std::string ext;
    if (dot != std::string::npos) {
        ext = stem.substr(dot);
        stem = stem.substr(0, dot);
    }
    return (p.parent_path() / (stem + "." + name + ext)).string();
}

laf::DomainOptions domain_options(const Options& o) {
    laf::DomainOptions d;
    d.prop_limit = parse_limit(o.prop_limit);
    d.prop_direction = o.prop_direction == "backward" ? laf::PropDirection::Backward : laf::PropDirection::Both;
    d.widen_delay = o.widen_delay;
    if (!o.rules.empty()) {
        d.extra_rules = laf::parse_rule_file(slurp(o.rules));
        // An invalid rule would make the rewrite domain unsound.
        for (const auto& r : d.extra_rules) {
            if (auto c = laf::check_rule(r); !c.valid) {
                throw laf::Error("rule '" + r.text + "' is not valid: " + c.counterexample);
            }
        }
    }
    return d;
}

laf::Program load(const Options& o, std::vector<laf::PhaseTime>* times) {
    laf::LoadOptions lo;
    lo.unroll = o.unroll;
    lo.simplify = !o.no_simplify;
    return laf::load_program(o.file, lo, times);
}

json report_json(const laf::Report& r, const json& solver, int code) {
    json j;
    j["schema"] = "laf-report/1";
    j["file"] = r.file;
    j["domains"] = r.domains;
    j["exit_code"] = code;
    j["assertions"] = json::array();
    for (const auto& a : r.asserts) {
        json ja;
        ja["name"] = a.name;
        ja["line"] = a.line;
        ja["text"] = a.text;
        ja["status"] = laf::status_str(a.status);
        ja["decided_by"] = a.decided_by.empty() ? json(nullptr) : json(a.decided_by);
        ja["per_domain"] = json::object();
        for (const auto& [dom, s] : a.per_domain) {
            ja["per_domain"][dom] = laf::status_str(s);
        }
        if (a.oracle) {
            ja["oracle"] = *a.oracle;
            ja["contradicts_oracle"] = a.contradicts_oracle;
        }
        j["assertions"].push_back(ja);
    }
    j["expressions"] = json::array();
    for (const auto& e : r.exprs) {
        json je;
        je["name"] = e.name;
        je["values"] = json::object();
        for (const auto& [dom, v] : e.values) {
            je["values"][dom] = v;
        }
        if (e.conditions) {
            je["conditions"] = *e.conditions;
        }
        j["expressions"].push_back(je);
    }
    j["timing"] = json::array();
    for (const auto& t : r.times) {
        j["timing"].push_back({{"phase", t.phase}, {"ms", t.ms}});
    }
    if (!solver.empty()) {
        j["solver"] = solver;
    }
    return j;
}

void emit(std::ostream& out, const Options& o, const std::string& text) {
    if (o.output.empty()) {
        out << text;
    } else {
        write_file(o.output, text);
    }
}

int run_analyze(const Options& o) {
    std::vector<laf::PhaseTime> times;
    laf::Program p = load(o, &times);
    const laf::DomainOptions dopts = domain_options(o);

    std::vector<std::string> domains;
    if (o.domain == "all") {
        domains = laf::domain_names();
    } else {
        domains.push_back(o.domain);
    }
    std::optional<laf::OracleWindow> window;
    if (!o.int_window.empty()) {
        window = parse_window(o.int_window);
    }
    laf::Report r = laf::analyze_program(p, domains, dopts, window);
    r.file = o.file;
    r.times.insert(r.times.begin(), times.begin(), times.end());

    if (!o.emit_laf.empty()) {
        write_file(o.emit_laf, laf::print_term(p.term));
    }
    json solver = json::array();
    const std::size_t n = p.asserts.size();
    for (const auto& a : p.asserts) {
        // Targets are the negated assertion: sat means a counterexample for
        // the first-order script, and an unreachable one for the Horn script.
        if (!o.emit_smt.empty()) {
            const std::string path = per_assert_path(o.emit_smt, a.name, n);
            write_file(path, laf::emit_smtlib(laf::to_fo(p.term), a.var, laf::Value::boolean(false)));
            if (!o.solver.empty()) {
                auto run = laf::run_solver(o.solver, path, o.solver_timeout);
                solver.push_back({{"assertion", a.name}, {"encoding", "fo"}, {"file", path},
                                  {"answer", laf::answer_str(run.answer)}});
            }
        }
        if (!o.emit_horn.empty()) {
            const std::string path = per_assert_path(o.emit_horn, a.name, n);
            write_file(path, laf::emit_horn(laf::to_horn(p.term), a.var, laf::Value::boolean(false)));
            if (!o.solver.empty()) {
                auto run = laf::run_solver(o.solver, path, o.solver_timeout);
                solver.push_back({{"assertion", a.name}, {"encoding", "horn"}, {"file", path},
                                  {"answer", laf::answer_str(run.answer)}});
            }
        }
    }

    int code = laf::exit_code(r);
    for (const auto& a : r.asserts) {
        if (a.contradicts_oracle) {
            std::cerr << "laf: " << a.name << " contradicts the oracle\n";
            code = kToolError;
        }
    }
    if (o.report == "structured") {
        emit(std::cout, o, report_json(r, solver, code).dump(2) + "\n");
    } else {
        std::string text = laf::report_text(r);
        for (const auto& s : solver) {
            text += "solver " + s["encoding"].get<std::string>() + " " + s["assertion"].get<std::string>() + ": " +
                    s["answer"].get<std::string>() + "\n";
        }
        emit(std::cout, o, text);
    }
    return code;
}

int run_compare(const Options& o) {
    laf::Program p = load(o, nullptr);
    const std::vector<std::optional<unsigned>> limits = {0U, 1U, 2U, std::nullopt};
    auto rows = laf::compare_limits(p, limits, domain_options(o));
    if (o.report == "structured") {
        json j;
        j["schema"] = "laf-compare/1";
        j["file"] = o.file;
        j["assertions"] = p.asserts.size();
        j["rows"] = json::array();
        for (const auto& r : rows) {
            j["rows"].push_back({{"prop_limit", laf::limit_str(r.limit)}, {"unproved", r.unproved},
                                 {"refined", r.refined}});
        }
        emit(std::cout, o, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "limit  unproved  refined\n";
        for (const auto& r : rows) {
            os << std::left << std::setw(7) << laf::limit_str(r.limit) << std::setw(10) << r.unproved << r.refined
               << "\n";
        }
        emit(std::cout, o, os.str());
    }
    return 0;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("file", o.file, "Program (.while or .laf)")->required();
    cmd->add_option("--prop-limit", o.prop_limit, "Constraint propagation limit")
        ->check(CLI::IsMember({"0", "1", "2", "inf"}));
    cmd->add_option("--prop-direction", o.prop_direction, "Constraint propagation direction")
        ->check(CLI::IsMember({"backward", "both"}));
    cmd->add_option("--widen-delay", o.widen_delay, "Rounds before widening");
    cmd->add_option("--unroll", o.unroll, "Loop iterations peeled before translation");
    cmd->add_flag("--no-simplify", o.no_simplify, "Analyse the raw translation");
    cmd->add_option("--rules", o.rules, "Extra rewrite rules file");
    cmd->add_option("--report", o.report, "Report format")->check(CLI::IsMember({"text", "structured"}));
    cmd->add_option("-o,--output", o.output, "Write the report to a file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Abstract interpretation of LAF terms"};
    app.require_subcommand(1);
    Options o;

    auto* analyze = app.add_subcommand("analyze", "Analyse a program and check its assertions");
    add_common(analyze, o);
    analyze->add_option("--domain", o.domain, "Abstract domain")
        ->check(CLI::IsMember({"interval", "constants", "rewrite", "constraint", "relational", "all"}));
    analyze->add_option("--emit-laf", o.emit_laf, "Write the analysed term");
    analyze->add_option("--emit-smt", o.emit_smt, "Write a first-order SMT-LIB script per assertion");
    analyze->add_option("--emit-horn", o.emit_horn, "Write a Horn-clause script per assertion");
    analyze->add_option("--int-window", o.int_window, "Check proved assertions against the oracle on LO..HI");
    analyze->add_option("--solver", o.solver, "Solver command run on emitted scripts; {file} is the script");
    analyze->add_option("--solver-timeout", o.solver_timeout, "Solver timeout in seconds");

    auto* compare = app.add_subcommand("compare", "Constraint domain under propagation limits 0, 1, 2, inf");
    add_common(compare, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kToolError;
    }
    try {
        if (analyze->parsed()) {
            return run_analyze(o);
        }
        return run_compare(o);
    } catch (const laf::ParseError& e) {
        std::cerr << o.file << ":" << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "laf: " << e.what() << "\n";
    }
    return kToolError;
}
