// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "laf/nonrel.hpp"
#include "laf/relational.hpp"
#include "laf/semantics.hpp"
#include "laf/text.hpp"

namespace laf {

namespace {

class Stopwatch {
  public:
    Stopwatch(std::vector<PhaseTime>* out, std::string phase) : out_(out), phase_(std::move(phase)) {}
    Stopwatch(const Stopwatch&) = delete;
    Stopwatch& operator=(const Stopwatch&) = delete;
    ~Stopwatch() {
        if (out_ != nullptr) {
            const auto d = std::chrono::steady_clock::now() - start_;
            out_->push_back({phase_, std::chrono::duration<double, std::milli>(d).count()});
        }
    }

  private:
    std::vector<PhaseTime>* out_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Status to_status(Truth t) {
    switch (t) {
    case Truth::Proved: return Status::ProvedTrue;
    case Truth::Refuted: return Status::ProvedFalse;
    case Truth::Unknown: return Status::Unknown;
    }
    return Status::Unknown;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

Program load_program_text(std::string_view text, std::string_view kind, const LoadOptions& opts,
                          std::vector<PhaseTime>* times) {
    Program p;
    p.kind = std::string(kind);
    if (kind == "laf") {
        {
            Stopwatch sw(times, "parse");
            p.term = parse_term(text);
        }
        if (p.term.result.sort() == Sort::boolean()) {
            p.asserts.push_back({p.term.result.name(), p.term.result, 0, p.term.result.name()});
        }
        return p;
    }
    if (kind != "while") {
        throw Error("unknown program kind '" + std::string(kind) + "'");
    }
    WProgram w;
    {
        Stopwatch sw(times, "parse");
        w = parse_while(text);
        if (opts.unroll > 0) {
            w = unroll_loops(w, opts.unroll);
        }
    }
    WhileTranslation t;
    {
        Stopwatch sw(times, "translate");
        t = translate_while(w);
    }
    if (opts.simplify) {
        Stopwatch sw(times, "simplify");
        t = simplify_translation(t);
    }
    p.term = std::move(t.term);
    p.asserts = std::move(t.asserts);
    return p;
}

Program load_program(const std::string& path, const LoadOptions& opts, std::vector<PhaseTime>* times) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_program_text(ss.str(), ends_with(path, ".laf") ? "laf" : "while", opts, times);
}

const std::vector<std::string>& domain_names() {
    static const std::vector<std::string> names = {"interval", "constants", "rewrite", "constraint", "relational"};
    return names;
}

std::unique_ptr<AbstractDomain> make_domain(const std::string& name, const DomainOptions& opts) {
    if (name == "interval" || name == "constants") {
        NonRelConfig cfg;
        cfg.lattice.int_mode = name == "interval" ? IntMode::Interval : IntMode::Constant;
        if (opts.widen_delay) {
            cfg.widen_delay = *opts.widen_delay;
        }
        return std::make_unique<NonRelDomain>(cfg);
    }
    if (name == "rewrite") {
        RewriteConfig cfg;
        for (const auto& r : opts.extra_rules) {
            cfg.rules.push_back(r);
            if (r.kind == RuleKind::Approx) {
                cfg.gamma = GammaMode::OverApprox;
            }
        }
        return std::make_unique<RewriteDomain>(cfg);
    }
    if (name == "constraint") {
        ConstraintConfig cfg;
        cfg.prop.limit = opts.prop_limit;
        cfg.prop.direction = opts.prop_direction;
        if (opts.widen_delay) {
            cfg.widen_delay = *opts.widen_delay;
        }
        return std::make_unique<ConstraintDomain>(cfg);
    }
    if (name == "relational") {
        return std::make_unique<RelationalDomain>();
    }
    throw Error("unknown domain '" + name + "'");
}

std::string status_str(Status s) {
    switch (s) {
    case Status::ProvedTrue: return "proved-true";
    case Status::ProvedFalse: return "proved-false";
    case Status::Unknown: return "unknown";
    }
    return "unknown";
}

Report analyze_program(const Program& p, const std::vector<std::string>& domains, const DomainOptions& opts,
                       const std::optional<OracleWindow>& window) {
    Report r;
    r.domains = domains;
    for (const auto& a : p.asserts) {
        r.asserts.push_back({a.name, a.text, a.line, Status::Unknown, "", {}, std::nullopt, false});
    }
    std::vector<Var> tops;
    for (const auto& d : p.term.ctx.defs()) {
        tops.push_back(d.bound);
        r.exprs.push_back({d.bound.name(), {}, std::nullopt});
    }
    for (const auto& name : domains) {
        auto dom = make_domain(name, opts);
        std::shared_ptr<const AbsState> st;
        {
            Stopwatch sw(&r.times, "analyze:" + name);
            st = dom->analyze(p.term);
        }
        for (std::size_t i = 0; i < p.asserts.size(); ++i) {
            auto& ar = r.asserts[i];
            const Status s = to_status(dom->query(*st, p.asserts[i].var));
            ar.per_domain.emplace_back(name, s);
            if (ar.status == Status::Unknown && s != Status::Unknown) {
                ar.status = s;
                ar.decided_by = name;
            }
        }
        const auto* cst = dynamic_cast<const ConstraintState*>(st.get());
        for (std::size_t i = 0; i < tops.size(); ++i) {
            r.exprs[i].values.emplace_back(name, dom->describe(*st, tops[i]));
            if (cst != nullptr && tops[i].id() < cst->gv.size() && cst->gv[tops[i].id()]) {
                r.exprs[i].conditions = cst->map_str(cst->gv[tops[i].id()]->id());
            }
        }
    }
    if (window && !p.asserts.empty()) {
        Stopwatch sw(&r.times, "oracle");
        EnumBudget budget;
        budget.int_lo = window->lo;
        budget.int_hi = window->hi;
        budget.mu_cap = EnumBudget::MuCap::Truncate;
        try {
            const EnvSet envs = collect(p.term, budget);
            for (std::size_t i = 0; i < p.asserts.size(); ++i) {
                std::set<Value> seen;
                for (const auto& env : envs) {
                    seen.insert(env[p.asserts[i].var.id()].value_or(Value::bottom()));
                }
                auto& ar = r.asserts[i];
                ar.oracle.emplace();
                for (const auto& v : seen) {
                    ar.oracle->push_back(v.str());
                    if (v.is_bottom()) {
                        continue;
                    }
                    const bool truth = v.as_bool();
                    if ((ar.status == Status::ProvedTrue && !truth) || (ar.status == Status::ProvedFalse && truth)) {
                        ar.contradicts_oracle = true;
                    }
                }
            }
        } catch (const Error&) {
            // Over budget: no oracle column.
        }
    }
    return r;
}

int exit_code(const Report& r) {
    int code = 0;
    for (const auto& a : r.asserts) {
        if (a.status == Status::ProvedFalse) {
            return 2;
        }
        if (a.status == Status::Unknown) {
            code = 1;
        }
    }
    return code;
}

std::string report_text(const Report& r) {
    std::ostringstream os;
    os << "file: " << r.file << "\n";
    os << "domains:";
    for (const auto& d : r.domains) {
        os << " " << d;
    }
    os << "\n\nassertions:\n";
    if (r.asserts.empty()) {
        os << "  (none)\n";
    }
    for (const auto& a : r.asserts) {
        os << "  " << a.name;
        if (a.line != 0) {
            os << " (line " << a.line << ": " << a.text << ")";
        }
        os << ": " << status_str(a.status);
        if (!a.decided_by.empty()) {
            os << " by " << a.decided_by;
        }
        os << "\n";
        if (a.oracle) {
            os << "    oracle:";
            for (const auto& v : *a.oracle) {
                os << " " << v;
            }
            os << (a.contradicts_oracle ? "  CONTRADICTION" : "") << "\n";
        }
    }
    os << "\nexpressions:\n";
    for (const auto& e : r.exprs) {
        os << "  " << e.name << "\n";
        for (const auto& [dom, val] : e.values) {
            os << "    " << dom << ": " << val << "\n";
        }
        // The constraint domain already prints its condition map.
        if (e.conditions && std::find(r.domains.begin(), r.domains.end(), "constraint") == r.domains.end()) {
            os << "    conditions: " << *e.conditions << "\n";
        }
    }
    os << "\ntiming:\n";
    for (const auto& t : r.times) {
        os << "  " << t.phase << ": " << t.ms << " ms\n";
    }
    return os.str();
}

std::string limit_str(const std::optional<unsigned>& limit) { return limit ? std::to_string(*limit) : "inf"; }

std::vector<LimitRow> compare_limits(const Program& p, const std::vector<std::optional<unsigned>>& limits,
                                     const DomainOptions& opts) {
    std::vector<LimitRow> rows;
    std::vector<std::optional<AbsValue>> prev;
    for (const auto& limit : limits) {
        DomainOptions o = opts;
        o.prop_limit = limit;
        ConstraintConfig cfg;
        cfg.prop.limit = limit;
        cfg.prop.direction = o.prop_direction;
        if (o.widen_delay) {
            cfg.widen_delay = *o.widen_delay;
        }
        ConstraintDomain dom(cfg);
        auto s = dom.analyze(p.term);
        const auto& st = dynamic_cast<const ConstraintState&>(*s);
        LimitRow row;
        row.limit = limit;
        for (const auto& a : p.asserts) {
            row.unproved += dom.query(*s, a.var) == Truth::Proved ? 0 : 1;
        }
        std::vector<std::optional<AbsValue>> now;
        for (const auto& d : p.term.ctx.defs()) {
            const Var& v = d.bound;
            if (v.id() < st.gv.size() && st.gv[v.id()]) {
                now.emplace_back(dom.value_of(st, v));
            } else {
                now.emplace_back(std::nullopt);
            }
        }
        if (!prev.empty()) {
            for (std::size_t i = 0; i < now.size(); ++i) {
                if (now[i] && prev[i] && leq(*now[i], *prev[i]) && !(*now[i] == *prev[i])) {
                    ++row.refined;
                }
            }
        }
        prev = std::move(now);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace laf
