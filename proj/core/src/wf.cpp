// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/wf.hpp"

#include <unordered_map>
#include <unordered_set>

namespace laf {

std::string Diagnostic::str() const {
    std::string where = "term";
    if (!path.empty()) {
        where = "def ";
        for (std::size_t i = 0; i < path.size(); ++i) {
            where += (i ? "." : "") + std::to_string(path[i]);
        }
    }
    return where + ": " + message;
}

namespace {

class Checker {
  public:
    std::vector<Diagnostic> diags;

    void context(const Context& ctx, std::vector<std::size_t>& path, const Var* exit = nullptr) {
        // Binders added in this scope are removed on exit.
        std::vector<VarId> added;
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            path.push_back(i);
            def(ctx[i], path, added);
            path.pop_back();
        }
        if (exit != nullptr) {
            use(*exit, path);
        }
        for (VarId id : added) {
            visible_.erase(id);
        }
    }

    void use(const Var& v, const std::vector<std::size_t>& path) {
        if (!v.valid()) {
            report(path, "missing variable");
            return;
        }
        auto it = visible_.find(v.id());
        if (it == visible_.end()) {
            report(path, "variable '" + v.name() + "' is not in scope");
        } else if (!(it->second == v.sort())) {
            report(path, "variable '" + v.name() + "' used with sort " + v.sort().str() + " but declared " +
                             it->second.str());
        }
    }

  private:
    std::unordered_map<VarId, Sort> visible_;
    std::unordered_set<VarId> seen_;
    long long last_id_ = -1;

    void report(const std::vector<std::size_t>& path, std::string msg) {
        diags.push_back(Diagnostic{path, std::move(msg)});
    }

    void declare(const Var& v, const std::vector<std::size_t>& path, std::vector<VarId>& added) {
        if (!v.valid()) {
            report(path, "missing binder");
            return;
        }
        if (!seen_.insert(v.id()).second) {
            report(path, "duplicate binder '" + v.name() + "'");
            return;
        }
        if (static_cast<long long>(v.id()) <= last_id_) {
            report(path, "binder '" + v.name() + "' breaks definition-order id allocation");
        }
        last_id_ = std::max<long long>(last_id_, v.id());
        visible_.emplace(v.id(), v.sort());
        added.push_back(v.id());
    }

    void expect_sort(const Var& v, const Sort& s, const std::vector<std::size_t>& path, const char* what) {
        if (v.valid() && !(v.sort() == s)) {
            report(path, std::string(what) + " '" + v.name() + "' has sort " + v.sort().str() + ", expected " +
                             s.str());
        }
    }

    void def(const Def& d, std::vector<std::size_t>& path, std::vector<VarId>& added) {
        if (!d.bound.valid()) {
            report(path, "missing binder");
            return;
        }
        const Sort& bs = d.bound.sort();
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, OpRhs>) {
                    std::vector<Sort> sorts;
                    bool ok = true;
                    for (const auto& a : r.args) {
                        use(a, path);
                        ok = ok && a.valid();
                        if (a.valid()) {
                            sorts.push_back(a.sort());
                        }
                    }
                    if (ok) {
                        try {
                            Sort s = r.op.result_sort(sorts);
                            if (!(s == bs)) {
                                report(path, "'" + d.bound.name() + "' declared " + bs.str() + " but " +
                                                 r.op.name() + " yields " + s.str());
                            }
                        } catch (const Error& e) {
                            report(path, e.what());
                        }
                    }
                } else if constexpr (std::is_same_v<T, NondetRhs>) {
                    use(r.a, path);
                    use(r.b, path);
                    expect_sort(r.a, bs, path, "nondet argument");
                    expect_sort(r.b, bs, path, "nondet argument");
                } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                    use(r.cond, path);
                    use(r.val, path);
                    expect_sort(r.cond, Sort::boolean(), path, "assume condition");
                    expect_sort(r.val, bs, path, "assume value");
                } else if constexpr (std::is_same_v<T, UnknownRhs>) {
                } else {
                    use(r.init, path);
                    expect_sort(r.init, bs, path, "mu init");
                    std::vector<VarId> inner;
                    declare(r.loopvar, path, inner);
                    expect_sort(r.loopvar, bs, path, "mu loop variable");
                    context(r.body, path, &r.exit);
                    expect_sort(r.exit, bs, path, "mu exit");
                    for (VarId id : inner) {
                        visible_.erase(id);
                    }
                }
            },
            d.rhs);
        declare(d.bound, path, added);
    }
};

}  // namespace

std::vector<Diagnostic> check_wf(const Term& term) {
    Checker c;
    std::vector<std::size_t> path;
    c.context(term.ctx, path);
    std::vector<Diagnostic> out = std::move(c.diags);
    bool found = false;
    for (const auto& d : term.ctx) {
        if (term.result.valid() && d.bound.id() == term.result.id()) {
            found = true;
        }
    }
    if (!term.result.valid() || !found) {
        out.push_back(Diagnostic{{}, "result variable is not bound at top level"});
    }
    return out;
}

}  // namespace laf
