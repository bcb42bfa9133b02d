#include "pddlkit/planner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "pddlkit/parser.hpp"
#include "pddlkit/validator.hpp"

namespace pddlkit {

std::string_view to_string(SolveResult::Outcome o) {
    switch (o) {
        case SolveResult::Outcome::Solved: return "solved";
        case SolveResult::Outcome::ProvedUnsolvable: return "unsolvable";
        case SolveResult::Outcome::LimitExceeded: return "limit-exceeded";
    }
    return "limit-exceeded";
}

namespace {

struct GroundAction {
    const Action* action;
    std::vector<std::string> args;
};

/// Predicates no action ever changes; their truth is fixed by the problem's
/// initial state, which lets grounding drop hopeless instantiations early.
std::set<std::string> static_predicates(const Domain& dom) {
    std::set<std::string> changed;
    for (const auto& a : dom.actions) {
        for (const Effect* e : conjuncts(a.effect)) {
            if (e->kind == Effect::Kind::Add || e->kind == Effect::Kind::Delete) changed.insert(e->atom.name);
        }
    }
    std::set<std::string> out;
    for (const auto& p : dom.predicates) {
        if (!changed.count(p.name)) out.insert(p.name);
    }
    return out;
}

/// Enumerates instantiations of every action. Returns false when the
/// ground-action cap is hit.
bool ground_actions(const Domain& dom, const Problem& prob, std::size_t cap, std::vector<GroundAction>& out) {
    const TypeHierarchy types(dom.types);
    std::vector<TypedName> objects = dom.constants;
    objects.insert(objects.end(), prob.objects.begin(), prob.objects.end());
    const auto statics = static_predicates(dom);

    for (const auto& act : dom.actions) {
        std::vector<std::vector<std::string>> domains;
        for (const auto& p : act.params) {
            std::vector<std::string> cands;
            for (const auto& o : objects) {
                if (types.is_subtype(o.type, p.type)) cands.push_back(o.name);
            }
            domains.push_back(std::move(cands));
        }
        // Static top-level conjuncts, tested as soon as all their variables are bound.
        std::vector<std::pair<const Condition*, std::size_t>> checks;  // (conjunct, last param index it needs)
        for (const Condition* c : conjuncts(act.precondition)) {
            const Condition* inner = c->kind == Condition::Kind::Not ? &c->children[0] : c;
            if (inner->kind != Condition::Kind::Atom) continue;
            if (inner->atom.name != "=" && !statics.count(inner->atom.name)) continue;
            std::size_t need = 0;
            bool ok = true;
            for (const auto& t : inner->atom.args) {
                if (!is_variable(t)) continue;
                auto it = std::find_if(act.params.begin(), act.params.end(), [&](const TypedName& p) { return p.name == t; });
                if (it == act.params.end()) {
                    ok = false;
                    break;
                }
                need = std::max(need, static_cast<std::size_t>(it - act.params.begin()) + 1);
            }
            if (ok) checks.emplace_back(c, need);
        }

        State init = initial_state(prob);
        std::vector<std::string> args(act.params.size());
        Binding binding;
        bool capped = false;
        std::function<void(std::size_t)> rec = [&](std::size_t depth) {
            if (capped) return;
            for (const auto& [c, need] : checks) {
                if (need == depth && !holds(*c, init, binding)) return;
            }
            if (depth == act.params.size()) {
                if (out.size() >= cap) {
                    capped = true;
                    return;
                }
                out.push_back({&act, args});
                return;
            }
            for (const auto& o : domains[depth]) {
                args[depth] = o;
                binding[act.params[depth].name] = o;
                rec(depth + 1);
            }
            binding.erase(act.params[depth].name);
        };
        rec(0);
        if (capped) return false;
    }
    return true;
}

struct Node {
    State state;
    std::size_t parent;
    std::size_t via;  // ground action index
    std::size_t depth;
};

Plan extract(const std::vector<Node>& nodes, std::size_t idx, const std::vector<GroundAction>& ground) {
    Plan plan;
    while (idx != 0) {
        const Node& n = nodes[idx];
        plan.steps.push_back({ground[n.via].action->name, ground[n.via].args});
        idx = n.parent;
    }
    std::reverse(plan.steps.begin(), plan.steps.end());
    return plan;
}

bool safe_holds(const Condition& c, const State& s, const Binding& b) {
    try {
        return holds(c, s, b);
    } catch (const EvalError&) {
        return false;
    }
}

}  // namespace

SolveResult solve(const Domain& dom, const Problem& prob, const SearchLimits& limits) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    SolveResult res;
    auto finish = [&](SolveResult::Outcome o, std::string msg = {}) {
        res.outcome = o;
        res.stats.duration = clock::now() - start;
        res.stats.message = std::move(msg);
        return res;
    };

    std::vector<GroundAction> ground;
    if (!ground_actions(dom, prob, limits.max_ground_actions, ground)) {
        return finish(SolveResult::Outcome::LimitExceeded, "grounding exceeded max_ground_actions");
    }
    std::vector<Binding> bindings;
    bindings.reserve(ground.size());
    for (const auto& g : ground) bindings.push_back(bind(*g.action, g.args));

    std::vector<Node> nodes;
    std::unordered_map<State, std::size_t, StateHash> seen;
    nodes.push_back({initial_state(prob), 0, 0, 0});
    seen.emplace(nodes[0].state, 0);
    if (safe_holds(prob.goal, nodes[0].state, {})) {
        return finish(SolveResult::Outcome::Solved);
    }

    std::deque<std::size_t> frontier{0};
    bool truncated = false;
    while (!frontier.empty()) {
        const std::size_t idx = frontier.front();
        frontier.pop_front();
        if (nodes[idx].depth >= limits.max_plan_length) {
            truncated = true;
            continue;
        }
        if (res.stats.expanded >= limits.max_expanded_states) {
            return finish(SolveResult::Outcome::LimitExceeded, "max_expanded_states reached");
        }
        if ((res.stats.expanded & 0xff) == 0 && clock::now() - start > limits.wall_clock_budget) {
            return finish(SolveResult::Outcome::LimitExceeded, "wall clock budget exhausted");
        }
        ++res.stats.expanded;
        for (std::size_t g = 0; g < ground.size(); ++g) {
            const State& cur = nodes[idx].state;
            if (!safe_holds(ground[g].action->precondition, cur, bindings[g])) continue;
            State next;
            try {
                next = apply(cur, *ground[g].action, ground[g].args);
            } catch (const EvalError&) {
                continue;
            }
            ++res.stats.generated;
            if (seen.count(next)) continue;
            const std::size_t child = nodes.size();
            const std::size_t depth = nodes[idx].depth + 1;
            seen.emplace(next, child);
            nodes.push_back({std::move(next), idx, g, depth});
            if (safe_holds(prob.goal, nodes[child].state, {})) {
                res.plan = extract(nodes, child, ground);
                return finish(SolveResult::Outcome::Solved);
            }
            frontier.push_back(child);
        }
    }
    if (truncated) return finish(SolveResult::Outcome::LimitExceeded, "max_plan_length reached");
    return finish(SolveResult::Outcome::ProvedUnsolvable, "reachable state space exhausted");
}

SolveResult BuiltinEngine::solve(const Domain& dom, const Problem& prob) const { return pddlkit::solve(dom, prob, limits_); }

// ---------------------------------------------------------------------------
// External solver

std::optional<Plan> extract_plan(std::string_view output) {
    Plan plan;
    std::size_t start = 0;
    while (start < output.size()) {
        std::size_t end = output.find('\n', start);
        if (end == std::string_view::npos) end = output.size();
        std::string_view line = output.substr(start, end - start);
        start = end + 1;
        if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
        const auto open = line.find('(');
        if (open == std::string_view::npos) continue;
        const auto close = line.find(')', open);
        if (close == std::string_view::npos) return std::nullopt;
        auto parsed = parse_plan(line.substr(open, close - open + 1));
        if (!parsed.ok() || parsed.value->steps.size() != 1) return std::nullopt;
        plan.steps.push_back(std::move(parsed.value->steps.front()));
    }
    return plan;
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
        tmpl.replace(pos, key.size(), value);
    }
    return tmpl;
}

struct ChildOutput {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

ChildOutput run_shell(const std::string& command, std::chrono::seconds timeout) {
    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) throw SolverError(SolverError::Kind::SpawnFailed, "pipe() failed");
    const pid_t pid = fork();
    if (pid < 0) throw SolverError(SolverError::Kind::SpawnFailed, "fork() failed");
    if (pid == 0) {
        setpgid(0, 0);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(err_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);

    ChildOutput res;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    int open_fds = 2;
    char buf[4096];
    while (open_fds > 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            res.timed_out = true;
            break;
        }
        const int rc = poll(fds, 2, static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR) continue;
        if (rc <= 0) continue;
        for (int k = 0; k < 2; ++k) {
            if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const ssize_t n = read(fds[k].fd, buf, sizeof buf);
            if (n > 0) {
                (k == 0 ? res.out : res.err).append(buf, static_cast<std::size_t>(n));
            } else {
                close(fds[k].fd);
                fds[k].fd = -1;
                --open_fds;
            }
        }
    }
    if (res.timed_out) kill(-pid, SIGKILL);
    for (auto& f : fds) {
        if (f.fd >= 0) close(f.fd);
    }
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

bool mentions_solved(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    return text.find("solved") != std::string::npos || text.find("found plan") != std::string::npos;
}

}  // namespace

SolveResult external_solve(const ExternalSolverConfig& cfg, const std::filesystem::path& domain_file,
                           const std::filesystem::path& problem_file) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    std::string cmd = substitute(cfg.command_template, "{domain}", shell_quote(domain_file.string()));
    cmd = substitute(cmd, "{problem}", shell_quote(problem_file.string()));

    const ChildOutput child = run_shell(cmd, cfg.timeout);
    SolveResult res;
    res.stats.duration = clock::now() - start;
    res.stats.message = child.err;
    if (child.timed_out) {
        throw SolverError(SolverError::Kind::Timeout, "external solver timed out after " +
                                                          std::to_string(cfg.timeout.count()) + "s");
    }
    if (child.exit_code == 127) {
        throw SolverError(SolverError::Kind::MissingExecutable, "external solver not found: " + child.err);
    }
    if (child.exit_code != 0) {
        res.outcome = SolveResult::Outcome::LimitExceeded;
        return res;
    }
    auto plan = extract_plan(child.out);
    if (!plan || (plan->empty() && !mentions_solved(child.out))) {
        res.outcome = SolveResult::Outcome::LimitExceeded;
        if (res.stats.message.empty()) res.stats.message = "no plan found in solver output";
        return res;
    }
    res.outcome = SolveResult::Outcome::Solved;
    res.plan = std::move(*plan);
    return res;
}

SolveResult ExternalEngine::solve(const Domain& dom, const Problem& prob) const {
    static std::atomic<unsigned> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("pddlkit-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    const auto dfile = dir / "domain.pddl";
    const auto pfile = dir / "problem.pddl";
    std::ofstream(dfile) << render_domain(dom);
    std::ofstream(pfile) << render_problem(prob);
    try {
        auto r = external_solve(cfg_, dfile, pfile);
        std::filesystem::remove_all(dir);
        return r;
    } catch (...) {
        std::filesystem::remove_all(dir);
        throw;
    }
}

}  // namespace pddlkit
