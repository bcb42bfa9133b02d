#include "pddlkit/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pddlkit/io.hpp"
#include "pddlkit/parser.hpp"
#include "pddlkit/validator.hpp"

namespace pddlkit {

using json = nlohmann::json;

std::string_view to_string(Tier t) {
    switch (t) {
        case Tier::Simple: return "simple";
        case Tier::Medium: return "medium";
        case Tier::Hard: return "hard";
    }
    return "simple";
}

std::optional<Tier> tier_from_string(std::string_view s) {
    for (Tier t : kAllTiers) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

const std::vector<std::string>& corpus_categories() {
    static const std::vector<std::string> cats = {"Navigation", "Transportation",    "Manipulation", "Monitoring",
                                                  "Exploration", "Aerial Operations", "Adaptation"};
    return cats;
}

std::string CorpusProblem::label() const { return std::string(to_string(tier)) + "-" + std::to_string(index + 1); }

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

/// Joins wrapped lines of a paragraph with single spaces; blank lines
/// separate paragraphs.
std::string unwrap(const std::vector<std::string>& lines) {
    std::string out;
    bool blank = false;
    for (const auto& l : lines) {
        const std::string t = trim(l);
        if (t.empty()) {
            blank = !out.empty();
            continue;
        }
        if (!out.empty()) out += blank ? "\n\n" : " ";
        out += t;
        blank = false;
    }
    return out;
}

std::string first_diagnostic(const std::vector<Diagnostic>& diags) {
    if (diags.empty()) return "unknown error";
    const auto& d = diags.front();
    return "line " + std::to_string(d.location.line) + ": " + d.message;
}

}  // namespace

Descriptions Descriptions::parse(std::string_view text) {
    Descriptions out;
    std::istringstream in{std::string(text)};
    std::string line;
    enum class Section { None, Domain, Action } sec = Section::None;
    std::vector<std::string> buf;
    std::string action;
    std::set<std::string> seen;
    bool has_domain = false;
    auto flush = [&] {
        if (sec == Section::Domain) out.domain = unwrap(buf);
        if (sec == Section::Action) out.actions.push_back({action, unwrap(buf)});
        buf.clear();
    };
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (!t.empty() && t[0] == '#') continue;
        if (!t.empty() && t.front() == '[' && t.back() == ']') {
            flush();
            const std::string head = trim(t.substr(1, t.size() - 2));
            if (head == "domain") {
                if (has_domain) throw CorpusError("descriptions: duplicate [domain] section");
                has_domain = true;
                sec = Section::Domain;
            } else if (head.rfind("action ", 0) == 0) {
                action = trim(head.substr(7));
                for (auto& c : action) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                if (!seen.insert(action).second) throw CorpusError("descriptions: duplicate action " + action);
                sec = Section::Action;
            } else {
                throw CorpusError("descriptions line " + std::to_string(line_no) + ": unknown section [" + head + "]");
            }
            continue;
        }
        if (sec == Section::None) {
            if (!t.empty()) throw CorpusError("descriptions line " + std::to_string(line_no) + ": text before any section");
            continue;
        }
        buf.push_back(line);
    }
    flush();
    if (!has_domain || out.domain.empty()) throw CorpusError("descriptions: missing [domain] text");
    return out;
}

const std::string* Descriptions::find(std::string_view action) const {
    for (const auto& a : actions) {
        if (a.action == action) return &a.text;
    }
    return nullptr;
}

std::vector<const CorpusProblem*> ManifestEntry::tier(Tier t) const {
    std::vector<const CorpusProblem*> out;
    for (const auto& p : problems) {
        if (p.tier == t) out.push_back(&p);
    }
    return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    const auto root = path.parent_path();
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw CorpusError(path.string() + ": " + e.what());
    } catch (const IoError& e) {
        throw CorpusError(e.what());
    }
    if (doc.value("format", "") != "pddlkit-corpus") throw CorpusError(path.string() + ": not a pddlkit corpus manifest");
    if (doc.value("version", 0) != 1) throw CorpusError(path.string() + ": unsupported manifest version");
    if (!doc.contains("domains") || !doc["domains"].is_array()) throw CorpusError(path.string() + ": no domains list");

    auto load = [&](const std::filesystem::path& rel) {
        try {
            return read_text_file(root / rel);
        } catch (const IoError& e) {
            throw CorpusError(std::string("missing file: ") + e.what());
        }
    };

    std::vector<ManifestEntry> out;
    std::set<std::string> ids;
    for (const auto& d : doc["domains"]) {
        ManifestEntry e;
        try {
            e.domain_id = d.at("id").get<std::string>();
            const std::string where = "domain " + e.domain_id;
            if (!ids.insert(e.domain_id).second) throw CorpusError("duplicate domain id " + e.domain_id);
            e.category = d.at("category").get<std::string>();
            const auto& cats = corpus_categories();
            if (std::find(cats.begin(), cats.end(), e.category) == cats.end()) {
                throw CorpusError(where + ": unknown category " + e.category);
            }

            e.domain_file = root / d.at("domain").get<std::string>();
            e.domain_text = load(d.at("domain").get<std::string>());
            auto parsed = parse_domain(e.domain_text);
            if (!parsed) throw CorpusError(where + ": " + e.domain_file.string() + " " + first_diagnostic(parsed.diagnostics));
            e.domain = std::move(*parsed.value);

            const auto desc = Descriptions::parse(load(d.at("descriptions").get<std::string>()));
            e.domain_description = desc.domain;
            for (const auto& a : e.domain.actions) {
                if (!desc.find(a.name)) throw CorpusError(where + ": no description for action " + a.name);
            }
            for (const auto& a : desc.actions) {
                if (!e.domain.find_action(a.action)) {
                    throw CorpusError(where + ": description for unknown action " + a.action);
                }
            }
            e.action_descriptions = desc.actions;

            if (d.contains("extern")) {
                auto ext = Extern::parse(load(d["extern"].get<std::string>()));
                if (!ext) throw CorpusError(where + ": extern " + first_diagnostic(ext.diagnostics));
                e.ext = std::move(*ext.value);
            } else {
                e.ext = Extern::from_domain(e.domain);
            }

            const json problems = d.at("problems");
            const json plans = d.value("plans", json::object());
            for (Tier t : kAllTiers) {
                const std::string tn(to_string(t));
                const auto files = problems.value(tn, std::vector<std::string>{});
                if (files.size() != kProblemsPerTier) {
                    throw CorpusError(where + ": tier " + tn + " has " + std::to_string(files.size()) +
                                      " problems, expected " + std::to_string(kProblemsPerTier));
                }
                const auto plan_files = plans.value(tn, std::vector<std::string>{});
                if (!plan_files.empty() && plan_files.size() != files.size()) {
                    throw CorpusError(where + ": tier " + tn + " lists " + std::to_string(plan_files.size()) +
                                      " plans for " + std::to_string(files.size()) + " problems");
                }
                for (std::size_t i = 0; i < files.size(); ++i) {
                    CorpusProblem cp;
                    cp.tier = t;
                    cp.index = i;
                    cp.file = root / files[i];
                    cp.text = load(files[i]);
                    auto p = parse_problem(cp.text, e.domain);
                    if (!p) throw CorpusError(where + ": " + cp.file.string() + " " + first_diagnostic(p.diagnostics));
                    cp.problem = std::move(*p.value);
                    if (!plan_files.empty()) {
                        cp.plan_file = root / plan_files[i];
                        auto plan = parse_plan(load(plan_files[i]));
                        if (!plan) {
                            throw CorpusError(where + ": " + cp.plan_file->string() + " " +
                                              first_diagnostic(plan.diagnostics));
                        }
                        auto rep = validate_plan(e.domain, cp.problem, *plan.value);
                        if (!rep.valid()) {
                            throw CorpusError(where + ": ground-truth plan " + cp.plan_file->string() +
                                              " fails at step " + std::to_string(rep.failed_step + 1) + ": " +
                                              rep.reason);
                        }
                        cp.gt_plan = std::move(*plan.value);
                    }
                    e.problems.push_back(std::move(cp));
                }
            }
        } catch (const json::exception& ex) {
            throw CorpusError("manifest entry " + (e.domain_id.empty() ? std::string("?") : e.domain_id) + ": " +
                              ex.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::pair<std::vector<const ManifestEntry*>, std::vector<const ManifestEntry*>> split_by_complexity(
    const std::vector<ManifestEntry>& entries, const Weights& w, const Rational& threshold) {
    std::pair<std::vector<const ManifestEntry*>, std::vector<const ManifestEntry*>> out;
    for (const auto& e : entries) {
        const auto r = complexity_report(e.domain, w, threshold);
        (r.cls == ComplexityClass::Simple ? out.first : out.second).push_back(&e);
    }
    return out;
}

std::vector<std::string> domain_vocabulary(const Domain& dom) {
    std::vector<std::string> out;
    for (const auto& t : dom.types) out.push_back(t.name);
    for (const auto& c : dom.constants) {
        if (std::find(out.begin(), out.end(), c.name) == out.end()) out.push_back(c.name);
    }
    return out;
}

}  // namespace pddlkit
