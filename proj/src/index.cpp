#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <omp.h>

#include <json.hpp>

#include "pddlkit/retrieval.hpp"

namespace pddlkit {

using json = nlohmann::json;

namespace {

constexpr int kIndexVersion = 1;

struct Candidate {
    std::size_t idx;
    double sim;
};

bool ranks_before(const Index& ix, const Candidate& a, const Candidate& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    const auto& ca = ix.cards[a.idx];
    const auto& cb = ix.cards[b.idx];
    if (ca.domain_id != cb.domain_id) return ca.domain_id < cb.domain_id;
    if (ca.action_name != cb.action_name) return ca.action_name < cb.action_name;
    return a.idx < b.idx;
}

bool excluded(const Index& idx, const ActionCard& c, const std::set<std::string>& extra) {
    return idx.exclusion.count(c.domain_id) || extra.count(c.domain_id);
}

void check_query(const Index& idx, const Vector& q, std::size_t k) {
    if (k < 1) throw RetrievalError("K must be at least 1");
    if (q.size() != idx.dimension) {
        throw RetrievalError("query has dimension " + std::to_string(q.size()) + ", index has " +
                             std::to_string(idx.dimension));
    }
}

std::vector<ScoredCard> finish(const Index& idx, std::vector<Candidate>& c, std::size_t k) {
    if (c.empty()) throw RetrievalError("no eligible cards after exclusion");
    const std::size_t n = std::min(k, c.size());
    std::partial_sort(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n), c.end(),
                      [&](const Candidate& a, const Candidate& b) { return ranks_before(idx, a, b); });
    std::vector<ScoredCard> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({&idx.cards[c[i].idx], c[i].sim});
    return out;
}

}  // namespace

std::string Index::to_json() const {
    json doc = {{"format", "pddlkit-index"}, {"version", kIndexVersion}, {"dimension", dimension},
                {"embedder", embedder},      {"exclusion", exclusion},   {"cards", json::array()}};
    for (const auto& c : cards) {
        doc["cards"].push_back({{"domain_id", c.domain_id},
                                {"action_name", c.action_name},
                                {"description", c.description},
                                {"abstracted", c.abstracted},
                                {"pddl", c.pddl_body},
                                {"embedding", c.embedding}});
    }
    return doc.dump(1);
}

Index Index::from_json(std::string_view text) {
    auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "pddlkit-index") {
        throw RetrievalError("not a pddlkit index file");
    }
    if (doc.value("version", 0) != kIndexVersion) {
        throw RetrievalError("unsupported index version " + std::to_string(doc.value("version", 0)));
    }
    try {
        Index idx;
        idx.dimension = doc.at("dimension").get<std::size_t>();
        idx.embedder = doc.value("embedder", "");
        idx.exclusion = doc.value("exclusion", std::set<std::string>{});
        for (const auto& c : doc.at("cards")) {
            ActionCard card;
            card.domain_id = c.at("domain_id").get<std::string>();
            card.action_name = c.at("action_name").get<std::string>();
            card.description = c.value("description", "");
            card.abstracted = c.value("abstracted", "");
            card.pddl_body = c.value("pddl", "");
            card.embedding = c.at("embedding").get<Vector>();
            if (card.embedding.size() != idx.dimension) {
                throw RetrievalError("card " + card.domain_id + "/" + card.action_name + " has dimension " +
                                     std::to_string(card.embedding.size()));
            }
            idx.cards.push_back(std::move(card));
        }
        return idx;
    } catch (const json::exception& e) {
        throw RetrievalError(std::string("malformed index file: ") + e.what());
    }
}

void Index::save(const std::filesystem::path& path) const {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw RetrievalError("cannot write " + path.string());
    out << to_json() << '\n';
}

Index Index::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RetrievalError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

Index build_index(const std::vector<CardSource>& sources, const Embedder& embedder, VerbLexicon& lexicon,
                  LLMBackend* abstraction_backend, std::vector<std::string>* warnings, int jobs) {
    Index idx;
    idx.dimension = embedder.dimension();
    idx.embedder = embedder.name();
    idx.cards.resize(sources.size());
    // Abstraction threads the lexicon through, so it runs in order.
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& s = sources[i];
        auto r = abstract_description(s.description, lexicon, s.vocabulary, abstraction_backend);
        lexicon = std::move(r.lexicon);
        if (warnings) {
            for (auto& w : r.warnings) warnings->push_back(s.domain_id + "/" + s.action_name + ": " + w);
        }
        idx.cards[i] = {s.domain_id, s.action_name, s.description, std::move(r.text), s.pddl_body, {}};
    }
    std::vector<std::string> errors(sources.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(sources.size()); ++i) {
        try {
            idx.cards[i].embedding = embedder.embed(idx.cards[i].abstracted);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw RetrievalError("embedding " + sources[i].domain_id + "/" + sources[i].action_name +
                                 " failed: " + errors[i]);
        }
    }
    return idx;
}

std::vector<ScoredCard> query_coarse_serial(const Index& idx, const Vector& query, std::size_t k,
                                            const std::set<std::string>& exclude) {
    check_query(idx, query, k);
    std::vector<Candidate> all;
    for (std::size_t i = 0; i < idx.cards.size(); ++i) {
        if (excluded(idx, idx.cards[i], exclude)) continue;
        all.push_back({i, cosine(idx.cards[i].embedding, query)});
    }
    if (all.empty()) throw RetrievalError("no eligible cards after exclusion");
    std::sort(all.begin(), all.end(), [&](const Candidate& a, const Candidate& b) { return ranks_before(idx, a, b); });
    std::vector<ScoredCard> out;
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back({&idx.cards[all[i].idx], all[i].sim});
    return out;
}

std::vector<ScoredCard> query_coarse(const Index& idx, const Vector& query, std::size_t k,
                                     const std::set<std::string>& exclude) {
    check_query(idx, query, k);
    std::vector<Candidate> merged;
#pragma omp parallel
    {
        std::vector<Candidate> local;
#pragma omp for nowait schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(idx.cards.size()); ++i) {
            const auto& c = idx.cards[i];
            if (excluded(idx, c, exclude)) continue;
            local.push_back({static_cast<std::size_t>(i), cosine(c.embedding, query)});
        }
        // Each thread only needs to contribute its own top k.
        if (local.size() > k) {
            std::partial_sort(local.begin(), local.begin() + static_cast<std::ptrdiff_t>(k), local.end(),
                              [&](const Candidate& a, const Candidate& b) { return ranks_before(idx, a, b); });
            local.resize(k);
        }
#pragma omp critical
        merged.insert(merged.end(), local.begin(), local.end());
    }
    return finish(idx, merged, k);
}

std::vector<ScoredCard> query_coarse(const Index& idx, const Embedder& embedder, std::string_view query_abstracted,
                                     std::size_t k, const std::set<std::string>& exclude) {
    return query_coarse(idx, embedder.embed(query_abstracted), k, exclude);
}

std::vector<Message> rerank_prompt(const std::vector<ScoredCard>& candidates, std::string_view query_desc) {
    std::string body = "Target action description:\n" + std::string(query_desc) + "\n\nCandidates:\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        body += std::to_string(i + 1) + ". " + candidates[i].card->description + "\n";
    }
    body +=
        "\nWhich candidate describes an action whose PDDL formulation would be most similar to the target? "
        "Answer with the number of the most relevant candidate only.";
    return {{"system", "You select the most relevant example action for a planning task."}, {"user", body}};
}

RerankResult rerank_fine(const std::vector<ScoredCard>& candidates, std::string_view query_desc,
                         LLMBackend& backend) {
    if (candidates.empty()) throw RetrievalError("rerank needs at least one candidate");
    RerankResult r;
    if (candidates.size() == 1) return r;
    r.backend_called = true;
    std::string reply;
    try {
        reply = backend.complete(rerank_prompt(candidates, query_desc), {});
    } catch (const BackendError& e) {
        r.warning = std::string("rerank backend failed, using coarse rank 1: ") + e.what();
        return r;
    }
    static const std::regex num(R"(\b(\d+)\b)");
    std::smatch m;
    if (std::regex_search(reply, m, num) && m[1].length() <= 6) {
        const auto n = std::stoul(m[1].str());
        if (n >= 1 && n <= candidates.size()) {
            r.chosen = n - 1;
            return r;
        }
    }
    r.warning = "rerank answer not a candidate number, using coarse rank 1";
    return r;
}

}  // namespace pddlkit
