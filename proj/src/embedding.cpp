#include <cctype>
#include <cmath>

#include <json.hpp>

#include "http.hpp"
#include "pddlkit/retrieval.hpp"

namespace pddlkit {

using json = nlohmann::json;

std::uint64_t HashingEmbedder::fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> HashingEmbedder::tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == '[') {
            const auto j = text.find(']', i);
            if (j != std::string_view::npos) {
                std::string tok(text.substr(i, j - i + 1));
                for (auto& ch : tok) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                out.push_back(std::move(tok));
                i = j + 1;
                continue;
            }
        }
        if (std::isalnum(c)) {
            std::string tok;
            while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) {
                tok += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
                ++i;
            }
            out.push_back(std::move(tok));
            continue;
        }
        ++i;
    }
    return out;
}

Vector HashingEmbedder::embed(std::string_view text) const {
    const auto toks = tokens(text);
    if (toks.empty()) throw RetrievalError("cannot embed text without tokens");
    std::vector<double> counts(dim_, 0.0);
    for (const auto& t : toks) counts[fnv1a(t) % dim_] += 1.0;
    double norm = 0.0;
    for (double v : counts) norm += v * v;
    norm = std::sqrt(norm);
    Vector out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<float>(counts[i] / norm);
    return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig cfg, std::shared_ptr<CallLog> log)
    : cfg_(std::move(cfg)), log_(std::move(log)) {}

Vector HttpEmbedder::embed(std::string_view text) const {
    if (text.empty()) throw RetrievalError("cannot embed empty text");
    const auto start = std::chrono::steady_clock::now();
    json entry = {{"kind", "embedding"}, {"model", cfg_.model}};
    auto finish = [&](bool ok) {
        entry["ok"] = ok;
        entry["ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (log_) log_->record(entry.dump());
    };
    detail::HttpResponse res;
    try {
        res = detail::post_json(cfg_.base_url, "/embeddings",
                                json{{"model", cfg_.model}, {"input", std::string(text)}}.dump(), cfg_.api_key,
                                cfg_.timeout);
    } catch (const BackendError& e) {
        entry["error"] = e.what();
        finish(false);
        throw;
    }
    entry["status"] = res.status;
    if (res.status != 200) {
        finish(false);
        throw BackendError("embedding request failed with HTTP " + std::to_string(res.status));
    }
    auto doc = json::parse(res.body, nullptr, false);
    const json* vec = nullptr;
    if (!doc.is_discarded()) {
        if (doc.contains("vector")) {
            vec = &doc["vector"];
        } else if (doc.contains("data") && !doc["data"].empty() && doc["data"][0].contains("embedding")) {
            vec = &doc["data"][0]["embedding"];
        }
    }
    if (!vec || !vec->is_array()) {
        finish(false);
        throw BackendError("embedding response has no vector");
    }
    Vector out;
    out.reserve(vec->size());
    for (const auto& x : *vec) out.push_back(x.get<float>());
    if (out.size() != cfg_.dimension) {
        finish(false);
        throw BackendError("embedding has dimension " + std::to_string(out.size()) + ", expected " +
                           std::to_string(cfg_.dimension));
    }
    finish(true);
    return out;
}

double cosine(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw RetrievalError("dimension mismatch in cosine");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace pddlkit
