#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "pddlkit/corpus.hpp"
#include "pddlkit/io.hpp"
#include "pddlkit/parser.hpp"

namespace testing_support {

inline std::filesystem::path fixtures() { return PDDLKIT_FIXTURES_DIR; }

inline std::string fixture_text(const std::string& rel) { return pddlkit::read_text_file(fixtures() / rel); }

inline pddlkit::Domain domain_from(std::string_view text) {
    auto p = pddlkit::parse_domain(text);
    if (!p) throw std::runtime_error("fixture domain does not parse: " + p.diagnostics.front().message);
    return *p.value;
}

inline pddlkit::Problem problem_from(std::string_view text, const pddlkit::Domain& dom) {
    auto p = pddlkit::parse_problem(text, dom);
    if (!p) throw std::runtime_error("fixture problem does not parse: " + p.diagnostics.front().message);
    return *p.value;
}

inline pddlkit::Plan plan_from(std::string_view text) {
    auto p = pddlkit::parse_plan(text);
    if (!p) throw std::runtime_error("plan does not parse");
    return *p.value;
}

inline const std::vector<pddlkit::ManifestEntry>& corpus() {
    static const auto entries = pddlkit::load_manifest(fixtures() / "corpus" / "manifest.json");
    return entries;
}

inline const pddlkit::ManifestEntry& entry(const std::string& id) {
    for (const auto& e : corpus()) {
        if (e.domain_id == id) return e;
    }
    throw std::runtime_error("no fixture " + id);
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> n{0};
        path_ = std::filesystem::temp_directory_path() /
                ("pddlkit-test-" + std::to_string(getpid()) + "-" + std::to_string(n++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support
