#include <gtest/gtest.h>

#include <fstream>
#include <functional>

#include <json.hpp>

#include "pddlkit/corpus.hpp"
#include "support.hpp"

using namespace pddlkit;
using namespace testing_support;
using json = nlohmann::json;

namespace {

/// Copy of the fixture corpus whose manifest can be edited.
class CorpusCopy {
public:
    CorpusCopy() {
        std::filesystem::copy(fixtures() / "corpus", dir_.path(), std::filesystem::copy_options::recursive);
        manifest_ = json::parse(read_text_file(manifest()));
    }
    std::filesystem::path manifest() const { return dir_ / "manifest.json"; }
    std::filesystem::path operator/(const std::string& rel) const { return dir_ / rel; }
    json& doc() { return manifest_; }
    void save() { write_text_file(manifest(), manifest_.dump(1)); }
    void write(const std::string& rel, const std::string& text) { write_text_file(dir_ / rel, text); }

private:
    TempDir dir_;
    json manifest_;
};

std::string load_error(const std::function<void(CorpusCopy&)>& edit) {
    CorpusCopy c;
    edit(c);
    c.save();
    try {
        load_manifest(c.manifest());
    } catch (const CorpusError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Corpus, LoadsFixtureCorpus) {
    const auto& entries = corpus();
    ASSERT_EQ(entries.size(), 5u);
    for (const auto& e : entries) {
        EXPECT_EQ(e.problems.size(), 9u) << e.domain_id;
        for (Tier t : kAllTiers) EXPECT_EQ(e.tier(t).size(), 3u);
        EXPECT_EQ(e.action_descriptions.size(), e.domain.actions.size());
        EXPECT_FALSE(e.domain_description.empty());
        for (const auto& p : e.problems) EXPECT_TRUE(p.gt_plan.has_value()) << p.label();
    }
    EXPECT_EQ(entries[0].problems[4].label(), "medium-2");
}

TEST(Corpus, LoadingIsIdempotent) {
    const auto path = fixtures() / "corpus" / "manifest.json";
    EXPECT_EQ(load_manifest(path), load_manifest(path));
}

TEST(Corpus, RejectsBrokenManifests) {
    auto expect = [](const std::string& needle, const std::function<void(CorpusCopy&)>& edit) {
        const auto msg = load_error(edit);
        EXPECT_NE(msg.find(needle), std::string::npos) << "expected `" << needle << "`, got `" << msg << "`";
    };
    expect("not a pddlkit corpus manifest", [](CorpusCopy& c) { c.doc()["format"] = "other"; });
    expect("unsupported manifest version", [](CorpusCopy& c) { c.doc()["version"] = 2; });
    expect("duplicate domain id", [](CorpusCopy& c) { c.doc()["domains"][1]["id"] = c.doc()["domains"][0]["id"]; });
    expect("unknown category", [](CorpusCopy& c) { c.doc()["domains"][0]["category"] = "Underwater"; });
    expect("tier simple has 2 problems",
           [](CorpusCopy& c) { c.doc()["domains"][0]["problems"]["simple"].erase(0); });
    expect("missing file", [](CorpusCopy& c) { c.doc()["domains"][0]["domain"] = "nowhere.pddl"; });
    expect("lists 2 plans", [](CorpusCopy& c) { c.doc()["domains"][0]["plans"]["hard"].erase(0); });
    expect("ground-truth plan", [](CorpusCopy& c) {
        c.write("uav-landing/plans/simple-1.plan", "(inspect u1 p1)\n(inspect u1 p1)\n(takeoff u1 p9)\n");
    });
    expect("no description for action", [](CorpusCopy& c) {
        c.write("uav-landing/descriptions.txt", "[domain]\nPads.\n\n[action land]\nLand.\n");
    });
    expect("description for unknown action", [](CorpusCopy& c) {
        std::string d = read_text_file(c / "uav-landing/descriptions.txt");
        c.write("uav-landing/descriptions.txt", d + "\n[action hover]\nHover.\n");
    });
    expect("duplicate action", [](CorpusCopy& c) {
        std::string d = read_text_file(c / "uav-landing/descriptions.txt");
        c.write("uav-landing/descriptions.txt", d + "\n[action land]\nAgain.\n");
    });
    expect("uav-landing", [](CorpusCopy& c) {
        c.write("uav-landing/problems/hard-2.pddl", "(define (problem x) (:domain uav-landing) (:objects q - boat))");
    });
}

TEST(Corpus, OptionalExternOverridesDomainTypes) {
    CorpusCopy c;
    c.write("landing.extern", "(:requirements :strips :typing) (:types uav pad - object) (:constants base - pad)");
    for (auto& d : c.doc()["domains"]) {
        if (d["id"] == "uav-landing") d["extern"] = "landing.extern";
    }
    c.save();
    const auto entries = load_manifest(c.manifest());
    for (const auto& e : entries) {
        if (e.domain_id != "uav-landing") continue;
        ASSERT_EQ(e.ext.constants.size(), 1u);
        EXPECT_EQ(e.ext.constants[0].name, "base");
    }
    c.write("landing.extern", "(:types uav pad");
    EXPECT_THROW(load_manifest(c.manifest()), CorpusError);
}

TEST(Corpus, DescriptionsFormat) {
    const auto d = Descriptions::parse("[domain]\nLine one\nline two.\n\n[action fly]\n  Fly  fast.\n");
    EXPECT_EQ(d.domain, "Line one line two.");
    ASSERT_EQ(d.actions.size(), 1u);
    EXPECT_EQ(d.actions[0].action, "fly");
    ASSERT_TRUE(d.find("fly"));
    EXPECT_THROW(Descriptions::parse("text first\n[domain]\nx\n"), CorpusError);
    EXPECT_THROW(Descriptions::parse("[action fly]\nx\n"), CorpusError);
    EXPECT_THROW(Descriptions::parse("[domain]\nx\n[weird]\ny\n"), CorpusError);
}

TEST(Corpus, SplitByComplexityIsStable) {
    const auto [simple, complex] = split_by_complexity(corpus(), Weights::unit());
    EXPECT_TRUE(simple.empty());
    ASSERT_EQ(complex.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(complex[i], &corpus()[i]);
    const auto [all_simple, none] = split_by_complexity(corpus(), Weights::unit(), Rational(1000));
    EXPECT_EQ(all_simple.size(), 5u);
    EXPECT_TRUE(none.empty());
}
