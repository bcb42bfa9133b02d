// Parallel kernels against their serial references.
//
//   build/bench/pddlkit_bench --benchmark_filter=Coarse

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "pddlkit/corpus.hpp"
#include "pddlkit/eval.hpp"
#include "pddlkit/generation.hpp"
#include "pddlkit/retrieval.hpp"

using namespace pddlkit;

namespace {

Index random_index(std::size_t n, std::size_t dim) {
    std::mt19937 rng(42);
    std::normal_distribution<float> g;
    Index idx;
    idx.dimension = dim;
    for (std::size_t i = 0; i < n; ++i) {
        ActionCard c;
        c.domain_id = "d" + std::to_string(i % 50);
        c.action_name = "a" + std::to_string(i);
        c.embedding.resize(dim);
        for (auto& x : c.embedding) x = g(rng);
        idx.cards.push_back(std::move(c));
    }
    return idx;
}

Vector random_query(std::size_t dim) {
    std::mt19937 rng(7);
    std::normal_distribution<float> g;
    Vector v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

const std::vector<ManifestEntry>& corpus() {
    static const auto entries = load_manifest(std::filesystem::path(PDDLKIT_FIXTURES_DIR) / "corpus" / "manifest.json");
    return entries;
}

void BM_CoarseSerial(benchmark::State& state) {
    const Index idx = random_index(static_cast<std::size_t>(state.range(0)), 768);
    const Vector q = random_query(768);
    for (auto _ : state) benchmark::DoNotOptimize(query_coarse_serial(idx, q, 5));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CoarseParallel(benchmark::State& state) {
    const Index idx = random_index(static_cast<std::size_t>(state.range(0)), 768);
    const Vector q = random_query(768);
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(query_coarse(idx, q, 5));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateCorpus(benchmark::State& state) {
    std::map<std::string, GeneratedDomain> gen;
    for (const auto& e : corpus()) {
        GeneratedDomain g;
        g.domain = e.domain;
        for (const auto& p : e.problems) g.problems.emplace_back(p.problem);
        gen[e.domain_id] = std::move(g);
    }
    BuiltinEngine engine;
    EvalOptions opts;
    opts.jobs = static_cast<int>(state.range(0));
    omp_set_num_threads(opts.jobs);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_corpus(corpus(), gen, engine, opts));
}

void BM_BuildIndex(benchmark::State& state) {
    HashingEmbedder embedder;
    const auto sources = corpus_card_sources(corpus());
    const int jobs = static_cast<int>(state.range(0));
    omp_set_num_threads(jobs);
    for (auto _ : state) {
        VerbLexicon lex;
        benchmark::DoNotOptimize(build_index(sources, embedder, lex, nullptr, nullptr, jobs));
    }
}

}  // namespace

BENCHMARK(BM_CoarseSerial)->Arg(1000)->Arg(20000)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CoarseParallel)
    ->ArgsProduct({{1000, 20000, 100000}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond)
    ->UseRealTime();
BENCHMARK(BM_EvaluateCorpus)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BuildIndex)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
