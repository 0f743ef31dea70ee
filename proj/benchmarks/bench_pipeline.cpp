#include "aggstream/engine.hpp"
#include "aggstream/learners/hoeffding_tree.hpp"
#include "aggstream/learners/logistic.hpp"
#include "aggstream/rng.hpp"
#include "aggstream/synth.hpp"
#include "aggstream/textprep.hpp"

#include <benchmark/benchmark.h>

using namespace aggstream;

namespace {

const std::vector<TweetRecord>& corpus() {
    static std::vector<TweetRecord> records =
        generate_synthetic(SyntheticConfig::defaults(20000), 1);
    return records;
}

Lexicons& lexicons() {
    static Lexicons lex = Lexicons::load_dir(AGGSTREAM_SOURCE_DIR "/data");
    return lex;
}

void BM_Clean(benchmark::State& state) {
    const auto& records = corpus();
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(clean(records[i % records.size()].text));
        ++i;
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}
BENCHMARK(BM_Clean);

void BM_Extract(benchmark::State& state) {
    const auto& records = corpus();
    FeatureLayout layout;
    size_t i = 0;
    for (auto _ : state) {
        const TweetRecord& record = records[i % records.size()];
        CleanedText text = clean(record.text);
        benchmark::DoNotOptimize(
            extract(record, text, lexicons().swear_seed, lexicons(), layout));
        ++i;
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}
BENCHMARK(BM_Extract);

void BM_HoeffdingTrainOne(benchmark::State& state) {
    std::mt19937_64 g(3);
    std::vector<Instance> instances;
    for (int i = 0; i < 4096; ++i) {
        Instance inst;
        for (int f = 0; f < 16; ++f) inst.features.push_back(rng::uniform01(g));
        inst.label = inst.features[0] > 0.5 ? ClassLabel::Abusive : ClassLabel::Normal;
        instances.push_back(std::move(inst));
    }
    HoeffdingTree tree(ClassScheme::TwoClass, 16, HoeffdingTreeParams{});
    size_t i = 0;
    for (auto _ : state) {
        tree.train_one(instances[i % instances.size()]);
        ++i;
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}
BENCHMARK(BM_HoeffdingTrainOne);

void BM_EngineBatch(benchmark::State& state) {
    const auto& records = corpus();
    PipelineConfig config;
    config.workers = static_cast<int>(state.range(0));
    config.batch_size = 1024;
    for (auto _ : state) {
        Engine engine(config, lexicons());
        std::vector<std::unique_ptr<RecordSource>> sources;
        sources.push_back(std::make_unique<VectorRecordSource>(records));
        RecordStream stream(std::move(sources), 0.0);
        engine.run(stream);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(records.size()));
}
BENCHMARK(BM_EngineBatch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
