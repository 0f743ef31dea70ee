#include "aggstream/engine.hpp"

#include "aggstream/error.hpp"
#include "aggstream/learners/hoeffding_tree.hpp"
#include "aggstream/learners/logistic.hpp"
#include "aggstream/learners/random_forest.hpp"
#include "aggstream/rng.hpp"
#include "aggstream/textprep.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <iostream>
#include <ostream>
#include <thread>

namespace aggstream {

void PipelineConfig::validate() const {
    if (workers < 1) throw ConfigError("workers must be >= 1");
    bool count_based = batch_size > 0;
    bool time_based = batch_interval_ms > 0;
    if (count_based == time_based) {
        throw ConfigError("exactly one of batch_size / batch_interval_ms must be set");
    }
    if (alert_threshold < 0.0 || alert_threshold > 1.0) {
        throw ConfigError("alert_threshold must be in [0,1]");
    }
    if (sample_rate < 0.0 || sample_rate > 1.0) {
        throw ConfigError("sample_rate must be in [0,1]");
    }
    if (boost_factor < 1.0) throw ConfigError("boost_factor must be >= 1");
}

std::vector<std::vector<size_t>> partition_indices(size_t n, int partitions, uint64_t seed) {
    if (partitions < 1) throw ContractViolation("partition count must be >= 1");
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 g(seed);
    rng::shuffle(order, g);

    std::vector<std::vector<size_t>> result(static_cast<size_t>(partitions));
    for (size_t i = 0; i < n; ++i) {
        result[i % static_cast<size_t>(partitions)].push_back(order[i]);
    }
    // batch order within each partition
    for (auto& part : result) std::sort(part.begin(), part.end());
    return result;
}

std::optional<Alert> make_alert(const ClassifiedInstance& classified, double threshold,
                                ClassScheme scheme, TimestampMs now) {
    int predicted = classified.prediction.argmax();
    if (predicted == kNormalClass) return std::nullopt;
    double confidence = classified.prediction.probs[static_cast<size_t>(predicted)];
    if (confidence < threshold) return std::nullopt;
    Alert alert;
    alert.source_id = classified.record.id;
    alert.predicted_class = predicted;
    alert.predicted_name = std::string(effective_class_name(predicted, scheme));
    alert.confidence = confidence;
    alert.emitted_at = now;
    return alert;
}

std::vector<size_t> boosted_sample_indices(const std::vector<ClassifiedInstance>& classified,
                                           double sample_rate, double boost_factor,
                                           uint64_t seed) {
    std::vector<size_t> kept;
    if (sample_rate <= 0.0) return kept;
    std::mt19937_64 g(seed);
    double boosted = std::min(1.0, boost_factor * sample_rate);
    for (size_t i = 0; i < classified.size(); ++i) {
        bool aggressive = classified[i].prediction.argmax() != kNormalClass;
        double keep_probability = aggressive ? boosted : sample_rate;
        if (rng::uniform01(g) < keep_probability) kept.push_back(i);
    }
    return kept;
}

void throughput_report(const RunLog& log, std::ostream& out) {
    out << "batch,records,labeled,seconds,tweets_per_s\n";
    for (const BatchLogEntry& entry : log.batches) {
        out << entry.seq << ',' << entry.records << ',' << entry.labeled << ','
            << entry.duration_s << ',' << entry.tps << "\n";
    }
    out << "overall," << log.total_records << ",," << log.total_seconds << ','
        << log.overall_tps() << "\n";
}

std::unique_ptr<Classifier> make_classifier(const PipelineConfig& config) {
    const int features = config.layout.active_count();
    switch (config.classifier) {
        case ClassifierKind::HoeffdingTree:
            return std::make_unique<HoeffdingTree>(config.scheme, features, config.ht);
        case ClassifierKind::AdaptiveRandomForest:
            return std::make_unique<AdaptiveRandomForest>(config.scheme, features, config.arf,
                                                          rng::mix(config.seed, 0x617266ULL));
        case ClassifierKind::Logistic:
            return std::make_unique<StreamingLogisticRegression>(config.scheme, features,
                                                                 config.slr);
    }
    throw ConfigError("unknown classifier kind");
}

Engine::Engine(PipelineConfig config, Lexicons lexicons)
    : config_(std::move(config)), lexicons_(std::move(lexicons)),
      stats_(static_cast<size_t>(config_.layout.active_count())),
      bow_(lexicons_.swear_seed, config_.bow),
      evaluator_(num_classes(config_.scheme), config_.eval_window, config_.sample_period) {
    config_.validate();
    model_ = make_classifier(config_);
    if (config_.preloaded_stats) {
        snapshot_ = *config_.preloaded_stats;
    } else {
        snapshot_.features.resize(static_cast<size_t>(config_.layout.active_count()));
    }
    bow_snapshot_ = bow_.snapshot();
}

Engine::WorkerOutput Engine::run_worker(const std::vector<TweetRecord>& batch,
                                        const std::vector<size_t>& indices, int worker,
                                        int attempt) {
    if (worker_fault && worker_fault(batch_seq_, worker, attempt)) {
        throw std::runtime_error("injected worker fault");
    }
    WorkerOutput out(static_cast<size_t>(config_.layout.active_count()));
    out.replica = model_->fork_replica(
        rng::replica_salt(config_.seed, batch_seq_, static_cast<uint32_t>(worker)));
    out.classified.reserve(indices.size());

    for (size_t index : indices) {
        const TweetRecord& record = batch[index];
        CleanedText text = config_.preprocess ? clean(record.text) : passthrough(record.text);
        Instance instance = extract(record, text, *bow_snapshot_, lexicons_, config_.layout);
        out.local_stats.update(instance.features);
        if (config_.normalization != NormalizationMode::Off) {
            normalize_in_place(instance.features, snapshot_, config_.normalization);
        }

        ClassifiedInstance classified;
        classified.batch_index = index;
        classified.prediction = out.replica->predict(instance);
        if (record.labeled()) {
            // test-then-train: the prediction above never sees this instance
            out.replica->train_one(instance);
            if (config_.adaptive_bow) {
                out.bow_delta.observe(text.tokens, *record.label != ClassLabel::Normal);
            }
        }
        classified.record = record;
        classified.instance = std::move(instance);
        out.classified.push_back(std::move(classified));
    }
    return out;
}

void Engine::barrier(std::vector<WorkerOutput> outputs, size_t batch_size,
                     const EngineSinks& sinks) {
    // model replicas merge in partition order; split attempts run inside
    std::vector<std::unique_ptr<Classifier>> replicas;
    replicas.reserve(outputs.size());
    for (WorkerOutput& out : outputs) replicas.push_back(std::move(out.replica));
    model_->merge_replicas(std::move(replicas));

    if (!config_.preloaded_stats) {
        for (WorkerOutput& out : outputs) stats_.merge(out.local_stats);
    }

    if (config_.adaptive_bow) {
        for (WorkerOutput& out : outputs) bow_.absorb(out.bow_delta);
        if (bow_.refresh_due()) {
            bow_.refresh();
            bow_snapshot_ = bow_.snapshot();
        }
    }

    // classified instances reassembled in batch order
    std::vector<ClassifiedInstance> classified;
    classified.reserve(batch_size);
    for (WorkerOutput& out : outputs) {
        for (ClassifiedInstance& c : out.classified) classified.push_back(std::move(c));
    }
    std::sort(classified.begin(), classified.end(),
              [](const ClassifiedInstance& a, const ClassifiedInstance& b) {
                  return a.batch_index < b.batch_index;
              });

    TimestampMs now = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
    for (const ClassifiedInstance& c : classified) {
        if (c.record.labeled()) {
            evaluator_.preq_step(c.prediction.argmax(),
                                 effective_label(*c.record.label, config_.scheme));
        } else {
            evaluator_.observe_unlabeled(c.prediction.argmax());
        }
        if (auto alert = make_alert(c, config_.alert_threshold, config_.scheme, now)) {
            ++alerts_emitted_;
            if (!c.record.user.id.empty()) ++run_log_.alerts_by_user[c.record.user.id];
            if (sinks.alerts != nullptr) {
                *sinks.alerts << "{\"source_id\":\"" << alert->source_id << "\",\"label\":\""
                              << alert->predicted_name << "\",\"confidence\":" << alert->confidence
                              << ",\"emitted_at\":\"" << format_timestamp_iso(alert->emitted_at)
                              << "\"}\n";
            }
        }
        if (on_classified) on_classified(c);
    }

    if (sinks.samples != nullptr && config_.sample_rate > 0.0) {
        std::vector<size_t> kept =
            boosted_sample_indices(classified, config_.sample_rate, config_.boost_factor,
                                   rng::mix(config_.seed, 0x73616d70ULL, batch_seq_));
        for (size_t i : kept) {
            const ClassifiedInstance& c = classified[i];
            int predicted = c.prediction.argmax();
            *sinks.samples << "{\"record\":" << serialize_tweet(c.record) << ",\"predicted\":\""
                           << effective_class_name(predicted, config_.scheme)
                           << "\",\"confidence\":"
                           << c.prediction.probs[static_cast<size_t>(predicted)] << "}\n";
        }
    }

    // publish snapshots for batch n+1
    if (!config_.preloaded_stats) snapshot_ = stats_.snapshot();
    ++batch_seq_;
    if (on_batch_end) on_batch_end(batch_seq_);
}

void Engine::load_model(std::unique_ptr<Classifier> model) {
    if (model == nullptr) throw ContractViolation("load_model: null model");
    if (model->kind() != config_.classifier || model->scheme() != config_.scheme ||
        model->feature_count() != config_.layout.active_count()) {
        throw ConfigError("loaded model does not match the configured pipeline");
    }
    if (batch_seq_ != 0) throw ContractViolation("load_model: engine already ran");
    model_ = std::move(model);
}

void Engine::process_batch(std::vector<TweetRecord> batch, const EngineSinks& sinks) {
    auto batch_start = std::chrono::steady_clock::now();
    size_t labeled = 0;
    for (const TweetRecord& r : batch) labeled += r.labeled() ? 1 : 0;

    if (config_.normalization != NormalizationMode::Off && !stats_warned_) {
        bool unseeded = std::any_of(snapshot_.features.begin(), snapshot_.features.end(),
                                    [](const StatsSnapshot::Entry& e) { return e.n == 0; });
        if (unseeded && batch_seq_ == 0 && !batch.empty()) {
            std::cerr << "aggstream: normalization statistics not seeded yet; "
                         "first batch passes through unscaled\n";
            stats_warned_ = true;
        }
    }

    for (int attempt = 0; attempt < 2; ++attempt) {
        auto partitions = partition_indices(batch.size(), config_.workers,
                                            rng::mix(config_.seed, 0x70617274ULL, batch_seq_));
        std::vector<WorkerOutput> outputs;
        outputs.reserve(partitions.size());
        try {
            if (config_.workers == 1) {
                outputs.push_back(run_worker(batch, partitions[0], 0, attempt));
            } else {
                std::vector<std::optional<WorkerOutput>> slots(partitions.size());
                std::vector<std::exception_ptr> failures(partitions.size());
                std::vector<std::thread> pool;
                pool.reserve(partitions.size());
                for (size_t w = 0; w < partitions.size(); ++w) {
                    pool.emplace_back([&, w] {
                        try {
                            slots[w] = run_worker(batch, partitions[w], static_cast<int>(w),
                                                  attempt);
                        } catch (...) {
                            failures[w] = std::current_exception();
                        }
                    });
                }
                for (std::thread& t : pool) t.join();
                for (std::exception_ptr& failure : failures) {
                    if (failure) std::rethrow_exception(failure);
                }
                for (auto& slot : slots) outputs.push_back(std::move(*slot));
            }
        } catch (const std::exception& e) {
            if (attempt == 0) {
                // at-least-once batch semantics: one retry from the immutable
                // input; no global state was touched
                std::cerr << "aggstream: batch " << batch_seq_ << " failed (" << e.what()
                          << "), retrying\n";
                continue;
            }
            throw;
        }
        barrier(std::move(outputs), batch.size(), sinks);
        break;
    }

    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - batch_start)
                         .count();
    BatchLogEntry entry;
    entry.seq = batch_seq_ - 1;
    entry.records = batch.size();
    entry.labeled = labeled;
    entry.duration_s = seconds;
    entry.tps = seconds > 0.0 ? static_cast<double>(batch.size()) / seconds : 0.0;
    run_log_.batches.push_back(entry);
    run_log_.total_records += batch.size();
    run_log_.total_seconds += seconds;
    evaluator_.set_throughput_hint(run_log_.overall_tps());
}

void Engine::run(RecordStream& stream, const EngineSinks& sinks,
                 const std::atomic<bool>* stop) {
    const bool time_based = config_.batch_interval_ms > 0;
    std::vector<TweetRecord> batch;
    TweetRecord record;

    while (true) {
        if (stop != nullptr && stop->load()) break;
        batch.clear();
        bool stream_ended = false;
        if (time_based) {
            auto deadline = std::chrono::steady_clock::now() +
                            std::chrono::milliseconds(config_.batch_interval_ms);
            while (std::chrono::steady_clock::now() < deadline) {
                auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                                deadline - std::chrono::steady_clock::now())
                                .count();
                PullStatus status = stream.next(record, static_cast<int>(std::max<long long>(1, left)));
                if (status == PullStatus::End) {
                    stream_ended = true;
                    break;
                }
                if (status == PullStatus::Timeout) continue;
                batch.push_back(std::move(record));
            }
        } else {
            while (batch.size() < config_.batch_size) {
                PullStatus status = stream.next(record, -1);
                if (status == PullStatus::End) {
                    stream_ended = true;
                    break;
                }
                if (status == PullStatus::Timeout) continue;
                batch.push_back(std::move(record));
            }
        }
        if (!batch.empty()) process_batch(std::move(batch), sinks);
        if (stream_ended) break;
    }
}

} // namespace aggstream
