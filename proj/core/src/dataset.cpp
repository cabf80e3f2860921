#include "osct/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "osct/render.hpp"

namespace osct {

nlohmann::json record_to_json(const DatasetRecord& r) {
  nlohmann::json qa = nlohmann::json::array();
  for (const auto& q : r.qa_items) qa.push_back(qa_to_json(q, r.trace.final_world));
  nlohmann::json j{{"schema", kDatasetSchema},
                   {"story_id", r.story_id},
                   {"trace", trace_to_json(r.trace)},
                   {"rendered_text", r.rendered_text},
                   {"render_mode", r.render_mode},
                   {"qa_items", qa},
                   {"hardness", r.hardness},
                   {"difficulty_tier", r.difficulty_tier},
                   {"generator", {{"seed", r.seed}, {"policy", r.policy_id}}}};
  if (r.render_fallback_reason) j["render_fallback_reason"] = *r.render_fallback_reason;
  return j;
}

DatasetRecord record_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kDatasetSchema) {
      throw Error(ErrorKind::Parse, "unsupported dataset schema " + j.at("schema").get<std::string>());
    }
    DatasetRecord r;
    r.story_id = j.at("story_id").get<std::string>();
    r.trace = trace_from_json(j.at("trace"));
    r.rendered_text = j.at("rendered_text").get<std::string>();
    r.render_mode = j.at("render_mode").get<std::string>();
    if (j.contains("render_fallback_reason")) r.render_fallback_reason = j["render_fallback_reason"].get<std::string>();
    for (const auto& q : j.at("qa_items")) r.qa_items.push_back(qa_from_json(q, r.trace.final_world));
    r.hardness = j.at("hardness").get<HardnessReport>();
    r.difficulty_tier = j.at("difficulty_tier").get<int>();
    r.seed = j.at("generator").at("seed").get<std::uint64_t>();
    r.policy_id = j.at("generator").at("policy").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("dataset record: ") + e.what());
  }
}

TierThresholds tier_thresholds(std::vector<double> hardness) {
  if (hardness.size() < static_cast<std::size_t>(kTierCount)) {
    throw Error(ErrorKind::InvalidArgument, "tiering needs at least 5 records");
  }
  std::sort(hardness.begin(), hardness.end());
  const std::size_t n = hardness.size();
  TierThresholds t;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t q = 20 * (k + 1);
    const std::size_t rank = (q * n + 99) / 100;  // ceil(q n / 100)
    t.values[k] = hardness[rank - 1];
  }
  return t;
}

int tier_of(double h, const TierThresholds& t) noexcept {
  int tier = 1;
  for (double p : t.values) {
    if (h > p) ++tier;
  }
  return tier;
}

TierThresholds assign_tiers(std::vector<DatasetRecord>& corpus) {
  std::vector<double> h;
  h.reserve(corpus.size());
  for (const auto& r : corpus) h.push_back(r.hardness.composite_h);
  const auto t = tier_thresholds(std::move(h));
  for (auto& r : corpus) r.difficulty_tier = tier_of(r.hardness.composite_h, t);
  return t;
}

std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_curriculum(
    const std::vector<DatasetRecord>& corpus) {
  std::vector<DatasetRecord> stage1;
  for (const auto& r : corpus) {
    DatasetRecord low = r;
    std::erase_if(low.qa_items, [](const QAItem& q) { return q.tom_order > 2; });
    if (!low.qa_items.empty()) stage1.push_back(std::move(low));
  }
  return {std::move(stage1), corpus};
}

void write_jsonl(const std::vector<DatasetRecord>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  for (const auto& r : corpus) out << record_to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorKind::Io, "error writing " + path);
}

std::vector<DatasetRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Parse, path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<DatasetRecord>& corpus) {
  CorpusStats s;
  s.count = corpus.size();
  if (corpus.empty()) return s;
  if (corpus.size() >= static_cast<std::size_t>(kTierCount)) {
    std::vector<double> h;
    for (const auto& r : corpus) h.push_back(r.hardness.composite_h);
    s.thresholds = tier_thresholds(std::move(h));
  }
  std::array<double, 5> sums{};
  for (const auto& r : corpus) {
    if (r.difficulty_tier >= 1 && r.difficulty_tier <= kTierCount) ++s.tier_histogram[r.difficulty_tier - 1];
    const double h = r.hardness.composite_h;
    const auto bin = std::min<std::size_t>(19, static_cast<std::size_t>(std::max(0.0, h) * 20.0));
    ++s.hardness_histogram[bin];
    const auto dims = r.hardness.scores().as_array();
    for (std::size_t k = 0; k < dims.size(); ++k) sums[k] += dims[k];
    s.mean_hardness += h;
    for (const auto& q : r.qa_items) ++s.questions_per_order[static_cast<std::size_t>(q.tom_order - 1)];
    if (r.render_mode == kRenderLlm) ++s.llm_rendered;
    if (r.render_mode == kRenderFallback) ++s.render_fallbacks;
  }
  const double n = static_cast<double>(corpus.size());
  s.dimension_means = {sums[0] / n, sums[1] / n, sums[2] / n, sums[3] / n, sums[4] / n};
  s.mean_hardness /= n;
  return s;
}

nlohmann::json stats_to_json(const CorpusStats& s) {
  const auto m = s.dimension_means;
  return {{"count", s.count},
          {"tier_thresholds", s.thresholds.values},
          {"tier_histogram", s.tier_histogram},
          {"hardness_histogram", s.hardness_histogram},
          {"dimension_means",
           {{"s_osct", m.osct}, {"s_depth", m.depth}, {"s_dec", m.deception}, {"s_soc", m.social}, {"s_temp", m.temporal}}},
          {"mean_hardness", s.mean_hardness},
          {"questions_per_order", s.questions_per_order},
          {"llm_rendered", s.llm_rendered},
          {"render_fallbacks", s.render_fallbacks}};
}

void write_stats_csv(const CorpusStats& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out.precision(10);
  out << "section,key,value\n";
  out << "corpus,count," << s.count << '\n';
  out << "corpus,mean_hardness," << s.mean_hardness << '\n';
  for (std::size_t k = 0; k < 4; ++k) out << "threshold,P" << 20 * (k + 1) << ',' << s.thresholds.values[k] << '\n';
  for (std::size_t t = 0; t < s.tier_histogram.size(); ++t) out << "tier," << t + 1 << ',' << s.tier_histogram[t] << '\n';
  for (std::size_t b = 0; b < s.hardness_histogram.size(); ++b) {
    out << "hardness_bin," << b * 0.05 << '-' << (b + 1) * 0.05 << ',' << s.hardness_histogram[b] << '\n';
  }
  const auto m = s.dimension_means;
  out << "dimension_mean,s_osct," << m.osct << '\n'
      << "dimension_mean,s_depth," << m.depth << '\n'
      << "dimension_mean,s_dec," << m.deception << '\n'
      << "dimension_mean,s_soc," << m.social << '\n'
      << "dimension_mean,s_temp," << m.temporal << '\n';
  for (std::size_t k = 0; k < s.questions_per_order.size(); ++k) {
    out << "questions_order," << k + 1 << ',' << s.questions_per_order[k] << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "error writing " + path);
}

StoryTrace roll_out(StoryEnv& env, const Policy& policy, std::uint64_t seed) {
  Observation obs = env.reset(seed);
  const auto& w = env.config().phase_weights[2];
  env.set_phase({3, w.hardness, w.diversity, w.validity});
  std::mt19937_64 rng(episode_seed(seed, 0x0BADC0DEull));
  while (!env.done()) obs = env.step(policy(obs, rng)).observation;
  return env.episode_trace();
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(workers, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<DatasetRecord> build_corpus(const ContextPool& pool, const EnvConfig& env_config, const Policy& policy,
                                        const std::string& policy_id, const DatasetOptions& options,
                                        LlmRenderer* renderer) {
  if (options.count == 0) throw Error(ErrorKind::InvalidArgument, "dataset count must be positive");
  if (!(options.epsilon >= 0.0 && options.epsilon <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "generation epsilon must be in [0, 1]");
  }
  std::vector<DatasetRecord> corpus(options.count);
  const Policy explore = [&policy, eps = options.epsilon](const Observation& obs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> uniform(0, static_cast<int>(kActionCount) - 1);
    const double u = coin(rng);
    const int random_action = uniform(rng);
    return u < eps ? random_action : policy(obs, rng);
  };

  parallel_for(options.count, options.jobs, [&](std::size_t i) {
    StoryEnv env(pool, env_config);
    const std::uint64_t record_seed = episode_seed(options.seed, i);
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
      const std::uint64_t seed = episode_seed(record_seed, static_cast<std::uint64_t>(attempt));
      StoryTrace trace = roll_out(env, explore, seed);
      HardnessReport report = score(trace);
      if (!report.has_false_belief) continue;
      auto qa = generate_questions(trace);
      if (qa.empty()) continue;
      auto& r = corpus[i];
      char id[48];
      std::snprintf(id, sizeof id, "osct-%016llx-%06zu", static_cast<unsigned long long>(options.seed), i);
      r.story_id = id;
      r.trace = std::move(trace);
      r.qa_items = std::move(qa);
      r.hardness = report;
      r.seed = seed;
      r.policy_id = policy_id;
      return;
    }
    throw Error(ErrorKind::State, "no valid story after " + std::to_string(options.max_attempts) +
                                      " rollouts for record " + std::to_string(i));
  });

  assign_tiers(corpus);

  parallel_for(options.count, options.jobs, [&](std::size_t i) {
    auto& r = corpus[i];
    if (renderer == nullptr) {
      r.rendered_text = render_template(r.trace);
      r.render_mode = kRenderTemplate;
      return;
    }
    auto out = renderer->render(r.story_id, r.trace, r.hardness);
    r.rendered_text = std::move(out.text);
    r.render_mode = std::move(out.mode);
    r.render_fallback_reason = std::move(out.fallback_reason);
  });
  return corpus;
}

}  // namespace osct
