// osct: command-line front end for story generation, scoring, training and
// corpus building.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "osct/dataset.hpp"
#include "osct/dqn.hpp"
#include "osct/env.hpp"
#include "osct/llm.hpp"
#include "osct/render.hpp"
#include "osct/scoring.hpp"
#include "osct/trace.hpp"
#include "osct/tuner.hpp"
#include "osct/validation.hpp"

namespace {

using nlohmann::json;
using namespace osct;

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kConfig = 3,
  kMissingCheckpoint = 4,
  kInput = 5,
  kIo = 6,
  kDiverged = 7,
  kValidationFailed = 8,
};

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag, bad value)\n"
    "  3  configuration error (unreadable or invalid --config / config file)\n"
    "  4  checkpoint missing\n"
    "  5  bad input (malformed trace, illegal event, parse failure)\n"
    "  6  I/O error\n"
    "  7  training diverged\n"
    "  8  validation verdict FAIL\n";

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return kConfig;
    case ErrorKind::MissingCheckpoint: return kMissingCheckpoint;
    case ErrorKind::InvalidArgument:
    case ErrorKind::IllegalAction:
    case ErrorKind::Parse: return kInput;
    case ErrorKind::Io: return kIo;
    case ErrorKind::State: return kInternal;
  }
  return kInternal;
}

json read_json_file(const std::string& path, ErrorKind on_parse_error) {
  std::ifstream in(path);
  if (!in) throw Error(on_parse_error == ErrorKind::Config ? ErrorKind::Config : ErrorKind::Io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(on_parse_error, path + ": " + e.what());
  }
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + parent.string() + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "error writing " + path);
}

// Options shared by every subcommand. The config file is applied first and
// explicitly given flags override it.
struct Common {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string contexts_path;
  bool json_output = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  json config = json::object();
  ContextPool pool = default_context_pool();
  EnvConfig env;
  DqnConfig dqn;
  EndpointConfig endpoint;
  DiversityThresholds thresholds;
  SearchSpace space;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for every random choice in the run");
  app->add_option("--config", c.config_path, "JSON run config (sections: env, dqn, endpoint, thresholds, search_space, contexts)");
  app->add_option("--contexts", c.contexts_path, "Context pool JSON (names, room layouts, objects)");
  app->add_flag("--json", c.json_output, "Machine-readable output");
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void load_common(CLI::App* app, Common& c) {
  if (!c.config_path.empty()) {
    c.config = read_json_file(c.config_path, ErrorKind::Config);
    if (!c.config.is_object()) throw Error(ErrorKind::Config, c.config_path + ": expected a JSON object");
    try {
      if (c.config.contains("seed") && app->count("--seed") == 0) c.seed = c.config["seed"].get<std::uint64_t>();
      if (c.config.contains("env")) c.env = c.config["env"].get<EnvConfig>();
      if (c.config.contains("dqn")) c.dqn = c.config["dqn"].get<DqnConfig>();
      if (c.config.contains("endpoint")) c.endpoint = c.config["endpoint"].get<EndpointConfig>();
      if (c.config.contains("thresholds")) c.thresholds = c.config["thresholds"].get<DiversityThresholds>();
      if (c.config.contains("search_space")) c.space = c.config["search_space"].get<SearchSpace>();
      if (c.config.contains("contexts") && c.contexts_path.empty()) {
        const auto& ctx = c.config["contexts"];
        c.pool = ctx.is_string() ? load_context_pool(ctx.get<std::string>()) : ctx.get<ContextPool>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Config, c.config_path + ": " + e.what());
    }
  }
  if (!c.contexts_path.empty()) c.pool = load_context_pool(c.contexts_path);
}

Policy policy_from(const std::string& checkpoint, double epsilon, std::string& policy_id) {
  if (checkpoint.empty()) {
    policy_id = "random";
    return random_policy();
  }
  const DqnAgent agent = load_checkpoint(checkpoint);
  policy_id = checkpoint_id(agent);
  return greedy_policy(agent, epsilon);
}

std::string report_text(const HardnessReport& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "false belief (gate)  " << (r.has_false_belief ? "yes" : "no") << "\n"
      << "s_osct               " << r.s_osct << "\n"
      << "s_depth              " << r.s_depth << "  (max order " << r.max_tom_order << ")\n"
      << "s_dec                " << r.s_dec << "\n"
      << "s_soc                " << r.s_soc << "\n"
      << "s_temp               " << r.s_temp << "\n"
      << "composite H          " << r.composite_h << "\n";
  return out.str();
}

// generate -----------------------------------------------------------------

struct GenerateArgs {
  int steps = 15;
  std::string checkpoint;
  std::string world_path;
  std::string out;
  double epsilon = kEvalEpsilon;
};

int run_generate(CLI::App* app, Common& c, const GenerateArgs& a) {
  load_common(app, c);
  if (app->count("--steps")) c.env.episode_length = a.steps;
  if (c.env.episode_length < 1) throw Error(ErrorKind::InvalidArgument, "--steps must be at least 1");
  std::string policy_id;
  const Policy policy = policy_from(a.checkpoint, a.epsilon, policy_id);
  StoryEnv env(c.pool, c.env);
  StoryTrace trace;
  if (a.world_path.empty()) {
    trace = roll_out(env, policy, c.seed);
  } else {
    Observation obs = env.reset_with(load_world_spec(a.world_path), c.seed);
    const auto& w = c.env.phase_weights[2];
    env.set_phase({3, w.hardness, w.diversity, w.validity});
    std::mt19937_64 rng(episode_seed(c.seed, 0x0BADC0DEull));
    while (!env.done()) obs = env.step(policy(obs, rng)).observation;
    trace = env.episode_trace();
  }
  json doc = trace_to_json(trace);
  doc["hardness"] = score(trace);
  doc["generator"] = {{"seed", c.seed}, {"policy", policy_id}};
  if (c.json_output || !a.out.empty()) {
    write_text(a.out, doc.dump(2) + "\n");
  } else {
    std::cout << render_template(trace) << "\n" << report_text(score(trace));
  }
  return kOk;
}

// score --------------------------------------------------------------------

int run_score(CLI::App* app, Common& c, const std::string& trace_path) {
  load_common(app, c);
  const StoryTrace trace = load_trace(trace_path);
  const HardnessReport r = score(trace);
  if (c.json_output) {
    json doc = r;
    json conflicts = json::array();
    for (const auto& k : detect_osct(trace).conflicts) {
      conflicts.push_back({{"observer", trace.final_world.name(k.observer)},
                           {"subject", trace.final_world.name(k.subject)},
                           {"object", trace.final_world.name(k.object)}});
    }
    doc["osct_conflicts"] = conflicts;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << report_text(r);
  }
  return kOk;
}

// train --------------------------------------------------------------------

struct TrainArgs {
  std::uint64_t steps = 50'000;
  std::string checkpoint = "policy.ckpt";
  std::string log_csv;
  std::size_t eval_episodes = 200;
  double learning_rate = 0;
  std::size_t buffer_size = 0;
  double gamma = 0;
  double tau = 0;
  std::size_t batch_size = 0;
  int train_frequency = 0;
  int gradient_steps = 0;
  std::vector<int> hidden;
  std::string target_update;
};

int run_train(CLI::App* app, Common& c, const TrainArgs& a) {
  load_common(app, c);
  if (app->count("--learning-rate")) c.dqn.learning_rate = a.learning_rate;
  if (app->count("--buffer-size")) c.dqn.buffer_size = a.buffer_size;
  if (app->count("--gamma")) c.dqn.gamma = a.gamma;
  if (app->count("--tau")) c.dqn.tau = a.tau;
  if (app->count("--batch-size")) c.dqn.batch_size = a.batch_size;
  if (app->count("--train-frequency")) c.dqn.train_frequency = a.train_frequency;
  if (app->count("--gradient-steps")) c.dqn.gradient_steps = a.gradient_steps;
  if (app->count("--hidden")) c.dqn.hidden = a.hidden;
  if (app->count("--target-update")) c.dqn.target_update = a.target_update == "hard" ? TargetUpdate::Hard : TargetUpdate::Soft;
  c.dqn.validate();

  StoryEnv env(c.pool, c.env);
  auto result = train(env, c.dqn, a.steps, c.seed);
  if (!a.log_csv.empty()) {
    ensure_parent(a.log_csv);
    result.log.write_csv(a.log_csv);
  }
  json doc{{"steps", result.log.steps},
           {"episodes", result.log.episodes.size()},
           {"seconds", result.log.seconds},
           {"diverged", result.log.diverged},
           {"soft_diverged", result.log.soft_diverged},
           {"max_abs_q", result.log.max_abs_q},
           {"config", c.dqn}};
  if (result.log.diverged) {
    doc["divergence_reason"] = result.log.divergence_reason;
    std::cout << (c.json_output ? doc.dump(2) : "training diverged: " + result.log.divergence_reason) << "\n";
    return kDiverged;
  }
  ensure_parent(a.checkpoint);
  save_checkpoint(result.agent, a.checkpoint);
  doc["checkpoint"] = a.checkpoint;
  doc["checkpoint_id"] = checkpoint_id(result.agent);
  if (a.eval_episodes > 0) {
    const auto trained = evaluate_policy(env, greedy_policy(result.agent, kEvalEpsilon), a.eval_episodes,
                                         episode_seed(c.seed, 0xE7A1ull));
    const auto baseline = evaluate_policy(env, random_policy(), a.eval_episodes, episode_seed(c.seed, 0xE7A1ull));
    doc["eval"] = {{"episodes", a.eval_episodes},
                   {"mean_reward", trained.mean_reward},
                   {"mean_hardness", trained.mean_hardness},
                   {"random_mean_reward", baseline.mean_reward},
                   {"random_mean_hardness", baseline.mean_hardness}};
  }
  if (c.json_output) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::printf("trained %llu steps (%zu episodes) in %.1f s -> %s [%s]\n",
                static_cast<unsigned long long>(result.log.steps), result.log.episodes.size(), result.log.seconds,
                a.checkpoint.c_str(), doc["checkpoint_id"].get<std::string>().c_str());
    if (doc.contains("eval")) {
      const auto& e = doc["eval"];
      std::printf("eval over %zu episodes: reward %.4f (random %.4f), hardness %.4f (random %.4f)\n", a.eval_episodes,
                  e["mean_reward"].get<double>(), e["random_mean_reward"].get<double>(),
                  e["mean_hardness"].get<double>(), e["random_mean_hardness"].get<double>());
    }
  }
  return kOk;
}

// tune ---------------------------------------------------------------------

struct TuneArgs {
  TunerOptions options;
  std::string out;
};

int run_tune(CLI::App* app, Common& c, TuneArgs a) {
  load_common(app, c);
  a.options.seed = c.seed;
  a.options.jobs = c.jobs;
  const auto report = random_search(c.space, c.dqn, c.pool, c.env, a.options);
  const json doc = tuner_report_json(report);
  if (!a.out.empty()) write_text(a.out, doc.dump(2) + "\n");
  if (c.json_output) {
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  std::printf("%-5s %-10s %-8s %-7s %-7s %-11s %-9s %s\n", "trial", "lr", "buffer", "gamma", "batch", "reward",
              "hardness", "status");
  for (const auto& t : report.trials) {
    std::string status = "ok";
    if (t.diverged) {
      status = "diverged: " + t.divergence_reason;
    } else if (t.soft_diverged) {
      status = "soft-diverged: max |Q| " + std::to_string(t.max_abs_q);
    }
    std::printf("%-5zu %-10.3g %-8zu %-7.3f %-7zu %-11.4f %-9.4f %s\n", t.index, t.config.learning_rate,
                t.config.buffer_size, t.config.gamma, t.config.batch_size, t.mean_reward, t.mean_hardness,
                status.c_str());
  }
  if (report.best) {
    std::printf("best: trial %zu\n", *report.best);
  } else {
    std::printf("every trial diverged\n");
  }
  return kOk;
}

// dataset ------------------------------------------------------------------

struct DatasetArgs {
  DatasetOptions options;
  std::string checkpoint;
  std::string render = "template";
  std::string endpoint_config;
  std::string audit_log;
  std::string out = "corpus.jsonl";
  std::string stage1_out;
};

int run_dataset(CLI::App* app, Common& c, DatasetArgs a) {
  load_common(app, c);
  if (!a.endpoint_config.empty()) c.endpoint = load_endpoint_config(a.endpoint_config);
  a.options.seed = c.seed;
  a.options.jobs = c.jobs;
  std::string policy_id;
  const Policy policy = policy_from(a.checkpoint, 0.0, policy_id);

  std::unique_ptr<LlmRenderer> renderer;
  if (a.render == "llm") {
    const std::string audit = a.audit_log.empty() ? a.out + ".audit.jsonl" : a.audit_log;
    ensure_parent(audit);
    renderer = std::make_unique<LlmRenderer>(c.endpoint, LlmRenderer::key_from_env(c.endpoint), audit);
  }
  auto corpus = build_corpus(c.pool, c.env, policy, policy_id, a.options, renderer.get());
  ensure_parent(a.out);
  write_jsonl(corpus, a.out);
  const auto stats = corpus_stats(corpus);
  const std::filesystem::path out_path(a.out);
  const std::string stem = (out_path.parent_path() / out_path.stem()).string();
  write_text(stem + ".stats.json", stats_to_json(stats).dump(2) + "\n");
  write_stats_csv(stats, stem + ".stats.csv");
  write_text((out_path.parent_path() / "actions.json").string(), catalog_json().dump(2) + "\n");
  if (!a.stage1_out.empty()) {
    ensure_parent(a.stage1_out);
    write_jsonl(split_curriculum(corpus).first, a.stage1_out);
  }

  if (c.json_output) {
    std::cout << stats_to_json(stats).dump(2) << "\n";
  } else {
    std::printf("wrote %zu records to %s (policy %s)\n", corpus.size(), a.out.c_str(), policy_id.c_str());
    std::printf("tiers: %zu %zu %zu %zu %zu; mean H %.4f\n", stats.tier_histogram[0], stats.tier_histogram[1],
                stats.tier_histogram[2], stats.tier_histogram[3], stats.tier_histogram[4], stats.mean_hardness);
    if (renderer) {
      std::printf("llm rendered %zu, fallbacks %zu\n", stats.llm_rendered, stats.render_fallbacks);
    }
  }
  return kOk;
}

// validate -----------------------------------------------------------------

struct ValidateArgs {
  std::string checkpoint;
  std::size_t episodes = 20;
  double epsilon = 0.05;
  double min_coverage = -1;
  double min_uniqueness = -1;
  double min_character_diversity = -1;
};

int run_validate(CLI::App* app, Common& c, const ValidateArgs& a) {
  load_common(app, c);
  if (app->count("--min-coverage")) c.thresholds.min_action_coverage = a.min_coverage;
  if (app->count("--min-uniqueness")) c.thresholds.min_uniqueness = a.min_uniqueness;
  if (app->count("--min-character-diversity")) c.thresholds.min_character_diversity = a.min_character_diversity;
  std::string policy_id;
  const Policy policy = policy_from(a.checkpoint, 0.0, policy_id);
  const auto report = randomization_test(policy, c.pool, c.env, a.episodes, a.epsilon, c.seed, c.thresholds, c.jobs);
  if (c.json_output) {
    json doc = report_to_json(report);
    doc["policy"] = policy_id;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << report_table(report);
  }
  return report.pass ? kOk : kValidationFailed;
}

// stats --------------------------------------------------------------------

int run_stats(CLI::App* app, Common& c, const std::string& corpus_path, const std::string& csv) {
  load_common(app, c);
  const auto stats = corpus_stats(read_jsonl(corpus_path));
  if (!csv.empty()) write_stats_csv(stats, csv);
  if (c.json_output) {
    std::cout << stats_to_json(stats).dump(2) << "\n";
    return kOk;
  }
  std::printf("records        %zu\n", stats.count);
  std::printf("mean H         %.4f\n", stats.mean_hardness);
  std::printf("thresholds     P20 %.4f  P40 %.4f  P60 %.4f  P80 %.4f\n", stats.thresholds.values[0],
              stats.thresholds.values[1], stats.thresholds.values[2], stats.thresholds.values[3]);
  for (int t = 0; t < kTierCount; ++t) std::printf("tier %d         %zu\n", t + 1, stats.tier_histogram[t]);
  const auto m = stats.dimension_means;
  std::printf("means          osct %.4f  depth %.4f  dec %.4f  soc %.4f  temp %.4f\n", m.osct, m.depth, m.deception,
              m.social, m.temporal);
  std::printf("H histogram\n");
  for (std::size_t b = 0; b < stats.hardness_histogram.size(); ++b) {
    std::printf("  %.2f-%.2f  %zu\n", b * 0.05, (b + 1) * 0.05, stats.hardness_histogram[b]);
  }
  return kOk;
}

// render -------------------------------------------------------------------

struct RenderArgs {
  std::string trace;
  std::string mode = "template";
  std::string endpoint_config;
  std::string audit_log;
  std::string story_id = "story";
};

int run_render(CLI::App* app, Common& c, const RenderArgs& a) {
  load_common(app, c);
  if (!a.endpoint_config.empty()) c.endpoint = load_endpoint_config(a.endpoint_config);
  const StoryTrace trace = load_trace(a.trace);
  RenderOutcome out{render_template(trace), kRenderTemplate, std::nullopt};
  if (a.mode == "llm") {
    LlmRenderer renderer(c.endpoint, LlmRenderer::key_from_env(c.endpoint), a.audit_log);
    out = renderer.render(a.story_id, trace, score(trace));
  }
  if (c.json_output) {
    json doc{{"text", out.text}, {"mode", out.mode}};
    if (out.fallback_reason) doc["fallback_reason"] = *out.fallback_reason;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << out.text;
    if (out.fallback_reason) std::cerr << "note: rendered from templates (" << *out.fallback_reason << ")\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial theory-of-mind story generator and corpus builder"};
  app.require_subcommand(1);
  app.footer(kExitCodes);
  app.set_version_flag("--version", "osct 0.1.0");

  Common common;
  int code = kOk;

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Roll out one story and print its trace");
  add_common(generate, common);
  generate->add_option("--steps", gen.steps, "Episode length in policy decisions");
  generate->add_option("--checkpoint", gen.checkpoint, "Policy checkpoint (default: uniform random policy)");
  generate->add_option("--world", gen.world_path, "Fixed starting world JSON instead of sampling one");
  generate->add_option("--epsilon", gen.epsilon, "Exploration rate for the checkpoint policy")->check(CLI::Range(0.0, 1.0));
  generate->add_option("--out", gen.out, "Write the trace JSON here");
  generate->callback([&] { code = run_generate(generate, common, gen); });

  std::string score_path;
  auto* score_cmd = app.add_subcommand("score", "Score a trace on the five hardness dimensions");
  add_common(score_cmd, common);
  score_cmd->add_option("trace", score_path, "Trace JSON")->required();
  score_cmd->callback([&] { code = run_score(score_cmd, common, score_path); });

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the DQN story policy");
  add_common(train_cmd, common);
  train_cmd->add_option("--steps", tr.steps, "Environment steps");
  train_cmd->add_option("--checkpoint", tr.checkpoint, "Output checkpoint path");
  train_cmd->add_option("--log", tr.log_csv, "Per-episode CSV log");
  train_cmd->add_option("--eval-episodes", tr.eval_episodes, "Evaluation episodes after training (0 to skip)");
  train_cmd->add_option("--learning-rate", tr.learning_rate);
  train_cmd->add_option("--buffer-size", tr.buffer_size);
  train_cmd->add_option("--gamma", tr.gamma);
  train_cmd->add_option("--tau", tr.tau);
  train_cmd->add_option("--batch-size", tr.batch_size);
  train_cmd->add_option("--train-frequency", tr.train_frequency);
  train_cmd->add_option("--gradient-steps", tr.gradient_steps);
  train_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths");
  train_cmd->add_option("--target-update", tr.target_update)->check(CLI::IsMember({"soft", "hard"}));
  train_cmd->callback([&] { code = run_train(train_cmd, common, tr); });

  TuneArgs tu;
  auto* tune = app.add_subcommand("tune", "Random hyperparameter search");
  add_common(tune, common);
  tune->add_option("--trials", tu.options.trials);
  tune->add_option("--steps", tu.options.steps_per_trial, "Training steps per trial");
  tune->add_option("--eval-episodes", tu.options.eval_episodes);
  tune->add_option("--out", tu.out, "Write the report JSON here");
  tune->callback([&] { code = run_tune(tune, common, tu); });

  DatasetArgs ds;
  auto* dataset = app.add_subcommand("dataset", "Generate a tiered QA corpus as JSON Lines");
  add_common(dataset, common);
  dataset->add_option("--count", ds.options.count, "Number of records")->check(CLI::PositiveNumber);
  dataset->add_option("--checkpoint", ds.checkpoint, "Policy checkpoint (default: uniform random policy)");
  dataset->add_option("--epsilon", ds.options.epsilon, "Exploration during generation")->check(CLI::Range(0.0, 1.0));
  dataset->add_option("--render", ds.render, "Prose renderer")->check(CLI::IsMember({"template", "llm"}));
  dataset->add_option("--endpoint-config", ds.endpoint_config, "Endpoint JSON (base_url, model, timeout_seconds, ...)");
  dataset->add_option("--audit-log", ds.audit_log, "Endpoint audit log (default: <out>.audit.jsonl)");
  dataset->add_option("--out", ds.out, "Corpus path");
  dataset->add_option("--stage1-out", ds.stage1_out, "Also write the stage-1 curriculum split");
  dataset->callback([&] { code = run_dataset(dataset, common, ds); });

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Randomization test of a policy's structural diversity");
  add_common(validate, common);
  validate->add_option("--checkpoint", va.checkpoint, "Policy checkpoint")->required();
  validate->add_option("--episodes", va.episodes)->check(CLI::PositiveNumber);
  validate->add_option("--epsilon", va.epsilon)->check(CLI::Range(0.0, 1.0));
  validate->add_option("--min-coverage", va.min_coverage)->check(CLI::Range(0.0, 1.0));
  validate->add_option("--min-uniqueness", va.min_uniqueness)->check(CLI::Range(0.0, 1.0));
  validate->add_option("--min-character-diversity", va.min_character_diversity)->check(CLI::Range(0.0, 1.0));
  validate->callback([&] { code = run_validate(validate, common, va); });

  std::string stats_path, stats_csv;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  add_common(stats, common);
  stats->add_option("corpus", stats_path, "Corpus JSON Lines")->required();
  stats->add_option("--csv", stats_csv, "Also write CSV");
  stats->callback([&] { code = run_stats(stats, common, stats_path, stats_csv); });

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "Render a trace as prose");
  add_common(render, common);
  render->add_option("trace", ra.trace, "Trace JSON")->required();
  render->add_option("--mode", ra.mode)->check(CLI::IsMember({"template", "llm"}));
  render->add_option("--endpoint-config", ra.endpoint_config);
  render->add_option("--audit-log", ra.audit_log);
  render->add_option("--story-id", ra.story_id);
  render->callback([&] { code = run_render(render, common, ra); });

  std::string catalog_out;
  auto* catalog_cmd = app.add_subcommand("catalog", "Print the action catalog (actions.json)");
  catalog_cmd->add_option("--out", catalog_out);
  catalog_cmd->callback([&] { write_text(catalog_out, catalog_json().dump(2) + "\n"); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return code;
}
