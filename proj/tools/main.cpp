// Copyright 2026 The banglanlu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bnlu: command-line driver for the NLU and dialogue life cycle.
//
// Exit codes: 0 success, 1 data, model or configuration errors, 2 usage
// errors. Failures print one line starting with `error:<category>:`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "banglanlu/corpus.hpp"
#include "banglanlu/dialogue.hpp"
#include "banglanlu/errors.hpp"
#include "banglanlu/evaluation.hpp"
#include "banglanlu/gateway.hpp"
#include "banglanlu/pipeline.hpp"

namespace {

using namespace bnlu;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string data;
  std::string pipeline = "P8";
  std::string presets = "all";
  std::string out;
  std::string model;
  std::string config;
  std::string vectors;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  int port = 5005;
  std::size_t jobs = 1;
  std::size_t intents = 12;
  std::size_t examples = 10;
  std::size_t entities = 3;
};

std::vector<PipelineConfig> pipelines(const std::string& spec, const Options& o) {
  std::vector<PipelineConfig> configs = resolve_presets(spec);
  if (!o.vectors.empty()) {
    for (PipelineConfig& c : configs) c.dense.vectors_path = o.vectors;
  }
  return configs;
}

PipelineConfig single_pipeline(const Options& o) {
  std::vector<PipelineConfig> configs = pipelines(o.pipeline, o);
  if (configs.size() != 1) {
    throw Error(ErrorCode::ConfigError, "--pipeline must name exactly one pipeline");
  }
  return configs.front();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create `" + dir + "`: " + ec.message());
}

std::string join(const std::string& dir, std::string_view name) {
  return (std::filesystem::path(dir) / name).string();
}

int gen_corpus(const Options& o) {
  const SyntheticCorpus corpus =
      generate_synthetic_corpus(o.seed, o.intents, o.examples, o.entities);
  ensure_dir(o.out);
  write_file(join(o.out, "nlu.yml"), corpus.nlu);
  write_file(join(o.out, "domain.yml"), corpus.domain);
  write_file(join(o.out, "stories.yml"), corpus.stories);
  std::cout << "wrote " << o.out << " (" << o.intents << " intents x " << o.examples
            << " examples, " << o.entities << " entity types)\n";
  return 0;
}

int data_validate(const Options& o) {
  const Project p = load_project_dir(o.data);
  std::cout << "ok: " << p.nlu.examples.size() << " examples, " << p.nlu.intents.size()
            << " intents, " << p.nlu.entity_types.size() << " entity types, "
            << p.domain.actions.size() << " actions, " << p.stories.stories.size()
            << " stories, " << p.stories.rules.size() << " rules\n";
  return 0;
}

int train_cmd(const Options& o) {
  const Project p = load_project_dir(o.data);
  const PipelineConfig config = single_pipeline(o);
  const NluPipeline nlu = NluPipeline::fit(config, p.nlu, o.seed);
  PolicyConfig policy;
  policy.seed = o.seed;
  if (config.fallback) policy.fallback_intent = config.fallback->fallback_intent_name;
  const DialogueAgent agent = DialogueAgent::train(p.domain, p.stories, policy);
  ensure_dir(o.out);
  nlu.save(join(o.out, kNluModelFile));
  agent.save(join(o.out, kCoreModelFile));
  std::cout << "trained " << config.name << ": final nlu loss " << nlu.loss_curve().back()
            << ", final policy loss " << agent.ted_loss_curve().back() << "\nwrote "
            << join(o.out, kNluModelFile) << " and " << join(o.out, kCoreModelFile) << "\n";
  return 0;
}

int evaluate_cmd(const Options& o) {
  const Project p = load_project_dir(o.data);
  const PipelineConfig config = single_pipeline(o);
  const TrainTestSplit split = split_train_test(p.nlu, o.test_fraction, o.seed);
  const EvaluationReport report = evaluate_pipeline(config, split.train, split.test, o.seed);
  if (!o.out.empty()) write_report(report, o.out);
  AblationRow row{report.pipeline, report.metrics, {}, split_fingerprint(split), config.reference};
  std::cout << metrics_csv(std::span(&row, 1));
  return 0;
}

int ablate_cmd(const Options& o) {
  const Project p = load_project_dir(o.data);
  const std::vector<PipelineConfig> configs = pipelines(o.presets, o);
  const TrainTestSplit split = split_train_test(p.nlu, o.test_fraction, o.seed);
  const AblationResult result = run_ablation(configs, split, o.seed, o.jobs);
  const std::string csv = metrics_csv(result.rows);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_file(join(o.out, "ablation.csv"), csv);
    write_file(join(o.out, "ablation_details.csv"), ablation_details_csv(result.rows));
    for (const EvaluationReport& r : result.reports) write_report(r, join(o.out, r.pipeline));
  }
  std::cout << csv;
  for (const AblationRow& r : result.rows) {
    if (!r.metrics) std::cerr << "warning: " << r.name << " failed: " << r.error << "\n";
  }
  return 0;
}

GatewayConfig gateway_config(const Options& o, const CLI::App& cmd) {
  GatewayConfig c = o.config.empty() ? GatewayConfig{} : GatewayConfig::load(o.config);
  c.apply_environment();
  if (cmd.count("--model") > 0) c.model_dir = o.model;
  if (cmd.count("--port") > 0) c.port = o.port;
  if (c.model_dir.empty()) throw Error(ErrorCode::ConfigError, "no model directory given");
  return c;
}

int serve_cmd(const Options& o, const CLI::App& cmd) {
  Gateway gateway(gateway_config(o, cmd));
  gateway.load_models();
  std::cerr << "serving " << gateway.config().model_dir << " on " << gateway.config().host << ":"
            << gateway.config().port << "\n";
  serve(gateway, gateway.config().host, gateway.config().port);
  return 0;
}

int shell_cmd(const Options& o, const CLI::App& cmd) {
  GatewayConfig c = gateway_config(o, cmd);
  const NluPipeline nlu = NluPipeline::load(join(c.model_dir, kNluModelFile));
  const DialogueAgent agent = DialogueAgent::load(join(c.model_dir, kCoreModelFile));
  const auto client = make_transliterator(c.transliterator);
  Tracker tracker("shell");
  tracker.append(SessionStarted{});
  std::cout << "type a message; /tracker prints the event log, /quit exits\n";
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line == "/quit" || line == "/exit") break;
    if (line == "/tracker") {
      std::cout << tracker.export_log();
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const RoutedMessage routed = route_message(line, *client);
    const TurnResult turn = agent.run_turn(tracker, nlu, routed.text);
    std::cout << "  [" << to_string(routed.language.language) << "] " << turn.parse.intent()
              << " (" << turn.parse.confidence() << ")";
    for (const EntitySpan& e : turn.parse.entities) std::cout << " " << e.entity << "=" << e.value;
    std::cout << "\n";
    for (const BotResponse& r : turn.responses) std::cout << "bot: " << r.text << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bnlu: Bangla NLU and dialogue engine"};
  app.require_subcommand(1);
  Options o;

  const auto add_data = [&](CLI::App* c) {
    c->add_option("--data", o.data, "Directory with nlu.yml, domain.yml, stories.yml")->required();
  };
  const auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  };
  const auto add_fraction = [&](CLI::App* c) {
    c->add_option("--test-fraction", o.test_fraction, "Held-out fraction per intent")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen-corpus", "Write the synthetic corpus");
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--intents", o.intents)->capture_default_str();
  gen->add_option("--examples", o.examples, "Examples per intent")->capture_default_str();
  gen->add_option("--entities", o.entities, "Entity types")->capture_default_str();
  add_seed(gen);

  auto* validate = app.add_subcommand("data-validate", "Parse and cross-check the data files");
  add_data(validate);

  auto* train = app.add_subcommand("train", "Train the NLU pipeline and dialogue policies");
  add_data(train);
  train->add_option("--pipeline", o.pipeline, "Preset name or config file")->capture_default_str();
  train->add_option("--out", o.out, "Model directory")->required();
  train->add_option("--vectors", o.vectors, "Word-vector file for dense featurizers");
  add_seed(train);

  auto* evaluate = app.add_subcommand("evaluate", "Train on a split and score the held-out part");
  add_data(evaluate);
  evaluate->add_option("--pipeline", o.pipeline, "Preset name or config file")
      ->capture_default_str();
  evaluate->add_option("--out", o.out, "Report directory");
  evaluate->add_option("--vectors", o.vectors, "Word-vector file for dense featurizers");
  add_seed(evaluate);
  add_fraction(evaluate);

  auto* ablate = app.add_subcommand("ablate", "Evaluate several pipelines on one split");
  add_data(ablate);
  ablate->add_option("--presets", o.presets, "`all` or comma-separated names or files")
      ->capture_default_str();
  ablate->add_option("--out", o.out, "Report directory");
  ablate->add_option("--vectors", o.vectors, "Word-vector file for dense featurizers");
  ablate->add_option("--jobs", o.jobs, "Pipelines evaluated in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_seed(ablate);
  add_fraction(ablate);

  auto* serve = app.add_subcommand("serve", "Run the HTTP gateway");
  serve->add_option("--model", o.model, "Model directory (env BNLU_MODEL)");
  serve->add_option("--port", o.port, "Port (env BNLU_PORT)")->check(CLI::Range(0, 65535));
  serve->add_option("--config", o.config, "Gateway config file");

  auto* shell = app.add_subcommand("shell", "Chat with a trained model on the terminal");
  shell->add_option("--model", o.model, "Model directory (env BNLU_MODEL)");
  shell->add_option("--config", o.config, "Gateway config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:usage: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*gen) return gen_corpus(o);
    if (*validate) return data_validate(o);
    if (*train) return train_cmd(o);
    if (*evaluate) return evaluate_cmd(o);
    if (*ablate) return ablate_cmd(o);
    if (*serve) return serve_cmd(o, *serve);
    if (*shell) return shell_cmd(o, *shell);
  } catch (const Error& e) {
    std::cerr << "error:" << error_category(e.code()) << ": " << error_name(e.code()) << ": "
              << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error:io: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
