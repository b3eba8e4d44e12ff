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

#include "banglanlu/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "banglanlu/errors.hpp"
#include "banglanlu/rng.hpp"
#include "banglanlu/text.hpp"
#include "yaml_lite.hpp"

namespace bnlu {

namespace {

using yaml_lite::Node;

[[noreturn]] void fail_at(ErrorCode code, int line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line) + ": " + what);
}

const std::string& expect_scalar(const Node& node, std::string_view what) {
  if (!node.is_scalar()) {
    fail_at(ErrorCode::SyntaxError, node.line, std::string(what) + " must be a scalar");
  }
  return node.scalar;
}

void check_keys(const Node& map, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : map.map) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail_at(ErrorCode::SyntaxError, value.line, "unexpected key `" + key + "`");
    }
  }
}

// `examples:` is either a list of scalars or a literal block of `- ` lines.
std::vector<std::pair<std::string, int>> example_lines(const Node* node) {
  std::vector<std::pair<std::string, int>> out;
  if (node == nullptr || node->is_null()) return out;
  if (node->is_seq()) {
    for (const Node& item : node->seq) {
      if (item.is_null()) continue;
      out.emplace_back(expect_scalar(item, "example"), item.line);
    }
    return out;
  }
  if (node->is_scalar()) {
    std::istringstream in(node->scalar);
    std::string line;
    int offset = 1;
    while (std::getline(in, line)) {
      const std::string t = text::trim(line);
      if (t.empty()) {
        ++offset;
        continue;
      }
      if (!t.starts_with("- ")) {
        fail_at(ErrorCode::SyntaxError, node->line + offset,
                "example lines must start with `- `");
      }
      out.emplace_back(text::trim(t.substr(2)), node->line + offset);
      ++offset;
    }
    return out;
  }
  fail_at(ErrorCode::SyntaxError, node->line, "`examples` must be a list");
}

std::vector<std::string> scalar_list(const Node* node, std::string_view what) {
  std::vector<std::string> out;
  if (node == nullptr || node->is_null()) return out;
  if (!node->is_seq()) {
    fail_at(ErrorCode::SyntaxError, node->line, std::string(what) + " must be a list");
  }
  for (const Node& item : node->seq) {
    if (item.is_scalar()) {
      out.push_back(item.scalar);
    } else if (item.is_map() && item.map.size() == 1) {
      // `- name: {...}` / `- city: dhaka` shorthand: the key is the name.
      out.push_back(item.map.front().first);
    } else {
      fail_at(ErrorCode::SyntaxError, item.line,
              std::string(what) + " entries must be names");
    }
  }
  return out;
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void validate_spans(const TrainingExample& ex) {
  const std::size_t n = text::length(ex.text);
  std::size_t prev_end = 0;
  for (const EntitySpan& span : ex.entities) {
    if (span.start >= span.end || span.end > n || span.start < prev_end ||
        text::slice(ex.text, span.start, span.end) != span.value) {
      throw Error(ErrorCode::UnbalancedMarkup,
                  "entity span does not match its text in \"" + ex.text + "\"");
    }
    prev_end = span.end;
  }
}

}  // namespace

bool Domain::has_action(std::string_view name) const {
  return std::binary_search(actions.begin(), actions.end(), name);
}

MarkupParse parse_entity_markup(std::string_view raw) {
  const std::u32string cps = text::decode(raw);
  std::u32string out;
  MarkupParse result;
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i];
    if (c == U']') {
      throw Error(ErrorCode::UnbalancedMarkup, "stray `]` in \"" + std::string(raw) + "\"");
    }
    if (c != U'[') {
      out.push_back(c);
      ++i;
      continue;
    }
    std::size_t close = i + 1;
    while (close < n && cps[close] != U']') {
      if (cps[close] == U'[') {
        throw Error(ErrorCode::UnbalancedMarkup,
                    "nested `[` in \"" + std::string(raw) + "\"");
      }
      ++close;
    }
    if (close == n) {
      throw Error(ErrorCode::UnbalancedMarkup, "dangling `[` in \"" + std::string(raw) + "\"");
    }
    if (close + 1 >= n || cps[close + 1] != U'(') {
      throw Error(ErrorCode::UnbalancedMarkup,
                  "missing `(entity)` after `]` in \"" + std::string(raw) + "\"");
    }
    std::size_t paren = close + 2;
    while (paren < n && cps[paren] != U')') ++paren;
    if (paren == n) {
      throw Error(ErrorCode::UnbalancedMarkup, "missing `)` in \"" + std::string(raw) + "\"");
    }
    const std::string name = text::trim(
        text::encode(std::u32string_view(cps).substr(close + 2, paren - close - 2)));
    if (name.empty()) {
      throw Error(ErrorCode::EmptyEntityName,
                  "empty entity name in \"" + std::string(raw) + "\"");
    }
    if (close == i + 1) {
      throw Error(ErrorCode::EmptyEntitySurface,
                  "empty annotated text in \"" + std::string(raw) + "\"");
    }
    const std::u32string_view surface = std::u32string_view(cps).substr(i + 1, close - i - 1);
    EntitySpan span;
    span.start = out.size();
    out.append(surface);
    span.end = out.size();
    span.entity = name;
    span.value = text::encode(surface);
    result.spans.push_back(std::move(span));
    i = paren + 1;
  }
  result.text = text::encode(out);
  return result;
}

std::string render_entity_markup(const TrainingExample& example) {
  const std::u32string cps = text::decode(example.text);
  std::string out;
  std::size_t pos = 0;
  for (const EntitySpan& span : example.entities) {
    out += text::encode(std::u32string_view(cps).substr(pos, span.start - pos));
    out += '[';
    out += text::encode(std::u32string_view(cps).substr(span.start, span.end - span.start));
    out += "](" + span.entity + ")";
    pos = span.end;
  }
  out += text::encode(std::u32string_view(cps).substr(pos));
  return out;
}

TrainingSet parse_nlu_file(std::string_view contents) {
  const Node root = yaml_lite::parse(contents);
  if (!root.is_map()) {
    throw Error(ErrorCode::SyntaxError, "line 1: expected a top-level `nlu:` mapping");
  }
  check_keys(root, {"version", "nlu"});
  const Node* nlu = root.find("nlu");
  if (nlu == nullptr || !nlu->is_seq()) {
    throw Error(ErrorCode::SyntaxError, "line " + std::to_string(root.line) +
                                            ": `nlu:` must be a list of blocks");
  }

  TrainingSet ts;
  std::map<std::string, std::vector<TrainingExample>> by_intent;
  std::set<std::string> entity_types;
  for (const Node& block : nlu->seq) {
    if (!block.is_map()) fail_at(ErrorCode::SyntaxError, block.line, "expected a block");
    if (const Node* intent = block.find("intent")) {
      check_keys(block, {"intent", "examples"});
      const std::string name = text::trim(expect_scalar(*intent, "intent"));
      if (name.empty()) fail_at(ErrorCode::SyntaxError, intent->line, "empty intent name");
      if (by_intent.contains(name)) {
        fail_at(ErrorCode::DuplicateIntentBlock, block.line, "intent `" + name + "` repeated");
      }
      auto& examples = by_intent[name];
      for (const auto& [raw, line] : example_lines(block.find("examples"))) {
        TrainingExample ex;
        try {
          MarkupParse parsed = parse_entity_markup(raw);
          ex.text = std::move(parsed.text);
          ex.entities = std::move(parsed.spans);
        } catch (const Error& e) {
          fail_at(e.code(), line, e.what());
        }
        if (text::trim(ex.text).empty()) {
          fail_at(ErrorCode::SyntaxError, line, "empty example");
        }
        ex.intent = name;
        validate_spans(ex);
        for (const auto& span : ex.entities) entity_types.insert(span.entity);
        examples.push_back(std::move(ex));
      }
      if (examples.empty()) {
        fail_at(ErrorCode::IntentWithNoExamples, block.line, "intent `" + name + "` has no examples");
      }
    } else if (const Node* synonym = block.find("synonym")) {
      check_keys(block, {"synonym", "examples"});
      const std::string canonical = text::trim(expect_scalar(*synonym, "synonym"));
      if (canonical.empty()) fail_at(ErrorCode::SyntaxError, synonym->line, "empty synonym");
      for (const auto& [raw, line] : example_lines(block.find("examples"))) {
        (void)line;
        ts.synonyms[raw] = canonical;
      }
    } else {
      fail_at(ErrorCode::SyntaxError, block.line, "expected an `intent:` or `synonym:` block");
    }
  }

  for (auto& [name, examples] : by_intent) {
    ts.intents.push_back(name);
    for (auto& ex : examples) ts.examples.push_back(std::move(ex));
  }
  ts.entity_types.assign(entity_types.begin(), entity_types.end());
  return ts;
}

std::string serialize_nlu(const TrainingSet& ts) {
  std::ostringstream out;
  out << "nlu:\n";
  for (const std::string& intent : ts.intents) {
    out << "  - intent: " << intent << "\n    examples:\n";
    for (const TrainingExample& ex : ts.examples) {
      if (ex.intent != intent) continue;
      out << "      - " << yaml_lite::quote_if_needed(render_entity_markup(ex)) << "\n";
    }
  }
  std::map<std::string, std::vector<std::string>> by_canonical;
  for (const auto& [variant, canonical] : ts.synonyms) by_canonical[canonical].push_back(variant);
  for (const auto& [canonical, variants] : by_canonical) {
    out << "  - synonym: " << yaml_lite::quote_if_needed(canonical) << "\n    examples:\n";
    for (const auto& v : variants) out << "      - " << yaml_lite::quote_if_needed(v) << "\n";
  }
  return out.str();
}

Domain parse_domain_file(std::string_view contents) {
  const Node root = yaml_lite::parse(contents);
  Domain domain;
  if (root.is_null()) return domain;
  if (!root.is_map()) throw Error(ErrorCode::SyntaxError, "line 1: expected a mapping");
  check_keys(root, {"version", "intents", "entities", "responses", "actions"});

  domain.intents = sorted_unique(scalar_list(root.find("intents"), "intents"));
  domain.entity_types = sorted_unique(scalar_list(root.find("entities"), "entities"));

  std::vector<std::string> actions;
  if (const Node* responses = root.find("responses"); responses && !responses->is_null()) {
    if (!responses->is_map()) {
      fail_at(ErrorCode::SyntaxError, responses->line, "`responses` must be a mapping");
    }
    for (const auto& [name, variants] : responses->map) {
      if (!name.starts_with("utter_")) {
        fail_at(ErrorCode::InvalidResponseName, variants.line,
                "response `" + name + "` must start with utter_");
      }
      if (!variants.is_seq() || variants.seq.empty()) {
        fail_at(ErrorCode::SyntaxError, variants.line,
                "response `" + name + "` needs a list of variants");
      }
      auto& texts = domain.responses[name];
      for (const Node& v : variants.seq) {
        if (v.is_map()) {
          check_keys(v, {"text"});
          const Node* t = v.find("text");
          if (t == nullptr) fail_at(ErrorCode::SyntaxError, v.line, "variant needs `text`");
          texts.push_back(expect_scalar(*t, "text"));
        } else {
          texts.push_back(expect_scalar(v, "response variant"));
        }
      }
      actions.push_back(name);
    }
  }
  for (std::string& a : scalar_list(root.find("actions"), "actions")) actions.push_back(std::move(a));
  domain.actions = sorted_unique(std::move(actions));
  return domain;
}

std::string serialize_domain(const Domain& domain) {
  std::ostringstream out;
  out << "intents:\n";
  for (const auto& i : domain.intents) out << "  - " << i << "\n";
  out << "entities:\n";
  for (const auto& e : domain.entity_types) out << "  - " << e << "\n";
  out << "responses:\n";
  for (const auto& [name, variants] : domain.responses) {
    out << "  " << name << ":\n";
    for (const auto& v : variants) out << "    - text: " << yaml_lite::quote_if_needed(v) << "\n";
  }
  std::vector<std::string> custom;
  for (const auto& a : domain.actions) {
    if (!domain.responses.contains(a)) custom.push_back(a);
  }
  if (!custom.empty()) {
    out << "actions:\n";
    for (const auto& a : custom) out << "  - " << a << "\n";
  }
  return out.str();
}

namespace {

std::vector<Story> parse_story_list(const Node* list, std::string_view section,
                                    const Domain& domain, const TrainingSet& ts) {
  std::vector<Story> stories;
  if (list == nullptr || list->is_null()) return stories;
  if (!list->is_seq()) {
    fail_at(ErrorCode::SyntaxError, list->line, "`" + std::string(section) + "` must be a list");
  }
  std::set<std::string> names;
  std::set<std::string> known_entities(ts.entity_types.begin(), ts.entity_types.end());
  known_entities.insert(domain.entity_types.begin(), domain.entity_types.end());

  for (const Node& item : list->seq) {
    if (!item.is_map()) fail_at(ErrorCode::SyntaxError, item.line, "expected a story block");
    check_keys(item, {"story", "rule", "steps"});
    const Node* name_node = item.find("story");
    if (name_node == nullptr) name_node = item.find("rule");
    if (name_node == nullptr) fail_at(ErrorCode::SyntaxError, item.line, "missing story name");
    Story story;
    story.name = expect_scalar(*name_node, "story name");
    if (!names.insert(story.name).second) {
      fail_at(ErrorCode::DuplicateStoryName, item.line, "story `" + story.name + "` repeated");
    }
    const Node* steps = item.find("steps");
    if (steps == nullptr || !steps->is_seq() || steps->seq.empty()) {
      fail_at(ErrorCode::SyntaxError, item.line, "story `" + story.name + "` has no steps");
    }
    for (const Node& step_node : steps->seq) {
      if (!step_node.is_map()) fail_at(ErrorCode::SyntaxError, step_node.line, "expected a step");
      StoryStep step;
      if (const Node* intent = step_node.find("intent")) {
        check_keys(step_node, {"intent", "entities"});
        step.kind = StoryStep::Kind::User;
        step.name = expect_scalar(*intent, "intent");
        if (step.name != kDefaultFallbackIntent &&
            !std::binary_search(ts.intents.begin(), ts.intents.end(), step.name)) {
          fail_at(ErrorCode::UnknownIntentInStory, intent->line,
                  "story `" + story.name + "` uses unknown intent `" + step.name + "`");
        }
        step.entities = scalar_list(step_node.find("entities"), "entities");
        for (const auto& e : step.entities) {
          if (!known_entities.contains(e)) {
            fail_at(ErrorCode::UnknownEntityInStory, intent->line,
                    "story `" + story.name + "` uses unknown entity `" + e + "`");
          }
        }
      } else if (const Node* action = step_node.find("action")) {
        check_keys(step_node, {"action"});
        step.kind = StoryStep::Kind::Action;
        step.name = expect_scalar(*action, "action");
        if (!domain.has_action(step.name) && step.name != kActionListen &&
            step.name != kActionDefaultFallback) {
          fail_at(ErrorCode::UnknownActionInStory, action->line,
                  "story `" + story.name + "` uses unknown action `" + step.name + "`");
        }
      } else {
        fail_at(ErrorCode::SyntaxError, step_node.line, "step needs `intent:` or `action:`");
      }
      if (story.steps.empty() && !step.is_user()) {
        fail_at(ErrorCode::SyntaxError, step_node.line,
                "story `" + story.name + "` must start with a user turn");
      }
      if (!story.steps.empty() && story.steps.back().is_user() && step.is_user()) {
        fail_at(ErrorCode::SyntaxError, step_node.line,
                "story `" + story.name + "` has two consecutive user turns");
      }
      story.steps.push_back(std::move(step));
    }
    stories.push_back(std::move(story));
  }
  return stories;
}

void write_steps(std::ostringstream& out, const Story& story) {
  out << "    steps:\n";
  for (const StoryStep& step : story.steps) {
    if (step.is_user()) {
      out << "      - intent: " << step.name << "\n";
      if (!step.entities.empty()) {
        out << "        entities:\n";
        for (const auto& e : step.entities) out << "          - " << e << "\n";
      }
    } else {
      out << "      - action: " << step.name << "\n";
    }
  }
}

}  // namespace

StorySet parse_stories_file(std::string_view contents, const Domain& domain,
                            const TrainingSet& ts) {
  const Node root = yaml_lite::parse(contents);
  StorySet set;
  if (root.is_null()) return set;
  if (!root.is_map()) throw Error(ErrorCode::SyntaxError, "line 1: expected a mapping");
  check_keys(root, {"version", "stories", "rules"});
  set.stories = parse_story_list(root.find("stories"), "stories", domain, ts);
  set.rules = parse_story_list(root.find("rules"), "rules", domain, ts);
  return set;
}

std::string serialize_stories(const StorySet& stories) {
  std::ostringstream out;
  out << "stories:\n";
  for (const Story& s : stories.stories) {
    out << "  - story: " << yaml_lite::quote_if_needed(s.name) << "\n";
    write_steps(out, s);
  }
  if (!stories.rules.empty()) {
    out << "rules:\n";
    for (const Story& r : stories.rules) {
      out << "  - rule: " << yaml_lite::quote_if_needed(r.name) << "\n";
      write_steps(out, r);
    }
  }
  return out.str();
}

TrainTestSplit split_train_test(const TrainingSet& ts, double test_fraction,
                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
  }
  TrainTestSplit split;
  for (TrainingSet* part : {&split.train, &split.test}) {
    part->intents = ts.intents;
    part->entity_types = ts.entity_types;
    part->synonyms = ts.synonyms;
  }

  Rng rng(seed);
  for (const std::string& intent : ts.intents) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ts.examples.size(); ++i) {
      if (ts.examples[i].intent == intent) members.push_back(i);
    }
    const std::size_t n = members.size();
    if (n < 2) {
      throw Error(ErrorCode::IntentTooSmall,
                  "intent `" + intent + "` needs at least 2 examples to split");
    }
    auto k = static_cast<std::size_t>(static_cast<double>(n) * test_fraction + 1e-9);
    k = std::clamp<std::size_t>(k, 1, n - 1);

    std::vector<std::size_t> order = members;
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(test_idx.begin(), test_idx.end());
    for (std::size_t i : members) {
      const bool is_test = std::binary_search(test_idx.begin(), test_idx.end(), i);
      (is_test ? split.test : split.train).examples.push_back(ts.examples[i]);
    }
  }
  return split;
}

std::uint64_t split_fingerprint(const TrainTestSplit& split) {
  std::uint64_t h = text::fnv1a64("split");
  for (const TrainingSet* part : {&split.train, &split.test}) {
    for (const TrainingExample& ex : part->examples) {
      h = text::fnv1a64(ex.intent, h);
      h = text::fnv1a64(std::string_view("\x1f", 1), h);
      h = text::fnv1a64(ex.text, h);
      h = text::fnv1a64(std::string_view("\x1e", 1), h);
    }
    h = text::fnv1a64("|", h);
  }
  return h;
}

Project load_project(std::string_view nlu_contents, std::string_view domain_contents,
                     std::string_view stories_contents) {
  Project project;
  project.nlu = parse_nlu_file(nlu_contents);
  project.domain = parse_domain_file(domain_contents);
  project.stories = parse_stories_file(stories_contents, project.domain, project.nlu);
  return project;
}

Project load_project_dir(const std::string& dir) {
  const std::filesystem::path base(dir);
  auto load = [&](const char* name) -> std::string {
    return read_file((base / name).string());
  };
  const std::string nlu = load("nlu.yml");
  const std::string domain = load("domain.yml");
  const std::string stories = load("stories.yml");
  auto tag = [](const char* file, const Error& e) {
    return Error(e.code(), std::string(file) + ": " + e.what());
  };
  Project project;
  try {
    project.nlu = parse_nlu_file(nlu);
  } catch (const Error& e) {
    throw tag("nlu.yml", e);
  }
  try {
    project.domain = parse_domain_file(domain);
  } catch (const Error& e) {
    throw tag("domain.yml", e);
  }
  try {
    project.stories = parse_stories_file(stories, project.domain, project.nlu);
  } catch (const Error& e) {
    throw tag("stories.yml", e);
  }
  return project;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

}  // namespace bnlu
