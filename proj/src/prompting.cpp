#include "gptdetox/prompting.hpp"

#include <stdexcept>

namespace gptdetox {

std::string render_zero_shot(std::string_view input) {
  if (input.empty()) {
    throw std::runtime_error("render_zero_shot: empty input");
  }
  std::string prompt(kZeroShotInstruction);
  prompt += input;
  return prompt;
}

std::string render_few_shot(const ExampleSet& examples, std::string_view input) {
  if (input.empty()) {
    throw std::runtime_error("render_few_shot: empty input");
  }
  if (examples.examples.empty()) {
    throw std::runtime_error("render_few_shot: few-shot prompts need at least one example");
  }
  std::string prompt(kFewShotHeader);
  for (const auto& example : examples.examples) {
    prompt += "\n\ninput: ";
    prompt += example.pair.toxic;
    prompt += "\noutput: ";
    prompt += example.pair.neutral;
  }
  prompt += "\n\ninput: ";
  prompt += input;
  prompt += "\noutput:";
  return prompt;
}

std::vector<SelectionStrategy> enumerate_prompt_settings(
    const PromptGridConfig& config) {
  std::vector<SelectionStrategy> settings;
  if (config.zero_shot) {
    settings.push_back(SelectionStrategy{StrategyKind::kZeroShot, 0, 0});
  }
  for (StrategyKind kind : config.few_shot_kinds) {
    if (kind == StrategyKind::kZeroShot) continue;
    for (int k : config.ks) {
      if (k < 1) {
        throw std::runtime_error("enumerate_prompt_settings: k must be >= 1");
      }
      std::uint64_t seed = kind == StrategyKind::kRandom ? config.seed : 0;
      settings.push_back(SelectionStrategy{kind, k, seed});
    }
  }
  if (settings.empty()) {
    throw std::runtime_error("enumerate_prompt_settings: no settings enabled");
  }
  return settings;
}

}  // namespace gptdetox
