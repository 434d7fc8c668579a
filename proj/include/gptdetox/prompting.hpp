#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gptdetox/selection.hpp"

namespace gptdetox {

inline constexpr std::string_view kZeroShotInstruction =
    "Rephrase the following sentence by only replacing offensive, harmful, "
    "and swear words while using the remaining words: ";

inline constexpr std::string_view kFewShotHeader =
    "Paraphrase by replacing offensive, harmful, and swear words with "
    "respectful words. Follow the examples below:";

std::string render_zero_shot(std::string_view input);

// Header, blank line, then "input:/output:" blocks separated by blank lines;
// the final block is the query with a bare "output:" cue. Single '\n'
// newlines, no trailing newline.
std::string render_few_shot(const ExampleSet& examples, std::string_view input);

struct PromptSpec {
  std::string setting_id;
  SelectionStrategy strategy;
  ExampleSet examples;  // empty for zero-shot
  std::string rendered;
};

struct PromptGridConfig {
  bool zero_shot = true;
  std::vector<StrategyKind> few_shot_kinds = {
      StrategyKind::kRandom, StrategyKind::kWmes, StrategyKind::kCmes};
  std::vector<int> ks = {1, 3, 5, 8, 10};
  std::uint64_t seed = 0;
};

// Fixed total order: zero-shot first, then each few-shot kind crossed with
// the k grid. The defaults enumerate 16 settings.
std::vector<SelectionStrategy> enumerate_prompt_settings(
    const PromptGridConfig& config);

}  // namespace gptdetox
