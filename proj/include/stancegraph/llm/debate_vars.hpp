#pragma once

#include "stancegraph/core/types.hpp"
#include "stancegraph/llm/prompt_template.hpp"

namespace stancegraph::llm {

/// Answer language of the topic prompts: the debate's first language.
inline std::string debate_language(const Debate& debate) {
  return debate.languages.empty() ? std::string("English") : debate.languages.front();
}

/// The project-context variables shared by the topic and mining templates.
inline Variables debate_variables(const Debate& debate) {
  return {{"name", debate.name},
          {"energy_type", debate.energy_type},
          {"long_description", debate.long_description},
          {"scope", debate.scope},
          {"language", debate_language(debate)}};
}

}  // namespace stancegraph::llm
