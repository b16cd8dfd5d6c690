#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stancegraph/core/error.hpp"

namespace stancegraph::llm {

enum class TemplateName {
  parse_document,
  topic_candidates,
  cluster_naming,
  thesaurus_building,
  argument_extraction,
  stance_actor,
  stance_topic,
  judge,
};

enum class OutputFormat { xml_paragraphs, xml_themes, argument_lines, single_label, json_verdict };

std::string_view to_string(TemplateName name);
TemplateName parse_template_name(std::string_view s);
std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view s);

const std::vector<TemplateName>& all_template_names();

/// The placeholder names a template may use; loading rejects any other.
const std::set<std::string>& documented_variables(TemplateName name);

using Variables = std::map<std::string, std::string>;

/// Raised when rendering lacks placeholders; `missing()` lists them.
class MissingVariablesError : public ValidationError {
 public:
  MissingVariablesError(TemplateName name, std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

struct RenderedPrompt {
  std::string system;
  std::string user;
};

/// A system/user prompt pair with `{name}` placeholders. Braces that do not
/// enclose an identifier (JSON examples, for instance) are literal text.
class PromptTemplate {
 public:
  PromptTemplate(TemplateName name, OutputFormat format, std::string system_text, std::string user_text);

  /// Template file layout:
  ///
  ///     output_format: <format>
  ///     === system ===
  ///     ...
  ///     === user ===
  ///     ...
  static PromptTemplate parse(TemplateName name, std::string_view file_text);

  TemplateName name() const noexcept { return name_; }
  OutputFormat output_format() const noexcept { return format_; }
  const std::string& system_text() const noexcept { return system_; }
  const std::string& user_text() const noexcept { return user_; }
  std::set<std::string> placeholders() const;

  /// Single-pass raw substitution; inserted values are never re-scanned.
  RenderedPrompt render(const Variables& variables) const;

 private:
  TemplateName name_;
  OutputFormat format_;
  std::string system_;
  std::string user_;
};

/// The eight pipeline templates, loaded from `<dir>/<name>.txt`.
class TemplateLibrary {
 public:
  static TemplateLibrary load(const std::filesystem::path& dir);

  void add(PromptTemplate t);
  const PromptTemplate& get(TemplateName name) const;
  RenderedPrompt render(TemplateName name, const Variables& variables) const { return get(name).render(variables); }

 private:
  std::map<TemplateName, PromptTemplate> templates_;
};

}  // namespace stancegraph::llm
