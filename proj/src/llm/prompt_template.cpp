#include "stancegraph/llm/prompt_template.hpp"

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include "stancegraph/core/text.hpp"

namespace stancegraph::llm {
namespace {

constexpr std::array<std::pair<TemplateName, std::string_view>, 8> kNames{{
    {TemplateName::parse_document, "parse_document"},
    {TemplateName::topic_candidates, "topic_candidates"},
    {TemplateName::cluster_naming, "cluster_naming"},
    {TemplateName::thesaurus_building, "thesaurus_building"},
    {TemplateName::argument_extraction, "argument_extraction"},
    {TemplateName::stance_actor, "stance_actor"},
    {TemplateName::stance_topic, "stance_topic"},
    {TemplateName::judge, "judge"},
}};

constexpr std::array<std::pair<OutputFormat, std::string_view>, 5> kFormats{{
    {OutputFormat::xml_paragraphs, "xml_paragraphs"},
    {OutputFormat::xml_themes, "xml_themes"},
    {OutputFormat::argument_lines, "argument_lines"},
    {OutputFormat::single_label, "single_label"},
    {OutputFormat::json_verdict, "json_verdict"},
}};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

/// Calls `on_placeholder(name)` for every `{identifier}` and `on_text(chunk)`
/// for the literal text between them.
template <class OnText, class OnPlaceholder>
void scan(std::string_view s, OnText on_text, OnPlaceholder on_placeholder) {
  std::size_t literal_start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '{' && i + 1 < s.size() && is_ident_start(s[i + 1])) {
      std::size_t j = i + 1;
      while (j < s.size() && is_ident(s[j])) ++j;
      if (j < s.size() && s[j] == '}') {
        on_text(s.substr(literal_start, i - literal_start));
        on_placeholder(std::string(s.substr(i + 1, j - i - 1)));
        i = j + 1;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  on_text(s.substr(literal_start));
}

std::string substitute(std::string_view s, const Variables& vars) {
  std::string out;
  out.reserve(s.size());
  scan(
      s, [&](std::string_view chunk) { out.append(chunk); },
      [&](const std::string& name) { out.append(vars.at(name)); });
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

}  // namespace

std::string_view to_string(TemplateName name) {
  for (const auto& [n, label] : kNames) {
    if (n == name) return label;
  }
  return "?";
}

TemplateName parse_template_name(std::string_view s) {
  for (const auto& [n, label] : kNames) {
    if (label == s) return n;
  }
  throw ValidationError("unknown prompt template '" + std::string(s) + "'");
}

std::string_view to_string(OutputFormat format) {
  for (const auto& [f, label] : kFormats) {
    if (f == format) return label;
  }
  return "?";
}

OutputFormat parse_output_format(std::string_view s) {
  for (const auto& [f, label] : kFormats) {
    if (label == s) return f;
  }
  throw ValidationError("unknown output format '" + std::string(s) + "'");
}

const std::vector<TemplateName>& all_template_names() {
  static const std::vector<TemplateName> names = [] {
    std::vector<TemplateName> v;
    for (const auto& [n, label] : kNames) v.push_back(n);
    return v;
  }();
  return names;
}

const std::set<std::string>& documented_variables(TemplateName name) {
  static const std::map<TemplateName, std::set<std::string>> table{
      {TemplateName::parse_document, {"doc_editor", "doc_title", "doc_content", "output_language"}},
      {TemplateName::topic_candidates,
       {"name", "energy_type", "long_description", "scope", "context", "question", "language"}},
      {TemplateName::cluster_naming, {"name", "energy_type", "long_description", "scope", "language", "topics"}},
      {TemplateName::thesaurus_building, {"name", "energy_type", "long_description", "scope", "language", "topics"}},
      {TemplateName::argument_extraction, {"name", "energy_type", "long_description", "scope", "context", "question"}},
      {TemplateName::stance_actor, {"actor_name", "project_name", "argument"}},
      {TemplateName::stance_topic, {"topic_name", "project_name", "argument"}},
      {TemplateName::judge, {"name", "energy_type", "text", "source_text"}},
  };
  return table.at(name);
}

MissingVariablesError::MissingVariablesError(TemplateName name, std::vector<std::string> missing)
    : ValidationError("template '" + std::string(to_string(name)) + "' is missing variables: " + join(missing)),
      missing_(std::move(missing)) {}

PromptTemplate::PromptTemplate(TemplateName name, OutputFormat format, std::string system_text, std::string user_text)
    : name_(name), format_(format), system_(std::move(system_text)), user_(std::move(user_text)) {
  const auto& allowed = documented_variables(name_);
  for (const auto& p : placeholders()) {
    if (!allowed.contains(p)) {
      throw ValidationError("template '" + std::string(to_string(name_)) + "' uses undocumented placeholder '" + p + "'");
    }
  }
}

PromptTemplate PromptTemplate::parse(TemplateName name, std::string_view file_text) {
  constexpr std::string_view kSystem = "=== system ===\n";
  constexpr std::string_view kUser = "=== user ===\n";
  const auto sys = file_text.find(kSystem);
  const auto usr = file_text.find(kUser);
  if (sys == std::string_view::npos || usr == std::string_view::npos || usr < sys) {
    throw ValidationError("template '" + std::string(to_string(name)) + "' lacks system/user sections");
  }
  std::optional<OutputFormat> format;
  std::istringstream header{std::string(file_text.substr(0, sys))};
  for (std::string line; std::getline(header, line);) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    if (text::trim(line.substr(0, colon)) == "output_format") format = parse_output_format(text::trim(line.substr(colon + 1)));
  }
  if (!format) throw ValidationError("template '" + std::string(to_string(name)) + "' lacks output_format");
  auto body = [](std::string_view s) {
    std::string out(s);
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
  };
  return PromptTemplate(name, *format, body(file_text.substr(sys + kSystem.size(), usr - sys - kSystem.size())),
                        body(file_text.substr(usr + kUser.size())));
}

std::set<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> names;
  auto collect = [&](const std::string& s) { scan(s, [](std::string_view) {}, [&](const std::string& n) { names.insert(n); }); };
  collect(system_);
  collect(user_);
  return names;
}

RenderedPrompt PromptTemplate::render(const Variables& variables) const {
  std::vector<std::string> missing;
  for (const auto& p : placeholders()) {
    if (!variables.contains(p)) missing.push_back(p);
  }
  if (!missing.empty()) throw MissingVariablesError(name_, std::move(missing));
  return {substitute(system_, variables), substitute(user_, variables)};
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& dir) {
  TemplateLibrary lib;
  for (TemplateName name : all_template_names()) {
    const auto path = dir / (std::string(to_string(name)) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("prompt template '" + path.string() + "' not found");
    std::ostringstream buf;
    buf << in.rdbuf();
    lib.add(PromptTemplate::parse(name, buf.str()));
  }
  return lib;
}

void TemplateLibrary::add(PromptTemplate t) {
  const TemplateName name = t.name();
  templates_.insert_or_assign(name, std::move(t));
}

const PromptTemplate& TemplateLibrary::get(TemplateName name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw NotFoundError("prompt template '" + std::string(to_string(name)) + "' not loaded");
  return it->second;
}

}  // namespace stancegraph::llm
