#pragma once

#include <compare>
#include <ostream>
#include <string>
#include <utility>

namespace stancegraph {

/// Opaque string identifier, distinct per entity kind.
template <class Tag>
struct Id {
  std::string value;

  Id() = default;
  explicit Id(std::string v) : value(std::move(v)) {}

  bool empty() const noexcept { return value.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Id& id) { return os << id.value; }
};

using DocumentId = Id<struct DocumentTag>;
using ParagraphId = Id<struct ParagraphTag>;
using ActorId = Id<struct ActorTag>;
using TopicId = Id<struct TopicTag>;
using ArgumentId = Id<struct ArgumentTag>;
using QuerySpecId = Id<struct QuerySpecTag>;

}  // namespace stancegraph
