#pragma once

#include <filesystem>
#include <iosfwd>

#include "stancegraph/core/graph.hpp"

namespace stancegraph {

/// Snapshot layout: one JSON record per line. The first line is a header
/// carrying the schema version, the last an `end` record with the record
/// count, so truncation at a line boundary is detected too.
inline constexpr int kSnapshotSchemaVersion = 1;

void write_snapshot(const DebateGraph& graph, std::ostream& out);
/// Throws SnapshotError naming the offending line.
DebateGraph read_snapshot(std::istream& in);

/// Writes through a temporary file and renames it into place.
void save_snapshot(const DebateGraph& graph, const std::filesystem::path& path);
DebateGraph load_snapshot(const std::filesystem::path& path);

}  // namespace stancegraph
