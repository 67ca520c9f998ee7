#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spud {

/// One line of a JSON-lines corpus or topic file: {"id": ..., "text": ...}.
struct Document {
    std::string id;
    std::string text;
};

using Topic = Document;

/// Reads a JSON-lines file of {id, text} objects. Blank lines are skipped.
/// Throws IoError if the file cannot be opened and DataError (naming the line
/// number and byte offset) on malformed lines.
[[nodiscard]] std::vector<Document> read_jsonl(std::filesystem::path const& path);

}  // namespace spud
