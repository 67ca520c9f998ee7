#include "spud/corpus.hpp"

#include <fstream>

#include <fmt/format.h>
#include "json.hpp"

#include "spud/errors.hpp"

namespace spud {

std::vector<Document> read_jsonl(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::uint64_t line_offset = offset;
        offset += line.size() + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto fail = [&](std::string_view why) {
            return DataError(
                fmt::format("{}: line {} (byte offset {}): {}", path.string(), line_no, line_offset, why));
        };
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (nlohmann::json::parse_error const& e) {
            throw fail(e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") || !obj["id"].is_string()
            || !obj["text"].is_string()) {
            throw fail("expected an object with string fields \"id\" and \"text\"");
        }
        docs.push_back(Document{obj["id"].get<std::string>(), obj["text"].get<std::string>()});
    }
    if (in.bad()) {
        throw IoError(fmt::format("{}: read failure at byte offset {}", path.string(), offset));
    }
    return docs;
}

}  // namespace spud
