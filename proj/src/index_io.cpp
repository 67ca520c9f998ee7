#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <zlib.h>

#include "json.hpp"
#include "spud/errors.hpp"
#include "spud/index.hpp"

namespace spud {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::string_view manifest_name = "manifest.json";
constexpr std::string_view dictionary_name = "dictionary.bin";
constexpr std::string_view postings_name = "postings.bin";
constexpr std::string_view docs_name = "docs.bin";

void put_varint(std::string& out, std::uint64_t value) {
    while (value >= 0x80) {
        out.push_back(static_cast<char>((value & 0x7f) | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<char>(value));
}

class ByteReader {
  public:
    ByteReader(std::string_view data, std::string_view file) : m_data(data), m_file(file) {}

    std::uint64_t varint() {
        std::uint64_t value = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            if (m_pos >= m_data.size()) {
                throw TruncatedFileError(fmt::format("{}: unexpected end of data at byte {}", m_file, m_pos));
            }
            auto byte = static_cast<unsigned char>(m_data[m_pos++]);
            value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
            if ((byte & 0x80) == 0) {
                return value;
            }
        }
        throw DataError(fmt::format("{}: varint too long at byte {}", m_file, m_pos));
    }

    std::string bytes(std::uint64_t count) {
        if (count > m_data.size() - m_pos) {
            throw TruncatedFileError(fmt::format("{}: unexpected end of data at byte {}", m_file, m_pos));
        }
        std::string out(m_data.substr(m_pos, count));
        m_pos += count;
        return out;
    }

    std::uint32_t u32() {
        auto v = varint();
        if (v > std::numeric_limits<std::uint32_t>::max()) {
            throw DataError(fmt::format("{}: value out of range at byte {}", m_file, m_pos));
        }
        return static_cast<std::uint32_t>(v);
    }

    [[nodiscard]] std::size_t position() const noexcept { return m_pos; }
    [[nodiscard]] bool done() const noexcept { return m_pos == m_data.size(); }

  private:
    std::string_view m_data;
    std::string_view m_file;
    std::size_t m_pos = 0;
};

std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<Bytef const*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

void write_file(fs::path const& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("cannot write {}", path.string()));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError(fmt::format("write failed for {}", path.string()));
    }
}

std::string read_file(fs::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json file_entry(std::string_view bytes) { return json{{"bytes", bytes.size()}, {"crc32", crc32_of(bytes)}}; }

std::string verified_contents(fs::path const& dir, std::string_view name, json const& manifest) {
    auto const& files = manifest.at("files");
    if (!files.contains(name)) {
        throw DataError(fmt::format("manifest has no entry for {}", name));
    }
    auto expected_size = files.at(std::string(name)).at("bytes").get<std::uint64_t>();
    auto expected_crc = files.at(std::string(name)).at("crc32").get<std::uint32_t>();
    auto bytes = read_file(dir / name);
    if (bytes.size() < expected_size) {
        throw TruncatedFileError(
            fmt::format("{}: truncated ({} of {} bytes)", (dir / name).string(), bytes.size(), expected_size));
    }
    if (bytes.size() != expected_size || crc32_of(bytes) != expected_crc) {
        throw ChecksumError(fmt::format("{}: checksum mismatch", (dir / name).string()));
    }
    return bytes;
}

}  // namespace

void save_index(InvertedIndex const& index, fs::path const& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    }

    std::string dictionary;
    std::string postings;
    put_varint(dictionary, index.terms().size());
    for (auto const& list : index.terms()) {
        auto offset = postings.size();
        DocOrdinal prev = 0;
        for (auto const& p : list.postings) {
            put_varint(postings, p.doc - prev);
            put_varint(postings, p.tf);
            prev = p.doc;
        }
        put_varint(dictionary, list.term.size());
        dictionary += list.term;
        put_varint(dictionary, list.df);
        put_varint(dictionary, list.cf);
        put_varint(dictionary, offset);
        put_varint(dictionary, postings.size() - offset);
    }

    std::string docs;
    put_varint(docs, index.docs().size());
    for (auto const& d : index.docs()) {
        put_varint(docs, d.doc_id.size());
        docs += d.doc_id;
        put_varint(docs, d.length_tokens);
        put_varint(docs, d.length_types);
    }

    auto const& stats = index.stats();
    auto const& pipeline = index.pipeline();
    json manifest{
        {"magic", index_magic},
        {"format_version", index_format_version},
        {"pipeline_hash", index.pipeline_hash()},
        {"pipeline",
         {{"lowercase", pipeline.lowercase}, {"stem", pipeline.stem}, {"stopwords", pipeline.stopwords}}},
        {"stats",
         {{"n", stats.n},
          {"total_tokens", stats.total_tokens},
          {"vocab_size", stats.vocab_size},
          {"sum_vector_lengths", stats.sum_vector_lengths},
          {"avg_length_tokens", stats.avg_length_tokens},
          {"avg_length_types", stats.avg_length_types}}},
        {"files",
         {{std::string(dictionary_name), file_entry(dictionary)},
          {std::string(postings_name), file_entry(postings)},
          {std::string(docs_name), file_entry(docs)}}},
    };

    write_file(dir / dictionary_name, dictionary);
    write_file(dir / postings_name, postings);
    write_file(dir / docs_name, docs);
    write_file(dir / manifest_name, manifest.dump(2) + "\n");
}

InvertedIndex load_index(fs::path const& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / manifest_name));
    } catch (json::exception const& e) {
        throw DataError(fmt::format("{}: malformed manifest: {}", (dir / manifest_name).string(), e.what()));
    }

    try {
        if (!manifest.is_object() || manifest.value("magic", "") != index_magic) {
            throw DataError(fmt::format("{} is not a spud index", dir.string()));
        }
        auto version = manifest.at("format_version").get<std::uint32_t>();
        if (version != index_format_version) {
            throw VersionMismatchError(fmt::format(
                "{}: index format version {} is not supported (expected {})", dir.string(), version,
                index_format_version));
        }

        TokenPipelineConfig pipeline;
        auto const& pj = manifest.at("pipeline");
        pipeline.lowercase = pj.at("lowercase").get<bool>();
        pipeline.stem = pj.at("stem").get<bool>();
        pipeline.stopwords = pj.at("stopwords").get<std::set<std::string>>();
        if (pipeline_hash(pipeline) != manifest.at("pipeline_hash").get<std::string>()) {
            throw ChecksumError(fmt::format("{}: pipeline hash does not match pipeline settings", dir.string()));
        }

        CollectionStats stats;
        auto const& sj = manifest.at("stats");
        stats.n = sj.at("n").get<std::uint64_t>();
        stats.total_tokens = sj.at("total_tokens").get<std::uint64_t>();
        stats.vocab_size = sj.at("vocab_size").get<std::uint64_t>();
        stats.sum_vector_lengths = sj.at("sum_vector_lengths").get<std::uint64_t>();
        stats.avg_length_tokens = sj.at("avg_length_tokens").get<double>();
        stats.avg_length_types = sj.at("avg_length_types").get<double>();

        auto dictionary_bytes = verified_contents(dir, dictionary_name, manifest);
        auto postings_bytes = verified_contents(dir, postings_name, manifest);
        auto docs_bytes = verified_contents(dir, docs_name, manifest);

        ByteReader docs_in(docs_bytes, docs_name);
        auto num_docs = docs_in.varint();
        if (num_docs != stats.n) {
            throw DataError("document table size differs from manifest");
        }
        std::vector<DocStats> docs;
        docs.reserve(num_docs);
        for (std::uint64_t i = 0; i < num_docs; ++i) {
            DocStats d;
            d.doc_id = docs_in.bytes(docs_in.varint());
            d.length_tokens = docs_in.u32();
            d.length_types = docs_in.u32();
            docs.push_back(std::move(d));
        }
        if (!docs_in.done()) {
            throw DataError(fmt::format("{}: trailing bytes", docs_name));
        }

        ByteReader dict_in(dictionary_bytes, dictionary_name);
        auto num_terms = dict_in.varint();
        std::vector<PostingsList> terms;
        terms.reserve(num_terms);
        for (std::uint64_t i = 0; i < num_terms; ++i) {
            PostingsList list;
            list.term = dict_in.bytes(dict_in.varint());
            list.df = dict_in.varint();
            list.cf = dict_in.varint();
            auto offset = dict_in.varint();
            auto length = dict_in.varint();
            if (offset > postings_bytes.size() || length > postings_bytes.size() - offset) {
                throw TruncatedFileError(fmt::format("{}: postings of '{}' out of range", postings_name, list.term));
            }
            ByteReader post_in(std::string_view(postings_bytes).substr(offset, length), postings_name);
            list.postings.reserve(list.df);
            std::uint64_t doc = 0;
            for (std::uint64_t j = 0; j < list.df; ++j) {
                doc += post_in.varint();
                if (doc > std::numeric_limits<DocOrdinal>::max()) {
                    throw DataError(fmt::format("{}: document ordinal out of range", postings_name));
                }
                list.postings.push_back(Posting{static_cast<DocOrdinal>(doc), post_in.u32()});
            }
            if (!post_in.done()) {
                throw DataError(fmt::format("{}: postings of '{}' have trailing bytes", postings_name, list.term));
            }
            terms.push_back(std::move(list));
        }
        if (!dict_in.done()) {
            throw DataError(fmt::format("{}: trailing bytes", dictionary_name));
        }

        return InvertedIndex(std::move(pipeline), std::move(terms), std::move(docs), stats);
    } catch (json::exception const& e) {
        throw DataError(fmt::format("{}: malformed manifest: {}", (dir / manifest_name).string(), e.what()));
    }
}

}  // namespace spud
