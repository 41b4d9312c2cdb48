#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lsp/error.hpp"
#include "lsp/sparse_vector.hpp"

namespace lsp {

enum class vocab_policy {
    integer,  ///< term keys are decimal term ids
    string,   ///< term keys are arbitrary strings mapped to dense ids
    automatic ///< integer if every key in the file parses as one
};

[[nodiscard]] vocab_policy parse_vocab_policy(std::string const& name);

/// String term -> dense id mapping in first-seen order.
class vocabulary {
  public:
    vocabulary() = default;
    explicit vocabulary(std::vector<std::string> terms);

    [[nodiscard]] bool empty() const noexcept { return m_terms.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return m_terms.size(); }
    [[nodiscard]] std::vector<std::string> const& terms() const noexcept { return m_terms; }
    [[nodiscard]] std::optional<term_id> find(std::string const& term) const;
    /// Adds the term if missing; throws ingest_error past 65,536 terms.
    term_id intern(std::string const& term);

    friend bool operator==(vocabulary const& a, vocabulary const& b) { return a.m_terms == b.m_terms; }

  private:
    std::vector<std::string> m_terms;
    std::unordered_map<std::string, term_id> m_lookup;
};

/// 8-bit quantized documents in ingestion order.
struct collection {
    std::vector<std::string> ids;
    std::vector<doc_vector> docs;
    quantization_params params;
    /// Empty when term keys were integers.
    vocabulary vocab;

    friend bool operator==(collection const&, collection const&) = default;
};

/// Quantizes raw vectors against their global maximum with round-to-nearest.
/// Throws ingest_error on duplicate ids or negative weights.
[[nodiscard]] collection make_collection(std::vector<std::string> ids, std::vector<std::vector<raw_entry>> const& raw,
                                         vocabulary vocab = {});

/// Reads {"id": ..., "vector": {term: weight}} lines and quantizes with
/// round-to-nearest against the corpus maximum.
[[nodiscard]] collection ingest_jsonl(std::istream& in, vocab_policy policy);
[[nodiscard]] collection ingest_jsonl_file(std::filesystem::path const& path, vocab_policy policy);

/// Writes quantized vectors back as JSON lines with integer weights.
void dump_jsonl(collection const& c, std::ostream& out);

/// Binary collection file ("LSPC").
void write_collection(collection const& c, std::filesystem::path const& path);
[[nodiscard]] collection read_collection(std::filesystem::path const& path);
/// Reads either a binary collection or JSON lines, by magic bytes.
[[nodiscard]] collection load_collection(std::filesystem::path const& path, vocab_policy policy);

struct query {
    std::string id;
    query_vector vector;
};

/// Query lines use the document record format. Integer-valued weights are
/// taken as 16-bit impacts; a query with any fractional weight is quantized
/// on the document scale. String terms missing from the vocabulary are dropped.
[[nodiscard]] std::vector<query> read_queries_jsonl(
    std::istream& in, quantization_params const& doc_params, vocabulary const& vocab);
[[nodiscard]] std::vector<query> read_queries_file(
    std::filesystem::path const& path, quantization_params const& doc_params, vocabulary const& vocab);

}  // namespace lsp
