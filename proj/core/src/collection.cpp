#include "lsp/collection.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "byte_io.hpp"

namespace lsp {

using json = nlohmann::json;

vocab_policy parse_vocab_policy(std::string const& name)
{
    if (name == "integer") {
        return vocab_policy::integer;
    }
    if (name == "string") {
        return vocab_policy::string;
    }
    if (name == "auto") {
        return vocab_policy::automatic;
    }
    throw std::invalid_argument("unknown vocabulary policy: " + name);
}

vocabulary::vocabulary(std::vector<std::string> terms)
{
    for (auto& t : terms) {
        if (m_lookup.contains(t)) {
            throw ingest_error("vocabulary: duplicate term " + t);
        }
        intern(t);
    }
}

std::optional<term_id> vocabulary::find(std::string const& term) const
{
    auto it = m_lookup.find(term);
    if (it == m_lookup.end()) {
        return std::nullopt;
    }
    return it->second;
}

term_id vocabulary::intern(std::string const& term)
{
    if (auto it = m_lookup.find(term); it != m_lookup.end()) {
        return it->second;
    }
    if (m_terms.size() >= max_vocabulary) {
        throw ingest_error("vocabulary overflow: more than 65536 distinct terms");
    }
    auto id = static_cast<term_id>(m_terms.size());
    m_terms.push_back(term);
    m_lookup.emplace(term, id);
    return id;
}

namespace {

struct raw_record {
    std::string id;
    std::vector<std::pair<std::string, double>> entries;
    bool all_integer_weights = true;
};

std::optional<term_id> parse_term_number(std::string const& key)
{
    unsigned long value = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), value);
    if (ec != std::errc{} || ptr != key.data() + key.size() || key.empty()) {
        return std::nullopt;
    }
    if (value >= max_vocabulary) {
        throw ingest_error("vocabulary overflow: term id " + key + " does not fit 16 bits");
    }
    return static_cast<term_id>(value);
}

raw_record parse_record(std::string const& line, std::size_t line_no)
{
    json j;
    try {
        j = json::parse(line);
    } catch (json::parse_error const& e) {
        throw ingest_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("vector") || !j["vector"].is_object()) {
        throw ingest_error("line " + std::to_string(line_no) + ": expected {\"id\", \"vector\"}");
    }
    raw_record rec;
    auto const& id = j["id"];
    rec.id = id.is_string() ? id.get<std::string>() : id.dump();
    for (auto const& [key, value] : j["vector"].items()) {
        if (!value.is_number()) {
            throw ingest_error("line " + std::to_string(line_no) + ": weight for " + key + " is not a number");
        }
        double w = value.get<double>();
        if (w < 0) {
            throw ingest_error("line " + std::to_string(line_no) + ": negative weight for term " + key);
        }
        if (!value.is_number_integer() && !value.is_number_unsigned()) {
            rec.all_integer_weights = false;
        }
        rec.entries.emplace_back(key, w);
    }
    return rec;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        fn(parse_record(line, line_no));
    }
}

}  // namespace

collection ingest_jsonl(std::istream& in, vocab_policy policy)
{
    std::vector<raw_record> records;
    for_each_line(in, [&](raw_record rec) { records.push_back(std::move(rec)); });
    if (records.empty()) {
        throw ingest_error("empty collection");
    }

    bool use_integer = policy == vocab_policy::integer;
    if (policy == vocab_policy::automatic) {
        use_integer = true;
        for (auto const& r : records) {
            for (auto const& [key, w] : r.entries) {
                if (!parse_term_number(key)) {
                    use_integer = false;
                }
            }
        }
    }

    vocabulary vocab;
    std::vector<std::string> ids;
    std::vector<std::vector<raw_entry>> raw(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (auto const& [key, w] : records[i].entries) {
            term_id term = 0;
            if (use_integer) {
                auto parsed = parse_term_number(key);
                if (!parsed) {
                    throw ingest_error("doc " + records[i].id + ": term key '" + key + "' is not an integer");
                }
                term = *parsed;
            } else {
                term = vocab.intern(key);
            }
            raw[i].push_back({term, w});
        }
        ids.push_back(std::move(records[i].id));
    }
    return make_collection(std::move(ids), raw, std::move(vocab));
}

collection make_collection(std::vector<std::string> ids, std::vector<std::vector<raw_entry>> const& raw,
                           vocabulary vocab)
{
    if (ids.size() != raw.size()) {
        throw std::invalid_argument("make_collection: id and vector counts differ");
    }
    std::unordered_set<std::string> seen;
    double global_max = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!seen.insert(ids[i]).second) {
            throw ingest_error("duplicate doc id " + ids[i]);
        }
        for (auto const& e : raw[i]) {
            if (!(e.weight >= 0)) {
                throw ingest_error("doc " + ids[i] + ": negative weight for term " + std::to_string(e.term));
            }
            global_max = std::max(global_max, e.weight);
        }
    }
    collection out;
    out.ids = std::move(ids);
    out.vocab = std::move(vocab);
    out.params = quantization_params(global_max > 0 ? global_max : 1.0, 8);
    out.docs.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        try {
            out.docs.push_back(quantize_weights<std::uint8_t>(raw[i], out.params, rounding::round));
        } catch (std::invalid_argument const& e) {
            throw ingest_error("doc " + out.ids[i] + ": " + e.what());
        }
    }
    return out;
}

collection ingest_jsonl_file(std::filesystem::path const& path, vocab_policy policy)
{
    std::ifstream in(path);
    if (!in) {
        throw ingest_error("cannot open " + path.string());
    }
    return ingest_jsonl(in, policy);
}

void dump_jsonl(collection const& c, std::ostream& out)
{
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        json vec = json::object();
        for (auto const& e : c.docs[i]) {
            auto key = c.vocab.empty() ? std::to_string(e.term) : c.vocab.terms()[e.term];
            vec[key] = e.weight;
        }
        json rec = {{"id", c.ids[i]}, {"vector", vec}};
        out << rec.dump() << '\n';
    }
}

namespace {
constexpr std::string_view collection_magic = "LSPC";
constexpr std::uint32_t collection_version = 1;
}  // namespace

void write_collection(collection const& c, std::filesystem::path const& path)
{
    detail::byte_writer w;
    w.magic(collection_magic);
    w.u32(collection_version);
    w.f64(c.params.global_max());
    w.u8(static_cast<std::uint8_t>(c.params.bits()));
    w.u32(static_cast<std::uint32_t>(c.vocab.size()));
    for (auto const& t : c.vocab.terms()) {
        w.str(t);
    }
    w.u64(c.docs.size());
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        w.str(c.ids[i]);
        w.u32(static_cast<std::uint32_t>(c.docs[i].size()));
        for (auto const& e : c.docs[i]) {
            w.u16(e.term);
            w.u8(e.weight);
        }
    }
    detail::write_file(path.string(), w.buffer());
}

collection read_collection(std::filesystem::path const& path)
{
    auto data = detail::read_file(path.string());
    detail::byte_reader r(data);
    r.expect_magic(collection_magic);
    if (auto v = r.u32(); v != collection_version) {
        throw format_error("unsupported collection version " + std::to_string(v));
    }
    collection c;
    double global_max = r.f64();
    int bits = r.u8();
    c.params = quantization_params(global_max, bits);
    auto vocab_size = r.count(r.u32(), 4);
    std::vector<std::string> terms;
    terms.reserve(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) {
        terms.push_back(r.str());
    }
    c.vocab = vocabulary(std::move(terms));
    auto num_docs = r.count(r.u64(), 8);
    for (std::size_t i = 0; i < num_docs; ++i) {
        c.ids.push_back(r.str());
        auto nnz = r.count(r.u32(), 3);
        std::vector<doc_vector::entry> entries(nnz);
        for (auto& e : entries) {
            e.term = r.u16();
            e.weight = r.u8();
        }
        c.docs.emplace_back(std::move(entries));
    }
    return c;
}

collection load_collection(std::filesystem::path const& path, vocab_policy policy)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ingest_error("cannot open " + path.string());
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::string_view(magic, 4) == collection_magic) {
        return read_collection(path);
    }
    return ingest_jsonl_file(path, policy);
}

std::vector<query> read_queries_jsonl(std::istream& in, quantization_params const& doc_params,
                                      vocabulary const& vocab)
{
    std::vector<query> out;
    for_each_line(in, [&](raw_record rec) {
        std::vector<raw_entry> raw;
        for (auto const& [key, w] : rec.entries) {
            std::optional<term_id> term;
            if (vocab.empty()) {
                term = parse_term_number(key);
                if (!term) {
                    throw ingest_error("query " + rec.id + ": term key '" + key + "' is not an integer");
                }
            } else {
                term = vocab.find(key);
            }
            if (term) {
                raw.push_back({*term, w});
            }
        }
        query q;
        q.id = rec.id;
        if (rec.all_integer_weights) {
            std::vector<query_vector::entry> entries;
            for (auto const& e : raw) {
                if (e.weight > 65535) {
                    throw ingest_error("query " + rec.id + ": integer weight exceeds 16 bits");
                }
                entries.push_back({e.term, static_cast<std::uint16_t>(e.weight)});
            }
            try {
                q.vector = query_vector::from_unsorted(std::move(entries));
            } catch (std::invalid_argument const& e) {
                throw ingest_error("query " + rec.id + ": " + e.what());
            }
        } else {
            q.vector = quantize_query(raw, doc_params);
        }
        check_query_range(q.vector);
        out.push_back(std::move(q));
    });
    return out;
}

std::vector<query> read_queries_file(std::filesystem::path const& path, quantization_params const& doc_params,
                                     vocabulary const& vocab)
{
    std::ifstream in(path);
    if (!in) {
        throw ingest_error("cannot open " + path.string());
    }
    return read_queries_jsonl(in, doc_params, vocab);
}

namespace detail {

std::vector<std::uint8_t> read_file(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open " + path);
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(std::string const& path, std::span<std::uint8_t const> data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out.write(reinterpret_cast<char const*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

}  // namespace detail

}  // namespace lsp
