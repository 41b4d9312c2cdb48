#include "lsp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lsp/error.hpp"

namespace lsp {

void write_run(std::ostream& out, std::string const& qid, std::span<search_hit const> hits,
               std::vector<std::string> const& doc_ids, std::string const& tag)
{
    for (std::size_t i = 0; i < hits.size(); ++i) {
        out << qid << " Q0 " << doc_ids.at(hits[i].doc) << ' ' << i + 1 << ' ' << hits[i].score << ' ' << tag
            << '\n';
    }
}

run read_run(std::istream& in)
{
    run out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid;
        std::string q0;
        std::string tag;
        run_entry e;
        if (!(fields >> qid >> q0 >> e.doc >> e.rank >> e.score >> tag)) {
            throw format_error("run line " + std::to_string(line_no) + ": expected 6 fields");
        }
        auto& entries = out[qid];
        if (e.rank != entries.size() + 1) {
            throw format_error("run line " + std::to_string(line_no) + ": ranks not contiguous for " + qid);
        }
        if (!entries.empty() && e.score > entries.back().score) {
            throw format_error("run line " + std::to_string(line_no) + ": scores increase for " + qid);
        }
        entries.push_back(std::move(e));
    }
    return out;
}

run read_run_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw format_error("cannot open " + path);
    }
    return read_run(in);
}

qrels read_qrels(std::istream& in)
{
    qrels out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid;
        std::string iter;
        std::string doc;
        int grade = 0;
        if (!(fields >> qid >> iter >> doc >> grade)) {
            throw format_error("qrels line " + std::to_string(line_no) + ": expected 4 fields");
        }
        auto& judged = out[qid];
        if (grade > 0) {
            judged[doc] = grade;
        }
    }
    return out;
}

qrels read_qrels_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw format_error("cannot open " + path);
    }
    return read_qrels(in);
}

namespace {

template <typename Fn>
double mean_over_judged(run const& r, qrels const& judgments, Fn&& per_query)
{
    double sum = 0;
    std::size_t n = 0;
    static std::vector<run_entry> const empty;
    for (auto const& [qid, relevant] : judgments) {
        if (relevant.empty()) {
            continue;
        }
        auto it = r.find(qid);
        sum += per_query(it == r.end() ? empty : it->second, relevant);
        ++n;
    }
    return n == 0 ? 0 : sum / static_cast<double>(n);
}

}  // namespace

double recall_at_k(run const& r, qrels const& judgments, std::size_t k)
{
    return mean_over_judged(r, judgments, [k](std::vector<run_entry> const& entries, auto const& relevant) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) {
            hits += relevant.contains(entries[i].doc) ? 1 : 0;
        }
        return static_cast<double>(hits) / static_cast<double>(relevant.size());
    });
}

double mrr_at_k(run const& r, qrels const& judgments, std::size_t k)
{
    return mean_over_judged(r, judgments, [k](std::vector<run_entry> const& entries, auto const& relevant) {
        for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) {
            if (relevant.contains(entries[i].doc)) {
                return 1.0 / static_cast<double>(i + 1);
            }
        }
        return 0.0;
    });
}

metrics evaluate(run const& r, qrels const& judgments, std::size_t k, run const* safe)
{
    metrics m;
    m.k = k;
    m.queries = static_cast<std::size_t>(
        std::count_if(judgments.begin(), judgments.end(), [](auto const& q) { return !q.second.empty(); }));
    m.recall = recall_at_k(r, judgments, k);
    m.mrr = mrr_at_k(r, judgments, k);
    if (safe != nullptr) {
        m.safe_recall = recall_at_k(*safe, judgments, k);
        if (*m.safe_recall > 0) {
            m.preserved_recall = m.recall / *m.safe_recall;
        }
    }
    return m;
}

latency_summary summarize_latency(std::vector<double> samples)
{
    latency_summary s;
    if (samples.empty()) {
        return s;
    }
    std::sort(samples.begin(), samples.end());
    auto at = [&](double p) {
        auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
        return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
    };
    s.count = samples.size();
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    s.median = at(0.5);
    s.p99 = at(0.99);
    s.min = samples.front();
    s.max = samples.back();
    return s;
}

}  // namespace lsp
