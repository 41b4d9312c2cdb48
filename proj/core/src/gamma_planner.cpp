#include "lsp/gamma_planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "lsp/retriever.hpp"

namespace lsp {

sample_set collect_samples(index const& idx, std::span<query const> queries, std::size_t k, double beta)
{
    sample_set out;
    out.num_superblocks = idx.num_superblocks();
    searcher safe(idx);
    pruning_config config;
    config.k = k;
    std::vector<char> relevant(idx.num_superblocks());
    std::size_t const docs_per_superblock = std::size_t{idx.block_size()} * idx.blocks_per_superblock();
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        auto const& q = queries[qi].vector;
        if (q.empty()) {
            out.skipped.push_back(queries[qi].id);
            continue;
        }
        auto sbmax = accumulate_bounds(prune_query(q, beta), idx.superblock_max());
        auto top = *std::max_element(sbmax.begin(), sbmax.end());
        if (top == 0) {
            out.skipped.push_back(queries[qi].id);
            continue;
        }
        std::fill(relevant.begin(), relevant.end(), 0);
        for (auto const& hit : safe.search(q, config)) {
            if (hit.score > 0) {
                relevant[hit.doc / docs_per_superblock] = 1;
            }
        }
        for (std::size_t sb = 0; sb < sbmax.size(); ++sb) {
            out.samples.push_back({qi, sb, static_cast<double>(sbmax[sb]) / top, relevant[sb] != 0});
        }
    }
    return out;
}

double order_stat_cdf(std::size_t n, std::size_t i, double x_cum)
{
    if (i < 1 || i > n) {
        throw std::invalid_argument("order_stat_cdf: rank must be in 1..n");
    }
    if (!(x_cum >= 0 && x_cum <= 1)) {
        throw std::invalid_argument("order_stat_cdf: probability must be in [0, 1]");
    }
    if (x_cum == 0) {
        return 0;
    }
    if (x_cum == 1) {
        return 1;
    }
    // at least n - i + 1 of n samples fall at or below x
    return boost::math::ibeta(static_cast<double>(n - i + 1), static_cast<double>(i), x_cum);
}

bin_model::bin_model(std::size_t num_superblocks, std::vector<std::uint64_t> counts,
                     std::vector<std::uint64_t> relevant)
    : m_num_superblocks(num_superblocks), m_counts(std::move(counts)), m_relevant(std::move(relevant))
{
    if (m_counts.empty() || m_counts.size() != m_relevant.size()) {
        throw std::invalid_argument("bin_model: bad bin arrays");
    }
    if (num_superblocks == 0) {
        throw std::invalid_argument("bin_model: no superblocks");
    }
    m_prefix.resize(m_counts.size() + 1, 0);
    for (std::size_t j = 0; j < m_counts.size(); ++j) {
        if (m_relevant[j] > m_counts[j]) {
            throw std::invalid_argument("bin_model: more relevant samples than samples");
        }
        m_prefix[j + 1] = m_prefix[j] + m_counts[j];
    }
    m_total = m_prefix.back();
}

std::size_t bin_model::bin_of(double ratio) const noexcept
{
    auto j = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(num_bins())));
    return std::min(j, num_bins() - 1);
}

bin_model bin_model::fit(sample_set const& samples, std::size_t num_bins)
{
    if (num_bins == 0) {
        throw std::invalid_argument("bin_model: need at least one bin");
    }
    std::vector<std::uint64_t> counts(num_bins, 0);
    std::vector<std::uint64_t> relevant(num_bins, 0);
    bin_model shape(std::max<std::size_t>(samples.num_superblocks, 1), counts, relevant);
    for (auto const& s : samples.samples) {
        auto j = shape.bin_of(s.ratio);
        ++counts[j];
        relevant[j] += s.relevant ? 1 : 0;
    }
    return {std::max<std::size_t>(samples.num_superblocks, 1), std::move(counts), std::move(relevant)};
}

double bin_model::cdf_below(std::size_t j) const noexcept
{
    if (m_total == 0) {
        return 0;
    }
    return static_cast<double>(m_prefix[j]) / static_cast<double>(m_total);
}

double bin_model::mass(std::size_t j) const noexcept
{
    return m_total == 0 ? 0 : static_cast<double>(m_counts[j]) / static_cast<double>(m_total);
}

double bin_model::relevance(std::size_t j) const noexcept
{
    return m_counts[j] == 0 ? 0 : static_cast<double>(m_relevant[j]) / static_cast<double>(m_counts[j]);
}

std::vector<double> gamma_bin_mass(bin_model const& model, std::size_t gamma)
{
    std::size_t const n = model.num_superblocks();
    if (gamma < 1 || gamma > n) {
        throw std::invalid_argument("gamma_bin_mass: gamma must be in 1..N");
    }
    std::vector<double> out(model.num_bins());
    double left = order_stat_cdf(n, gamma, model.cdf_below(0));
    for (std::size_t j = 0; j < model.num_bins(); ++j) {
        double right_cum = j + 1 == model.num_bins() ? 1.0 : model.cdf_below(j + 1);
        double right = order_stat_cdf(n, gamma, right_cum);
        out[j] = right - left;
        left = right;
    }
    return out;
}

double relevance_probability(bin_model const& model, std::size_t gamma)
{
    auto mass = gamma_bin_mass(model, gamma);
    double p = 0;
    for (std::size_t j = 0; j < mass.size(); ++j) {
        p += model.relevance(j) * mass[j];
    }
    return std::clamp(p, 0.0, 1.0);
}

double confidence(bin_model const& model, std::size_t gamma)
{
    return 1.0 - relevance_probability(model, gamma);
}

std::vector<confidence_row> confidence_table(bin_model const& model, std::span<std::size_t const> gammas)
{
    std::vector<confidence_row> rows;
    rows.reserve(gammas.size());
    for (auto g : gammas) {
        double p = relevance_probability(model, g);
        rows.push_back({g, p, 1.0 - p});
    }
    return rows;
}

void write_confidence_tsv(std::ostream& out, std::span<confidence_row const> rows)
{
    out << "# P(R|B) is treated as independent of superblock rank\n";
    out << "gamma\tp_relevant\tconfidence\n";
    for (auto const& r : rows) {
        out << r.gamma << '\t' << r.p_relevant << '\t' << r.confidence << '\n';
    }
}

void write_bins_tsv(std::ostream& out, bin_model const& model)
{
    out << "lower\tupper\tmass\tp_relevant_given_bin\n";
    for (std::size_t j = 0; j < model.num_bins(); ++j) {
        out << model.lower(j) << '\t' << model.upper(j) << '\t' << model.mass(j) << '\t' << model.relevance(j)
            << '\n';
    }
}

namespace {

double percentile(std::vector<double> const& sorted, double p)
{
    if (sorted.empty()) {
        return 0;
    }
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

tightness_report compute_tightness(index const& idx, std::span<query const> queries, std::size_t num_bins)
{
    if (num_bins == 0) {
        throw std::invalid_argument("compute_tightness: need at least one bin");
    }
    tightness_report report;
    report.histogram.assign(num_bins, 0);
    std::vector<score_type> scores(idx.block_size());
    int const bits = idx.superblock_max().bits();
    for (auto const& q : queries) {
        if (q.vector.empty()) {
            continue;
        }
        auto sbmax = accumulate_bounds(q.vector, idx.superblock_max());
        prepared_query pq(q.vector);
        for (std::size_t sb = 0; sb < sbmax.size(); ++sb) {
            double bound = bound_value(sbmax[sb], bits);
            if (sbmax[sb] == 0 || std::isinf(bound)) {
                continue;
            }
            score_type best = 0;
            auto [first, last] = idx.superblock_blocks(sb);
            for (std::size_t blk = first; blk < last; ++blk) {
                idx.docs().score_block(blk, pq, scores);
                best = std::max(best, *std::max_element(scores.begin(), scores.end()));
            }
            report.samples.push_back(static_cast<double>(best) / bound);
        }
    }
    if (report.samples.empty()) {
        return report;
    }
    auto sorted = report.samples;
    std::sort(sorted.begin(), sorted.end());
    report.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    report.p10 = percentile(sorted, 0.10);
    report.p50 = percentile(sorted, 0.50);
    report.p90 = percentile(sorted, 0.90);
    for (double t : sorted) {
        auto j = std::min(static_cast<std::size_t>(t * static_cast<double>(num_bins)), num_bins - 1);
        ++report.histogram[j];
    }
    return report;
}

void write_histogram_tsv(std::ostream& out, tightness_report const& report)
{
    auto const n = report.histogram.size();
    out << "# samples=" << report.samples.size() << " mean=" << report.mean << " p10=" << report.p10
        << " p50=" << report.p50 << " p90=" << report.p90 << '\n';
    out << "lower\tupper\tcount\n";
    for (std::size_t j = 0; j < n; ++j) {
        out << static_cast<double>(j) / n << '\t' << static_cast<double>(j + 1) / n << '\t' << report.histogram[j]
            << '\n';
    }
}

}  // namespace lsp
