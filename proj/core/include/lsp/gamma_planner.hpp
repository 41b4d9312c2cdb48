#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lsp/collection.hpp"
#include "lsp/index.hpp"

namespace lsp {

struct ratio_sample {
    std::size_t query;  ///< position in the query list
    std::size_t superblock;
    /// SBMax(S) / max over S' of SBMax(S').
    double ratio;
    /// The superblock holds at least one exact top-k document with a positive score.
    bool relevant;
};

struct sample_set {
    std::size_t num_superblocks = 0;
    std::vector<ratio_sample> samples;
    /// Ids of queries whose SBMax values were all zero.
    std::vector<std::string> skipped;
};

/// Ratios use the beta-pruned query, labels come from a rank-safe run with the full query.
[[nodiscard]] sample_set collect_samples(index const& idx, std::span<query const> queries, std::size_t k,
                                         double beta = 1.0);

/// P(X_(i) <= x) for the i-th largest of n iid samples with P(X <= x) = x_cum.
/// Throws std::invalid_argument for i outside 1..n or x_cum outside [0, 1].
[[nodiscard]] double order_stat_cdf(std::size_t n, std::size_t i, double x_cum);

/// Equal-width bins over [0, 1]; each bin is [l, r) except the last, which is closed.
class bin_model {
  public:
    bin_model(std::size_t num_superblocks, std::vector<std::uint64_t> counts, std::vector<std::uint64_t> relevant);

    [[nodiscard]] static bin_model fit(sample_set const& samples, std::size_t num_bins = 100);

    [[nodiscard]] std::size_t num_bins() const noexcept { return m_counts.size(); }
    [[nodiscard]] std::size_t num_superblocks() const noexcept { return m_num_superblocks; }
    [[nodiscard]] std::uint64_t total() const noexcept { return m_total; }
    [[nodiscard]] double lower(std::size_t j) const noexcept { return static_cast<double>(j) / num_bins(); }
    [[nodiscard]] double upper(std::size_t j) const noexcept { return static_cast<double>(j + 1) / num_bins(); }
    [[nodiscard]] std::size_t bin_of(double ratio) const noexcept;

    /// Empirical P(X < lower(j)).
    [[nodiscard]] double cdf_below(std::size_t j) const noexcept;
    /// Empirical sample fraction in bin j.
    [[nodiscard]] double mass(std::size_t j) const noexcept;
    /// P(R | B_j); zero for empty bins.
    [[nodiscard]] double relevance(std::size_t j) const noexcept;

  private:
    std::size_t m_num_superblocks;
    std::vector<std::uint64_t> m_counts;
    std::vector<std::uint64_t> m_relevant;
    std::vector<std::uint64_t> m_prefix;
    std::uint64_t m_total = 0;
};

/// P_gamma(B_j) = G(F(r-)) - G(F(l-)) with G the CDF of X_(gamma); the last bin uses G(1).
[[nodiscard]] std::vector<double> gamma_bin_mass(bin_model const& model, std::size_t gamma);

/// Approximate probability that the gamma-th ranked superblock holds a top-k document.
[[nodiscard]] double relevance_probability(bin_model const& model, std::size_t gamma);

/// P_gamma(I) = 1 - P_gamma(R).
[[nodiscard]] double confidence(bin_model const& model, std::size_t gamma);

struct confidence_row {
    std::size_t gamma;
    double p_relevant;
    double confidence;
};

[[nodiscard]] std::vector<confidence_row> confidence_table(bin_model const& model, std::span<std::size_t const> gammas);

void write_confidence_tsv(std::ostream& out, std::span<confidence_row const> rows);
void write_bins_tsv(std::ostream& out, bin_model const& model);

struct tightness_report {
    std::vector<double> samples;
    std::vector<std::uint64_t> histogram;
    double mean = 0;
    double p10 = 0;
    double p50 = 0;
    double p90 = 0;
};

/// Exact best score in each superblock over the dequantized SBMax, for every
/// (query, superblock) with a positive, unsaturated bound. Full queries throughout.
[[nodiscard]] tightness_report compute_tightness(index const& idx, std::span<query const> queries,
                                                 std::size_t num_bins = 20);

void write_histogram_tsv(std::ostream& out, tightness_report const& report);

}  // namespace lsp
