#include <gtest/gtest.h>

#include <sstream>

#include "lsp/evaluation.hpp"

using namespace lsp;

namespace {

constexpr char const* fixture_run = "q1 Q0 a 1 30 t\n"
                                    "q1 Q0 x 2 20 t\n"
                                    "q1 Q0 b 3 10 t\n"
                                    "q2 Q0 y 1 9 t\n"
                                    "q2 Q0 z 2 9 t\n"
                                    "q2 Q0 c 3 1 t\n";

constexpr char const* fixture_qrels = "q1 0 a 1\n"
                                      "q1 0 b 2\n"
                                      "q1 0 x 0\n"
                                      "q2 0 c 1\n"
                                      "q3 0 d 1\n"
                                      "q4 0 e 0\n";

run parse_run(std::string const& text)
{
    std::istringstream in(text);
    return read_run(in);
}

qrels parse_qrels(std::string const& text)
{
    std::istringstream in(text);
    return read_qrels(in);
}

}  // namespace

TEST(Run, WriteThenRead)
{
    std::vector<std::string> ids{"d0", "d1", "d2"};
    std::vector<search_hit> hits{{2, 50}, {0, 50}, {1, 3}};
    std::ostringstream out;
    write_run(out, "q7", hits, ids, "lsp");
    EXPECT_EQ(out.str(), "q7 Q0 d2 1 50 lsp\nq7 Q0 d0 2 50 lsp\nq7 Q0 d1 3 3 lsp\n");
    auto r = parse_run(out.str());
    ASSERT_EQ(r.at("q7").size(), 3U);
    EXPECT_EQ(r.at("q7")[1].doc, "d0");
    EXPECT_EQ(r.at("q7")[2].score, 3U);
}

TEST(Run, RejectsMalformedLines)
{
    EXPECT_THROW((void)parse_run("q1 Q0 a 1 30\n"), format_error);
    EXPECT_THROW((void)parse_run("q1 Q0 a 2 30 t\n"), format_error);
    EXPECT_THROW((void)parse_run("q1 Q0 a 1 3 t\nq1 Q0 b 2 4 t\n"), format_error);
    EXPECT_THROW((void)parse_run("q1 Q0 a one 3 t\n"), format_error);
}

TEST(Qrels, KeepsPositiveGrades)
{
    auto q = parse_qrels(fixture_qrels);
    EXPECT_EQ(q.at("q1").size(), 2U);
    EXPECT_TRUE(!q.contains("q4") || q.at("q4").empty());
}

TEST(Metrics, HandComputedFixture)
{
    auto r = parse_run(fixture_run);
    auto q = parse_qrels(fixture_qrels);
    // q1 finds a at rank 1, q2 finds c at rank 3, q3 is absent from the run
    EXPECT_NEAR(recall_at_k(r, q, 2), (0.5 + 0 + 0) / 3, 1e-12);
    EXPECT_NEAR(mrr_at_k(r, q, 2), (1.0 + 0 + 0) / 3, 1e-12);
    EXPECT_NEAR(recall_at_k(r, q, 3), (1.0 + 1.0 + 0) / 3, 1e-12);
    EXPECT_NEAR(mrr_at_k(r, q, 3), (1.0 + 1.0 / 3 + 0) / 3, 1e-12);
    auto m = evaluate(r, q, 3);
    EXPECT_EQ(m.queries, 3U);
    EXPECT_FALSE(m.preserved_recall.has_value());
}

TEST(Metrics, PerfectRunAndPreservedRecall)
{
    auto q = parse_qrels("q1 0 a 1\nq2 0 b 1\n");
    auto perfect = parse_run("q1 Q0 a 1 5 t\nq2 Q0 b 1 5 t\n");
    EXPECT_DOUBLE_EQ(mrr_at_k(perfect, q, 10), 1.0);
    auto m = evaluate(perfect, q, 10, &perfect);
    ASSERT_TRUE(m.preserved_recall.has_value());
    EXPECT_DOUBLE_EQ(*m.preserved_recall, 1.0);
    auto half = parse_run("q1 Q0 a 1 5 t\nq2 Q0 z 1 5 t\n");
    auto h = evaluate(half, q, 10, &perfect);
    EXPECT_DOUBLE_EQ(*h.preserved_recall, 0.5);
}

TEST(Latency, NearestRankSummary)
{
    std::vector<double> samples;
    for (int i = 100; i >= 1; --i) {
        samples.push_back(i);
    }
    auto s = summarize_latency(samples);
    EXPECT_EQ(s.count, 100U);
    EXPECT_DOUBLE_EQ(s.mean, 50.5);
    EXPECT_DOUBLE_EQ(s.median, 50);
    EXPECT_DOUBLE_EQ(s.p99, 99);
    EXPECT_DOUBLE_EQ(s.min, 1);
    EXPECT_DOUBLE_EQ(s.max, 100);
    EXPECT_EQ(summarize_latency({}).count, 0U);
}
