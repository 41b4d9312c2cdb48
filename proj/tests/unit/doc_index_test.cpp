#include <gtest/gtest.h>

#include <random>

#include "lsp/doc_index.hpp"
#include "lsp/synthetic.hpp"
#include "oracle.hpp"

using namespace lsp;

namespace {

std::vector<doc_vector> two_docs()
{
    return {doc_vector({{1, 4}}), doc_vector({{1, 2}, {7, 9}})};
}

constexpr doc_format all_formats[] = {doc_format::compact_inv, doc_format::flat_inv, doc_format::fwd};

}  // namespace

TEST(DocIndex, CompactTransposesOneBlock)
{
    auto docs = two_docs();
    auto layout = assign_blocks(docs, 2, 1, block_strategy::input_order);
    auto idx = build_doc_index(docs, layout, doc_format::compact_inv);
    auto const& blk = std::get<compact_inv>(idx.data()).blocks.at(0);
    ASSERT_EQ(blk.terms.size(), 2U);
    EXPECT_EQ(blk.terms[0].term, 1);
    EXPECT_EQ(blk.terms[0].length_minus_one, 1);
    EXPECT_EQ(blk.terms[1].term, 7);
    EXPECT_EQ(blk.terms[1].offset, 2U);
    ASSERT_EQ(blk.postings.size(), 3U);
    EXPECT_EQ(blk.postings[0].doc, 0);
    EXPECT_EQ(blk.postings[0].weight, 4);
    EXPECT_EQ(blk.postings[1].doc, 1);
    EXPECT_EQ(blk.postings[1].weight, 2);
    EXPECT_EQ(blk.postings[2].doc, 1);
    EXPECT_EQ(blk.postings[2].weight, 9);
}

TEST(DocIndex, FlatHasThreeRecords)
{
    auto docs = two_docs();
    auto layout = assign_blocks(docs, 2, 1, block_strategy::input_order);
    auto idx = build_doc_index(docs, layout, doc_format::flat_inv);
    auto const& flat = std::get<flat_inv>(idx.data());
    EXPECT_EQ(flat.postings.size(), 3U);
    EXPECT_EQ(flat.block_offsets, std::vector<std::uint64_t>{0});
}

TEST(DocIndex, PaddedSlotsContributeNothing)
{
    std::vector<doc_vector> docs{doc_vector({{1, 4}}), doc_vector({{2, 5}}), doc_vector({{1, 1}})};
    auto layout = assign_blocks(docs, 2, 1, block_strategy::input_order);
    for (auto f : all_formats) {
        auto idx = build_doc_index(docs, layout, f);
        auto scores = idx.score_block(1, query_vector({{1, 3}, {2, 1}}));
        ASSERT_EQ(scores.size(), 2U);
        EXPECT_EQ(scores[0], 3U);
        EXPECT_EQ(scores[1], 0U);
    }
    auto fwd = build_doc_index(docs, layout, doc_format::fwd);
    EXPECT_EQ(std::get<fwd_index>(fwd.data()).doc_offsets.size(), 4U);
}

TEST(DocIndex, ScoresOneBlock)
{
    auto docs = two_docs();
    auto layout = assign_blocks(docs, 2, 1, block_strategy::input_order);
    for (auto f : all_formats) {
        auto idx = build_doc_index(docs, layout, f);
        EXPECT_EQ(idx.score_block(0, query_vector({{1, 2}})), (std::vector<score_type>{8, 4})) << to_string(f);
        EXPECT_EQ(idx.score_block(0, query_vector({{3, 2}})), (std::vector<score_type>{0, 0})) << to_string(f);
    }
}

TEST(DocIndex, FormatsAgreeWithOracleAndReconstruct)
{
    corpus_options opts;
    opts.num_docs = 3000;
    opts.vocab_size = 600;
    opts.num_topics = 8;
    synthetic_generator gen(opts);
    auto c = gen.corpus();
    query_options qo;
    qo.num_queries = 40;
    auto queries = gen.queries(qo);
    for (std::uint32_t b : {2U, 16U, 256U}) {
        auto layout = assign_blocks(c.docs, b, 4, block_strategy::random);
        std::vector<doc_index> built;
        for (auto f : all_formats) {
            built.push_back(build_doc_index(c.docs, layout, f));
        }
        for (auto const& idx : built) {
            for (std::size_t internal = 0; internal < c.docs.size(); internal += 7) {
                ASSERT_EQ(idx.reconstruct(internal), c.docs[layout.order()[internal]]);
            }
        }
        for (auto const& q : queries) {
            prepared_query pq(q.vector);
            std::vector<score_type> out(b);
            for (std::size_t blk = 0; blk < layout.num_blocks(); blk += 3) {
                auto [first, last] = layout.block_docs(blk);
                for (auto const& idx : built) {
                    idx.score_block(blk, pq, out);
                    for (std::size_t s = 0; s < b; ++s) {
                        std::uint64_t expect = first + s < last ? oracle::dot(q.vector, c.docs[layout.order()[first + s]]) : 0;
                        ASSERT_EQ(out[s], expect);
                    }
                }
            }
        }
    }
}

TEST(DocIndex, FlatNotLargerThanCompact)
{
    corpus_options opts;
    opts.num_docs = 8000;
    opts.vocab_size = 3000;
    opts.num_topics = 30;
    auto c = synthetic_generator(opts).corpus();
    for (std::uint32_t b : {4U, 8U, 16U}) {
        auto layout = assign_blocks(c.docs, b, 16, block_strategy::kmeans_lite);
        auto flat = build_doc_index(c.docs, layout, doc_format::flat_inv);
        auto compact = build_doc_index(c.docs, layout, doc_format::compact_inv);
        EXPECT_LE(flat.serialized_bytes(), compact.serialized_bytes()) << "b=" << b;
    }
}

TEST(DocIndex, InvertedFormatsRejectOversizedBlocks)
{
    auto docs = two_docs();
    EXPECT_THROW((void)index_layout(257, 1, {0, 1}), std::invalid_argument);
}

TEST(DocIndex, FormatNames)
{
    for (auto f : all_formats) {
        EXPECT_EQ(parse_doc_format(to_string(f)), f);
    }
    EXPECT_THROW((void)parse_doc_format("bmp-inv"), std::invalid_argument);
}
