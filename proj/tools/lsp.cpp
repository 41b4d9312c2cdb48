#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lsp/collection.hpp"
#include "lsp/evaluation.hpp"
#include "lsp/gamma_planner.hpp"
#include "lsp/index.hpp"
#include "lsp/layout.hpp"
#include "lsp/retriever.hpp"

using namespace lsp;

namespace {

using clock_type = std::chrono::steady_clock;

double millis_since(clock_type::time_point start)
{
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

struct preset {
    std::size_t k;
    std::size_t gamma;
    double beta;
    std::uint32_t block_size;
    std::uint32_t blocks_per_superblock;
};

preset find_preset(std::string const& name)
{
    if (name == "k10") {
        return {10, 250, 0.33, 16, 16};
    }
    if (name == "k1000") {
        return {1000, 1000, 0.33, 4, 16};
    }
    throw CLI::ValidationError("--preset", "unknown preset '" + name + "' (expected k10 or k1000)");
}

template <typename T>
void apply_default(CLI::Option const* opt, T& target, T value)
{
    if (opt->count() == 0) {
        target = value;
    }
}

std::size_t parse_gamma(std::string const& text)
{
    if (text == "all" || text == "N") {
        return std::numeric_limits<std::size_t>::max();
    }
    std::size_t pos = 0;
    auto v = std::stoull(text, &pos);
    if (pos != text.size()) {
        throw CLI::ValidationError("--gamma", "expected a count or 'all'");
    }
    return v;
}

unsigned thread_count(unsigned requested)
{
    if (requested != 0) {
        return requested;
    }
    if (char const* env = std::getenv("LSP_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Pruning flags shared by search, bench and plan-gamma.
struct pruning_flags {
    std::string preset_name;
    std::size_t k = 10;
    std::string gamma = "all";
    double mu = 1.0;
    double eta = 1.0;
    double beta = 1.0;
    std::string variant = "lsp0";
    CLI::Option* k_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* beta_opt = nullptr;

    void attach(CLI::App* app)
    {
        app->add_option("--preset", preset_name, "Named configuration: k10 or k1000");
        k_opt = app->add_option("-k,--k", k, "Result depth")->check(CLI::PositiveNumber);
        gamma_opt = app->add_option("--gamma", gamma, "Guaranteed superblocks, or 'all'");
        app->add_option("--mu", mu, "Superblock overestimation factor")->check(CLI::Range(0.0, 1.0));
        app->add_option("--eta", eta, "Block overestimation factor")->check(CLI::Range(0.0, 1.0));
        beta_opt = app->add_option("--beta", beta, "Fraction of query terms kept for candidate generation")
                       ->check(CLI::Range(0.0, 1.0));
        app->add_option("--variant", variant, "lsp0, lsp1 or lsp2");
    }

    pruning_config resolve()
    {
        if (!preset_name.empty()) {
            auto p = find_preset(preset_name);
            apply_default(k_opt, k, p.k);
            apply_default(gamma_opt, gamma, std::to_string(p.gamma));
            apply_default(beta_opt, beta, p.beta);
        }
        pruning_config cfg{.k = k, .gamma = parse_gamma(gamma), .mu = mu, .eta = eta, .beta = beta,
                           .variant = parse_lsp_variant(variant)};
        cfg.validate();
        return cfg;
    }
};

std::vector<query> load_queries(lsp::index const& idx, std::string const& path)
{
    return read_queries_file(path, idx.params(), idx.vocab());
}

std::ostream& open_output(std::string const& path, std::ofstream& file)
{
    if (path.empty() || path == "-") {
        return std::cout;
    }
    file.open(path);
    if (!file) {
        throw std::runtime_error("cannot write " + path);
    }
    return file;
}

int run_ingest(std::string const& input, std::string const& output, std::string const& policy,
               std::string const& dump)
{
    auto start = clock_type::now();
    auto c = ingest_jsonl_file(input, parse_vocab_policy(policy));
    if (!output.empty()) {
        write_collection(c, output);
    }
    if (!dump.empty()) {
        std::ofstream out(dump);
        dump_jsonl(c, out);
    }
    std::cerr << "ingested " << c.docs.size() << " docs, " << c.vocab.size() << " string terms, global max "
              << c.params.global_max() << " in " << std::fixed << std::setprecision(1) << millis_since(start)
              << " ms\n";
    return 0;
}

struct build_flags {
    std::string collection;
    std::string output;
    std::string preset_name;
    std::string vocab = "auto";
    build_options opts;
    std::string format = "fwd";
    std::string strategy = "input-order";
    std::string ordering;
    int bits = 0;
    CLI::Option* b_opt = nullptr;
    CLI::Option* c_opt = nullptr;
};

int run_build(build_flags& f)
{
    if (!f.preset_name.empty()) {
        auto p = find_preset(f.preset_name);
        apply_default(f.b_opt, f.opts.block_size, p.block_size);
        apply_default(f.c_opt, f.opts.blocks_per_superblock, p.blocks_per_superblock);
    }
    if (f.bits != 0) {
        f.opts.bits_block = f.bits;
        f.opts.bits_superblock = f.bits;
    }
    f.opts.format = parse_doc_format(f.format);
    f.opts.strategy = parse_block_strategy(f.strategy);
    auto start = clock_type::now();
    auto c = load_collection(f.collection, parse_vocab_policy(f.vocab));
    auto layout = f.ordering.empty()
                      ? assign_blocks(c.docs, f.opts.block_size, f.opts.blocks_per_superblock, f.opts.strategy,
                                      f.opts.kmeans)
                      : layout_from_ordering(c.ids, read_ordering_file(f.ordering), f.opts.block_size,
                                             f.opts.blocks_per_superblock);
    auto idx = build_index(c, layout, f.opts);
    save_index(idx, f.output);
    std::cerr << "built " << idx.num_docs() << " docs, " << idx.num_blocks() << " blocks, " << idx.num_superblocks()
              << " superblocks in " << std::fixed << std::setprecision(1) << millis_since(start) << " ms\n";
    return 0;
}

int run_search(std::string const& index_path, std::string const& queries_path, std::string const& output,
               std::string const& tag, pruning_flags& flags, bool parallel, unsigned threads,
               std::string const& latency_path)
{
    auto cfg = flags.resolve();
    auto idx = load_index(index_path);
    auto queries = load_queries(idx, queries_path);
    std::vector<std::vector<search_hit>> results(queries.size());
    std::vector<double> latency(queries.size());
    std::vector<std::exception_ptr> failures(queries.size());
    auto worker = [&](std::size_t first, std::size_t stride) {
        searcher s(idx);
        for (std::size_t i = first; i < queries.size(); i += stride) {
            auto start = clock_type::now();
            try {
                results[i] = s.search(queries[i].vector, cfg);
            } catch (...) {
                failures[i] = std::current_exception();
            }
            latency[i] = millis_since(start);
        }
    };
    unsigned workers = parallel ? thread_count(threads) : 1;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < workers; ++t) {
            pool.emplace_back(worker, t, workers);
        }
        worker(0, workers);
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (failures[i]) {
            std::cerr << "query " << queries[i].id << ": ";
            std::rethrow_exception(failures[i]);
        }
    }
    std::ofstream file;
    auto& out = open_output(output, file);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        write_run(out, queries[i].id, results[i], idx.doc_ids(), tag);
    }
    if (!latency_path.empty()) {
        std::ofstream lat(latency_path);
        lat << "qid\tms\n";
        for (std::size_t i = 0; i < queries.size(); ++i) {
            lat << queries[i].id << '\t' << latency[i] << '\n';
        }
    }
    auto s = summarize_latency(latency);
    std::cerr << "searched " << s.count << " queries with " << workers << " thread(s); mean " << std::fixed
              << std::setprecision(3) << s.mean << " ms, p99 " << s.p99 << " ms\n";
    return 0;
}

int run_evaluate(std::string const& run_path, std::string const& qrels_path, std::size_t k,
                 std::string const& safe_path)
{
    auto r = read_run_file(run_path);
    auto judged = read_qrels_file(qrels_path);
    std::optional<run> safe;
    if (!safe_path.empty()) {
        safe = read_run_file(safe_path);
    }
    auto m = evaluate(r, judged, k, safe ? &*safe : nullptr);
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "queries\t" << m.queries << '\n';
    std::cout << "recall@" << k << '\t' << m.recall << '\n';
    std::cout << "mrr@" << k << '\t' << m.mrr << '\n';
    if (m.safe_recall) {
        std::cout << "safe_recall@" << k << '\t' << *m.safe_recall << '\n';
        std::cout << "preserved_recall\t";
        if (m.preserved_recall) {
            std::cout << *m.preserved_recall << '\n';
        } else {
            std::cout << "n/a\n";
        }
    }
    return 0;
}

int run_bench(std::string const& index_path, std::string const& queries_path, pruning_flags& flags,
              std::size_t warmup, std::size_t repeats)
{
    auto cfg = flags.resolve();
    auto idx = load_index(index_path);
    auto queries = load_queries(idx, queries_path);
    searcher s(idx);
    std::size_t sink = 0;
    for (std::size_t w = 0; w < warmup; ++w) {
        for (auto const& q : queries) {
            sink += s.search(q.vector, cfg).size();
        }
    }
    std::vector<double> per_query(queries.size(), std::numeric_limits<double>::max());
    search_stats totals;
    for (std::size_t r = 0; r < repeats; ++r) {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            auto start = clock_type::now();
            sink += s.search(queries[i].vector, cfg).size();
            per_query[i] = r == 0 ? millis_since(start) : std::min(per_query[i], millis_since(start));
            if (r == 0) {
                auto const& st = s.last_stats();
                totals.superblocks_visited += st.superblocks_visited;
                totals.blocks_scored += st.blocks_scored;
                totals.docs_scored += st.docs_scored;
            }
        }
    }
    auto sum = summarize_latency(per_query);
    double n = std::max<double>(1.0, static_cast<double>(queries.size()));
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "queries\t" << sum.count << '\n';
    std::cout << "mean_ms\t" << sum.mean << '\n';
    std::cout << "median_ms\t" << sum.median << '\n';
    std::cout << "p99_ms\t" << sum.p99 << '\n';
    std::cout << "min_ms\t" << sum.min << '\n';
    std::cout << "max_ms\t" << sum.max << '\n';
    std::cout << "superblocks_visited\t" << static_cast<double>(totals.superblocks_visited) / n << '\n';
    std::cout << "blocks_scored\t" << static_cast<double>(totals.blocks_scored) / n << '\n';
    std::cout << "docs_scored\t" << static_cast<double>(totals.docs_scored) / n << '\n';
    std::cout << "results\t" << sink << '\n';
    return 0;
}

int run_inspect(std::string const& index_path)
{
    std::ifstream in(index_path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + index_path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto info = read_container_info(bytes);
    std::cout << "version\t" << info.version << '\n';
    std::cout << "docs\t" << info.num_docs << '\n';
    std::cout << "block_size\t" << info.block_size << '\n';
    std::cout << "blocks_per_superblock\t" << info.blocks_per_superblock << '\n';
    std::cout << "blocks\t" << info.num_blocks << '\n';
    std::cout << "superblocks\t" << info.num_superblocks << '\n';
    std::cout << "terms\t" << info.num_terms << '\n';
    std::cout << "bits_block\t" << info.bits_block << '\n';
    std::cout << "bits_superblock\t" << info.bits_superblock << '\n';
    std::cout << "format\t" << to_string(info.format) << '\n';
    std::cout << "global_max\t" << info.global_max << '\n';
    std::cout << "has_avg\t" << ((info.flags & flag_has_avg) != 0 ? "yes" : "no") << '\n';
    std::cout << "has_vocab\t" << ((info.flags & flag_has_vocab) != 0 ? "yes" : "no") << '\n';
    std::cout << "header_bytes\t" << info.header_bytes << '\n';
    std::uint64_t total = 0;
    for (auto const& s : info.sections) {
        std::cout << "section\t" << to_string(s.tag) << '\t' << s.size << '\n';
        total += s.size;
    }
    std::cout << "sections_total\t" << total << '\n';
    std::cout << "file_bytes\t" << info.file_bytes << '\n';
    return total + info.header_bytes == info.file_bytes ? 0 : 1;
}

int run_plan_gamma(std::string const& index_path, std::string const& queries_path, std::size_t k, std::size_t bins,
                   double beta, std::vector<std::size_t> gammas, std::string const& output,
                   std::string const& bins_path, std::string const& tightness_path)
{
    auto idx = load_index(index_path);
    auto queries = load_queries(idx, queries_path);
    auto samples = collect_samples(idx, queries, k, beta);
    auto model = bin_model::fit(samples, bins);
    if (gammas.empty()) {
        for (std::size_t g : {1U, 10U, 50U, 100U, 250U, 500U, 1000U, 2000U, 3000U}) {
            gammas.push_back(g);
        }
    }
    std::erase_if(gammas, [&](std::size_t g) { return g == 0 || g > model.num_superblocks(); });
    auto table = confidence_table(model, gammas);
    std::ofstream file;
    auto& out = open_output(output, file);
    write_confidence_tsv(out, table);
    if (!bins_path.empty()) {
        std::ofstream b(bins_path);
        write_bins_tsv(b, model);
    }
    if (!tightness_path.empty()) {
        std::ofstream t(tightness_path);
        write_histogram_tsv(t, compute_tightness(idx, queries));
    }
    std::cerr << "fitted " << samples.samples.size() << " samples over " << model.num_superblocks()
              << " superblocks; skipped " << samples.skipped.size() << " queries\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Superblock-pruned learned sparse retrieval"};
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "Quantize a JSONL collection");
    std::string in_path;
    std::string out_path;
    std::string vocab = "auto";
    std::string dump;
    ingest->add_option("-i,--input", in_path, "JSONL documents")->required()->check(CLI::ExistingFile);
    ingest->add_option("-o,--output", out_path, "Binary collection file");
    ingest->add_option("--vocab", vocab, "auto, string or integer");
    ingest->add_option("--dump", dump, "Write the quantized vectors back as JSONL");

    auto* build = app.add_subcommand("build", "Build an index container");
    build_flags bf;
    build->add_option("-i,--collection", bf.collection, "JSONL or binary collection")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("-o,--output", bf.output, "Index file")->required();
    build->add_option("--preset", bf.preset_name, "Named configuration: k10 or k1000");
    build->add_option("--vocab", bf.vocab, "auto, string or integer (JSONL input)");
    bf.b_opt = build->add_option("-b,--block-size", bf.opts.block_size, "Documents per block");
    bf.c_opt = build->add_option("-c,--blocks-per-superblock", bf.opts.blocks_per_superblock, "Blocks per superblock");
    build->add_option("--format", bf.format, "compact-inv, flat-inv or fwd");
    build->add_option("--bits", bf.bits, "Bound bits for both levels")->check(CLI::IsMember({2, 4, 8}));
    build->add_option("--bits-block", bf.opts.bits_block, "Block bound bits")->check(CLI::IsMember({2, 4, 8}));
    build->add_option("--bits-superblock", bf.opts.bits_superblock, "Superblock bound bits")
        ->check(CLI::IsMember({2, 4, 8}));
    build->add_option("--strategy", bf.strategy, "input-order, kmeans-lite or random");
    build->add_option("--ordering", bf.ordering, "File with one doc id per line")->check(CLI::ExistingFile);
    build->add_flag("--with-avg", bf.opts.with_avg, "Store superblock averages (needed by lsp2)");
    build->add_option("--threads", bf.opts.threads, "Build workers; 0 uses all cores");

    auto* search = app.add_subcommand("search", "Run queries and write a TREC run file");
    std::string index_path;
    std::string queries_path;
    std::string tag = "lsp";
    std::string latency_path;
    bool parallel = false;
    unsigned threads = 0;
    pruning_flags sflags;
    search->add_option("--index", index_path, "Index file")->required()->check(CLI::ExistingFile);
    search->add_option("-q,--queries", queries_path, "JSONL queries")->required()->check(CLI::ExistingFile);
    search->add_option("-o,--output", out_path, "Run file (default stdout)");
    search->add_option("--tag", tag, "Run tag");
    search->add_option("--latency", latency_path, "Per-query wall-clock TSV");
    search->add_flag("--parallel", parallel, "Spread queries over threads (LSP_THREADS or all cores)");
    search->add_option("--threads", threads, "Thread count for --parallel");
    sflags.attach(search);

    auto* eval = app.add_subcommand("evaluate", "Score a run against TREC qrels");
    std::string run_path;
    std::string qrels_path;
    std::string safe_path;
    std::size_t eval_k = 10;
    eval->add_option("--run", run_path, "Run file")->required()->check(CLI::ExistingFile);
    eval->add_option("--qrels", qrels_path, "Qrels file")->required()->check(CLI::ExistingFile);
    eval->add_option("-k,--k", eval_k, "Cutoff")->check(CLI::PositiveNumber);
    eval->add_option("--safe", safe_path, "Safe run for preserved recall")->check(CLI::ExistingFile);

    auto* bench = app.add_subcommand("bench", "Single-threaded latency over a preloaded index");
    pruning_flags bflags;
    std::size_t warmup = 1;
    std::size_t repeats = 3;
    bench->add_option("--index", index_path, "Index file")->required()->check(CLI::ExistingFile);
    bench->add_option("-q,--queries", queries_path, "JSONL queries")->required()->check(CLI::ExistingFile);
    bench->add_option("--warmup", warmup, "Untimed passes");
    bench->add_option("--repeats", repeats, "Timed passes; each query keeps its fastest")->check(CLI::PositiveNumber);
    bflags.attach(bench);

    auto* inspect = app.add_subcommand("inspect", "Print the container header and section sizes");
    inspect->add_option("--index", index_path, "Index file")->required()->check(CLI::ExistingFile);

    auto* plan = app.add_subcommand("plan-gamma", "Confidence table for guaranteed superblock counts");
    std::size_t plan_k = 10;
    std::size_t bins = 100;
    double plan_beta = 1.0;
    std::vector<std::size_t> gammas;
    std::string bins_path;
    std::string tightness_path;
    plan->add_option("--index", index_path, "Index file")->required()->check(CLI::ExistingFile);
    plan->add_option("-q,--queries", queries_path, "Training queries")->required()->check(CLI::ExistingFile);
    plan->add_option("-k,--k", plan_k, "Result depth")->check(CLI::PositiveNumber);
    plan->add_option("--bins", bins, "Equal-width ratio bins")->check(CLI::PositiveNumber);
    plan->add_option("--beta", plan_beta, "Query pruning for the ratios")->check(CLI::Range(0.0, 1.0));
    plan->add_option("--gammas", gammas, "Gamma values to report")->delimiter(',');
    plan->add_option("-o,--output", out_path, "Confidence TSV (default stdout)");
    plan->add_option("--bins-out", bins_path, "Per-bin mass and relevance TSV");
    plan->add_option("--tightness", tightness_path, "Bound tightness histogram TSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            return run_ingest(in_path, out_path, vocab, dump);
        }
        if (*build) {
            return run_build(bf);
        }
        if (*search) {
            return run_search(index_path, queries_path, out_path, tag, sflags, parallel, threads, latency_path);
        }
        if (*eval) {
            return run_evaluate(run_path, qrels_path, eval_k, safe_path);
        }
        if (*bench) {
            return run_bench(index_path, queries_path, bflags, warmup, repeats);
        }
        if (*inspect) {
            return run_inspect(index_path);
        }
        if (*plan) {
            return run_plan_gamma(index_path, queries_path, plan_k, bins, plan_beta, gammas, out_path, bins_path,
                                  tightness_path);
        }
    } catch (CLI::Error const& e) {
        return app.exit(e);
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
