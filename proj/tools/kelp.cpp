#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kelp/benchgen.hpp"
#include "kelp/convergence.hpp"
#include "kelp/engine.hpp"
#include "kelp/error.hpp"
#include "kelp/metrics.hpp"
#include "kelp/util.hpp"

namespace {

int log_level() {
    static int level = [] {
        const char* env = std::getenv("KELP_LOG");
        return env ? std::atoi(env) : 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "kelp: " << msg << '\n';
}

struct ParseOptions {
    std::string input = "-";
    std::string templates_out;
    std::string parsed_out;
    std::string freqmap_dump;
    std::string format = "jsonl";
    std::string delimiters;
    std::uint64_t branch_threshold = 8;
    std::uint64_t trim_capacity = 4096;
    std::uint64_t reeval_interval = 10000;
    std::uint64_t batch_lines = 10000;
    std::string slope_mode = "ln";
    bool no_trim = false;
    bool quiet = false;
};

kelp::EngineConfig engine_config(const ParseOptions& opt) {
    kelp::EngineConfig cfg;
    cfg.tokenizer.extra_delimiters = opt.delimiters;
    cfg.evolution.branch_threshold = opt.branch_threshold;
    cfg.evolution.trim_capacity = opt.trim_capacity;
    cfg.evolution.reeval_interval = opt.reeval_interval;
    cfg.trim_enabled = !opt.no_trim;
    cfg.slope_mode =
        opt.slope_mode == "raw" ? kelp::SlopeMode::RawFrequency : kelp::SlopeMode::LnFrequency;
    return cfg;
}

std::unique_ptr<std::istream> open_input(const std::string& path) {
    if (path == "-") return nullptr; // stdin
    auto in = std::make_unique<std::ifstream>(path);
    if (!*in) throw kelp::IoError("cannot open input: " + path);
    return in;
}

void write_parsed_record(std::ostream& os, const std::string& format, std::uint64_t line_no,
                         const kelp::EngineMatch& m) {
    if (format == "csv") {
        std::string vars;
        for (std::size_t i = 0; i < m.variables.size(); ++i) {
            if (i) vars.push_back(' ');
            vars += m.variables[i];
        }
        os << line_no << ',' << kelp::to_hex16(m.event_id) << ','
           << kelp::csv_quote(m.template_str) << ',' << kelp::csv_quote(vars) << '\n';
    } else {
        nlohmann::json rec{{"line_no", line_no},
                           {"event_id", kelp::to_hex16(m.event_id)},
                           {"template", m.template_str},
                           {"variables", m.variables}};
        os << rec.dump() << '\n';
    }
}

int run_parse(const ParseOptions& opt) {
    if (opt.format != "jsonl" && opt.format != "csv")
        throw kelp::ConfigError("--format must be jsonl or csv");
    if (!opt.parsed_out.empty() && opt.input == "-")
        throw kelp::ConfigError("--parsed-out needs a file input (matching is a second pass)");

    kelp::Engine engine(engine_config(opt));
    auto file_in = open_input(opt.input);
    std::istream& in = file_in ? *file_in : std::cin;

    auto start = std::chrono::steady_clock::now();
    std::vector<std::string> batch;
    batch.reserve(opt.batch_lines);
    std::string line;
    while (std::getline(in, line)) {
        batch.push_back(line);
        if (batch.size() >= opt.batch_lines) {
            engine.ingest_batch(batch);
            batch.clear();
        }
    }
    if (in.bad()) throw kelp::IoError("read failed: " + opt.input);
    if (!batch.empty()) engine.ingest_batch(batch);
    engine.finalize();
    double ingest_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!opt.templates_out.empty()) {
        std::ofstream out(opt.templates_out);
        if (!out) throw kelp::IoError("cannot open " + opt.templates_out);
        engine.dump_templates(out);
        if (!out.good()) throw kelp::IoError("write failed: " + opt.templates_out);
    }
    if (!opt.freqmap_dump.empty()) {
        std::ofstream out(opt.freqmap_dump);
        if (!out) throw kelp::IoError("cannot open " + opt.freqmap_dump);
        engine.dump_freqmaps(out);
    }
    if (!opt.parsed_out.empty()) {
        std::ofstream out(opt.parsed_out);
        if (!out) throw kelp::IoError("cannot open " + opt.parsed_out);
        std::ifstream again(opt.input);
        if (!again) throw kelp::IoError("cannot reopen input: " + opt.input);
        std::uint64_t line_no = 0;
        while (std::getline(again, line)) {
            ++line_no;
            std::string_view sv = kelp::strip_eol(line);
            if (kelp::is_blank(sv)) continue;
            auto m = engine.match(sv);
            write_parsed_record(out, opt.format, line_no, m);
        }
        if (!out.good()) throw kelp::IoError("write failed: " + opt.parsed_out);
    }

    const auto& totals = engine.totals();
    if (!opt.quiet) {
        std::cerr << "lines=" << totals.lines_in << " accepted=" << totals.accepted
                  << " skipped=" << totals.skipped_blank << " buckets=" << engine.buckets().size()
                  << " templates=" << engine.aggregated_templates().size()
                  << " reevals=" << totals.reeval_passes << " trimmed=" << totals.rows_trimmed
                  << " seconds=" << ingest_seconds << " lines_per_sec="
                  << (ingest_seconds > 0 ? static_cast<double>(totals.lines_in) / ingest_seconds
                                         : 0.0)
                  << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kelp: online log template miner with benchmark and analysis tools"};
    app.require_subcommand(1);

    // parse
    ParseOptions popt;
    auto* parse = app.add_subcommand("parse", "parse a log stream into templates");
    parse->add_option("input", popt.input, "input file, or - for stdin");
    parse->add_option("--templates-out", popt.templates_out, "template dump path (tsv)");
    parse->add_option("--parsed-out", popt.parsed_out, "per-line structured output path");
    parse->add_option("--format", popt.format, "parsed output format: jsonl|csv");
    parse->add_option("--freqmap-dump", popt.freqmap_dump, "frequency map dump path (tsv)");
    parse->add_option("--delimiters", popt.delimiters, "extra single-char delimiters");
    parse->add_option("--branch-threshold", popt.branch_threshold,
                      "max distinct values for a static split");
    parse->add_option("--trim-capacity", popt.trim_capacity, "buffered rows per dynamic leaf");
    parse->add_option("--reeval-interval", popt.reeval_interval, "lines between reeval passes");
    parse->add_option("--batch-lines", popt.batch_lines, "lines per ingestion batch");
    parse->add_option("--slope-mode", popt.slope_mode, "threshold slope reading: ln|raw");
    parse->add_flag("--no-trim", popt.no_trim, "disable row trimming (unbounded memory)");
    parse->add_flag("--quiet", popt.quiet, "suppress the stats line on stderr");

    // generate
    kelp::GenerationConfig gcfg;
    std::uint64_t grange_lo = 165, grange_hi = 180;
    auto* gen = app.add_subcommand("generate", "emit a zero-bias synthetic benchmark dataset");
    gen->add_option("--pool", gcfg.pool_path, "template pool file")->required();
    gen->add_option("--lines", gcfg.n_lines, "lines to generate");
    gen->add_option("--tier", gcfg.tier, "variable complexity tier: 1|2|3");
    gen->add_option("--seed", gcfg.seed, "generation seed");
    gen->add_option("--zipf-s", gcfg.zipf_s, "zipf exponent for template weights");
    gen->add_option("--min-templates", grange_lo, "template count range lower bound");
    gen->add_option("--max-templates", grange_hi, "template count range upper bound");
    gen->add_option("--out-log", gcfg.out_log, "output log path")->required();
    gen->add_option("--out-truth", gcfg.out_truth, "output truth csv path")->required();
    gen->add_option("--out-manifest", gcfg.out_manifest, "output manifest json path")->required();

    // evaluate
    std::string eval_parsed, eval_truth;
    auto* eval = app.add_subcommand("evaluate", "score parser output against ground truth");
    eval->add_option("--parsed", eval_parsed, "parsed output (jsonl or csv)")->required();
    eval->add_option("--truth", eval_truth, "ground truth csv")->required();

    // simulate
    kelp::SimConfig scfg;
    std::string model = "both", sweep_m, process = "novelty", sim_out;
    auto* sim = app.add_subcommand("simulate", "stopping-time convergence simulation");
    sim->add_option("--k", scfg.k, "values per dynamic field");
    sim->add_option("--m", scfg.m, "dynamic field count");
    sim->add_option("--tau", scfg.tau, "branching threshold");
    sim->add_option("--trials", scfg.trials, "monte carlo trials");
    sim->add_option("--seed", scfg.seed, "simulation seed");
    sim->add_option("--model", model, "nested|parallel|both");
    sim->add_option("--sweep-m", sweep_m, "comma-separated m values to sweep");
    sim->add_option("--process", process, "parallel process: novelty|distinct");
    sim->add_option("--out", sim_out, "write sweep csv here instead of stdout");

    // bench
    std::uint64_t bench_lines = 1000000, bench_seed = 7;
    int bench_tier = 1;
    std::string bench_pool;
    auto* bench = app.add_subcommand("bench", "generate a dataset and measure parse throughput");
    bench->add_option("--lines", bench_lines, "lines to generate");
    bench->add_option("--tier", bench_tier, "tier of generated data");
    bench->add_option("--seed", bench_seed, "generation seed");
    bench->add_option("--pool", bench_pool, "template pool file")->required();

    try {
        app.parse(argc, argv);

        if (parse->parsed()) return run_parse(popt);

        if (gen->parsed()) {
            gcfg.template_count_range = {static_cast<std::uint32_t>(grange_lo),
                                         static_cast<std::uint32_t>(grange_hi)};
            auto res = kelp::generate(gcfg);
            log_info("generated " + std::to_string(res.lines) + " lines, " +
                     std::to_string(res.template_count) + " templates");
            std::cerr << "templates=" << res.template_count << " lines=" << res.lines
                      << " log_digest=" << res.log_digest << '\n';
            return 0;
        }

        if (eval->parsed()) {
            auto pred = kelp::load_parsed(eval_parsed);
            auto gt = kelp::load_truth_csv(eval_truth);
            auto rep = kelp::evaluate(pred, gt);
            std::cout << rep.to_json() << '\n';
            return 0;
        }

        if (sim->parsed()) {
            kelp::ParallelProcess proc = process == "distinct"
                                             ? kelp::ParallelProcess::DistinctValues
                                             : kelp::ParallelProcess::NoveltyRate;
            if (process != "distinct" && process != "novelty")
                throw kelp::ConfigError("--process must be novelty or distinct");
            std::vector<std::uint64_t> ms;
            if (sweep_m.empty()) {
                ms.push_back(scfg.m);
            } else {
                std::stringstream ss(sweep_m);
                std::string item;
                while (std::getline(ss, item, ',')) ms.push_back(std::stoull(item));
            }
            std::ostringstream csv;
            csv << kelp::sweep_csv_header() << '\n';
            for (std::uint64_t m_val : ms) {
                kelp::SimConfig c = scfg;
                c.m = m_val;
                auto theory = kelp::theoretical(c);
                if (model == "nested" || model == "both") {
                    kelp::SweepRow row{c.k, c.m, c.tau, "nested", kelp::simulate_nested(c),
                                       theory.nested};
                    csv << kelp::sweep_csv_row(row) << '\n';
                }
                if (model == "parallel" || model == "both") {
                    kelp::SweepRow row{c.k, c.m, c.tau, "parallel",
                                       kelp::simulate_parallel(c, proc), theory.parallel};
                    csv << kelp::sweep_csv_row(row) << '\n';
                }
            }
            if (sim_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(sim_out);
                if (!out) throw kelp::IoError("cannot open " + sim_out);
                out << csv.str();
            }
            return 0;
        }

        if (bench->parsed()) {
            auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
            std::string dir = (std::filesystem::temp_directory_path() /
                               ("kelp_bench_" + std::to_string(stamp)))
                                  .string();
            std::filesystem::create_directories(dir);
            kelp::GenerationConfig b;
            b.seed = bench_seed;
            b.n_lines = bench_lines;
            b.tier = bench_tier;
            b.pool_path = bench_pool;
            b.out_log = dir + "/bench.log";
            b.out_truth = dir + "/bench_truth.csv";
            b.out_manifest = dir + "/bench_manifest.json";
            kelp::generate(b);

            ParseOptions bp;
            bp.input = b.out_log;
            bp.quiet = false;
            int rc = run_parse(bp);
            std::filesystem::remove_all(dir);
            return rc;
        }
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const kelp::Error& e) {
        std::cerr << "kelp: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "kelp: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
