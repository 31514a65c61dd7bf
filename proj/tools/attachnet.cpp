// attachnet: extract and analyze communication and shared-attachment
// networks from email archives.

#include "attachnet/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <string>

using namespace attachnet;

namespace {

struct FlagState {
    std::string repair_offsets;
    std::string sweep_values;
    bool no_bcc = false;
    bool no_size_filter = false;
    bool no_bulk_filter = false;
    bool no_freq_filter = false;
    bool no_sender_filter = false;
};

void add_common(CLI::App* cmd, PipelineConfig& config, FlagState& flags, std::string& config_file) {
    cmd->add_option("--config", config_file, "flat key=value config file; flags override");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_option("--archives", config.archives, "primary corpus: EML tree or mbox");
    cmd->add_option("--name-directory", config.name_directory,
                    "CSV display_name,address for bare-name resolution");
    cmd->add_option("--core-users", config.core_users, "file with one core address per line");
    cmd->add_option("--seed", config.seed, "seed for every randomized step");
    cmd->add_flag("--no-bcc", flags.no_bcc, "ignore Bcc recipients");
}

void add_filter_flags(CLI::App* cmd, PipelineConfig& config, FlagState& flags) {
    cmd->add_option("--min-size", config.filters.min_size_bytes,
                    "drop attachments at or below this size");
    cmd->add_option("--bulk", config.filters.bulk_recipient_threshold,
                    "drop events with more recipients than this");
    cmd->add_option("--max-freq", config.filters.max_event_frequency,
                    "drop digests seen in more unique messages");
    cmd->add_option("--max-senders", config.filters.max_sender_frequency,
                    "drop digests with more unique senders");
    cmd->add_flag("--no-size-filter", flags.no_size_filter, "disable the size rule");
    cmd->add_flag("--no-bulk-filter", flags.no_bulk_filter, "disable the bulk rule");
    cmd->add_flag("--no-freq-filter", flags.no_freq_filter, "disable the message-frequency rule");
    cmd->add_flag("--no-sender-filter", flags.no_sender_filter, "disable the sender-frequency rule");
}

} // namespace

int main(int argc, char** argv) {
    PipelineConfig config;

    // the config file must be in effect before the real parse so that
    // explicit flags override it
    try {
        for (int i = 1; i < argc; ++i) {
            std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc)
                config = PipelineConfig::from_file(argv[i + 1]);
            else if (arg.rfind("--config=", 0) == 0)
                config = PipelineConfig::from_file(arg.substr(9));
        }
    } catch (const PipelineError& e) {
        std::fprintf(stderr, "attachnet: %s\n", e.what());
        return e.exit_code;
    }

    CLI::App app{"email social networks from shared attachments"};
    app.require_subcommand(1);

    FlagState flags;
    std::string config_file;
    std::function<void(const PipelineConfig&)> action;

    auto make = [&](const char* name, const char* desc, void (*fn)(const PipelineConfig&),
                    bool filter_flags = false) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, config, flags, config_file);
        if (filter_flags)
            add_filter_flags(cmd, config, flags);
        cmd->callback([&action, fn] { action = fn; });
        return cmd;
    };

    make("ingest", "parse archives and report corpus statistics", run_ingest);

    CLI::App* link = make("link", "link a header corpus to an attachment corpus", run_link);
    link->add_option("--primary", config.archives, "header-authoritative corpus");
    link->add_option("--attachments", config.secondary, "attachment-bearing corpus");
    link->add_option("--min-trunc", config.min_trunc, "truncated-body match floor in bytes");
    link->add_option("--repair-offsets", flags.repair_offsets,
                     "comma-separated hour offsets, or 'default'");
    link->add_option("--folder-offsets", config.folder_offsets, "CSV folder,hours overrides");
    link->add_option("--trailer-regex", config.trailer_regex,
                     "strip corpus-B bodies from the first match of this regex");

    CLI::App* extract =
        make("extract", "build the communication and shared-attachment networks", run_extract, true);
    extract->add_option("--attachments", config.secondary,
                        "optional attachment corpus to link before extraction");
    extract->add_option("--min-trunc", config.min_trunc, "truncated-body match floor in bytes");
    extract->add_option("--repair-offsets", flags.repair_offsets,
                        "comma-separated hour offsets, or 'default'");
    extract->add_option("--folder-offsets", config.folder_offsets, "CSV folder,hours overrides");
    extract->add_option("--trailer-regex", config.trailer_regex,
                        "strip corpus-B bodies from the first match of this regex");

    CLI::App* sweep = make("filter-sweep", "sweep one TRAM threshold and record connectivity",
                           run_filter_sweep, true);
    sweep->add_option("--param", config.sweep_param, "bulk | event_freq | sender_freq");
    sweep->add_option("--values", flags.sweep_values, "comma-separated ascending thresholds");

    CLI::App* stats = make("stats", "whole-network statistics", run_stats);
    stats->add_option("--net", config.net_file, "network file (graphml/csv/json)");

    CLI::App* centrality = make("centrality", "per-node centrality scores", run_centrality);
    centrality->add_option("--net", config.net_file, "network file");
    centrality->add_option("--measure", config.measure,
                           "all | degree | eigenvector | betweenness | closeness | unique_ties");
    centrality->add_option("--top", config.top_k, "top-k cutoff used by rank");

    CLI::App* rank = make("rank", "overall ranking across the five measures", run_rank);
    rank->add_option("--net", config.net_file, "network file");
    rank->add_option("--top", config.top_k, "top-k cutoff for the bonus term");

    CLI::App* diff = make("diff", "gained and lost ties between two networks", run_diff, true);
    diff->add_option("--net", config.net_file, "attachment network file");
    diff->add_option("--against", config.against, "baseline (communication) network file");

    CLI::App* knn = make("knn", "nearest neighbors of one user's attachment bag", run_knn, true);
    knn->add_option("--user", config.knn_user, "query address");
    knn->add_option("-k,--k", config.knn_k, "neighbor count, query included");
    knn->add_option("--metric", config.knn_metric, "weighted_jaccard | cosine");

    CLI::App* cluster =
        make("cluster", "k-means over weighted-Jaccard distance rows", run_cluster, true);
    cluster->add_option("-k,--k", config.cluster_k, "cluster count");

    make("export", "write every network format plus the user bags", run_export, true);

    try {
        app.parse(argc, argv);

        if (!flags.repair_offsets.empty()) {
            PipelineConfig tmp;
            tmp.apply_key("repair_offsets", flags.repair_offsets);
            config.repair_offsets = tmp.repair_offsets;
        }
        if (!flags.sweep_values.empty()) {
            PipelineConfig tmp;
            tmp.apply_key("sweep_values", flags.sweep_values);
            config.sweep_values = tmp.sweep_values;
        }
        if (flags.no_bcc)
            config.include_bcc = false;
        if (flags.no_size_filter)
            config.filters.size_rule_enabled = false;
        if (flags.no_bulk_filter)
            config.filters.bulk_rule_enabled = false;
        if (flags.no_freq_filter)
            config.filters.event_frequency_rule_enabled = false;
        if (flags.no_sender_filter)
            config.filters.sender_frequency_rule_enabled = false;

        if (!action) {
            std::fprintf(stderr, "attachnet: no subcommand\n");
            return 1;
        }
        action(config);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help
            return app.exit(e);
        std::fprintf(stderr, "attachnet: %s\n", e.what());
        return 1;
    } catch (const PipelineError& e) {
        std::fprintf(stderr, "attachnet: %s\n", e.what());
        return e.exit_code;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "attachnet: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "attachnet: %s\n", e.what());
        return 3;
    }
}
