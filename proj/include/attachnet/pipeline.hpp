#pragma once

#include "attachnet/filter.hpp"
#include "attachnet/link.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace attachnet {

/// Everything a subcommand needs, assembled from the config file and flags
/// (flags win). The config hash covers every field that can change artifact
/// content; the output directory is deliberately excluded so identical runs
/// into different directories produce identical artifacts.
struct PipelineConfig {
    std::filesystem::path archives;   // primary corpus (EML tree)
    std::filesystem::path secondary;  // attachment-bearing corpus for `link`
    std::filesystem::path name_directory;
    std::filesystem::path core_users;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    bool include_bcc = true;

    FilterConfig filters;

    // linking
    int min_trunc = 100;
    std::optional<std::vector<int>> repair_offsets;
    std::filesystem::path folder_offsets; // CSV folder,hours
    std::string trailer_regex;

    // analysis
    int top_k = 10;
    std::string knn_user;
    int knn_k = 6;
    std::string knn_metric = "weighted_jaccard";
    int cluster_k = 15;
    std::string sweep_param = "bulk";
    std::vector<long> sweep_values;
    std::filesystem::path net_file; // analysis-only input override
    std::filesystem::path against;  // diff baseline
    std::string measure = "all";

    /// Flat key=value file; '#' comments; unknown keys rejected.
    static PipelineConfig from_file(const std::filesystem::path& file);
    void apply_key(const std::string& key, const std::string& value);

    std::string canonical_string() const; // sorted key=value lines
    std::string config_hash() const;      // sha1 of the canonical string
};

struct PipelineError : std::runtime_error {
    int exit_code;
    PipelineError(int code, const std::string& message)
        : std::runtime_error(message), exit_code(code) {}
};

// Subcommand entry points: write artifacts under config.out_dir and update
// the manifest. They throw PipelineError with the documented exit codes
// (2 input, 3 analysis).
void run_ingest(const PipelineConfig& config);
void run_link(const PipelineConfig& config);
void run_extract(const PipelineConfig& config);
void run_filter_sweep(const PipelineConfig& config);
void run_stats(const PipelineConfig& config);
void run_centrality(const PipelineConfig& config);
void run_rank(const PipelineConfig& config);
void run_diff(const PipelineConfig& config);
void run_knn(const PipelineConfig& config);
void run_cluster(const PipelineConfig& config);
void run_export(const PipelineConfig& config);

} // namespace attachnet
