#include "attachnet/pipeline.hpp"

#include "attachnet/archive.hpp"
#include "attachnet/errors.hpp"
#include "attachnet/index_io.hpp"
#include "attachnet/metrics.hpp"
#include "attachnet/network_io.hpp"
#include "attachnet/sha1.hpp"
#include "attachnet/similarity.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace attachnet {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw PipelineError(1, "not a boolean: '" + v + "'");
}

long parse_long(const std::string& v) {
    try {
        std::size_t used = 0;
        long out = std::stol(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw PipelineError(1, "not a number: '" + v + "'");
    }
}

std::vector<long> parse_long_list(const std::string& v) {
    std::vector<long> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim_copy(item).empty())
            out.push_back(parse_long(trim_copy(item)));
    return out;
}

std::string join_longs(const std::vector<long>& v) {
    std::string out;
    for (long x : v) {
        if (!out.empty())
            out += ",";
        out += std::to_string(x);
    }
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw PipelineError(2, "cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw PipelineError(2, "cannot write " + p.string());
    out << text;
}

void write_report(const fs::path& p, json doc, const std::string& config_hash) {
    doc["config_hash"] = config_hash;
    write_text(p, doc.dump(2) + "\n");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void update_manifest(const PipelineConfig& config, const std::vector<std::string>& artifact_names) {
    fs::path manifest_path = config.out_dir / "manifest.json";
    json doc;
    doc["version"] = 1;
    if (fs::exists(manifest_path)) {
        try {
            doc = json::parse(read_file(manifest_path));
        } catch (const std::exception&) {
            // corrupt manifest, start over
        }
    }
    doc["version"] = 1;
    if (!doc.contains("artifacts") || !doc["artifacts"].is_object())
        doc["artifacts"] = json::object();
    for (const auto& name : artifact_names) {
        doc["artifacts"][name] = {{"sha1", sha1_hex(read_file(config.out_dir / name))},
                                  {"config_hash", config.config_hash()}};
    }
    write_text(manifest_path, doc.dump(2) + "\n");
}

// `--out` usually names a directory, but single-report subcommands accept a
// .json file path directly (attachnet link --out link_report.json).
struct ReportTarget {
    fs::path file;
    PipelineConfig manifest_config; // out_dir adjusted to the file's directory
    std::string name;               // manifest key
};

ReportTarget resolve_report_target(const PipelineConfig& config, const char* default_name) {
    ReportTarget target;
    target.manifest_config = config;
    if (config.out_dir.extension() == ".json") {
        target.file = config.out_dir;
        target.manifest_config.out_dir =
            config.out_dir.parent_path().empty() ? "." : config.out_dir.parent_path();
        target.name = config.out_dir.filename().string();
    } else {
        target.file = config.out_dir / default_name;
        target.name = default_name;
    }
    return target;
}

struct Loaded {
    NameDirectory directory;
    LoadReport report;
    std::optional<std::set<std::string>> core;
    ParseOptions parse_options;
};

Loaded load_inputs(const PipelineConfig& config, const fs::path& corpus, bool required) {
    Loaded loaded;
    if (!config.name_directory.empty()) {
        if (!fs::exists(config.name_directory))
            throw PipelineError(2, "name directory not found: " + config.name_directory.string());
        loaded.directory = NameDirectory::from_csv_file(config.name_directory);
    }
    loaded.parse_options.directory = loaded.directory.empty() ? nullptr : &loaded.directory;

    if (!config.core_users.empty()) {
        if (!fs::exists(config.core_users))
            throw PipelineError(2, "core user list not found: " + config.core_users.string());
        std::set<std::string> core;
        std::ifstream in(config.core_users);
        std::string line;
        while (std::getline(in, line)) {
            std::string t = trim_copy(line);
            if (!t.empty() && t[0] != '#')
                core.insert(t);
        }
        loaded.core = std::move(core);
    }

    if (!corpus.empty()) {
        if (!fs::exists(corpus))
            throw PipelineError(2, "corpus not found: " + corpus.string());
        loaded.report = fs::is_directory(corpus) ? load_eml_tree(corpus, loaded.parse_options)
                                                 : load_mbox(corpus, loaded.parse_options);
    }
    if (required && loaded.report.message_count == 0)
        throw PipelineError(2, "no messages found");
    return loaded;
}

std::vector<EmailMessage> flatten(const std::vector<Archive>& archives) {
    std::vector<EmailMessage> out;
    for (const auto& a : archives)
        out.insert(out.end(), a.messages.begin(), a.messages.end());
    return out;
}

LinkOptions link_options(const PipelineConfig& config) {
    LinkOptions opt;
    opt.min_truncation_len = config.min_trunc;
    opt.repair_offsets = config.repair_offsets;
    if (!config.trailer_regex.empty())
        opt.strip_trailer_regex = config.trailer_regex;
    if (!config.folder_offsets.empty()) {
        if (!fs::exists(config.folder_offsets))
            throw PipelineError(2, "folder offsets file not found: " + config.folder_offsets.string());
        std::ifstream in(config.folder_offsets);
        std::string line;
        while (std::getline(in, line)) {
            std::string t = trim_copy(line);
            if (t.empty() || t[0] == '#')
                continue;
            std::size_t comma = t.rfind(',');
            if (comma == std::string::npos)
                continue;
            opt.folder_offsets[t.substr(0, comma)] =
                static_cast<int>(parse_long(trim_copy(t.substr(comma + 1))));
        }
    }
    return opt;
}

/// Links the secondary (attachment-bearing) corpus against the primary and
/// returns it with authoritative headers, plus the report.
LinkReport link_into(const PipelineConfig& config, const std::vector<EmailMessage>& primary,
                     std::vector<Archive>& secondary) {
    std::vector<EmailMessage> flat;
    std::vector<std::pair<std::size_t, std::size_t>> origin; // (archive, message)
    for (std::size_t a = 0; a < secondary.size(); ++a) {
        for (std::size_t m = 0; m < secondary[a].messages.size(); ++m) {
            flat.push_back(secondary[a].messages[m]);
            origin.emplace_back(a, m);
        }
    }
    LinkReport report = link_corpora(primary, flat, link_options(config));
    for (std::size_t i = 0; i < flat.size(); ++i)
        secondary[origin[i].first].messages[origin[i].second] = std::move(flat[i]);
    return report;
}

json stats_to_json(const StatsReport& report) {
    return json{{"clustering_coefficient", report.clustering_coefficient},
                {"connected_components", report.connected_components},
                {"diameter", report.diameter},
                {"radius", report.radius},
                {"centralization", report.centralization},
                {"characteristic_path_length", report.characteristic_path_length},
                {"avg_neighbors", report.avg_neighbors},
                {"node_count", report.node_count},
                {"edge_count", report.edge_count},
                {"density", report.density},
                {"heterogeneity", report.heterogeneity}};
}

fs::path default_net(const PipelineConfig& config, const char* name) {
    return config.out_dir / name;
}

Network load_analysis_network(const PipelineConfig& config, const char* fallback) {
    fs::path path = config.net_file.empty() ? default_net(config, fallback) : config.net_file;
    if (!fs::exists(path))
        throw PipelineError(2, "network file not found: " + path.string());
    return read_network(path);
}

AttachmentIndex load_index(const PipelineConfig& config) {
    fs::path path = config.out_dir / "attachment_index.bin";
    if (!fs::exists(path))
        throw PipelineError(2, "attachment index not found (run extract first): " + path.string());
    return read_attachment_index(path).index;
}

std::vector<CentralityScores> all_centralities(const Network& net) {
    std::vector<CentralityScores> out;
    for (CentralityMeasure m :
         {CentralityMeasure::degree, CentralityMeasure::eigenvector, CentralityMeasure::betweenness,
          CentralityMeasure::closeness, CentralityMeasure::unique_ties})
        out.push_back(centrality(net, m));
    return out;
}

} // namespace

void PipelineConfig::apply_key(const std::string& key, const std::string& value) {
    if (key == "archives")
        archives = value;
    else if (key == "secondary")
        secondary = value;
    else if (key == "name_directory")
        name_directory = value;
    else if (key == "core_users")
        core_users = value;
    else if (key == "out_dir")
        out_dir = value;
    else if (key == "seed")
        seed = static_cast<std::uint64_t>(parse_long(value));
    else if (key == "include_bcc")
        include_bcc = parse_bool(value);
    else if (key == "min_size")
        filters.min_size_bytes = static_cast<std::uint64_t>(parse_long(value));
    else if (key == "bulk")
        filters.bulk_recipient_threshold = static_cast<int>(parse_long(value));
    else if (key == "max_freq")
        filters.max_event_frequency = static_cast<int>(parse_long(value));
    else if (key == "max_senders")
        filters.max_sender_frequency = static_cast<int>(parse_long(value));
    else if (key == "size_filter")
        filters.size_rule_enabled = parse_bool(value);
    else if (key == "bulk_filter")
        filters.bulk_rule_enabled = parse_bool(value);
    else if (key == "freq_filter")
        filters.event_frequency_rule_enabled = parse_bool(value);
    else if (key == "sender_filter")
        filters.sender_frequency_rule_enabled = parse_bool(value);
    else if (key == "min_trunc")
        min_trunc = static_cast<int>(parse_long(value));
    else if (key == "repair_offsets") {
        if (value == "default")
            repair_offsets.reset();
        else {
            repair_offsets.emplace();
            for (long x : parse_long_list(value))
                repair_offsets->push_back(static_cast<int>(x));
        }
    } else if (key == "folder_offsets")
        folder_offsets = value;
    else if (key == "trailer_regex")
        trailer_regex = value;
    else if (key == "top_k")
        top_k = static_cast<int>(parse_long(value));
    else if (key == "knn_user")
        knn_user = value;
    else if (key == "knn_k")
        knn_k = static_cast<int>(parse_long(value));
    else if (key == "knn_metric")
        knn_metric = value;
    else if (key == "cluster_k")
        cluster_k = static_cast<int>(parse_long(value));
    else if (key == "sweep_param")
        sweep_param = value;
    else if (key == "sweep_values")
        sweep_values = parse_long_list(value);
    else if (key == "net_file")
        net_file = value;
    else if (key == "against")
        against = value;
    else if (key == "measure")
        measure = value;
    else
        throw PipelineError(1, "unknown config key: '" + key + "'");
}

PipelineConfig PipelineConfig::from_file(const fs::path& file) {
    PipelineConfig config;
    std::ifstream in(file);
    if (!in)
        throw PipelineError(2, "cannot read config file: " + file.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim_copy(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw PipelineError(1, file.string() + ":" + std::to_string(lineno) +
                                       ": expected key=value");
        config.apply_key(trim_copy(t.substr(0, eq)), trim_copy(t.substr(eq + 1)));
    }
    return config;
}

std::string PipelineConfig::canonical_string() const {
    std::map<std::string, std::string> kv;
    kv["archives"] = archives.generic_string();
    kv["secondary"] = secondary.generic_string();
    kv["name_directory"] = name_directory.generic_string();
    kv["core_users"] = core_users.generic_string();
    kv["seed"] = std::to_string(seed);
    kv["include_bcc"] = include_bcc ? "true" : "false";
    kv["min_size"] = std::to_string(filters.min_size_bytes);
    kv["bulk"] = std::to_string(filters.bulk_recipient_threshold);
    kv["max_freq"] = std::to_string(filters.max_event_frequency);
    kv["max_senders"] = std::to_string(filters.max_sender_frequency);
    kv["size_filter"] = filters.size_rule_enabled ? "true" : "false";
    kv["bulk_filter"] = filters.bulk_rule_enabled ? "true" : "false";
    kv["freq_filter"] = filters.event_frequency_rule_enabled ? "true" : "false";
    kv["sender_filter"] = filters.sender_frequency_rule_enabled ? "true" : "false";
    kv["min_trunc"] = std::to_string(min_trunc);
    kv["repair_offsets"] = repair_offsets ? join_longs(std::vector<long>(repair_offsets->begin(),
                                                                         repair_offsets->end()))
                                          : "default";
    kv["folder_offsets"] = folder_offsets.generic_string();
    kv["trailer_regex"] = trailer_regex;
    kv["top_k"] = std::to_string(top_k);
    kv["knn_user"] = knn_user;
    kv["knn_k"] = std::to_string(knn_k);
    kv["knn_metric"] = knn_metric;
    kv["cluster_k"] = std::to_string(cluster_k);
    kv["sweep_param"] = sweep_param;
    kv["sweep_values"] = join_longs(sweep_values);
    kv["net_file"] = net_file.generic_string();
    kv["against"] = against.generic_string();
    kv["measure"] = measure;

    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += "=";
        out += v;
        out += "\n";
    }
    return out;
}

std::string PipelineConfig::config_hash() const { return sha1_hex(canonical_string()); }

void run_ingest(const PipelineConfig& config) {
    Loaded loaded = load_inputs(config, config.archives, true);

    json per_archive = json::array();
    double share_sum = 0.0;
    double with_att_sum = 0.0;
    std::size_t media_counts[3] = {0, 0, 0};
    std::size_t attachment_total = 0;
    std::size_t unresolved = 0;

    for (const auto& archive : loaded.report.archives) {
        std::uint64_t raw_bytes = 0, att_bytes = 0;
        std::size_t with_attachments = 0;
        for (const auto& msg : archive.messages) {
            raw_bytes += msg.raw_size_bytes;
            unresolved += msg.unresolved_names.size();
            if (!msg.attachments.empty())
                ++with_attachments;
            for (const auto& att : msg.attachments) {
                att_bytes += att.size_bytes;
                ++media_counts[static_cast<int>(att.media_class)];
                ++attachment_total;
            }
        }
        double share = raw_bytes > 0 ? double(att_bytes) / double(raw_bytes) : 0.0;
        double with_share = archive.messages.empty()
                                ? 0.0
                                : double(with_attachments) / double(archive.messages.size());
        share_sum += share;
        with_att_sum += with_share;
        per_archive.push_back({{"custodian", archive.custodian},
                               {"custodian_user", archive.custodian_user},
                               {"messages", archive.messages.size()},
                               {"messages_with_attachments", with_attachments},
                               {"attachment_bytes", att_bytes},
                               {"raw_bytes", raw_bytes},
                               {"attachment_disk_share", share}});
    }

    // digest-level size histogram, the view that motivates the size floor
    AttachmentIndex index =
        build_attachment_index(loaded.report.archives, ExtractOptions{config.include_bcc});
    const std::vector<std::uint64_t> edges{128, 256, 512, 1024, 2048, 5120, 10240, 102400, 1048576};
    std::vector<std::uint64_t> histogram = attachment_size_histogram(index, edges);

    std::size_t n_archives = loaded.report.archives.size();
    json doc;
    doc["archives"] = per_archive;
    doc["archive_count"] = n_archives;
    doc["message_count"] = loaded.report.message_count;
    doc["attachment_count"] = attachment_total;
    doc["size_histogram"] = {{"bucket_edges", edges}, {"digest_counts", histogram}};
    doc["avg_attachment_disk_share"] = n_archives ? share_sum / double(n_archives) : 0.0;
    doc["avg_messages_with_attachments"] = n_archives ? with_att_sum / double(n_archives) : 0.0;
    doc["media_classes"] = {{"document", media_counts[0]},
                            {"multimedia", media_counts[1]},
                            {"other", media_counts[2]}};
    doc["parse_errors"] = loaded.report.errors;
    doc["unresolved_name_count"] = unresolved;

    ReportTarget target = resolve_report_target(config, "ingest_report.json");
    write_report(target.file, std::move(doc), config.config_hash());
    update_manifest(target.manifest_config, {target.name});
}

void run_link(const PipelineConfig& config) {
    if (config.secondary.empty())
        throw PipelineError(2, "link requires a secondary corpus (--attachments)");
    Loaded primary = load_inputs(config, config.archives, true);
    Loaded secondary = load_inputs(config, config.secondary, true);

    std::vector<EmailMessage> a = flatten(primary.report.archives);
    LinkReport report = link_into(config, a, secondary.report.archives);

    json matched = json::array();
    for (const auto& pair : report.matched)
        matched.push_back({{"id_a", pair.id_a}, {"id_b", pair.id_b}, {"mode", to_string(pair.mode)}});
    json doc;
    doc["matched"] = matched;
    doc["unmatched_a"] = report.unmatched_a;
    doc["unmatched_b"] = report.unmatched_b;
    doc["match_rate"] = report.match_rate;
    doc["ambiguous"] = report.ambiguous;
    doc["corpus_a_size"] = a.size();

    ReportTarget target = resolve_report_target(config, "link_report.json");
    write_report(target.file, std::move(doc), config.config_hash());
    update_manifest(target.manifest_config, {target.name});
}

void run_extract(const PipelineConfig& config) {
    Loaded loaded = load_inputs(config, config.archives, true);
    ExtractOptions extract_options{config.include_bcc};

    std::vector<Archive>* corpus = &loaded.report.archives;
    Loaded secondary;
    if (!config.secondary.empty()) {
        secondary = load_inputs(config, config.secondary, true);
        std::vector<EmailMessage> a = flatten(loaded.report.archives);
        link_into(config, a, secondary.report.archives);
        corpus = &secondary.report.archives;
    }

    std::vector<EmailMessage> deduped = deduplicate_messages(*corpus);
    Network comm = build_communication_network(deduped, loaded.core, extract_options);
    AttachmentIndex index = build_attachment_index(*corpus, extract_options);
    Network attachment = project_shared_attachment_network(index, config.filters, loaded.core);

    const std::string hash = config.config_hash();
    write_graphml(comm, config.out_dir / "communication_network.graphml", hash);
    write_edge_csv(comm, config.out_dir / "communication_network.csv", hash);
    write_graphml(attachment, config.out_dir / "attachment_network.graphml", hash);
    write_edge_csv(attachment, config.out_dir / "attachment_network.csv", hash);
    write_attachment_index(index, config.out_dir / "attachment_index.bin", hash);

    update_manifest(config, {"communication_network.graphml", "communication_network.csv",
                             "attachment_network.graphml", "attachment_network.csv",
                             "attachment_index.bin"});
}

void run_filter_sweep(const PipelineConfig& config) {
    AttachmentIndex index = load_index(config);
    Loaded loaded = load_inputs(config, {}, false);

    SweepParameter param;
    if (config.sweep_param == "bulk")
        param = SweepParameter::bulk;
    else if (config.sweep_param == "event_freq")
        param = SweepParameter::event_freq;
    else if (config.sweep_param == "sender_freq")
        param = SweepParameter::sender_freq;
    else
        throw PipelineError(1, "unknown sweep parameter: " + config.sweep_param);

    std::vector<SweepPoint> points;
    try {
        points = sweep_threshold(index, config.filters, param, config.sweep_values, loaded.core);
    } catch (const std::invalid_argument& e) {
        throw PipelineError(1, e.what());
    }

    std::string csv = "# attachnet sweep param=" + config.sweep_param +
                      " config_hash=" + config.config_hash() + "\n";
    csv += "value,avg_degree,avg_clustering\n";
    for (const auto& p : points)
        csv += std::to_string(p.value) + "," + fmt_double(p.avg_degree) + "," +
               fmt_double(p.avg_clustering) + "\n";

    std::string name = "sweep_" + config.sweep_param + ".csv";
    write_text(config.out_dir / name, csv);
    update_manifest(config, {name});
}

void run_stats(const PipelineConfig& config) {
    std::vector<std::pair<std::string, Network>> networks;
    if (!config.net_file.empty()) {
        networks.emplace_back(config.net_file.filename().string(), read_network(config.net_file));
    } else {
        for (const char* name : {"communication_network.graphml", "attachment_network.graphml"}) {
            fs::path p = config.out_dir / name;
            if (fs::exists(p))
                networks.emplace_back(name, read_network(p));
        }
    }
    if (networks.empty())
        throw PipelineError(2, "no network to analyze (run extract or pass a network file)");

    json doc;
    std::string csv = "# attachnet stats config_hash=" + config.config_hash() + "\n";
    csv += "network,statistic,value\n";
    try {
        for (const auto& [name, net] : networks) {
            StatsReport report = network_statistics(net);
            json stats = stats_to_json(report);
            doc[name] = stats;
            for (const auto& [key, value] : stats.items())
                csv += name + "," + key + "," +
                       (value.is_number_float() ? fmt_double(value.get<double>())
                                                : value.dump()) +
                       "\n";
        }
    } catch (const EmptyNetwork& e) {
        throw PipelineError(3, e.what());
    }

    write_report(config.out_dir / "stats.json", std::move(doc), config.config_hash());
    write_text(config.out_dir / "stats.csv", csv);
    update_manifest(config, {"stats.json", "stats.csv"});
}

void run_centrality(const PipelineConfig& config) {
    Network net = load_analysis_network(config, "attachment_network.graphml");
    std::vector<CentralityMeasure> measures;
    if (config.measure == "all") {
        measures = {CentralityMeasure::degree, CentralityMeasure::eigenvector,
                    CentralityMeasure::betweenness, CentralityMeasure::closeness,
                    CentralityMeasure::unique_ties};
    } else if (auto m = centrality_measure_from_string(config.measure)) {
        measures = {*m};
    } else {
        throw PipelineError(1, "unknown centrality measure: " + config.measure);
    }

    json doc;
    std::string csv = "# attachnet centrality config_hash=" + config.config_hash() + "\n";
    csv += "measure,address,score,rank\n";
    try {
        for (CentralityMeasure m : measures) {
            CentralityScores scores = centrality(net, m);
            json entry;
            entry["scores"] = scores.scores;
            entry["ranks"] = scores.ranks;
            doc[to_string(m)] = std::move(entry);
            for (const auto& [addr, score] : scores.scores)
                csv += std::string(to_string(m)) + "," + addr + "," + fmt_double(score) + "," +
                       std::to_string(scores.ranks.at(addr)) + "\n";
        }
    } catch (const ConvergenceFailure& e) {
        throw PipelineError(3, e.what());
    }

    write_report(config.out_dir / "centrality.json", std::move(doc), config.config_hash());
    write_text(config.out_dir / "centrality.csv", csv);
    update_manifest(config, {"centrality.json", "centrality.csv"});
}

void run_rank(const PipelineConfig& config) {
    Network net = load_analysis_network(config, "attachment_network.graphml");
    std::vector<CentralityScores> scores;
    try {
        scores = all_centralities(net);
    } catch (const ConvergenceFailure& e) {
        throw PipelineError(3, e.what());
    }
    auto ranking = overall_rank(scores, config.top_k);

    json rows = json::array();
    std::string csv = "# attachnet overall rank config_hash=" + config.config_hash() + "\n";
    csv += "position,address,value,degree,eigenvector,betweenness,closeness,unique_ties\n";
    int position = 1;
    for (const auto& [addr, value] : ranking) {
        json row;
        row["position"] = position;
        row["address"] = addr;
        row["value"] = value;
        csv += std::to_string(position) + "," + addr + "," + fmt_double(value);
        for (const auto& cs : scores) {
            row[to_string(cs.measure)] = cs.ranks.at(addr);
            csv += "," + std::to_string(cs.ranks.at(addr));
        }
        csv += "\n";
        rows.push_back(std::move(row));
        ++position;
    }

    json doc;
    doc["top_k"] = config.top_k;
    doc["ranking"] = std::move(rows);
    write_report(config.out_dir / "rank.json", std::move(doc), config.config_hash());
    write_text(config.out_dir / "rank.csv", csv);
    update_manifest(config, {"rank.json", "rank.csv"});
}

void run_diff(const PipelineConfig& raw_config) {
    ReportTarget target = resolve_report_target(raw_config, "diff.json");
    const PipelineConfig& config = target.manifest_config;
    Network net_b = load_analysis_network(config, "attachment_network.graphml");
    fs::path against = config.against.empty()
                           ? config.out_dir / "communication_network.graphml"
                           : config.against;
    if (!fs::exists(against))
        throw PipelineError(2, "baseline network not found: " + against.string());
    Network net_a = read_network(against);
    AttachmentIndex filtered = apply_filters(load_index(config), config.filters);

    TieDiff diff = tie_diff(net_a, net_b, filtered);
    json gained = json::array();
    for (const auto& tie : diff.gained) {
        json row{{"a", tie.a},
                 {"b", tie.b},
                 {"shared_attachments", tie.shared_attachments},
                 {"friend_contribution", tie.friend_contribution}};
        if (tie.friend_of_friend)
            row["friend_of_friend"] = *tie.friend_of_friend;
        gained.push_back(std::move(row));
    }
    json lost = json::array();
    for (const auto& tie : diff.lost)
        lost.push_back({{"a", tie.a},
                        {"b", tie.b},
                        {"communication_frequency", tie.communication_frequency}});

    json doc;
    doc["gained"] = std::move(gained);
    doc["lost"] = std::move(lost);
    doc["gained_count"] = diff.gained.size();
    doc["lost_count"] = diff.lost.size();
    write_report(target.file, std::move(doc), config.config_hash());
    update_manifest(config, {target.name});
}

void run_knn(const PipelineConfig& raw_config) {
    ReportTarget target = resolve_report_target(raw_config, "knn.json");
    const PipelineConfig& config = target.manifest_config;
    if (config.knn_user.empty())
        throw PipelineError(1, "knn requires --user");
    BagMetric metric;
    if (config.knn_metric == "weighted_jaccard")
        metric = BagMetric::weighted_jaccard;
    else if (config.knn_metric == "cosine")
        metric = BagMetric::cosine;
    else
        throw PipelineError(1, "unknown metric: " + config.knn_metric);

    std::vector<UserBag> bags = build_user_bags(load_index(config), config.filters);
    std::vector<std::pair<std::string, double>> neighbors;
    try {
        neighbors = knn_query(bags, config.knn_user, config.knn_k, metric);
    } catch (const UnknownUser& e) {
        throw PipelineError(3, e.what());
    } catch (const std::invalid_argument& e) {
        throw PipelineError(3, e.what());
    }

    json rows = json::array();
    for (const auto& [user, distance] : neighbors)
        rows.push_back({{"user", user}, {"distance", distance}});
    json doc;
    doc["query"] = config.knn_user;
    doc["k"] = config.knn_k;
    doc["metric"] = config.knn_metric;
    doc["neighbors"] = std::move(rows);
    write_report(target.file, std::move(doc), config.config_hash());
    update_manifest(config, {target.name});
}

void run_cluster(const PipelineConfig& raw_config) {
    ReportTarget target = resolve_report_target(raw_config, "clusters.json");
    const PipelineConfig& config = target.manifest_config;
    std::vector<UserBag> bags = build_user_bags(load_index(config), config.filters);
    ClusterAssignment result;
    try {
        result = kmeans_cluster(bags, config.cluster_k, config.seed);
    } catch (const std::invalid_argument& e) {
        throw PipelineError(3, e.what());
    }

    std::vector<std::vector<std::string>> groups(static_cast<std::size_t>(result.k));
    for (const auto& [user, cluster] : result.assignment)
        groups[static_cast<std::size_t>(cluster)].push_back(user);

    json doc;
    doc["k"] = result.k;
    doc["seed"] = result.seed;
    doc["inertia"] = result.inertia;
    doc["assignment"] = result.assignment;
    doc["clusters"] = groups;
    doc["empty_clusters"] = result.empty_clusters;
    doc["notes"] = result.notes;
    write_report(target.file, std::move(doc), config.config_hash());
    update_manifest(config, {target.name});
}

void run_export(const PipelineConfig& config) {
    const std::string hash = config.config_hash();
    std::vector<std::string> artifacts;

    struct Item {
        const char* graphml;
        const char* csv;
        const char* jsonf;
    };
    for (const auto& item : {Item{"communication_network.graphml", "communication_network.csv",
                                  "communication_network.json"},
                             Item{"attachment_network.graphml", "attachment_network.csv",
                                  "attachment_network.json"}}) {
        fs::path src = config.out_dir / item.graphml;
        if (!fs::exists(src))
            continue;
        Network net = read_graphml(src);
        write_edge_csv(net, config.out_dir / item.csv, hash);
        write_json_adjacency(net, config.out_dir / item.jsonf, hash);
        artifacts.push_back(item.csv);
        artifacts.push_back(item.jsonf);
    }

    fs::path index_path = config.out_dir / "attachment_index.bin";
    if (fs::exists(index_path)) {
        std::vector<UserBag> bags =
            build_user_bags(read_attachment_index(index_path).index, config.filters);
        std::string csv = "# attachnet user bags config_hash=" + hash + "\n";
        csv += "user,digest,count\n";
        for (const auto& bag : bags)
            for (const auto& [digest, count] : bag.counts)
                csv += bag.user + "," + digest + "," + std::to_string(count) + "\n";
        write_text(config.out_dir / "bags.csv", csv);
        artifacts.push_back("bags.csv");
    }

    if (artifacts.empty())
        throw PipelineError(2, "nothing to export (run extract first)");
    update_manifest(config, artifacts);
}

} // namespace attachnet
