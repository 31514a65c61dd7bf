#pragma once

#include "attachnet/network.hpp"

#include <filesystem>
#include <string>

namespace attachnet {

/// Network serialization. Every format embeds the producing config hash so
/// artifacts are self-describing; readers accept files written here (not
/// arbitrary foreign graphs). Output is byte-deterministic: nodes and edges
/// are emitted in sorted order.
void write_graphml(const Network& net, const std::filesystem::path& file,
                   const std::string& config_hash = {});
Network read_graphml(const std::filesystem::path& file);

void write_edge_csv(const Network& net, const std::filesystem::path& file,
                    const std::string& config_hash = {});
Network read_edge_csv(const std::filesystem::path& file);

void write_json_adjacency(const Network& net, const std::filesystem::path& file,
                          const std::string& config_hash = {});
Network read_json_adjacency(const std::filesystem::path& file);

/// Dispatches on extension: .graphml, .csv, .json.
Network read_network(const std::filesystem::path& file);

} // namespace attachnet
