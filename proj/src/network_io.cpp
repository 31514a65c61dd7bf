#include "attachnet/network_io.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace attachnet {

const char* to_string(Network::Kind kind) {
    return kind == Network::Kind::communication ? "communication" : "attachment";
}

namespace {

Network::Kind kind_from_string(std::string_view s) {
    return s == "attachment" ? Network::Kind::attachment : Network::Kind::communication;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

std::string xml_unescape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        if (s.compare(i, 5, "&amp;") == 0) {
            out.push_back('&');
            i += 5;
        } else if (s.compare(i, 4, "&lt;") == 0) {
            out.push_back('<');
            i += 4;
        } else if (s.compare(i, 4, "&gt;") == 0) {
            out.push_back('>');
            i += 4;
        } else if (s.compare(i, 6, "&quot;") == 0) {
            out.push_back('"');
            i += 6;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

std::ofstream open_out(const fs::path& file) {
    if (!file.parent_path().empty())
        fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    return out;
}

std::string read_all(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// value of attr="..." inside the given tag text
std::string attr_value(const std::string& tag, const std::string& attr) {
    std::string needle = attr + "=\"";
    std::size_t pos = tag.find(needle);
    if (pos == std::string::npos)
        return {};
    pos += needle.size();
    std::size_t end = tag.find('"', pos);
    return tag.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

} // namespace

void write_graphml(const Network& net, const fs::path& file, const std::string& config_hash) {
    std::ofstream out = open_out(file);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    out << "  <!-- kind=" << to_string(net.kind()) << " config_hash=" << config_hash << " -->\n";
    out << "  <key id=\"address\" for=\"node\" attr.name=\"address\" attr.type=\"string\"/>\n";
    out << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n";
    out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";

    std::map<std::string, std::size_t> ids;
    for (const auto& node : net.nodes()) {
        std::size_t id = ids.size();
        ids.emplace(node, id);
        out << "    <node id=\"n" << id << "\"><data key=\"address\">" << xml_escape(node)
            << "</data></node>\n";
    }
    for (const auto& [edge, weight] : net.edges()) {
        out << "    <edge source=\"n" << ids.at(edge.first) << "\" target=\"n"
            << ids.at(edge.second) << "\"><data key=\"weight\">" << weight << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

Network read_graphml(const fs::path& file) {
    std::string text = read_all(file);
    Network net(Network::Kind::communication);
    {
        std::size_t pos = text.find("kind=");
        if (pos != std::string::npos) {
            std::size_t end = text.find_first_of(" \n", pos + 5);
            net.set_kind(kind_from_string(text.substr(pos + 5, end - pos - 5)));
        }
    }

    std::map<std::string, std::string> id_to_address;
    std::size_t pos = 0;
    while ((pos = text.find("<node ", pos)) != std::string::npos) {
        std::size_t close = text.find("</node>", pos);
        std::string chunk = text.substr(pos, close - pos);
        std::string id = attr_value(chunk, "id");
        std::string address;
        std::size_t d = chunk.find("<data key=\"address\">");
        if (d != std::string::npos) {
            d += 20;
            std::size_t e = chunk.find("</data>", d);
            address = xml_unescape(chunk.substr(d, e - d));
        }
        if (!id.empty() && !address.empty()) {
            id_to_address[id] = address;
            net.add_node(address);
        }
        pos = close == std::string::npos ? text.size() : close + 7;
    }

    pos = 0;
    while ((pos = text.find("<edge ", pos)) != std::string::npos) {
        std::size_t close = text.find("</edge>", pos);
        if (close == std::string::npos)
            close = text.find("/>", pos);
        std::string chunk = text.substr(pos, close - pos);
        std::string source = attr_value(chunk, "source");
        std::string target = attr_value(chunk, "target");
        std::int64_t weight = 1;
        std::size_t d = chunk.find("<data key=\"weight\">");
        if (d != std::string::npos)
            weight = std::stoll(chunk.substr(d + 19));
        auto s = id_to_address.find(source);
        auto t = id_to_address.find(target);
        if (s != id_to_address.end() && t != id_to_address.end())
            net.add_edge(s->second, t->second, weight);
        pos = close + 1;
    }
    return net;
}

void write_edge_csv(const Network& net, const fs::path& file, const std::string& config_hash) {
    std::ofstream out = open_out(file);
    out << "# attachnet edge list kind=" << to_string(net.kind()) << " config_hash=" << config_hash
        << "\n";
    out << "src,dst,weight\n";
    for (const auto& [edge, weight] : net.edges())
        out << edge.first << "," << edge.second << "," << weight << "\n";
}

Network read_edge_csv(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + file.string());
    Network net(Network::Kind::communication);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#') {
            std::size_t pos = line.find("kind=");
            if (pos != std::string::npos) {
                std::size_t end = line.find(' ', pos);
                net.set_kind(kind_from_string(line.substr(pos + 5, end - pos - 5)));
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true; // "src,dst,weight"
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            continue;
        net.add_edge(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1),
                     std::stoll(line.substr(c2 + 1)));
    }
    return net;
}

void write_json_adjacency(const Network& net, const fs::path& file,
                          const std::string& config_hash) {
    json doc;
    doc["kind"] = to_string(net.kind());
    doc["config_hash"] = config_hash;
    doc["nodes"] = json::array();
    for (const auto& node : net.nodes())
        doc["nodes"].push_back(node);
    doc["edges"] = json::array();
    for (const auto& [edge, weight] : net.edges())
        doc["edges"].push_back({{"src", edge.first}, {"dst", edge.second}, {"weight", weight}});
    std::ofstream out = open_out(file);
    out << doc.dump(2) << "\n";
}

Network read_json_adjacency(const fs::path& file) {
    json doc = json::parse(read_all(file));
    Network net(kind_from_string(doc.value("kind", "communication")));
    for (const auto& node : doc.value("nodes", json::array()))
        net.add_node(node.get<std::string>());
    for (const auto& edge : doc.value("edges", json::array()))
        net.add_edge(edge.at("src").get<std::string>(), edge.at("dst").get<std::string>(),
                     edge.at("weight").get<std::int64_t>());
    return net;
}

Network read_network(const fs::path& file) {
    std::string ext = file.extension().string();
    if (ext == ".graphml")
        return read_graphml(file);
    if (ext == ".csv")
        return read_edge_csv(file);
    if (ext == ".json")
        return read_json_adjacency(file);
    throw std::runtime_error("unknown network format: " + file.string());
}

} // namespace attachnet
