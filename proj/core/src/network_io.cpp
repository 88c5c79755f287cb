#include "hydrostate/network_io.hpp"

#include "hydrostate/error.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hydrostate {

namespace {

using nlohmann::json;
using detail::format_double;

constexpr double kMillimetresPerMetre = 1000.0;

double number_field(std::string_view token, int line, const char* what) {
  const auto v = detail::parse_double(token);
  if (!v) throw ParseError(std::string("invalid ") + what + " '" + std::string(token) + "'", line);
  return *v;
}

void require_fields(const std::vector<std::string_view>& fields, std::size_t count, int line,
                    const char* section) {
  if (fields.size() < count) {
    throw ParseError(std::string("too few fields in [") + section + "] record", line);
  }
}

ParsedNetwork parse_inp(std::string_view text) {
  std::vector<std::string> warnings;
  std::vector<Node> nodes;
  std::vector<PipeSpec> pipes;
  PatternTable patterns;
  std::vector<std::string> pattern_order;
  std::map<std::string, std::vector<DemandCategory>> demand_section;
  std::set<std::string> sections_seen;
  std::set<std::string> skipped;

  static const std::set<std::string> known = {"JUNCTIONS", "RESERVOIRS", "PIPES", "DEMANDS",
                                              "PATTERNS", "END"};
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw ParseError("unterminated section header", line_no);
      section = detail::to_upper(detail::trim(line.substr(1, close - 1)));
      sections_seen.insert(section);
      if (!known.contains(section) && skipped.insert(section).second) {
        warnings.push_back("skipped section " + section);
      }
      continue;
    }
    if (section.empty()) throw ParseError("data outside of any section", line_no);
    if (!known.contains(section)) continue;

    const auto f = detail::split_whitespace(line);
    if (section == "JUNCTIONS") {
      require_fields(f, 2, line_no, "JUNCTIONS");
      Node n{std::string(f[0]), NodeKind::Junction, number_field(f[1], line_no, "elevation"), 0.0, {}};
      if (f.size() >= 3) {
        const double base = number_field(f[2], line_no, "demand") / kLitresPerCubicMetre;
        n.demands.push_back({base, f.size() >= 4 ? std::string(f[3]) : std::string()});
      }
      nodes.push_back(std::move(n));
    } else if (section == "RESERVOIRS") {
      require_fields(f, 2, line_no, "RESERVOIRS");
      const double head = number_field(f[1], line_no, "head");
      if (f.size() >= 3) warnings.push_back("ignored head pattern of reservoir " + std::string(f[0]));
      nodes.push_back(Node{std::string(f[0]), NodeKind::Reservoir, head, head, {}});
    } else if (section == "PIPES") {
      require_fields(f, 6, line_no, "PIPES");
      PipeSpec p{std::string(f[0]), std::string(f[1]), std::string(f[2]),
                 number_field(f[3], line_no, "length"),
                 number_field(f[4], line_no, "diameter") / kMillimetresPerMetre,
                 number_field(f[5], line_no, "roughness")};
      if (f.size() >= 8 && detail::to_upper(f[7]) == "CLOSED") {
        warnings.push_back("skipped closed pipe " + p.id);
        continue;
      }
      pipes.push_back(std::move(p));
    } else if (section == "DEMANDS") {
      require_fields(f, 2, line_no, "DEMANDS");
      const double base = number_field(f[1], line_no, "demand") / kLitresPerCubicMetre;
      demand_section[std::string(f[0])].push_back({base, f.size() >= 3 ? std::string(f[2]) : std::string()});
    } else if (section == "PATTERNS") {
      require_fields(f, 2, line_no, "PATTERNS");
      const std::string id(f[0]);
      auto& values = patterns[id];
      for (std::size_t i = 1; i < f.size(); ++i) values.push_back(number_field(f[i], line_no, "multiplier"));
    }
  }

  for (const char* required : {"JUNCTIONS", "RESERVOIRS", "PIPES"}) {
    if (!sections_seen.contains(required)) {
      throw InputError(std::string("missing required section [") + required + "]");
    }
  }

  for (auto& [id, categories] : demand_section) {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
    if (it == nodes.end() || it->kind != NodeKind::Junction) {
      throw InputError("[DEMANDS] references unknown junction '" + id + "'");
    }
    it->demands = std::move(categories);
  }

  return {Network(std::move(nodes), std::move(pipes), std::move(patterns)), std::move(warnings)};
}

double json_number(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw InputError(where + ": missing numeric field '" + key + "'");
  }
  return it->get<double>();
}

std::string json_string(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw InputError(where + ": field '" + key + "' must be a string");
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert to a line number.
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
    throw ParseError(e.what(), line);
  }
}

ParsedNetwork parse_json(std::string_view text) {
  const json doc = parse_json_text(text);
  if (!doc.is_object()) throw ParseError("network document must be a JSON object", 1);
  for (const char* key : {"nodes", "pipes"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw InputError(std::string("missing required section '") + key + "'");
    }
  }

  std::vector<std::string> warnings;
  std::vector<Node> nodes;
  std::map<std::string, std::string> node_patterns;
  for (const auto& item : doc["nodes"]) {
    const std::string id = json_string(item, "id", "node");
    const std::string kind = detail::to_upper(json_string(item, "kind", "node " + id));
    Node n;
    n.id = id;
    n.elevation = item.contains("elevation_m") ? json_number(item, "elevation_m", "node " + id) : 0.0;
    if (kind == "RESERVOIR") {
      n.kind = NodeKind::Reservoir;
      n.head = json_number(item, "head_m", "reservoir " + id);
    } else if (kind == "JUNCTION") {
      n.kind = NodeKind::Junction;
      if (!item.contains("elevation_m")) throw InputError("junction " + id + ": missing 'elevation_m'");
    } else {
      throw InputError("node " + id + ": unsupported kind '" + kind + "'");
    }
    if (item.contains("pattern")) node_patterns[id] = json_string(item, "pattern", "node " + id);
    nodes.push_back(std::move(n));
  }

  std::vector<PipeSpec> pipes;
  for (const auto& item : doc["pipes"]) {
    const std::string id = json_string(item, "id", "pipe");
    const std::string where = "pipe " + id;
    pipes.push_back({id, json_string(item, "from", where), json_string(item, "to", where),
                     json_number(item, "length_m", where), json_number(item, "diameter_m", where),
                     json_number(item, "roughness", where)});
  }

  PatternTable patterns;
  if (doc.contains("patterns")) {
    for (const auto& [name, values] : doc["patterns"].items()) {
      if (!values.is_array()) throw InputError("pattern " + name + " must be an array");
      auto& out = patterns[name];
      for (const auto& v : values) {
        if (!v.is_number()) throw InputError("pattern " + name + " has a non-numeric entry");
        out.push_back(v.get<double>());
      }
    }
  }

  if (doc.contains("demands")) {
    for (const auto& [id, value] : doc["demands"].items()) {
      auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
      if (it == nodes.end() || it->kind != NodeKind::Junction) {
        throw InputError("demands references unknown junction '" + id + "'");
      }
      const auto pattern_it = node_patterns.find(id);
      const std::string node_pattern = pattern_it == node_patterns.end() ? std::string() : pattern_it->second;
      if (value.is_number()) {
        it->demands.push_back({value.get<double>() / kLitresPerCubicMetre, node_pattern});
      } else if (value.is_array()) {
        for (const auto& cat : value) {
          const double base = json_number(cat, "base_lps", "demand of " + id);
          const std::string pattern = cat.contains("pattern") ? json_string(cat, "pattern", id) : node_pattern;
          it->demands.push_back({base / kLitresPerCubicMetre, pattern});
        }
      } else {
        throw InputError("demand of " + id + " must be a number or an array");
      }
    }
  }

  for (const auto& [key, value] : doc.items()) {
    if (key != "nodes" && key != "pipes" && key != "demands" && key != "patterns" &&
        key != "default_pattern" && key != "title") {
      warnings.push_back("skipped section " + key);
    }
  }

  std::string default_pattern = doc.value("default_pattern", std::string());
  return {Network(std::move(nodes), std::move(pipes), std::move(patterns), std::move(default_pattern)),
          std::move(warnings)};
}

std::string serialize_inp(const Network& net) {
  std::ostringstream out;
  out << "[JUNCTIONS]\n;ID\tElev\tDemand\tPattern\n";
  for (Index i = 0; i < net.junction_count(); ++i) {
    const auto& n = net.node(i);
    out << n.id << '\t' << format_double(n.elevation) << '\n';
  }
  out << "\n[RESERVOIRS]\n;ID\tHead\n";
  for (Index i = net.junction_count(); i < net.node_count(); ++i) {
    out << net.node(i).id << '\t' << format_double(net.node(i).head) << '\n';
  }
  out << "\n[PIPES]\n;ID\tNode1\tNode2\tLength\tDiameter\tRoughness\tMinorLoss\tStatus\n";
  for (const auto& p : net.pipe_specs()) {
    out << p.id << '\t' << p.from << '\t' << p.to << '\t' << format_double(p.length) << '\t'
        << format_double(p.diameter * kMillimetresPerMetre) << '\t' << format_double(p.roughness)
        << "\t0\tOpen\n";
  }
  out << "\n[DEMANDS]\n;Junction\tDemand\tPattern\n";
  for (Index i = 0; i < net.junction_count(); ++i) {
    for (const auto& d : net.node(i).demands) {
      out << net.node(i).id << '\t' << format_double(d.base * kLitresPerCubicMetre);
      // The default pattern is implicit in INP; write it only when it differs.
      if (!d.pattern.empty()) out << '\t' << d.pattern;
      out << '\n';
    }
  }
  out << "\n[PATTERNS]\n";
  for (const auto& [name, values] : net.patterns()) {
    for (std::size_t i = 0; i < values.size(); i += 6) {
      out << name;
      for (std::size_t j = i; j < std::min(values.size(), i + 6); ++j) out << '\t' << format_double(values[j]);
      out << '\n';
    }
  }
  out << "\n[END]\n";
  return out.str();
}

std::string serialize_json(const Network& net) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& n : net.nodes()) {
    json item{{"id", n.id}, {"kind", n.kind == NodeKind::Reservoir ? "reservoir" : "junction"},
              {"elevation_m", n.elevation}};
    if (n.kind == NodeKind::Reservoir) item["head_m"] = n.head;
    doc["nodes"].push_back(std::move(item));
  }
  doc["pipes"] = json::array();
  for (const auto& p : net.pipe_specs()) {
    doc["pipes"].push_back({{"id", p.id}, {"from", p.from}, {"to", p.to}, {"length_m", p.length},
                            {"diameter_m", p.diameter}, {"roughness", p.roughness}});
  }
  doc["demands"] = json::object();
  for (Index i = 0; i < net.junction_count(); ++i) {
    const auto& n = net.node(i);
    if (n.demands.empty()) continue;
    if (n.demands.size() == 1 && n.demands.front().pattern.empty()) {
      doc["demands"][n.id] = n.demands.front().base * kLitresPerCubicMetre;
    } else {
      json list = json::array();
      for (const auto& d : n.demands) {
        json cat{{"base_lps", d.base * kLitresPerCubicMetre}};
        if (!d.pattern.empty()) cat["pattern"] = d.pattern;
        list.push_back(std::move(cat));
      }
      doc["demands"][n.id] = std::move(list);
    }
  }
  doc["patterns"] = json::object();
  for (const auto& [name, values] : net.patterns()) doc["patterns"][name] = values;
  if (!net.default_pattern().empty()) doc["default_pattern"] = net.default_pattern();
  return doc.dump(2) + "\n";
}

}  // namespace

ParsedNetwork parse_network(std::string_view text, NetworkFormat format) {
  return format == NetworkFormat::Inp ? parse_inp(text) : parse_json(text);
}

ParsedNetwork load_network(const std::filesystem::path& path) {
  const auto ext = detail::to_upper(path.extension().string());
  return parse_network(read_text_file(path), ext == ".INP" ? NetworkFormat::Inp : NetworkFormat::Json);
}

std::string serialize_network(const Network& net, NetworkFormat format) {
  return format == NetworkFormat::Inp ? serialize_inp(net) : serialize_json(net);
}

SensorConfig parse_sensors(std::string_view json_text, const Network& net) {
  const json doc = parse_json_text(json_text);
  SensorConfig sensors;
  const auto read_list = [&](const char* key, std::vector<Index>& out, bool required) {
    if (!doc.contains(key)) {
      if (required) throw InputError(std::string("sensor file: missing '") + key + "'");
      return;
    }
    for (const auto& id : doc[key]) {
      out.push_back(net.node_index(id.is_string() ? id.get<std::string>() : id.dump()));
    }
  };
  read_list("pressure_nodes", sensors.pressure_nodes, true);
  read_list("amr_nodes", sensors.amr_nodes, false);
  validate_sensors(net, sensors);
  return sensors;
}

SensorConfig load_sensors(const std::filesystem::path& path, const Network& net) {
  return parse_sensors(read_text_file(path), net);
}

std::string serialize_sensors(const SensorConfig& sensors, const Network& net) {
  json doc{{"pressure_nodes", json::array()}, {"amr_nodes", json::array()}};
  for (const Index i : sensors.pressure_nodes) doc["pressure_nodes"].push_back(net.node(i).id);
  for (const Index i : sensors.amr_nodes) doc["amr_nodes"].push_back(net.node(i).id);
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace hydrostate
