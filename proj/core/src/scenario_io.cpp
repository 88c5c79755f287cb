#include "hydrostate/scenario_io.hpp"

#include "hydrostate/error.hpp"
#include "hydrostate/network_io.hpp"
#include "text_util.hpp"

#include <sstream>

namespace hydrostate {

std::string hour_table_csv(const HourTable& table, double scale) {
  std::ostringstream out;
  out << "hour";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.hours[r];
    for (Index i = 0; i < table.rows[r].size(); ++i) out << ',' << detail::format_double(table.rows[r](i) * scale);
    out << '\n';
  }
  return out.str();
}

HourTable parse_hour_table(std::string_view csv, double scale) {
  HourTable table;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto end = csv.find('\n', pos);
    const std::string_view line =
        detail::trim(csv.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    pos = end == std::string_view::npos ? csv.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    if (line_no == 1) {
      if (fields.empty() || detail::trim(fields[0]) != "hour") throw ParseError("expected 'hour' header", line_no);
      for (std::size_t i = 1; i < fields.size(); ++i) table.columns.emplace_back(detail::trim(fields[i]));
      continue;
    }
    if (fields.size() != table.columns.size() + 1) throw ParseError("wrong number of fields", line_no);
    const auto hour = detail::parse_double(fields[0]);
    if (!hour) throw ParseError("invalid hour", line_no);
    table.hours.push_back(static_cast<int>(*hour));
    Vector row(static_cast<Index>(table.columns.size()));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) throw ParseError("invalid number '" + std::string(fields[i]) + "'", line_no);
      row(static_cast<Index>(i) - 1) = *v / scale;
    }
    table.rows.push_back(std::move(row));
  }
  if (line_no == 0) throw ParseError("empty table", 1);
  return table;
}

HourTable node_table(const Network& net, const std::vector<int>& hours, const std::vector<Vector>& rows) {
  HourTable t;
  for (const auto& n : net.nodes()) t.columns.push_back(n.id);
  t.hours = hours;
  t.rows = rows;
  return t;
}

std::vector<Vector> node_rows(const HourTable& table, const Network& net) {
  std::vector<Index> position(static_cast<std::size_t>(net.node_count()), -1);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    position[static_cast<std::size_t>(net.node_index(table.columns[c]))] = static_cast<Index>(c);
  }
  for (Index i = 0; i < net.node_count(); ++i) {
    if (position[static_cast<std::size_t>(i)] < 0) throw InputError("table lacks node '" + net.node(i).id + "'");
  }
  std::vector<Vector> out;
  for (const auto& row : table.rows) {
    Vector v(net.node_count());
    for (Index i = 0; i < net.node_count(); ++i) v(i) = row(position[static_cast<std::size_t>(i)]);
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

HourTable sensor_table(const Network& net, const std::vector<Index>& nodes, const std::vector<int>& hours,
                       const std::vector<Vector>& rows) {
  HourTable t;
  for (const Index i : nodes) t.columns.push_back(net.node(i).id);
  t.hours = hours;
  t.rows = rows;
  return t;
}

void check_sensor_columns(const HourTable& t, const Network& net, const std::vector<Index>& nodes, const char* file) {
  if (t.columns.size() != nodes.size()) throw InputError(std::string(file) + ": sensor columns do not match");
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    if (t.columns[c] != net.node(nodes[c]).id) throw InputError(std::string(file) + ": sensor columns do not match");
  }
}

}  // namespace

void write_time_series(const std::filesystem::path& dir, const TimeSeriesData& data, const Network& net,
                       const SensorConfig& sensors) {
  std::vector<int> hours;
  std::vector<Vector> heads, demands, mh, md;
  for (const auto& r : data.instants) {
    hours.push_back(r.hour);
    heads.push_back(r.h_true);
    demands.push_back(r.c_true);
    mh.push_back(r.measured.heads);
    md.push_back(r.measured.demands);
  }
  write_text_file(dir / "heads.csv", hour_table_csv(node_table(net, hours, heads)));
  write_text_file(dir / "demands.csv", hour_table_csv(node_table(net, hours, demands), kLitresPerCubicMetre));
  write_text_file(dir / "measured_heads.csv", hour_table_csv(sensor_table(net, sensors.pressure_nodes, hours, mh)));
  write_text_file(dir / "measured_demands.csv",
                  hour_table_csv(sensor_table(net, sensors.amr_nodes, hours, md), kLitresPerCubicMetre));
}

TimeSeriesData read_time_series(const std::filesystem::path& dir, const Network& net, const SensorConfig& sensors) {
  const HourTable heads = parse_hour_table(read_text_file(dir / "heads.csv"));
  const HourTable demands = parse_hour_table(read_text_file(dir / "demands.csv"), kLitresPerCubicMetre);
  const HourTable mh = parse_hour_table(read_text_file(dir / "measured_heads.csv"));
  const HourTable md = parse_hour_table(read_text_file(dir / "measured_demands.csv"), kLitresPerCubicMetre);
  check_sensor_columns(mh, net, sensors.pressure_nodes, "measured_heads.csv");
  check_sensor_columns(md, net, sensors.amr_nodes, "measured_demands.csv");
  const auto h_rows = node_rows(heads, net);
  const auto c_rows = node_rows(demands, net);
  if (demands.hours != heads.hours || mh.hours != heads.hours || md.hours != heads.hours) {
    throw InputError("time-series files cover different hours");
  }
  TimeSeriesData data;
  for (std::size_t r = 0; r < heads.hours.size(); ++r) {
    data.instants.push_back({heads.hours[r], h_rows[r], c_rows[r], {mh.rows[r], md.rows[r]}});
  }
  return data;
}

}  // namespace hydrostate
