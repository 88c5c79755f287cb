#include "hydrostate/evaluation.hpp"

#include "hydrostate/error.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <sstream>

namespace hydrostate {

using detail::format_double;

std::string traces_csv(const Comparison& cmp) {
  std::ostringstream out;
  out << "hour,method,k,rmse,innovation_norm,trace_p,weights_updated\n";
  for (const auto& e : cmp.instants) {
    const double base = rmse(e.truth, e.awgsi);
    // The baseline is a single estimate; its trace is flat.
    for (const auto& r : e.ukf_awgsi.trace) {
      out << e.hour << ",awgsi," << r.k << ',' << format_double(base) << ",,,0\n";
    }
    for (const auto& [m, run] : {std::pair{Method::UkfGsi, &e.ukf_gsi}, std::pair{Method::UkfAwGsi, &e.ukf_awgsi}}) {
      for (const auto& r : run->trace) {
        out << e.hour << ',' << method_name(m) << ',' << r.k << ',' << format_double(r.rmse) << ',';
        if (r.k > 0) out << format_double(r.innovation_norm);
        out << ',' << format_double(r.trace_p) << ',' << (r.weights_updated ? 1 : 0) << '\n';
      }
    }
  }
  return out.str();
}

std::string summary_csv(const Comparison& cmp) {
  std::ostringstream out;
  out << "method,mean,std,max,min,count\n";
  for (const auto& s : cmp.methods) {
    out << method_name(s.method) << ',' << format_double(s.summary.mean) << ',' << format_double(s.summary.std)
        << ',' << format_double(s.summary.max) << ',' << format_double(s.summary.min) << ',' << s.rmse.size()
        << '\n';
  }
  return out.str();
}

std::string rmse_csv(const Comparison& cmp) {
  std::ostringstream out;
  out << "hour";
  for (const auto& s : cmp.methods) out << ',' << method_name(s.method);
  out << '\n';
  for (std::size_t i = 0; i < cmp.instants.size(); ++i) {
    out << cmp.instants[i].hour;
    for (const auto& s : cmp.methods) out << ',' << format_double(s.rmse[i]);
    out << '\n';
  }
  return out.str();
}

std::string reductions_csv(const Comparison& cmp) {
  const auto& base = cmp.of(Method::AwGsi).rmse;
  std::ostringstream out;
  out << "hour,awgsi_rmse,ukf-gsi_pct,ukf-awgsi_pct,worst\n";
  for (std::size_t i = 0; i < cmp.instants.size(); ++i) {
    out << cmp.instants[i].hour << ',' << format_double(base[i]) << ',' << format_double(cmp.reduction_ukf_gsi[i])
        << ',' << format_double(cmp.reduction_ukf_awgsi[i]) << ',' << (i == cmp.worst_instant ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string initial_guess_csv(const InitialGuessStudy& study) {
  std::ostringstream out;
  out << "mode,hour,seed,rmse_initial,rmse_final\n";
  for (const auto& r : study.runs) {
    out << guess_mode_name(r.mode) << ',' << study.hour << ',' << study.seed << ',' << format_double(r.rmse_initial)
        << ',' << format_double(r.rmse_final) << '\n';
  }
  return out.str();
}

std::string localization_json(const LocalizationComparison& loc, const Network& net) {
  nlohmann::ordered_json doc;
  if (loc.leak_node) doc["leak_node"] = net.node(*loc.leak_node).id;
  const auto describe = [&](const LeakScore& s, const std::optional<Index>& over) {
    nlohmann::ordered_json m;
    m["candidates"] = s.candidates.size();
    if (!s.candidates.empty()) m["top"] = net.node(s.candidates.front()).id;
    if (over) m["over_ranked"] = *over;
    return m;
  };
  doc["awgsi"] = describe(loc.awgsi, loc.over_ranked_awgsi);
  doc["ukf-awgsi"] = describe(loc.ukf_awgsi, loc.over_ranked_ukf_awgsi);
  return doc.dump(2) + "\n";
}

std::vector<MethodSummary> summaries_from_rmse_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty rmse table", 1);
  const auto header = detail::split(line, ',');
  if (header.empty() || header[0] != "hour") throw ParseError("expected 'hour' header", 1);
  std::vector<MethodSummary> out;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto m = parse_method(detail::trim(header[c]));
    if (!m) throw ParseError("unknown method '" + std::string(header[c]) + "'", 1);
    out.push_back({*m, {}, {}});
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != header.size()) throw ParseError("wrong number of fields", line_no);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = detail::parse_double(fields[c]);
      if (!v) throw ParseError("invalid number", line_no);
      out[c - 1].rmse.push_back(*v);
    }
  }
  for (auto& s : out) s.summary = summarize(s.rmse);
  return out;
}

}  // namespace hydrostate
