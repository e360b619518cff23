// Copyright 2026 The mnlkb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mnlkb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <json.hpp>

namespace mnlkb {
namespace {

using nlohmann::json;

// JSON has no NaN; non-finite values become null.
json number(double x) {
  return std::isfinite(x) ? json(x) : json(nullptr);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& body) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " +
                             ec.message());
  }
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string runs_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "replication,policy,revenue,stop_time,regret\n";
  for (const auto& r : result.runs) {
    os << r.replication << ',' << r.policy << ',' << format_number(r.revenue)
       << ',' << r.stop_time << ',' << format_number(r.regret) << '\n';
  }
  return os.str();
}

std::string epochs_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "replication,policy,epoch,start,length,complete,assortment,purchases\n";
  for (const auto& e : result.epochs) {
    const auto& o = e.record.outcome;
    os << e.replication << ',' << e.policy << ',' << e.record.epoch << ','
       << e.record.start << ',' << o.length << ','
       << (e.record.complete ? 1 : 0) << ',' << o.assortment.to_string()
       << ",{";
    for (std::size_t k = 0; k < o.purchase_counts.size(); ++k) {
      os << (k ? " " : "") << o.purchase_counts[k];
    }
    os << "}\n";
  }
  return os.str();
}

std::string distribution_csv(const SparseDistribution& dist) {
  std::ostringstream os;
  os << "assortment,weight\n";
  for (const auto& atom : dist.support()) {
    os << atom.assortment.to_string() << ',' << format_number(atom.weight)
       << '\n';
  }
  return os.str();
}

std::string scaling_csv(const ScalingResult& scaling) {
  std::ostringstream os;
  os << "horizon,opt,mean_regret,se_regret,mean_revenue\n";
  for (const auto& r : scaling.rows) {
    os << r.horizon << ',' << format_number(r.opt) << ','
       << format_number(r.mean_regret) << ',' << format_number(r.se_regret)
       << ',' << format_number(r.mean_revenue) << '\n';
  }
  return os.str();
}

std::string diagnostics_json(const ExperimentResult* result,
                             const DiagnosticReport* report,
                             const ScalingResult* scaling) {
  json doc = json::object();
  if (result) {
    doc["opt_lp_value"] = number(result->opt_lp_value);
    doc["opt"] = number(result->opt);
    json stats = json::array();
    for (const auto& s : result->stats) {
      stats.push_back({
          {"policy", s.policy},
          {"replications", s.replications},
          {"mean_revenue", number(s.mean_revenue)},
          {"se_revenue", number(s.se_revenue)},
          {"mean_expected_revenue", number(s.mean_expected_revenue)},
          {"se_expected_revenue", number(s.se_expected_revenue)},
          {"mean_regret", number(s.mean_regret)},
          {"mean_regret_expected", number(s.mean_regret_expected)},
          {"mean_stop_time", number(s.mean_stop_time)},
          {"feasibility_violations", s.feasibility_violations},
          {"mean_consumption", s.mean_consumption},
          {"coverage_hits", s.coverage_hits},
          {"coverage_total", s.coverage_total},
          {"omega_clamped_runs", s.omega_clamped_runs},
      });
    }
    doc["policies"] = std::move(stats);
  }
  if (report) {
    json checks = json::array();
    for (const auto& c : report->checks) {
      checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"statistic", number(c.statistic)},
                        {"lower", number(c.lower)},
                        {"upper", number(c.upper)},
                        {"detail", c.detail}});
    }
    doc["diagnostics"] = {{"all_passed", report->all_passed()},
                          {"checks", std::move(checks)}};
  }
  if (scaling) {
    json rows = json::array();
    for (const auto& r : scaling->rows) {
      rows.push_back({{"horizon", r.horizon},
                      {"opt", number(r.opt)},
                      {"mean_regret", number(r.mean_regret)},
                      {"se_regret", number(r.se_regret)},
                      {"mean_revenue", number(r.mean_revenue)}});
    }
    doc["regret_scaling"] = {{"policy", scaling->policy},
                             {"slope", number(scaling->slope)},
                             {"rows", std::move(rows)}};
  }
  return doc.dump(2) + "\n";
}

std::string regret_svg(const ScalingResult& scaling) {
  constexpr double kW = 480, kH = 320, kPad = 48;
  double x_max = 1.0, y_max = 0.0, y_min = 0.0;
  for (const auto& r : scaling.rows) {
    x_max = std::max(x_max, static_cast<double>(r.horizon));
    y_max = std::max(y_max, r.mean_regret);
    y_min = std::min(y_min, r.mean_regret);
  }
  if (y_max == y_min) y_max = y_min + 1.0;
  auto px = [&](double x) { return kPad + (kW - 2 * kPad) * x / x_max; };
  auto py = [&](double y) {
    return kH - kPad - (kH - 2 * kPad) * (y - y_min) / (y_max - y_min);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
     << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\""
     << kW - kPad << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
     << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">horizon T (max "
     << format_number(x_max) << ")</text>\n"
     << "<text x=\"14\" y=\"" << kH / 2
     << "\" font-size=\"12\" transform=\"rotate(-90 14 " << kH / 2
     << ")\" text-anchor=\"middle\">mean regret (max " << format_number(y_max)
     << ")</text>\n"
     << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" "
        "points=\"";
  for (std::size_t k = 0; k < scaling.rows.size(); ++k) {
    const auto& r = scaling.rows[k];
    os << (k ? " " : "") << format_number(px(r.horizon)) << ','
       << format_number(py(r.mean_regret));
  }
  os << "\"/>\n";
  for (const auto& r : scaling.rows) {
    os << "<circle cx=\"" << format_number(px(r.horizon)) << "\" cy=\""
       << format_number(py(r.mean_regret)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  os << "<text x=\"" << kW - kPad << "\" y=\"" << kPad - 12
     << "\" text-anchor=\"end\" font-size=\"12\">log-log slope "
     << format_number(scaling.slope) << "</text>\n</svg>\n";
  return os.str();
}

}  // namespace mnlkb
