#ifndef AVGTSVD_REPORT_IO_HPP
#define AVGTSVD_REPORT_IO_HPP

#include <Eigen/Core>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "avgtsvd/experiments.hpp"

namespace avgtsvd {

enum class TableFormat { csv, json, markdown };

inline TableFormat table_format_from_string(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "json") return TableFormat::json;
  if (s == "markdown" || s == "md") return TableFormat::markdown;
  throw std::invalid_argument("unknown table format: " + s);
}

namespace detail {

/// Two-significant-digit mantissa form used in the markdown tables.
inline std::string sig2(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(1) << v;
  return os.str();
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const ExperimentReport& rep) {
  nlohmann::ordered_json j;
#ifdef AVGTSVD_REVISION
  j["revision"] = AVGTSVD_REVISION;
#endif
  j["problem"] = rep.config.problem;
  j["s"] = rep.config.s;
  j["D"] = rep.config.D;
  j["m"] = rep.config.m;
  j["levels"] = rep.config.levels;
  j["snr"] = rep.config.snr_list;
  j["runs"] = rep.config.runs;
  j["tau"] = rep.config.tau;
  j["seed"] = rep.config.seed;
  j["law"] = rep.config.law == NoiseLaw::gaussian ? "gaussian" : "heavy_tailed";
  j["spline_D"] = rep.config.spline_D;
  j["delta"] = rep.delta;
  j["apriori_level"] = rep.apriori_level;
  j["g_prime_norm"] = rep.g_prime_norm;
  j["f_norm"] = rep.f_norm;
  j["g_norm"] = rep.g_norm;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (size_t si = 0; si < rep.cells.size(); ++si) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (size_t li = 0; li < rep.cells[si].size(); ++li) {
      const Cell& c = rep.cells[si][li];
      row.push_back({{"e_opt", c.e_opt},
                     {"k_opt", c.k_opt},
                     {"e_dp", c.e_dp},
                     {"k_dp", c.k_dp},
                     {"k_opt_curve", rep.k_opt_curve[si][li]},
                     {"chosen_share", rep.chosen_share[si][li]}});
    }
    cells.push_back(row);
  }
  j["cells"] = cells;
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::ordered_json& j) {
  ExperimentReport rep;
  rep.config.problem = j.at("problem").get<std::string>();
  rep.config.s = j.at("s").get<double>();
  rep.config.D = j.at("D").get<int>();
  rep.config.m = j.at("m").get<int>();
  rep.config.levels = j.at("levels").get<std::vector<int>>();
  rep.config.snr_list = j.at("snr").get<std::vector<double>>();
  rep.config.runs = j.at("runs").get<int>();
  rep.config.tau = j.at("tau").get<double>();
  rep.config.seed = j.at("seed").get<uint64_t>();
  rep.config.law =
      j.at("law").get<std::string>() == "gaussian" ? NoiseLaw::gaussian : NoiseLaw::heavy_tailed;
  rep.config.spline_D = j.at("spline_D").get<int>();
  rep.delta = j.at("delta").get<std::vector<double>>();
  rep.apriori_level = j.at("apriori_level").get<std::vector<int>>();
  rep.g_prime_norm = j.at("g_prime_norm").get<double>();
  rep.f_norm = j.at("f_norm").get<double>();
  rep.g_norm = j.at("g_norm").get<double>();
  for (const auto& row : j.at("cells")) {
    rep.cells.emplace_back();
    rep.k_opt_curve.emplace_back();
    rep.chosen_share.emplace_back();
    for (const auto& cj : row) {
      Cell c;
      c.e_opt = cj.at("e_opt").get<double>();
      c.k_opt = cj.at("k_opt").get<double>();
      c.e_dp = cj.at("e_dp").get<double>();
      c.k_dp = cj.at("k_dp").get<double>();
      rep.cells.back().push_back(c);
      rep.k_opt_curve.back().push_back(cj.at("k_opt_curve").get<double>());
      rep.chosen_share.back().push_back(cj.at("chosen_share").get<double>());
    }
  }
  return rep;
}

/// Deterministic serialization of a report. Markdown mirrors the reference
/// table layout (one block per SNR, columns indexed by m_o, the a-priori
/// column in bold); CSV is one long-form row per cell; JSON is the full
/// round-trippable record.
inline std::string emit_table(const ExperimentReport& rep, TableFormat format) {
  const auto& cfg = rep.config;
  if (format == TableFormat::json) return report_to_json(rep).dump(2) + "\n";
  std::ostringstream os;
  if (format == TableFormat::csv) {
    os << "problem,s,snr,m_o,apriori,e_opt,k_opt,e_dp,k_dp,k_opt_curve,chosen_share\n";
    os << std::setprecision(17);
    for (size_t si = 0; si < rep.cells.size(); ++si)
      for (size_t li = 0; li < rep.cells[si].size(); ++li) {
        const Cell& c = rep.cells[si][li];
        os << cfg.problem << ',' << cfg.s << ',' << cfg.snr_list[si] << ',' << cfg.levels[li]
           << ',' << (cfg.levels[li] == rep.apriori_level[si] ? 1 : 0) << ',' << c.e_opt << ','
           << c.k_opt << ',' << c.e_dp << ',' << c.k_dp << ',' << rep.k_opt_curve[si][li] << ','
           << rep.chosen_share[si][li] << '\n';
      }
    return os.str();
  }
  // markdown
  os << "### " << cfg.problem;
  if (cfg.problem == "deriv2") os << " (s = " << cfg.s << ")";
  os << ", m = " << cfg.m << ", runs = " << cfg.runs << ", tau = " << cfg.tau << "\n\n";
  for (size_t si = 0; si < rep.cells.size(); ++si) {
    os << "| SNR = " << cfg.snr_list[si] << " |";
    for (int level : cfg.levels) os << " m_o = " << level << " |";
    os << "\n|---|";
    for (size_t li = 0; li < cfg.levels.size(); ++li) os << "---|";
    os << "\n";
    auto row = [&](const std::string& label, auto value, bool sci) {
      os << "| " << label << " |";
      for (size_t li = 0; li < rep.cells[si].size(); ++li) {
        const bool bold = cfg.levels[li] == rep.apriori_level[si];
        std::ostringstream cell;
        if (sci)
          cell << detail::sig2(value(rep.cells[si][li]));
        else
          cell << std::llround(value(rep.cells[si][li]));
        os << ' ' << (bold ? "**" + cell.str() + "**" : cell.str()) << " |";
      }
      os << "\n";
    };
    row("e_opt", [](const Cell& c) { return c.e_opt; }, true);
    row("e_dp", [](const Cell& c) { return c.e_dp; }, true);
    row("k_opt", [](const Cell& c) { return c.k_opt; }, false);
    row("k_dp", [](const Cell& c) { return c.k_dp; }, false);
    os << "\n";
  }
  return os.str();
}

/// Dense matrix as plain CSV rows (full precision).
inline std::string matrix_to_csv(const Eigen::MatrixXd& A) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) os << (j ? "," : "") << A(i, j);
    os << '\n';
  }
  return os.str();
}

/// All file output goes through write-temp-rename so partially written
/// artifacts never appear under the final name.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << content;
    if (!os.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace avgtsvd

#endif
