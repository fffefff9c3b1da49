#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocolt/harness.hpp"
#include "ocolt/svg.hpp"

namespace ocolt {

// Shortest-round-trip decimal formatting would be nicer to read, but %.17g is
// exact and stable, and golden-file tests depend on byte stability.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_header(int n, int m) {
  std::string h = "t";
  for (int i = 1; i <= n; ++i) h += ",x_" + std::to_string(i);
  h += ",loss,regret_cum";
  for (int k = 1; k <= m; ++k) h += ",g_" + std::to_string(k);
  for (int k = 1; k <= m; ++k) h += ",viol_cum_" + std::to_string(k);
  for (int k = 1; k <= m; ++k) h += ",Q_" + std::to_string(k);
  h += ",drift\n";
  return h;
}

// One row per counted round t = 1..T; the bootstrap round stays out of the
// file because the cumulative columns are undefined for it.
inline std::string trace_csv(const RunResult& result, int n, int m) {
  std::string out = csv_header(n, m);
  std::size_t idx = 0;
  for (const RoundTrace& row : result.trace) {
    if (row.t < 1) continue;
    out += std::to_string(row.t);
    for (int i = 0; i < n; ++i) out += "," + fmt_double(row.x[i]);
    out += "," + fmt_double(row.loss);
    out += "," + fmt_double(result.cumulative_regret[idx]);
    for (int k = 0; k < m; ++k) out += "," + fmt_double(row.g_vals[k]);
    for (int k = 0; k < m; ++k)
      out += "," + fmt_double(result.cumulative_violation[idx][k]);
    for (int k = 0; k < m; ++k) out += "," + fmt_double(row.queue_after[k]);
    out += "," + fmt_double(row.drift) + "\n";
    ++idx;
  }
  return out;
}

inline nlohmann::json manifest_json(const Manifest& man,
                                    const ProblemInstance* instance = nullptr) {
  nlohmann::json j;
  j["seed"] = man.seed;
  j["T"] = man.T;
  j["n"] = man.n;
  j["m"] = man.m;
  j["algorithm"] = man.algorithm;
  j["generator"] = man.generator;
  j["parameters"] = man.parameters;
  j["constants"] = man.constants;
  j["bounds"] = man.bounds;
  j["instance_attempts"] = man.instance_attempts;
  if (instance && instance->constraints.is_linear()) {
    nlohmann::json inst;
    const Mat& A = instance->constraints.A();
    std::vector<std::vector<double>> a_rows;
    for (int k = 0; k < A.rows(); ++k)
      a_rows.emplace_back(A.row(k).begin(), A.row(k).end());
    inst["A"] = a_rows;
    inst["b"] = std::vector<double>(instance->constraints.b().begin(),
                                    instance->constraints.b().end());
    if (instance->slater_point.size() > 0)
      inst["slater_point"] = std::vector<double>(
          instance->slater_point.begin(), instance->slater_point.end());
    j["instance"] = inst;
  }
  return j;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed: " + path.string());
}

// Single-run emission: trace CSV, manifest sidecar, and the two charts.
// Returns the written paths.
inline std::vector<std::filesystem::path> emit_run_outputs(
    const RunResult& result, const ProblemInstance& instance,
    const std::filesystem::path& dir, const std::string& prefix,
    bool plots = true) {
  std::filesystem::create_directories(dir);
  const int n = instance.n();
  const int m = instance.m();
  std::vector<std::filesystem::path> written;

  const auto csv_path = dir / (prefix + "_trace.csv");
  write_file(csv_path, trace_csv(result, n, m));
  written.push_back(csv_path);

  const auto man_path = dir / (prefix + "_manifest.json");
  write_file(man_path, manifest_json(result.manifest, &instance).dump(2) + "\n");
  written.push_back(man_path);

  if (plots) {
    svg::Chart regret_chart;
    regret_chart.title = "cumulative regret";
    regret_chart.x_label = "round";
    regret_chart.y_label = "regret";
    regret_chart.series.push_back(
        {result.manifest.algorithm, result.cumulative_regret});
    const auto regret_path = dir / (prefix + "_regret.svg");
    write_file(regret_path, svg::render(regret_chart));
    written.push_back(regret_path);

    svg::Chart viol_chart;
    viol_chart.title = "cumulative constraint violations";
    viol_chart.x_label = "round";
    viol_chart.y_label = "violation";
    for (int k = 0; k < m; ++k) {
      std::vector<double> ys;
      ys.reserve(result.cumulative_violation.size());
      for (const Vec& v : result.cumulative_violation) ys.push_back(v[k]);
      viol_chart.series.push_back({"g_" + std::to_string(k + 1), std::move(ys)});
    }
    const auto viol_path = dir / (prefix + "_violation.svg");
    write_file(viol_path, svg::render(viol_chart));
    written.push_back(viol_path);
  }
  return written;
}

// Comparison emission: aligned per-seed CSVs (regret and worst violation per
// algorithm), overlay charts, and a summary table.
inline std::vector<std::filesystem::path> emit_comparison_outputs(
    const ComparisonTable& table, const std::filesystem::path& dir,
    bool plots = true) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  std::string summary = "seed,algorithm,final_regret,final_max_violation\n";
  for (const std::uint64_t seed : table.seeds) {
    std::string regret_csv = "t";
    std::string viol_csv = "t";
    for (const auto& alg : table.algorithms) {
      regret_csv += "," + alg;
      viol_csv += "," + alg;
    }
    regret_csv += "\n";
    viol_csv += "\n";

    std::vector<const ComparisonCell*> cols;
    for (const auto& alg : table.algorithms) cols.push_back(table.find(seed, alg));

    for (long t = 1; t <= table.T; ++t) {
      regret_csv += std::to_string(t);
      viol_csv += std::to_string(t);
      for (const ComparisonCell* cell : cols) {
        if (cell && cell->ok) {
          const auto& r = cell->result;
          regret_csv += "," + fmt_double(r.cumulative_regret[t - 1]);
          viol_csv +=
              "," + fmt_double(r.cumulative_violation[t - 1].maxCoeff());
        } else {
          regret_csv += ",";
          viol_csv += ",";
        }
      }
      regret_csv += "\n";
      viol_csv += "\n";
    }
    const std::string tag = "seed" + std::to_string(seed);
    const auto rp = dir / ("compare_" + tag + "_regret.csv");
    const auto vp = dir / ("compare_" + tag + "_violation.csv");
    write_file(rp, regret_csv);
    write_file(vp, viol_csv);
    written.push_back(rp);
    written.push_back(vp);

    if (plots) {
      svg::Chart rc, vc;
      rc.title = "cumulative regret (seed " + std::to_string(seed) + ")";
      rc.x_label = "round";
      rc.y_label = "regret";
      vc.title = "max cumulative violation (seed " + std::to_string(seed) + ")";
      vc.x_label = "round";
      vc.y_label = "violation";
      for (std::size_t a = 0; a < table.algorithms.size(); ++a) {
        const ComparisonCell* cell = cols[a];
        if (!cell || !cell->ok) continue;
        std::vector<double> viols;
        viols.reserve(cell->result.cumulative_violation.size());
        for (const Vec& v : cell->result.cumulative_violation)
          viols.push_back(v.maxCoeff());
        rc.series.push_back(
            {table.algorithms[a], cell->result.cumulative_regret});
        vc.series.push_back({table.algorithms[a], std::move(viols)});
      }
      const auto rsvg = dir / ("compare_" + tag + "_regret.svg");
      const auto vsvg = dir / ("compare_" + tag + "_violation.svg");
      write_file(rsvg, svg::render(rc));
      write_file(vsvg, svg::render(vc));
      written.push_back(rsvg);
      written.push_back(vsvg);
    }

    for (const ComparisonCell* cell : cols) {
      if (!cell) continue;
      summary += std::to_string(seed) + "," + cell->algorithm;
      if (cell->ok) {
        summary += "," + fmt_double(cell->result.final_regret()) + "," +
                   fmt_double(cell->result.final_max_violation()) + "\n";
      } else {
        summary += ",error,error\n";
      }
    }
  }
  const auto sp = dir / "compare_summary.csv";
  write_file(sp, summary);
  written.push_back(sp);

  nlohmann::json man;
  man["T"] = table.T;
  man["seeds"] = table.seeds;
  man["algorithms"] = table.algorithms;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& cell : table.cells) {
    if (!cell.ok) {
      runs.push_back({{"seed", cell.seed},
                      {"algorithm", cell.algorithm},
                      {"error", cell.error}});
      continue;
    }
    runs.push_back(manifest_json(cell.result.manifest));
  }
  man["runs"] = runs;
  const auto mp = dir / "compare_manifest.json";
  write_file(mp, man.dump(2) + "\n");
  written.push_back(mp);
  return written;
}

}  // namespace ocolt
