// upo-cli: runs P&O / uP&O experiments through the C interface and writes
// summary.csv plus one trajectory CSV per (method, seed).

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "upo/upo.h"

namespace {

struct CliFailure {
  std::string message;
};

void check(upo_status st, const std::string& what) {
  if (st != UPO_OK) {
    throw CliFailure{what + ": " + upo_status_name(st) + ": " + upo_last_error()};
  }
}

struct ExperimentHandle {
  upo_experiment* ptr = nullptr;
  ExperimentHandle() { check(upo_experiment_create(&ptr), "create experiment"); }
  explicit ExperimentHandle(const upo_experiment* from) { check(upo_experiment_clone(from, &ptr), "clone experiment"); }
  ExperimentHandle(const ExperimentHandle&) = delete;
  ExperimentHandle& operator=(const ExperimentHandle&) = delete;
  ~ExperimentHandle() { upo_experiment_destroy(ptr); }
  void set(const std::string& key, const std::string& value) {
    check(upo_experiment_set(ptr, key.c_str(), value.c_str()), "--" + key);
  }
};

struct ComparisonHandle {
  upo_comparison* ptr = nullptr;
  ComparisonHandle() = default;
  ComparisonHandle(const ComparisonHandle&) = delete;
  ComparisonHandle& operator=(const ComparisonHandle&) = delete;
  ~ComparisonHandle() { upo_comparison_destroy(ptr); }
};

struct MethodTotals {
  std::size_t runs = 0;
  double perturbations = 0.0;
  double cumulative = 0.0;
  double vs_pando = 0.0;
  double vs_const = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturb-and-observe and uncertainty-based P&O experiment runner"};
  app.option_defaults()->always_capture_default(false);

  std::string config_path;
  std::vector<std::string> methods;
  std::vector<std::string> extra;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "key=value config file; flags override its values")
      ->check(CLI::ExistingFile);
  app.add_option("--method", methods,
                 "pando | upo | constant:U | best_constant (repeatable; P&O and best constant are always run)");
  app.add_option("--set", extra, "extra KEY=VALUE setting, e.g. --set R_c=2 (repeatable)");
  app.add_flag("-q,--quiet", quiet, "do not print the summary table");

  // Flags mapped one-to-one onto experiment keys.
  const std::vector<std::pair<std::string, std::string>> keyed = {
      {"scenario", "pv_default | pv_csv:PATH | synthetic_vee"},
      {"steps", "number of steps (default 300)"},
      {"seed", "first noise seed (default 1)"},
      {"seeds", "number of consecutive seeds (default 1)"},
      {"lambda", "forgetting factor (default 0.88)"},
      {"rho-est", "assumed noise level (default 5)"},
      {"horizon", "planning horizon p (default 2)"},
      {"quad-points", "Gauss-Hermite points (default 5)"},
      {"weight", "penalty W on leaving the P&O direction (default 0)"},
      {"u-init", "first input (default: bottom of the grid)"},
      {"out", "output directory (default .)"},
      {"profile-csv", "temperature/irradiance profile with header k,T,S"},
      {"rho", "true measurement noise level"},
      {"noise", "gaussian | truncated"},
      {"u-const", "input of the constant method"},
      {"grid-min", "first grid value"},
      {"grid-step", "grid spacing"},
      {"grid-size", "number of grid points"},
  };
  std::map<std::string, std::string> values;
  for (const auto& [key, help] : keyed) app.add_option("--" + key, values[key], help);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentHandle base;
    if (!config_path.empty()) {
      check(upo_experiment_load_file(base.ptr, config_path.c_str()), "config " + config_path);
    }
    for (const auto& [key, help] : keyed) {
      if (app.count("--" + key) > 0) base.set(key, values[key]);
    }
    for (const auto& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CliFailure{"--set expects KEY=VALUE, got '" + kv + "'"};
      base.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    std::vector<std::unique_ptr<ExperimentHandle>> exps;
    if (methods.empty()) {
      exps.push_back(std::make_unique<ExperimentHandle>(base.ptr));
    }
    for (const auto& m : methods) {
      auto e = std::make_unique<ExperimentHandle>(base.ptr);
      e->set("method", m);
      exps.push_back(std::move(e));
    }
    std::vector<const upo_experiment*> raw;
    for (const auto& e : exps) raw.push_back(e->ptr);

    ComparisonHandle cmp;
    check(upo_compare(raw.data(), raw.size(), &cmp.ptr), "compare");

    char dir_buf[4096];
    check(upo_experiment_out_dir(base.ptr, dir_buf, sizeof dir_buf), "output directory");
    const std::filesystem::path dir(dir_buf);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw CliFailure{"cannot create " + dir.string() + ": " + ec.message()};

    check(upo_comparison_write_summary(cmp.ptr, (dir / "summary.csv").string().c_str()), "write summary");
    check(upo_comparison_write_trajectories(cmp.ptr, dir.string().c_str()), "write trajectories");

    if (!quiet) {
      std::vector<std::string> order;
      std::map<std::string, MethodTotals> totals;
      const size_t n = upo_comparison_rows(cmp.ptr);
      for (size_t i = 0; i < n; ++i) {
        upo_summary_row row;
        check(upo_comparison_row(cmp.ptr, i, &row), "summary row");
        auto [it, fresh] = totals.try_emplace(row.method);
        if (fresh) order.push_back(row.method);
        auto& t = it->second;
        ++t.runs;
        t.perturbations += static_cast<double>(row.perturbations);
        t.cumulative += row.cumulative;
        t.vs_pando += row.improvement_vs_pando;
        t.vs_const += row.improvement_vs_const;
      }
      double best_u = 0.0;
      check(upo_comparison_best_constant(cmp.ptr, &best_u), "best constant");

      std::printf("%-22s %6s %14s %14s %10s %10s\n", "method", "seeds", "perturbations", "cumulative",
                  "vs_pando", "vs_const");
      for (const auto& name : order) {
        const auto& t = totals[name];
        const double r = static_cast<double>(t.runs);
        std::printf("%-22s %6zu %14.2f %14.4f %9.3f%% %9.3f%%\n", name.c_str(), t.runs, t.perturbations / r,
                    t.cumulative / r, 100.0 * t.vs_pando / r, 100.0 * t.vs_const / r);
      }
      std::printf("best constant input: %g\noutput: %s\n", best_u, dir.string().c_str());
    }
  } catch (const CliFailure& f) {
    std::fprintf(stderr, "upo-cli: %s\n", f.message.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "upo-cli: %s\n", e.what());
    return 1;
  }
  return 0;
}
