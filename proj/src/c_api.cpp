#include "upo/upo.h"

#include <cstring>
#include <map>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <variant>
#include <vector>

#include <fmt/core.h>

#include "upo/convergence.hpp"
#include "upo/experiment.hpp"
#include "upo/pando.hpp"
#include "upo/pv_plant.hpp"
#include "upo/quadrature.hpp"

struct upo_experiment {
  upo::ExperimentConfig cfg;
};

struct upo_run {
  upo::ExperimentResult result;
  upo::InputGrid grid;
};

struct upo_comparison {
  upo::Comparison cmp;
  upo::InputGrid grid;
};

struct upo_controller {
  struct Pando {
    std::optional<upo::PandoState> state;
  };
  struct Upo {
    upo::UpoConfig cfg;
    upo::QuadratureRule rule;
    std::optional<upo::UpoState> state;
  };

  upo::InputGrid grid;
  std::variant<Pando, Upo> impl;
};

namespace {

thread_local std::string last_error;

upo_status status_of(upo::ErrorCode code) {
  switch (code) {
    case upo::ErrorCode::invalid_argument: return UPO_ERR_INVALID_ARGUMENT;
    case upo::ErrorCode::unmeasured_point: return UPO_ERR_UNMEASURED_POINT;
    case upo::ErrorCode::off_grid: return UPO_ERR_OFF_GRID;
    case upo::ErrorCode::non_convergence: return UPO_ERR_NON_CONVERGENCE;
    case upo::ErrorCode::io: return UPO_ERR_IO;
    case upo::ErrorCode::config: return UPO_ERR_CONFIG;
    case upo::ErrorCode::infeasible: return UPO_ERR_INFEASIBLE;
  }
  return UPO_ERR_INTERNAL;
}

upo_status fail(upo_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes at the C boundary.
template <class F>
upo_status guarded(F&& fn) noexcept {
  try {
    fn();
    return UPO_OK;
  } catch (const upo::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(UPO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(UPO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UPO_ERR_INTERNAL, "unknown error");
  }
}

#define UPO_REQUIRE(ptr)                                                     \
  do {                                                                       \
    if ((ptr) == nullptr) return fail(UPO_ERR_NULL_POINTER, #ptr " is NULL"); \
  } while (0)

upo::InputGrid grid_from(const upo_grid_spec& spec) {
  return upo::InputGrid(spec.u_min, spec.delta_u, spec.n_u);
}

void write_file(const std::string& path, auto&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw upo::Error(upo::ErrorCode::io, fmt::format("cannot open '{}' for writing", path));
  writer(out);
  if (!out) throw upo::Error(upo::ErrorCode::io, fmt::format("failed writing '{}'", path));
}

}  // namespace

extern "C" {

const char* upo_version(void) { return "1.0.0"; }

const char* upo_last_error(void) { return last_error.c_str(); }

const char* upo_status_name(upo_status status) {
  switch (status) {
    case UPO_OK: return "ok";
    case UPO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case UPO_ERR_UNMEASURED_POINT: return "unmeasured point";
    case UPO_ERR_OFF_GRID: return "off grid";
    case UPO_ERR_NON_CONVERGENCE: return "non-convergence";
    case UPO_ERR_IO: return "i/o error";
    case UPO_ERR_CONFIG: return "configuration error";
    case UPO_ERR_INFEASIBLE: return "infeasible";
    case UPO_ERR_NULL_POINTER: return "null pointer";
    case UPO_ERR_OUT_OF_RANGE: return "out of range";
    case UPO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

upo_status upo_experiment_create(upo_experiment** out) {
  UPO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new upo_experiment{}; });
}

void upo_experiment_destroy(upo_experiment* exp) { delete exp; }

upo_status upo_experiment_clone(const upo_experiment* exp, upo_experiment** out) {
  UPO_REQUIRE(exp);
  UPO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new upo_experiment{exp->cfg}; });
}

upo_status upo_experiment_set(upo_experiment* exp, const char* key, const char* value) {
  UPO_REQUIRE(exp);
  UPO_REQUIRE(key);
  UPO_REQUIRE(value);
  return guarded([&] { exp->cfg.set(key, value); });
}

upo_status upo_experiment_load_file(upo_experiment* exp, const char* path) {
  UPO_REQUIRE(exp);
  UPO_REQUIRE(path);
  return guarded([&] { exp->cfg.load_file(path); });
}

upo_status upo_experiment_out_dir(const upo_experiment* exp, char* buf, size_t len) {
  UPO_REQUIRE(exp);
  UPO_REQUIRE(buf);
  const std::string& dir = exp->cfg.out_dir;
  if (len < dir.size() + 1) {
    return fail(UPO_ERR_OUT_OF_RANGE, fmt::format("buffer needs {} bytes", dir.size() + 1));
  }
  std::memcpy(buf, dir.c_str(), dir.size() + 1);
  return UPO_OK;
}

upo_status upo_experiment_run(const upo_experiment* exp, upo_run** out) {
  UPO_REQUIRE(exp);
  UPO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto result = upo::run_experiment(exp->cfg);
    *out = new upo_run{std::move(result), exp->cfg.grid()};
  });
}

void upo_run_destroy(upo_run* run) { delete run; }

size_t upo_run_length(const upo_run* run) { return run ? run->result.records.size() : 0; }

upo_status upo_run_record(const upo_run* run, size_t index, upo_record* out) {
  UPO_REQUIRE(run);
  UPO_REQUIRE(out);
  if (index >= run->result.records.size()) {
    return fail(UPO_ERR_OUT_OF_RANGE, fmt::format("record {} of {}", index, run->result.records.size()));
  }
  const auto& r = run->result.records[index];
  *out = upo_record{r.k, run->grid.value(r.u), r.y, r.f_true, run->grid.value(r.u_star),
                    r.perturbed ? 1 : 0, r.cumulative_objective};
  return UPO_OK;
}

upo_status upo_run_metrics(const upo_run* run, upo_metrics* out) {
  UPO_REQUIRE(run);
  UPO_REQUIRE(out);
  *out = upo_metrics{run->result.metrics.perturbation_count, run->result.metrics.cumulative_objective};
  return UPO_OK;
}

upo_status upo_run_write_csv(const upo_run* run, const char* path) {
  UPO_REQUIRE(run);
  UPO_REQUIRE(path);
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { upo::write_trajectory_csv(os, run->grid, run->result.records); });
  });
}

upo_status upo_experiment_compare(const upo_experiment* exp, upo_comparison** out) {
  return upo_compare(&exp, 1, out);
}

upo_status upo_compare(const upo_experiment* const* exps, size_t count, upo_comparison** out) {
  UPO_REQUIRE(exps);
  UPO_REQUIRE(out);
  *out = nullptr;
  if (count == 0) return fail(UPO_ERR_INVALID_ARGUMENT, "compare needs at least one experiment");
  for (size_t i = 0; i < count; ++i) UPO_REQUIRE(exps[i]);
  return guarded([&] {
    std::vector<upo::ExperimentConfig> configs;
    for (size_t i = 0; i < count; ++i) configs.push_back(exps[i]->cfg);
    auto cmp = upo::compare(configs);
    *out = new upo_comparison{std::move(cmp), configs.front().grid()};
  });
}

void upo_comparison_destroy(upo_comparison* cmp) { delete cmp; }

size_t upo_comparison_rows(const upo_comparison* cmp) { return cmp ? cmp->cmp.rows.size() : 0; }

upo_status upo_comparison_row(const upo_comparison* cmp, size_t index, upo_summary_row* out) {
  UPO_REQUIRE(cmp);
  UPO_REQUIRE(out);
  if (index >= cmp->cmp.rows.size()) {
    return fail(UPO_ERR_OUT_OF_RANGE, fmt::format("row {} of {}", index, cmp->cmp.rows.size()));
  }
  const auto& r = cmp->cmp.rows[index];
  upo_summary_row row{};
  const size_t n = std::min(r.method.size(), sizeof(row.method) - 1);
  std::memcpy(row.method, r.method.data(), n);
  row.method[n] = '\0';
  row.seed = r.seed;
  row.perturbations = r.perturbations;
  row.cumulative = r.cumulative;
  row.improvement_vs_pando = r.improvement_vs_pando;
  row.improvement_vs_const = r.improvement_vs_const;
  *out = row;
  return UPO_OK;
}

upo_status upo_comparison_best_constant(const upo_comparison* cmp, double* u) {
  UPO_REQUIRE(cmp);
  UPO_REQUIRE(u);
  *u = cmp->grid.value(cmp->cmp.best_constant);
  return UPO_OK;
}

upo_status upo_comparison_write_summary(const upo_comparison* cmp, const char* path) {
  UPO_REQUIRE(cmp);
  UPO_REQUIRE(path);
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { upo::write_summary_csv(os, cmp->cmp.rows); });
  });
}

upo_status upo_comparison_write_trajectories(const upo_comparison* cmp, const char* dir) {
  UPO_REQUIRE(cmp);
  UPO_REQUIRE(dir);
  return guarded([&] {
    // Several configs may share a method label; later ones get a numeric suffix.
    std::map<std::pair<std::string, std::uint64_t>, int> seen;
    for (const auto& run : cmp->cmp.runs) {
      const int n = ++seen[{run.method, run.seed}];
      const std::string label = n == 1 ? run.method : fmt::format("{}_{}", run.method, n);
      const std::string path = fmt::format("{}/trajectory_{}_seed{}.csv", dir, label, run.seed);
      write_file(path, [&](std::ostream& os) { upo::write_trajectory_csv(os, cmp->grid, run.records); });
    }
  });
}

void upo_controller_config_default(upo_controller_config* cfg) {
  if (cfg == nullptr) return;
  const upo::UpoConfig d;
  *cfg = upo_controller_config{d.forgetting, d.rho_est, d.planner.horizon, d.planner.quad_points,
                               d.planner.weight};
}

upo_status upo_controller_create_pando(const upo_grid_spec* grid, upo_controller** out) {
  UPO_REQUIRE(grid);
  UPO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new upo_controller{grid_from(*grid), upo_controller::Pando{}}; });
}

upo_status upo_controller_create_upo(const upo_grid_spec* grid, const upo_controller_config* cfg,
                                     upo_controller** out) {
  UPO_REQUIRE(grid);
  UPO_REQUIRE(cfg);
  UPO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    upo::UpoConfig c;
    c.forgetting = cfg->lambda;
    c.rho_est = cfg->rho_est;
    c.planner.horizon = cfg->horizon;
    c.planner.quad_points = cfg->quad_points;
    c.planner.weight = cfg->weight;
    c.validate();
    *out = new upo_controller{grid_from(*grid),
                              upo_controller::Upo{c, upo::gauss_hermite(c.planner.quad_points), {}}};
  });
}

void upo_controller_destroy(upo_controller* ctl) { delete ctl; }

upo_status upo_controller_start(upo_controller* ctl, double u1, double y1, double* next_u) {
  UPO_REQUIRE(ctl);
  UPO_REQUIRE(next_u);
  return guarded([&] {
    const upo::GridPoint first = ctl->grid.point_at(u1);
    upo::GridPoint next;
    if (auto* p = std::get_if<upo_controller::Pando>(&ctl->impl)) {
      p->state = upo::pando_init(first, y1, ctl->grid);
      next = p->state->curr;
    } else {
      auto& u = std::get<upo_controller::Upo>(ctl->impl);
      u.state = upo::upo_init(first, y1, ctl->grid, u.cfg);
      next = u.state->curr;
    }
    *next_u = ctl->grid.value(next);
  });
}

upo_status upo_controller_step(upo_controller* ctl, double y, double* next_u) {
  UPO_REQUIRE(ctl);
  UPO_REQUIRE(next_u);
  return guarded([&] {
    upo::GridPoint next;
    if (auto* p = std::get_if<upo_controller::Pando>(&ctl->impl)) {
      if (!p->state) throw upo::Error(upo::ErrorCode::invalid_argument, "controller not started");
      auto step = upo::pando_step(*p->state, y, ctl->grid);
      p->state = step.state;
      next = step.next;
    } else {
      auto& u = std::get<upo_controller::Upo>(ctl->impl);
      if (!u.state) throw upo::Error(upo::ErrorCode::invalid_argument, "controller not started");
      auto step = upo::upo_step(*u.state, y, ctl->grid, u.cfg, u.rule);
      u.state = std::move(step.state);
      next = step.next;
    }
    *next_u = ctl->grid.value(next);
  });
}

upo_status upo_gauss_hermite(int points, double* nodes, double* weights) {
  UPO_REQUIRE(nodes);
  UPO_REQUIRE(weights);
  return guarded([&] {
    const auto rule = upo::gauss_hermite(points);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      nodes[i] = rule.nodes()[i];
      weights[i] = rule.weights()[i];
    }
  });
}

upo_status upo_beta_bound(double L_k, double rho, double L_b, double* beta) {
  UPO_REQUIRE(beta);
  return guarded([&] { *beta = upo::beta_bound(L_k, rho, L_b); });
}

upo_status upo_pv_steady_state(double duty, double temperature, double irradiance, double* v,
                               double* i, double* power) {
  UPO_REQUIRE(v);
  UPO_REQUIRE(i);
  UPO_REQUIRE(power);
  return guarded([&] {
    const auto op = upo::pv::steady_state_power(duty, temperature, irradiance, upo::pv::PvParams{});
    *v = op.v;
    *i = op.i;
    *power = op.power;
  });
}

}  // extern "C"
