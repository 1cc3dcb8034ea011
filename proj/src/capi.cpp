#include "mcbias/mcbias.h"

#include <exception>
#include <new>
#include <string>

#include "mcbias/analytics.hpp"
#include "mcbias/error.hpp"
#include "mcbias/linalg.hpp"
#include "mcbias/runner.hpp"
#include "mcbias/serialize.hpp"

struct mcb_context {
  std::size_t workers = 1;
  std::string last_error;
};

struct mcb_result {
  std::string artifact;
  std::string summary;
  std::string format;
};

namespace {

template <class F>
mcb_status guarded(mcb_context* ctx, F&& body) {
  if (!ctx) return MCB_ERR_INTERNAL;
  ctx->last_error.clear();
  try {
    body();
    return MCB_OK;
  } catch (const mcbias::NumericalError& e) {
    ctx->last_error = e.what();
    return MCB_ERR_NUMERICAL;
  } catch (const mcbias::Error& e) {
    ctx->last_error = e.what();
    return MCB_ERR_CONFIG;
  } catch (const nlohmann::json::exception& e) {
    ctx->last_error = std::string("invalid config: ") + e.what();
    return MCB_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    ctx->last_error = "out of memory";
    return MCB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return MCB_ERR_INTERNAL;
  } catch (...) {
    ctx->last_error = "unknown failure";
    return MCB_ERR_INTERNAL;
  }
}

mcbias::Json parse(const char* text) {
  if (!text) throw mcbias::ConfigError("null config");
  return mcbias::Json::parse(text);
}

}  // namespace

extern "C" {

const char* mcb_version(void) { return "1.0.0"; }

mcb_status mcb_context_create(mcb_context** out) {
  if (!out) return MCB_ERR_INTERNAL;
  *out = new (std::nothrow) mcb_context();
  return *out ? MCB_OK : MCB_ERR_INTERNAL;
}

void mcb_context_destroy(mcb_context* ctx) { delete ctx; }

mcb_status mcb_context_set_workers(mcb_context* ctx, size_t workers) {
  return guarded(ctx, [&] { ctx->workers = workers; });
}

const char* mcb_context_last_error(const mcb_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

mcb_status mcb_run(mcb_context* ctx, const char* config_json, mcb_result** out) {
  if (!out) return MCB_ERR_INTERNAL;
  *out = nullptr;
  return guarded(ctx, [&] {
    mcbias::RunOutput r = mcbias::run(parse(config_json), ctx->workers);
    *out = new mcb_result{std::move(r.artifact), std::move(r.summary), std::move(r.format)};
  });
}

mcb_status mcb_normalize_config(mcb_context* ctx, const char* config_json, mcb_result** out) {
  if (!out) return MCB_ERR_INTERNAL;
  *out = nullptr;
  return guarded(ctx, [&] {
    const mcbias::Json c = mcbias::normalize_config(parse(config_json), ctx->workers);
    *out = new mcb_result{c.dump(2) + "\n", "config for " + c.at("command").get<std::string>(), "json"};
  });
}

const char* mcb_result_artifact(const mcb_result* r) { return r ? r->artifact.c_str() : ""; }
size_t mcb_result_artifact_size(const mcb_result* r) { return r ? r->artifact.size() : 0; }
const char* mcb_result_summary(const mcb_result* r) { return r ? r->summary.c_str() : ""; }
const char* mcb_result_format(const mcb_result* r) { return r ? r->format.c_str() : ""; }
void mcb_result_destroy(mcb_result* r) { delete r; }

mcb_status mcb_bias_report_json(mcb_context* ctx, const char* scenario_json, mcb_bias_report* out) {
  return guarded(ctx, [&] {
    if (!out) throw mcbias::ConfigError("null output");
    const mcbias::Json j = parse(scenario_json);
    mcbias::ScalarScenario s;
    s.kernel = mcbias::ScalarKernel::of(mcbias::kernel_kind_from_string(j.at("model").get<std::string>()));
    if (j.contains("y_dist")) s.y_dist = mcbias::dist_from_json(j.at("y_dist"));
    if (j.contains("s_dist")) s.s_dist = mcbias::dist_from_json(j.at("s_dist"));
    s.j = j.value("j", std::size_t{2});
    s.q = j.value("q", std::size_t{1});
    const mcbias::BiasReport r = mcbias::bias_report(s);
    *out = {r.psi, r.phi, r.target_var, r.relbias_current, r.relbias_alternative, r.mean_var_gap};
  });
}

mcb_status mcb_exponential_k(mcb_context* ctx, double y, double alpha, double* out) {
  return guarded(ctx, [&] {
    if (!out) throw mcbias::ConfigError("null output");
    *out = mcbias::exponential_k(y, alpha);
  });
}

mcb_status mcb_sym_eigen(mcb_context* ctx, const double* matrix, size_t n, double* values, double* vectors) {
  return guarded(ctx, [&] {
    if (!matrix || !values || !vectors || n == 0) throw mcbias::ConfigError("null or empty argument");
    mcbias::Mat m(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = matrix[r * n + c];
    const mcbias::EigenPair e = mcbias::sym_eigendecompose(m);
    for (std::size_t i = 0; i < n; ++i) values[i] = e.d[i];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) vectors[r * n + c] = e.u(r, c);
  });
}

}  // extern "C"
