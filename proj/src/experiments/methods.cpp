#include "sparsecs/experiments/methods.hpp"

#include <algorithm>

#include "sparsecs/bnb/bnb.hpp"
#include "sparsecs/heuristics/heuristics.hpp"
#include "sparsecs/relaxations/relaxations.hpp"
#include "sparsecs/sos/sos.hpp"

namespace sparsecs {

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"bnb", "omp", "bpd", "irwl1", "bpd-raw", "irwl1-raw",
                                              "soc-bound", "sos-bound"};
  return names;
}

bool is_known_method(const std::string& name) {
  const auto& names = method_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

ConicSettings conic_with(const MethodOptions& options) {
  ConicSettings s;
  s.time_limit = options.time_limit;
  return s;
}

void run_into(MethodRun& run, const ProblemInstance& instance, const MethodOptions& options) {
  const std::string& m = run.method;
  auto heuristic = [&](const SolutionVector& x) {
    run.x = x.x;
    run.objective = objective(instance, x.x);
    run.status = "Optimal-heuristic";
  };
  if (m == "bnb") {
    BnBConfig config;
    config.delta = options.delta;
    config.time_limit = options.time_limit;
    config.strict_bounds = options.strict_bounds;
    config.log_every = options.log_every;
    config.log = options.log;
    if (options.cancel != nullptr) {
      config.observer = [cancel = options.cancel](const BnBProgress&) { return !cancel->load(); };
    }
    if (options.backbone && instance.b.squaredNorm() > instance.epsilon) {
      config.backbone = compute_backbone(instance);
    }
    const BnBResult res = solve(instance, config);
    run.status = std::string(to_string(res.status));
    run.nodes = res.nodes_explored;
    if (res.status == BnBStatus::Infeasible) {
      run.infeasible = true;
      return;
    }
    run.x = res.x_best;
    run.objective = res.upper;
    run.lower_bound = res.lower;
    run.gap = res.gap;
  } else if (m == "omp") {
    heuristic(omp(instance));
  } else if (m == "bpd") {
    heuristic(bpd_rounded(instance, conic_with(options)));
  } else if (m == "irwl1") {
    heuristic(irwl1_rounded(instance, {}, conic_with(options)));
  } else if (m == "bpd-raw") {
    heuristic(solve_bpd(instance, conic_with(options)));
  } else if (m == "irwl1-raw") {
    heuristic(irwl1(instance, {}, conic_with(options)).x);
  } else if (m == "soc-bound") {
    const RelaxationSolution rel = solve_perspective_relaxation(instance, conic_with(options));
    run.objective = rel.objective;
    run.lower_bound = rel.objective;
    run.status = std::string(to_string(rel.status.code));
  } else if (m == "sos-bound") {
    SosSettings settings;
    settings.time_limit = options.time_limit;
    const SosResult res = solve_sos_d1(instance, settings);
    run.objective = res.bound;
    run.lower_bound = res.bound;
    run.status = std::string(to_string(res.status.code));
  } else {
    throw Error(ErrorCode::ParseError, "unknown method \"" + m + "\"");
  }
}

}  // namespace

MethodRun run_method(const std::string& method, const ProblemInstance& instance, const MethodOptions& options) {
  if (!is_known_method(method)) throw Error(ErrorCode::ParseError, "unknown method \"" + method + "\"");
  MethodRun run;
  run.method = method;
  const auto start = std::chrono::steady_clock::now();
  try {
    run_into(run, instance, options);
  } catch (const Error& e) {
    run.x.reset();
    run.lower_bound.reset();
    run.gap.reset();
    if (e.code() == ErrorCode::InfeasibleInstance || e.code() == ErrorCode::NoFeasibleCompletion) {
      run.infeasible = true;
      run.status = "Infeasible";
    } else {
      run.status = "Error:" + std::string(to_string(e.code()));
    }
  }
  run.runtime = std::chrono::steady_clock::now() - start;
  return run;
}

}  // namespace sparsecs
