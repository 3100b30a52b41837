#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sparsecs/core/instance_io.hpp"
#include "sparsecs/experiments/methods.hpp"
#include "sparsecs/experiments/sweep.hpp"
#include "sparsecs/experiments/synthetic.hpp"
#include "sparsecs/sos/sos.hpp"

namespace sparsecs::cli {

using json = nlohmann::ordered_json;

std::chrono::duration<double> parse_duration(const std::string& text) {
  if (text == "inf" || text == "none") {
    return std::chrono::duration<double>(std::numeric_limits<double>::infinity());
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad duration \"" + text + "\"");
  }
  const std::string unit = text.substr(used);
  double scale = 0.0;
  if (unit.empty() || unit == "s") scale = 1.0;
  else if (unit == "ms") scale = 1e-3;
  else if (unit == "m" || unit == "min") scale = 60.0;
  else if (unit == "h") scale = 3600.0;
  else throw std::invalid_argument("bad duration unit in \"" + text + "\"");
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("duration must be nonnegative");
  return std::chrono::duration<double>(value * scale);
}

namespace {

// JSON numbers cannot hold inf/nan; emit null instead.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct SolveArgs {
  std::string instance;
  std::string method = "bnb";
  double delta = 0.0;
  std::string time_limit = "inf";
  bool strict_bounds = false;
  bool backbone = false;
  std::size_t log_every = 0;
  std::string certificate_out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err, std::atomic<bool>* cancel) {
  const ProblemInstance instance = read_instance(a.instance);
  MethodOptions options;
  options.delta = a.delta;
  options.time_limit = parse_duration(a.time_limit);
  options.strict_bounds = a.strict_bounds;
  options.backbone = a.backbone;
  options.log_every = a.log_every;
  options.log = &err;
  options.cancel = cancel;

  MethodRun run;
  std::optional<SosCertificate> certificate;
  if (a.method == "sos-bound" && !a.certificate_out.empty()) {
    // Needs the certificate itself, so call the solver directly.
    const auto start = std::chrono::steady_clock::now();
    SosSettings settings;
    settings.time_limit = options.time_limit;
    run.method = a.method;
    try {
      const SosResult res = solve_sos_d1(instance, settings);
      run.objective = res.bound;
      run.lower_bound = res.bound;
      run.status = std::string(to_string(res.status.code));
      certificate = res.certificate;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleInstance) throw;
      run.infeasible = true;
      run.status = "Infeasible";
    }
    run.runtime = std::chrono::steady_clock::now() - start;
  } else {
    run = run_method(a.method, instance, options);
  }
  if (certificate) write_certificate(a.certificate_out, *certificate);

  json record;
  record["schema_version"] = kSchemaVersion;
  record["method"] = run.method;
  if (run.x) {
    record["sparsity"] = count_support(*run.x);
    record["objective"] = real(run.objective);
    record["residual_sq"] = real(residual_sq(instance, *run.x));
  } else {
    record["sparsity"] = nullptr;
    record["objective"] = real(run.objective);
    record["residual_sq"] = nullptr;
  }
  if (run.lower_bound) record["lower_bound"] = real(*run.lower_bound);
  if (run.gap) record["gap"] = real(*run.gap);
  if (run.nodes) record["nodes"] = *run.nodes;
  record["runtime_ms"] = std::chrono::duration<double, std::milli>(run.runtime).count();
  record["status"] = run.status;
  if (run.x) {
    json x = json::array();
    for (Index i = 0; i < run.x->size(); ++i) x.push_back((*run.x)(i));
    record["x"] = std::move(x);
  }
  out << record.dump() << '\n';

  if (run.infeasible) return kInfeasible;
  if (run.status.rfind("Error:", 0) == 0) {
    err << "error: " << a.method << " failed with " << run.status.substr(6) << '\n';
    return kUsageError;
  }
  return kOk;
}

template <typename T>
std::vector<T> list_of(const json& cfg, const char* key, std::vector<T> fallback = {}) {
  if (!cfg.contains(key)) return fallback;
  const json& v = cfg.at(key);
  if (!v.is_array()) return {v.get<T>()};
  return v.get<std::vector<T>>();
}

SweepConfig parse_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open sweep config " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("sweep config: ") + e.what());
  }
  SweepConfig config;
  try {
    config.grid.n = list_of<Index>(cfg, "n");
    config.grid.m = list_of<Index>(cfg, "m");
    config.grid.k = list_of<Index>(cfg, "k");
    config.grid.alpha = list_of<double>(cfg, "alpha");
    config.grid.sigma = cfg.value("sigma", 10.0);
    if (cfg.contains("gamma")) {
      config.grid.gamma.clear();
      const json g = cfg.at("gamma").is_array() ? cfg.at("gamma") : json::array({cfg.at("gamma")});
      for (const json& v : g) {
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "sqrt(n)")) {
          config.grid.gamma.emplace_back(std::nullopt);
        } else {
          config.grid.gamma.emplace_back(v.get<double>());
        }
      }
    }
    if (cfg.contains("seeds") && cfg.at("seeds").is_object()) {
      const auto start = cfg.at("seeds").value("start", std::uint64_t{0});
      const auto count = cfg.at("seeds").at("count").get<std::uint64_t>();
      for (std::uint64_t s = 0; s < count; ++s) config.grid.seeds.push_back(start + s);
    } else {
      config.grid.seeds = list_of<std::uint64_t>(cfg, "seeds");
    }
    config.methods = list_of<std::string>(cfg, "methods");
    config.delta = cfg.value("delta", 0.0);
    if (cfg.contains("time_budget")) {
      for (const auto& [method, budget] : cfg.at("time_budget").items()) {
        config.time_budget[method] =
            budget.is_string() ? parse_duration(budget.get<std::string>())
                               : std::chrono::duration<double>(budget.get<double>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("sweep config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::ParseError, std::string("sweep config: ") + e.what());
  }
  return config;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::string methods;
  int jobs = 1;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err, std::atomic<bool>* cancel) {
  SweepConfig config = parse_sweep_config(a.config);
  if (!a.methods.empty()) config.methods = split_commas(a.methods);
  if (config.methods.empty()) throw Error(ErrorCode::ParseError, "no methods given");
  for (const std::string& m : config.methods) {
    if (!is_known_method(m)) throw Error(ErrorCode::ParseError, "unknown method \"" + m + "\"");
  }
  config.jobs = a.jobs;
  config.cancel = cancel;

  std::ofstream csv(a.out);
  if (!csv) throw Error(ErrorCode::ParseError, "cannot write " + a.out);
  write_csv_header(csv);
  const auto rows = run_sweep(config, [&](const SweepRow& row) { write_csv_row(csv, row); });
  if (cancel != nullptr && cancel->load()) err << "interrupted; " << rows.size() << " rows written\n";

  out << "method,n,m,k,alpha,gamma,rows,solved,sparsity,acc,tpr,tnr,objective,runtime_ms\n";
  out << std::setprecision(6);
  for (const SweepSummary& s : summarize(rows)) {
    out << s.method << ',' << s.n << ',' << s.m << ',' << s.k << ',' << s.alpha << ',' << s.gamma << ','
        << s.rows << ',' << s.solved << ',' << s.sparsity << ',' << s.acc << ',' << s.tpr << ',' << s.tnr << ','
        << s.objective << ',' << s.runtime_ms << '\n';
  }
  return kOk;
}

struct GenerateArgs {
  Index n = 0, m = 0, k = 0;
  double alpha = 0.2;
  double sigma = 10.0;
  std::optional<double> gamma;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth_out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  SyntheticSpec spec;
  spec.n = a.n;
  spec.m = a.m;
  spec.k = a.k;
  spec.alpha = a.alpha;
  spec.sigma = a.sigma;
  spec.gamma = a.gamma;
  spec.seed = a.seed;
  const SyntheticData data = generate(spec);
  if (a.out.empty()) {
    out << format_instance(data.instance);
  } else {
    write_instance(a.out, data.instance);
  }
  if (!a.truth_out.empty()) {
    std::ofstream truth(a.truth_out);
    if (!truth) throw Error(ErrorCode::ParseError, "cannot write " + a.truth_out);
    truth << "{\"schema_version\": " << kSchemaVersion << ", \"x_true\": [";
    for (Index i = 0; i < data.x_true.size(); ++i) truth << (i ? ", " : "") << format_real(data.x_true(i));
    truth << "]}\n";
  }
  return kOk;
}

int cmd_verify(const std::string& instance_path, const std::string& certificate_path, std::ostream& out) {
  const ProblemInstance instance = read_instance(instance_path);
  const SosCertificate cert = read_certificate(certificate_path);
  const bool ok = verify_certificate(instance, cert);
  json record;
  record["schema_version"] = kSchemaVersion;
  record["valid"] = ok;
  record["lambda"] = real(cert.lambda);
  out << record.dump() << '\n';
  return ok ? kOk : kInfeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::atomic<bool>* cancel) {
  CLI::App app{"Sparse recovery by branch and bound, with benchmark heuristics and relaxation bounds", "sparsecs"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one instance and print a JSON record");
  solve->add_option("--instance", solve_args.instance, "Instance JSON file")->required();
  solve->add_option("--method", solve_args.method, "bnb|omp|bpd|irwl1|bpd-raw|irwl1-raw|soc-bound|sos-bound")
      ->check(CLI::IsMember(method_names()));
  solve->add_option("--delta", solve_args.delta, "Relative optimality tolerance for bnb")->check(CLI::NonNegativeNumber);
  solve->add_option("--time-limit", solve_args.time_limit, "Budget such as 600s or 10m");
  solve->add_flag("--strict-bounds", solve_args.strict_bounds, "Perspective node bounds in bnb");
  solve->add_flag("--backbone", solve_args.backbone, "Restrict bnb to the BPD support");
  solve->add_option("--log-every", solve_args.log_every, "bnb progress line every N nodes on stderr");
  solve->add_option("--certificate-out", solve_args.certificate_out, "Write the SOS certificate (sos-bound)");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of synthetic experiments into a CSV");
  sweep->add_option("--config", sweep_args.config, "Sweep config JSON")->required();
  sweep->add_option("--out", sweep_args.out, "CSV output path")->required();
  sweep->add_option("--methods", sweep_args.methods, "Comma-separated methods (overrides the config)");
  sweep->add_option("--jobs", sweep_args.jobs, "Instances run in parallel")->check(CLI::PositiveNumber);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Write a synthetic instance as JSON");
  gen->add_option("--n", gen_args.n)->required();
  gen->add_option("--m", gen_args.m)->required();
  gen->add_option("--k", gen_args.k)->required();
  gen->add_option("--alpha", gen_args.alpha);
  gen->add_option("--sigma", gen_args.sigma);
  gen->add_option("--gamma", gen_args.gamma, "Default sqrt(n)");
  gen->add_option("--seed", gen_args.seed);
  gen->add_option("--out", gen_args.out, "Instance path (stdout when omitted)");
  gen->add_option("--truth-out", gen_args.truth_out, "Planted vector JSON");

  std::string verify_instance, verify_certificate_path;
  auto* verify = app.add_subcommand("verify-certificate", "Re-check an SOS certificate offline");
  verify->add_option("--instance", verify_instance)->required();
  verify->add_option("--certificate", verify_certificate_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*solve) return cmd_solve(solve_args, out, err, cancel);
    if (*sweep) return cmd_sweep(sweep_args, out, err, cancel);
    if (*gen) return cmd_generate(gen_args, out);
    if (*verify) return cmd_verify(verify_instance, verify_certificate_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::InfeasibleInstance) return kInfeasible;
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace sparsecs::cli
