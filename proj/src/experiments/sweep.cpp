#include "sparsecs/experiments/sweep.hpp"

#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

#include "sparsecs/experiments/synthetic.hpp"

namespace sparsecs {

namespace {

struct Task {
  SyntheticSpec spec;
};

std::vector<Task> expand(const SweepGrid& grid) {
  std::vector<Task> tasks;
  for (Index n : grid.n)
    for (Index m : grid.m)
      for (Index k : grid.k)
        for (double alpha : grid.alpha)
          for (const auto& gamma : grid.gamma)
            for (std::uint64_t seed : grid.seeds) {
              SyntheticSpec spec;
              spec.n = n;
              spec.m = m;
              spec.k = k;
              spec.alpha = alpha;
              spec.gamma = gamma;
              spec.seed = seed;
              spec.sigma = grid.sigma;
              tasks.push_back({spec});
            }
  return tasks;
}

std::vector<SweepRow> run_task(const Task& task, const SweepConfig& config) {
  const SyntheticData data = generate(task.spec);
  std::vector<SweepRow> rows;
  for (const std::string& method : config.methods) {
    if (config.cancel != nullptr && config.cancel->load()) break;
    MethodOptions options;
    options.delta = config.delta;
    options.cancel = config.cancel;
    if (auto it = config.time_budget.find(method); it != config.time_budget.end()) options.time_limit = it->second;
    const MethodRun run = run_method(method, data.instance, options);

    SweepRow row;
    row.method = method;
    row.n = task.spec.n;
    row.m = task.spec.m;
    row.k = task.spec.k;
    row.alpha = task.spec.alpha;
    row.gamma = data.instance.gamma;
    row.seed = task.spec.seed;
    row.status = run.status;
    if (run.x) {
      row.has_solution = true;
      row.metrics = evaluate(data.instance, data.x_true, *run.x);
    }
    row.metrics.objective = run.objective;
    row.metrics.runtime = run.runtime;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config, const std::function<void(const SweepRow&)>& on_row) {
  for (const std::string& m : config.methods) {
    if (!is_known_method(m)) throw Error(ErrorCode::ParseError, "unknown method \"" + m + "\"");
  }
  const std::vector<Task> tasks = expand(config.grid);
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  std::vector<std::vector<SweepRow>> results(tasks.size());
  std::vector<bool> done(tasks.size(), false);
  std::size_t flushed = 0;
  std::mutex mutex;
  std::vector<SweepRow> out;

  auto deliver = [&] {
    // Emit the completed prefix in grid order.
    while (flushed < tasks.size() && done[flushed]) {
      for (const SweepRow& row : results[flushed]) {
        if (on_row) on_row(row);
        out.push_back(row);
      }
      ++flushed;
    }
  };

  const int jobs = std::max(1, config.jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    if (config.cancel != nullptr && config.cancel->load()) continue;
    std::vector<SweepRow> rows = run_task(tasks[static_cast<std::size_t>(t)], config);
    // A cancelled task may be missing methods; keep the table row-complete per instance.
    const bool complete = rows.size() == config.methods.size();
    std::lock_guard<std::mutex> lock(mutex);
    if (!complete) continue;
    results[static_cast<std::size_t>(t)] = std::move(rows);
    done[static_cast<std::size_t>(t)] = true;
    deliver();
  }
  return out;
}

void write_csv_header(std::ostream& out) {
  out << "# schema_version: " << kSchemaVersion << '\n'
      << "method,n,m,k,alpha,gamma,seed,sparsity,acc,tpr,tnr,objective,residual_sq,runtime_ms,status\n";
}

void write_csv_row(std::ostream& out, const SweepRow& row) {
  std::ostringstream line;
  line << std::setprecision(10);
  line << csv_field(row.method) << ',' << row.n << ',' << row.m << ',' << row.k << ',' << row.alpha << ','
       << row.gamma << ',' << row.seed << ',';
  if (row.has_solution) {
    line << row.metrics.sparsity << ',' << row.metrics.acc << ',' << row.metrics.tpr << ',' << row.metrics.tnr;
  } else {
    line << ",,,";
  }
  line << ',';
  if (std::isfinite(row.metrics.objective)) line << row.metrics.objective;
  line << ',';
  if (row.has_solution) line << row.metrics.residual_sq;
  line << ',' << std::chrono::duration<double, std::milli>(row.metrics.runtime).count() << ','
       << csv_field(row.status) << '\n';
  out << line.str();
  out.flush();
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummary> groups;
  std::vector<std::size_t> finite;
  auto key = [](const auto& r) { return std::make_tuple(r.method, r.n, r.m, r.k, r.alpha, r.gamma); };
  for (const SweepRow& row : rows) {
    std::size_t g = 0;
    while (g < groups.size() && key(groups[g]) != key(row)) ++g;
    if (g == groups.size()) {
      SweepSummary s;
      s.method = row.method;
      s.n = row.n;
      s.m = row.m;
      s.k = row.k;
      s.alpha = row.alpha;
      s.gamma = row.gamma;
      groups.push_back(s);
      finite.push_back(0);
    }
    SweepSummary& s = groups[g];
    ++s.rows;
    s.runtime_ms += std::chrono::duration<double, std::milli>(row.metrics.runtime).count();
    if (std::isfinite(row.metrics.objective)) {
      s.objective += row.metrics.objective;
      ++finite[g];
    }
    if (row.has_solution) {
      ++s.solved;
      s.sparsity += static_cast<double>(row.metrics.sparsity);
      s.acc += row.metrics.acc;
      s.tpr += row.metrics.tpr;
      s.tnr += row.metrics.tnr;
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    SweepSummary& s = groups[g];
    s.runtime_ms /= static_cast<double>(s.rows);
    s.objective = finite[g] ? s.objective / static_cast<double>(finite[g]) : std::nan("");
    if (s.solved) {
      const double d = static_cast<double>(s.solved);
      s.sparsity /= d;
      s.acc /= d;
      s.tpr /= d;
      s.tnr /= d;
    }
  }
  return groups;
}

}  // namespace sparsecs
