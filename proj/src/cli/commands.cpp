#include "parchain/cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "parchain/conflux/attack.hpp"
#include "parchain/rng.hpp"
#include "parchain/simnet/checkers.hpp"
#include "parchain/simnet/engine.hpp"
#include "parchain/simnet/metrics.hpp"

namespace parchain::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace parchain::simnet;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
}

/// Outputs are write-once: an existing file is never replaced.
std::ofstream create_new(const fs::path& path) {
  if (fs::exists(path)) throw ConfigError("refusing to overwrite " + path.string());
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

struct Checks {
  PropertyVerdict growth, quality, consistency, quality_growth;

  json to_json() const {
    return {{"growth", simnet::to_json(growth)},
            {"quality", simnet::to_json(quality)},
            {"consistency", simnet::to_json(consistency)},
            {"quality_growth", simnet::to_json(quality_growth)}};
  }
};

Checks run_checks(const RunReport& r, unsigned gamma) {
  return {check_growth(r), check_quality(r), check_consistency(r), check_quality_growth(r, gamma)};
}

bool clean(const RunReport& r, const Checks& c) { return r.counters_clean() && c.consistency.violations == 0; }

/// report.json, trace.csv and scb.jsonl for one run.
void write_run(const fs::path& dir, RunReport& report, const Checks& checks) {
  report.generated_at = utc_timestamp();
  json j = to_json(report);
  j["checks"] = checks.to_json();
  create_new(dir / "report.json") << j.dump(1) << '\n';
  auto trace = create_new(dir / "trace.csv");
  write_trace_csv(report, trace);
  auto scb = create_new(dir / "scb.jsonl");
  write_scb_jsonl(report, scb);
}

void print_verdicts(const Checks& c, std::ostream& out) {
  out << std::left << std::setw(16) << "property" << std::right << std::setw(12) << "windows" << std::setw(12)
      << "violations" << std::setw(12) << "fraction" << std::setw(12) << "threshold" << '\n';
  for (const auto* v : {&c.growth, &c.quality, &c.consistency, &c.quality_growth}) {
    out << std::left << std::setw(16) << v->property << std::right << std::setw(12) << v->windows << std::setw(12)
        << v->violations << std::setw(12) << std::setprecision(4) << v->violating_fraction() << std::setw(12)
        << v->threshold << '\n';
  }
}

/// Sets a dotted path such as "params.k" inside a JSON object.
void set_path(json& j, const std::string& path, const json& value) {
  json* cur = &j;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

std::string csv_value(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

fs::path resolve_out_dir(const std::optional<std::string>& explicit_dir, const std::string& default_name) {
  if (explicit_dir) return *explicit_dir;
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "runs") / default_name;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    auto config = load_sim_config(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.checkpoint_every) config.checkpoint_every = *opts.checkpoint_every;
    if (opts.ticks) config.ticks = *opts.ticks;
    config.validate();
    auto dir = resolve_out_dir(opts.out_dir,
                               fs::path(opts.config_path).stem().string() + "-seed" + std::to_string(config.seed));
    if (fs::exists(dir / "report.json")) throw ConfigError("refusing to overwrite " + (dir / "report.json").string());

    auto report = run(config);
    auto checks = run_checks(report, opts.gamma);
    write_run(dir, report, checks);
    print_verdicts(checks, out);
    const bool ok = clean(report, checks);
    out << "report: " << (dir / "report.json").string() << '\n' << (ok ? "clean" : "FATAL property violation") << '\n';
    return ok ? kOk : kPropertyViolation;
  } catch (const std::exception& e) {
    err << "run: " << e.what() << '\n';
    return kUsageError;
  }
}

int cmd_metrics(const std::string& report_path, std::uint64_t window, std::ostream& out, std::ostream& err) {
  try {
    auto report = report_from_json(read_json(report_path));
    out << to_json(compute_metrics(report, window)).dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "metrics: " << e.what() << '\n';
    return kUsageError;
  }
}

int cmd_check(const std::string& report_path, unsigned gamma, std::ostream& out, std::ostream& err) {
  try {
    auto report = report_from_json(read_json(report_path));
    auto checks = run_checks(report, gamma);
    print_verdicts(checks, out);
    for (const auto* v : {&checks.growth, &checks.quality, &checks.consistency, &checks.quality_growth}) {
      for (const auto& ex : v->examples) out << "  " << v->property << ": " << ex << '\n';
    }
    return clean(report, checks) ? kOk : kPropertyViolation;
  } catch (const std::exception& e) {
    err << "check: " << e.what() << '\n';
    return kUsageError;
  }
}

int cmd_attack(const AttackOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    auto sweep = conflux::attack_sweep_from_json(read_json(opts.config_path));
    if (opts.seed) sweep.base.seed = *opts.seed;
    if (opts.trials) sweep.base.trials = *opts.trials;
    if (opts.threads) sweep.base.threads = *opts.threads;
    auto dir = resolve_out_dir(opts.out_dir, fs::path(opts.config_path).stem().string() + "-seed" +
                                                 std::to_string(sweep.base.seed));
    if (fs::exists(dir / "attack.csv")) throw ConfigError("refusing to overwrite " + (dir / "attack.csv").string());
    auto results = conflux::run_sweep(sweep);
    auto csv = create_new(dir / "attack.csv");
    conflux::write_attack_csv(results, sweep.quantiles, csv);
    conflux::write_attack_csv(results, sweep.quantiles, out);
    return kOk;
  } catch (const std::exception& e) {
    err << "attack: " << e.what() << '\n';
    return kUsageError;
  }
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  struct Planned {
    SimConfig config;
    std::vector<json> values;
  };
  try {
    const json campaign = read_json(opts.campaign_path);
    const json base = campaign.value("base", json::object());
    const json axes = campaign.value("sweep", json::object());
    const auto repeats = campaign.value("repeats", std::uint64_t{1});
    const std::uint64_t seed = opts.seed ? *opts.seed : campaign.value("seed", std::uint64_t{1});
    std::vector<std::string> names;
    std::vector<std::vector<json>> lists;
    for (const auto& [name, values] : axes.items()) {
      names.push_back(name);
      lists.push_back(values.is_array() ? values.get<std::vector<json>>() : std::vector<json>{values});
      if (lists.back().empty()) throw ConfigError("sweep field '" + name + "' has no values");
    }

    std::vector<Planned> plan;
    std::vector<std::size_t> pick(names.size(), 0);
    while (true) {
      for (std::uint64_t rep = 0; rep < repeats; ++rep) {
        json cfg = base;
        std::vector<json> values;
        for (std::size_t a = 0; a < names.size(); ++a) {
          set_path(cfg, names[a], lists[a][pick[a]]);
          values.push_back(lists[a][pick[a]]);
        }
        cfg["seed"] = derive_seed(seed, {plan.size()});
        plan.push_back({sim_config_from_json(cfg), std::move(values)});
      }
      std::size_t a = names.size();
      while (a > 0 && ++pick[a - 1] == lists[a - 1].size()) pick[--a] = 0;
      if (a == 0) break;
    }
    std::set<std::uint64_t> seeds;
    for (const auto& p : plan) {
      if (!seeds.insert(p.config.seed).second) throw ConfigError("derived seeds collide");
    }

    auto dir = resolve_out_dir(opts.out_dir,
                               fs::path(opts.campaign_path).stem().string() + "-seed" + std::to_string(seed));
    if (fs::exists(dir / "summary.csv")) throw ConfigError("refusing to overwrite " + (dir / "summary.csv").string());

    std::vector<std::string> rows(plan.size());
    std::vector<int> status(plan.size(), kOk);
    std::mutex write_mu;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto work = [&] {
      for (auto i = next.fetch_add(1); i < plan.size(); i = next.fetch_add(1)) try {
        auto report = run(plan[i].config);
        auto checks = run_checks(report, opts.gamma);
        auto m = compute_metrics(report);
        std::ostringstream row;
        row << i << ',' << plan[i].config.seed;
        for (const auto& v : plan[i].values) row << ',' << csv_value(v);
        row << ',' << m.throughput << ',' << m.confirmed_per_tick << ',' << m.partial_latency.mean << ','
            << m.full_latency.mean << ',' << checks.growth.violating_fraction() << ','
            << checks.quality.violating_fraction() << ',' << checks.consistency.violations << ','
            << checks.quality_growth.violating_fraction() << ',' << (clean(report, checks) ? 1 : 0);
        std::ostringstream name;
        name << "run-" << std::setw(3) << std::setfill('0') << i;
        std::lock_guard lock(write_mu);
        write_run(dir / name.str(), report, checks);
        rows[i] = row.str();
        status[i] = clean(report, checks) ? kOk : kPropertyViolation;
      } catch (...) {
        std::lock_guard lock(write_mu);
        if (!failure) failure = std::current_exception();
        next = plan.size();
      }
    };
    unsigned jobs = opts.jobs > 0 ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, plan.size()));
    if (jobs <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    auto summary = create_new(dir / "summary.csv");
    summary << "run,seed";
    for (const auto& n : names) summary << ',' << n;
    summary << ",throughput_bytes_per_tick,confirmed_blocks_per_tick,partial_latency_mean,full_latency_mean,"
               "growth_violating_fraction,quality_violating_fraction,consistency_violations,"
               "quality_growth_violating_fraction,clean\n";
    for (const auto& r : rows) summary << r << '\n';
    out << plan.size() << " runs, summary: " << (dir / "summary.csv").string() << '\n';
    for (int s : status) {
      if (s != kOk) return kPropertyViolation;
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "sweep: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace parchain::cli
