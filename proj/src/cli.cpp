//  Copyright 2026 The GEACL Simulator Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include "geacl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "geacl/config.hpp"

namespace geacl::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  if (const char* env = std::getenv("GEACL_SIM_JOBS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::string cell(std::optional<double> v) { return v ? format_number(*v) : std::string{}; }

std::vector<std::pair<std::string, std::optional<double>>> summary_of(const ScenarioOutcome& o) {
  return o.report.summary(o.metric_names);
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i > 0) s += ',';
    s += cols[i];
  }
  return s;
}

std::vector<std::string> summary_names(ScenarioKind kind) {
  auto names = core_summary_names();
  const auto& extra = scenario_metric_names(kind);
  names.insert(names.end(), extra.begin(), extra.end());
  return names;
}

// Runs `fn`, mapping config errors to exit 2.
int guarded(std::ostream& log, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return e.code() == Error::Code::kConfig ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw Error(Error::Code::kConfig, "bad seed list '" + text + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(num(part));
      continue;
    }
    const auto lo = num(part.substr(0, dash));
    const auto hi = num(part.substr(dash + 1));
    if (hi < lo) throw Error(Error::Code::kConfig, "bad seed range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

std::vector<std::string> sweep_columns(ScenarioKind kind) {
  std::vector<std::string> cols = {"scenario",      "mode",    "protocol",        "axis",
                                   "value",         "seed",    "n_agents",        "fanout",
                                   "drop_p",        "suppression_k", "corroboration_k",
                                   "environment_hash", "trace_hash"};
  for (const auto& n : summary_names(kind)) cols.push_back(n);
  return cols;
}

std::vector<std::string> compare_columns(ScenarioKind kind) {
  std::vector<std::string> cols = {"scenario", "seed", "environment_hash", "ber"};
  for (const auto& n : summary_names(kind)) {
    cols.push_back(n + "_baseline");
    cols.push_back(n + "_gossip");
    cols.push_back(n + "_delta");
  }
  return cols;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, count))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

int cmd_run(const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const auto cfg = load_run_config(opts.config_path, opts.overrides);
    const auto outcome = run_scenario(cfg);
    prepare_out(opts.out_dir);
    const fs::path dir(opts.out_dir);
    write_file(dir / "report.json", report_json(outcome.report, outcome.metric_names));
    write_file(dir / "report.csv", report_csv(outcome.report, outcome.metric_names));
    if (opts.trace) {
      std::ofstream out(dir / "trace.ndjson", std::ios::binary);
      write_ndjson(outcome.trace, out);
    }
    log << to_string(cfg.scenario) << " " << to_string(cfg.mode) << " seed " << cfg.sim.seed << ": "
        << outcome.report.rounds << " rounds, trace " << outcome.report.trace_hash.substr(0, 16)
        << (outcome.report.timed_out ? " (timed out)" : "") << "\n";
    return outcome.report.timed_out ? kExitTimeout : kExitOk;
  });
}

int cmd_sweep(const RunOptions& opts, const std::string& axis, const std::vector<std::string>& values,
              const std::vector<std::uint64_t>& seeds, std::ostream& log) {
  return guarded(log, [&] {
    if (values.empty()) throw Error(Error::Code::kConfig, "sweep needs at least one value");
    if (seeds.empty()) throw Error(Error::Code::kConfig, "sweep needs at least one seed");
    std::vector<RunConfig> configs;
    for (const auto& v : values) {
      for (auto seed : seeds) {
        auto ov = opts.overrides;
        for (auto& o : axis_overrides(axis, v)) ov.push_back(std::move(o));
        ov.push_back("seed=" + std::to_string(seed));
        configs.push_back(load_run_config(opts.config_path, ov));
      }
    }
    std::vector<ScenarioOutcome> outcomes(configs.size());
    parallel_for(configs.size(), resolve_jobs(opts.jobs),
                 [&](std::size_t i) { outcomes[i] = run_scenario(configs[i]); });

    const auto kind = configs.front().scenario;
    std::string csv = join(sweep_columns(kind)) + "\n";
    bool timed_out = false;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto& c = configs[i];
      const auto& r = outcomes[i].report;
      timed_out |= r.timed_out;
      const auto& g = c.sim.agent.gossip;
      std::vector<std::string> row = {
          std::string(to_string(c.scenario)), std::string(to_string(c.mode)), r.protocol, axis,
          values[i / seeds.size()], std::to_string(c.sim.seed), std::to_string(c.sim.n_agents),
          std::to_string(g.fanout), format_number(c.sim.drop_p), std::to_string(g.suppression_k),
          c.sim.agent.trust.corroboration.enabled ? std::to_string(c.sim.agent.trust.corroboration.k) : "",
          std::to_string(r.environment_hash), r.trace_hash};
      for (const auto& [name, v] : summary_of(outcomes[i])) row.push_back(cell(v));
      csv += join(row) + "\n";
    }
    prepare_out(opts.out_dir);
    write_file(fs::path(opts.out_dir) / "sweep.csv", csv);
    log << "sweep " << axis << ": " << configs.size() << " runs\n";
    return timed_out ? kExitTimeout : kExitOk;
  });
}

int cmd_compare(const RunOptions& opts, const std::vector<std::uint64_t>& seeds, std::ostream& log) {
  return guarded(log, [&] {
    if (seeds.empty()) throw Error(Error::Code::kConfig, "compare needs at least one seed");
    std::vector<RunConfig> configs;
    for (auto seed : seeds) {
      for (const char* mode : {"BaselineDirect", "GossipAugmented"}) {
        auto ov = opts.overrides;
        ov.push_back("seed=" + std::to_string(seed));
        ov.push_back(std::string("mode=") + mode);
        configs.push_back(load_run_config(opts.config_path, ov));
      }
    }
    const auto kind = configs.front().scenario;
    if (kind == ScenarioKind::Walkthrough) {
      throw Error(Error::Code::kConfig, "walkthrough runs in a single mode; nothing to compare");
    }
    std::vector<ScenarioOutcome> outcomes(configs.size());
    parallel_for(configs.size(), resolve_jobs(opts.jobs),
                 [&](std::size_t i) { outcomes[i] = run_scenario(configs[i]); });

    const auto names = summary_names(kind);
    std::string csv = join(compare_columns(kind)) + "\n";
    ordered_json wins = ordered_json::object();
    for (const auto& n : names) wins[n] = {{"gossip_lower", 0}, {"baseline_lower", 0}, {"ties", 0}, {"missing", 0}};
    bool timed_out = false;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& base = outcomes[2 * s];
      const auto& gossip = outcomes[2 * s + 1];
      timed_out |= base.report.timed_out || gossip.report.timed_out;
      const auto bs = summary_of(base);
      const auto gs = summary_of(gossip);
      std::optional<double> ber;
      if (base.report.traffic.bytes > 0) {
        ber = static_cast<double>(gossip.report.traffic.bytes) / static_cast<double>(base.report.traffic.bytes);
      }
      std::vector<std::string> row = {std::string(to_string(kind)), std::to_string(seeds[s]),
                                      std::to_string(gossip.report.environment_hash), cell(ber)};
      for (std::size_t m = 0; m < names.size(); ++m) {
        const auto b = bs[m].second;
        const auto g = gs[m].second;
        std::optional<double> delta;
        auto& w = wins[names[m]];
        if (b && g) {
          delta = *g - *b;
          const char* bucket = *g < *b ? "gossip_lower" : (*b < *g ? "baseline_lower" : "ties");
          w[bucket] = w[bucket].get<int>() + 1;
        } else {
          w["missing"] = w["missing"].get<int>() + 1;
        }
        row.push_back(cell(b));
        row.push_back(cell(g));
        row.push_back(cell(delta));
      }
      csv += join(row) + "\n";
    }
    ordered_json doc;
    doc["scenario"] = to_string(kind);
    doc["seeds"] = seeds;
    doc["runs"] = outcomes.size();
    doc["wins"] = std::move(wins);
    prepare_out(opts.out_dir);
    write_file(fs::path(opts.out_dir) / "compare.csv", csv);
    write_file(fs::path(opts.out_dir) / "compare.json", doc.dump(2) + "\n");
    log << "compare " << to_string(kind) << ": " << seeds.size() << " paired seeds\n";
    return timed_out ? kExitTimeout : kExitOk;
  });
}

int main(int argc, char** argv) {
  CLI::App app{"Gossip-augmented agent coordination simulator"};
  app.require_subcommand(1);

  RunOptions opts;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "run config (JSON)")->required();
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--override", opts.overrides, "KEY=VALUE with a dotted key; repeatable");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_flag("--trace", opts.trace, "persist the event trace");
    sub->add_option("--jobs", opts.jobs, "parallel runs (default GEACL_SIM_JOBS or core count)");
  };

  auto* run = app.add_subcommand("run", "execute one run");
  common(run);

  std::string axis;
  std::vector<std::string> values;
  std::string seeds_text{"1"};
  auto* sweep = app.add_subcommand("sweep", "cross product of axis values and seeds");
  common(sweep);
  sweep->add_option("--axis", axis, "N, fanout, mode, drop_p, suppression_k or k_corroboration")->required();
  sweep->add_option("--values", values, "axis values")->delimiter(',')->required();
  sweep->add_option("--seeds", seeds_text, "seed list, e.g. 1-20 or 1,4,9");

  auto* compare = app.add_subcommand("compare", "paired baseline vs gossip runs");
  common(compare);
  compare->add_option("--seeds", seeds_text, "seed list, e.g. 1-20 or 1,4,9");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (seed) opts.overrides.insert(opts.overrides.begin(), "seed=" + std::to_string(*seed));

  if (run->parsed()) return cmd_run(opts, std::cerr);
  return guarded(std::cerr, [&] {
    const auto seeds = parse_seeds(seeds_text);
    if (sweep->parsed()) return cmd_sweep(opts, axis, values, seeds, std::cerr);
    return cmd_compare(opts, seeds, std::cerr);
  });
}

}  // namespace geacl::cli
