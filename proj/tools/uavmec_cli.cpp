#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uavmec/io.hpp"
#include "uavmec/uavmec.hpp"

namespace {

uavmec::ScenarioConfig config_from(const std::string & path)
{
  return path.empty() ? uavmec::parse_config("") : uavmec::load_config(path);
}

std::vector<std::string> split_list(const std::string & s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_summary(const uavmec::EpisodeSummary & s)
{
  std::printf("%-6s seed=%-4llu avg_uav_energy=%.4f J  avg_queue=%.4f Mbits  avg_system_energy=%.6f J  "
              "final_distance=%.3g m  drift_violations=%d\n",
              s.policy.c_str(), static_cast<unsigned long long>(s.seed), s.avg_uav_energy, s.avg_queue_mbits,
              s.avg_system_energy, s.kinematics.final_distance,
              s.drift.energy_violations + s.drift.data_violations + s.drift.bound_violations);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"UAV-mounted edge computing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string policy_name = "joint";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  auto * run = app.add_subcommand("run", "Run one episode and write trace.csv, positions.csv and summary.json");
  run->add_option("--config", config_path, "Scenario file (flat key = value); defaults when omitted");
  run->add_option("--policy", policy_name, "joint, go or ge")->check(CLI::IsMember({"joint", "go", "ge"}));
  run->add_option("--seed", seed, "Master seed; overrides the config seed when given");
  run->add_option("--out", out_dir, "Output directory");

  std::string policies = "joint,go,ge";
  int seeds = 10;
  std::string sweep_config;
  std::string sweep_out = "sweep";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto * sweep = app.add_subcommand("sweep", "Run every policy on seeds 1..k and report per-policy means");
  sweep->add_option("--policies", policies, "Comma-separated policy list");
  sweep->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--config", sweep_config, "Scenario file");
  sweep->add_option("--out", sweep_out, "Output root; each run goes to <out>/<policy>/seed_<s>");
  sweep->add_option("--jobs", jobs, "Episodes run concurrently")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = config_from(config_path);
      if (run->count("--seed") > 0) cfg.seed = seed;
      const auto trace = uavmec::run_episode(cfg, uavmec::parse_policy(policy_name));
      const auto summary = uavmec::summarize(trace);
      uavmec::write_run(out_dir, trace, summary);
      print_summary(summary);
      return 0;
    }

    const auto base = config_from(sweep_config);
    std::vector<uavmec::PolicyId> ids;
    for (const auto & p : split_list(policies)) ids.push_back(uavmec::parse_policy(p));
    struct Job
    {
      uavmec::PolicyId policy;
      std::uint64_t seed;
    };
    std::vector<Job> work;
    for (auto id : ids)
      for (int s = 1; s <= seeds; ++s) work.push_back({id, static_cast<std::uint64_t>(s)});

    std::vector<uavmec::EpisodeSummary> results(work.size());
    for (std::size_t begin = 0; begin < work.size(); begin += static_cast<std::size_t>(jobs)) {
      const std::size_t end = std::min(work.size(), begin + static_cast<std::size_t>(jobs));
      std::vector<std::future<uavmec::EpisodeSummary>> running;
      for (std::size_t i = begin; i < end; ++i) {
        running.push_back(std::async(std::launch::async, [&, i] {
          auto cfg = base;
          cfg.seed = work[i].seed;
          const auto trace = uavmec::run_episode(cfg, work[i].policy);
          const auto summary = uavmec::summarize(trace);
          const auto dir = std::filesystem::path(sweep_out) / uavmec::to_string(work[i].policy) /
                           ("seed_" + std::to_string(work[i].seed));
          uavmec::write_run(dir, trace, summary);
          return summary;
        }));
      }
      for (std::size_t i = begin; i < end; ++i) {
        results[i] = running[i - begin].get();
        print_summary(results[i]);
      }
    }

    nlohmann::json agg = nlohmann::json::object();
    std::printf("\n%-6s %10s %14s %18s\n", "policy", "uav_J", "queue_Mbits", "system_energy_J");
    for (auto id : ids) {
      double e = 0.0, q = 0.0, es = 0.0;
      int n = 0;
      for (const auto & r : results) {
        if (r.policy != uavmec::to_string(id)) continue;
        e += r.avg_uav_energy;
        q += r.avg_queue_mbits;
        es += r.avg_system_energy;
        ++n;
      }
      e /= n;
      q /= n;
      es /= n;
      std::printf("%-6s %10.4f %14.4f %18.6f\n", uavmec::to_string(id), e, q, es);
      agg[uavmec::to_string(id)] = {{"seeds", n}, {"uav_energy_J", e}, {"ue_queue_Mbits", q}, {"system_energy_J", es}};
    }
    std::filesystem::create_directories(sweep_out);
    std::ofstream(std::filesystem::path(sweep_out) / "aggregate.json") << agg.dump(2) << '\n';
    return 0;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
