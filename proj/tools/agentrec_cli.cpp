// agentrec command line: simulation runs, threshold calibration, HTTP service.
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "agentrec/catalog.hpp"
#include "agentrec/config.hpp"
#include "agentrec/errors.hpp"
#include "agentrec/service.hpp"
#include "agentrec/simulation.hpp"

using namespace agentrec;

namespace {

// "1-20" or "1,2,7" or a mix.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    try {
      if (const auto dash = part.find('-'); dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw InvalidConfig("bad seed range " + part);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(part));
      }
    } catch (const std::logic_error&) {
      throw InvalidConfig("bad seed '" + part + "'");
    }
  }
  if (out.empty()) throw InvalidConfig("no seeds given");
  return out;
}

sim::ExperimentConfig experiment_from(const AppConfig& app) {
  sim::ExperimentConfig e;
  e.engine = app.engine;
  e.simulation = app.simulation;
  e.lexicon = app.load_lexicon();
  return e;
}

AppConfig config_or_default(const std::string& path) {
  return path.empty() ? AppConfig{} : load_config(path);
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agentrec: multi-agent conversational recommender"};
  app.require_subcommand(1);

  std::string config_path;
  std::string variant = "Full";
  std::string seeds = "1";
  std::string out_dir = "out";
  auto* run_sim = app.add_subcommand("run-sim", "simulate users against one variant");
  run_sim->add_option("--config", config_path, "JSON config file");
  run_sim->add_option("--variant", variant, "Full, FixedUniformWeights, NoRefineRound or Tier2Only");
  run_sim->add_option("--seeds", seeds, "seed list, e.g. 1-20 or 1,2,3");
  run_sim->add_option("--out", out_dir, "output directory");

  std::string queries_path;
  bool dry_run = false;
  auto* calibrate = app.add_subcommand("calibrate", "fit tier thresholds to a query mix and write them to the config");
  calibrate->add_option("--config", config_path, "JSON config file")->required();
  calibrate->add_option("--queries", queries_path, "query mix file (turn, coverage, text per line)")->required();
  calibrate->add_flag("--dry-run", dry_run, "print thresholds without writing the config");

  std::size_t count = 10000;
  std::string queries_out = "queries.tsv";
  auto* make_queries = app.add_subcommand("make-queries", "sample a reference query mix from simulated conversations");
  make_queries->add_option("--config", config_path, "JSON config file");
  make_queries->add_option("--seeds", seeds, "seeds to draw worlds from (first one is used, then increments)");
  make_queries->add_option("--count", count, "number of queries");
  make_queries->add_option("--out", queries_out, "output file");

  std::uint64_t world_seed = 1;
  std::string catalog_out = "catalog.tsv";
  auto* make_catalog = app.add_subcommand("make-catalog", "write a synthetic catalog");
  make_catalog->add_option("--config", config_path, "JSON config file");
  make_catalog->add_option("--seed", world_seed, "world seed");
  make_catalog->add_option("--out", catalog_out, "output file");

  std::string config_out = "agentrec.json";
  auto* init_config = app.add_subcommand("init-config", "write a config file with default values");
  init_config->add_option("--out", config_out, "output file");

  int port = -1;
  std::string host = "0.0.0.0";
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--config", config_path, "JSON config file")->required();
  serve->add_option("--port", port, "listen port (overrides config and AGENTREC_PORT)");
  serve->add_option("--host", host, "listen address");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_sim) {
      auto exp = experiment_from(config_or_default(config_path));
      exp.variant = variant;
      exp.seeds = parse_seeds(seeds);
      const auto result = sim::run_experiment(exp);
      sim::write_experiment(result, out_dir);
      const auto& r = result.report;
      std::printf("%s  success@%zu=%.4f  recall@%zu=%.4f  ndcg@%zu=%.4f  avg_turns=%.3f  -> %s\n",
                  r.variant.c_str(), r.k, r.success_at_k, r.k, r.recall_at_k, r.k, r.ndcg_at_k, r.avg_turns,
                  out_dir.c_str());
    } else if (*calibrate) {
      auto cfg = load_config(config_path);
      const auto queries = sim::load_query_mix(queries_path);
      const auto values = sim::complexity_values(queries, cfg.load_lexicon(), cfg.engine);
      const auto th = calibrate_thresholds(values);
      const auto frac = tier_fractions(values, th);
      std::printf("tau1=%.6f tau2=%.6f  fractions rapid=%.4f reasoning=%.4f deep=%.4f (n=%zu)\n", th.rapid_upper,
                  th.reasoning_upper, frac[0], frac[1], frac[2], values.size());
      if (!dry_run) {
        cfg.engine.router.thresholds = th;
        save_config(cfg, config_path);
      }
    } else if (*make_queries) {
      auto exp = experiment_from(config_or_default(config_path));
      exp.seeds = parse_seeds(seeds);
      const auto queries = sim::reference_query_mix(exp, count);
      std::ofstream out(queries_out);
      if (!out) throw InvalidConfig("cannot write " + queries_out);
      out << sim::format_query_mix(queries);
      std::printf("wrote %zu queries to %s\n", queries.size(), queries_out.c_str());
    } else if (*make_catalog) {
      const auto cfg = config_or_default(config_path);
      const auto lexicon = cfg.load_lexicon();
      const auto world = sim::generate_world(world_seed, lexicon.vocab_size(), cfg.simulation.n_items, 1,
                                             cfg.simulation, lexicon);
      save_catalog(world.catalog, catalog_out);
      std::printf("wrote %zu items to %s\n", world.catalog.size(), catalog_out.c_str());
    } else if (*init_config) {
      save_config(AppConfig{}, config_out);
      std::printf("wrote %s\n", config_out.c_str());
    } else if (*serve) {
      auto service = Service::from_config(load_config(config_path));
      if (port < 0) port = service->config().service.port;
      g_service = service.get();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::printf("listening on %s:%d\n", host.c_str(), port);
      std::fflush(stdout);
      if (!service->listen(host, port)) {
        std::fprintf(stderr, "cannot listen on %s:%d\n", host.c_str(), port);
        return 1;
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
