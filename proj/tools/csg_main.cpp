#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "csg/harness.hpp"

namespace fs = std::filesystem;
using csg::BudgetError;
using csg::ConfigError;

namespace {

int g_verbosity = 0;

void log_line(const std::string& msg) {
  if (g_verbosity > 0) std::cerr << "[csg] " << msg << "\n";
}

void run_cell(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
  csg::ExperimentConfig cfg = csg::ExperimentConfig::parse(csg::read_file(config_path));
  csg::RunOutput out = csg::run_experiment(cfg, seed);
  fs::create_directories(out_dir);
  const std::string stem =
      fs::path(config_path).stem().string() + "_seed" + std::to_string(seed);
  // Write whole files at once (atomic enough for independent cells).
  csg::write_file((fs::path(out_dir) / (stem + "_transcript.csv")).string(),
                  csg::transcript_to_csv(out.transcript));
  csg::write_file((fs::path(out_dir) / (stem + "_summary.json")).string(),
                  out.summary.dump(2) + "\n");
  log_line("wrote " + stem + " (T=" + std::to_string(out.transcript.size()) + ")");
}

// A..B inclusive.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) throw ConfigError("seed range must look like A..B");
  return {std::stoull(s.substr(0, pos)), std::stoull(s.substr(pos + 2))};
}

// Minimal '*' glob over the filename component.
bool glob_match(const std::string& pattern, const std::string& name) {
  size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* lvl = std::getenv("CSG_LOG")) g_verbosity = std::atoi(lvl);

  CLI::App app{"Calibrated Stackelberg game simulation laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment");
  std::string run_config, run_out = ".";
  std::uint64_t run_seed = 0;
  run->add_option("--config", run_config, "experiment config JSON")->required();
  run->add_option("--seed", run_seed, "root seed")->required();
  run->add_option("--out", run_out, "output directory");

  auto* audit = app.add_subcommand("audit", "audit a transcript");
  std::string audit_transcript_path, audit_game, audit_binning = "deterministic",
              audit_scheme = "default";
  audit->add_option("--transcript", audit_transcript_path)->required();
  audit->add_option("--game", audit_game, "game JSON file (omit for tent binning)");
  audit->add_option("--binning", audit_binning, "deterministic|randomized|tent");
  audit->add_option("--scheme", audit_scheme, "all|dyadic|full|default");

  auto* solve = app.add_subcommand("solve", "solve a game exactly");
  std::string solve_game;
  solve->add_option("--game", solve_game, "game JSON file, or toy id G1/G2")->required();

  auto* batch = app.add_subcommand("batch", "run a batch of (config, seed) cells");
  std::string batch_glob, batch_seeds, batch_out = ".";
  batch->add_option("--configs", batch_glob, "config file glob")->required();
  batch->add_option("--seeds", batch_seeds, "seed range A..B")->required();
  batch->add_option("--out", batch_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      run_cell(run_config, run_seed, run_out);
    } else if (*audit) {
      const bool tent = audit_binning == "tent";
      csg::Transcript tr =
          csg::transcript_from_csv(csg::read_file(audit_transcript_path), tent);
      csg::FiniteGame game;
      const csg::FiniteGame* gp = nullptr;
      if (!tent) {
        if (audit_game.empty()) throw ConfigError("BR binning audit needs --game");
        game = audit_game == "G1" ? csg::make_g1()
                                  : csg::load_game_json(csg::read_file(audit_game));
        gp = &game;
      }
      std::cout << csg::audit_transcript(tr, gp, audit_binning, audit_scheme).dump(2) << "\n";
    } else if (*solve) {
      const std::string text = (solve_game == "G1" || solve_game == "G2")
                                   ? solve_game
                                   : csg::read_file(solve_game);
      std::cout << csg::solve_game_file(text).dump(2) << "\n";
    } else if (*batch) {
      auto [a, b] = parse_seed_range(batch_seeds);
      const fs::path pat(batch_glob);
      const fs::path dir = pat.parent_path().empty() ? "." : pat.parent_path();
      std::vector<std::string> configs;
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() &&
            glob_match(pat.filename().string(), entry.path().filename().string())) {
          configs.push_back(entry.path().string());
        }
      }
      std::sort(configs.begin(), configs.end());
      if (configs.empty()) throw ConfigError("no configs match " + batch_glob);
      for (const auto& c : configs) {
        for (std::uint64_t s = a; s <= b; ++s) run_cell(c, s, batch_out);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
