#include "csg/harness.hpp"

#include <chrono>
#include <cmath>

#include "csg/geometry.hpp"

namespace csg {

using nlohmann::json;

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  ExperimentConfig cfg;
  try {
    cfg.raw = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!cfg.raw.contains("game")) throw ConfigError("config missing 'game'");
  if (!cfg.raw.contains("T") || cfg.raw["T"].get<long long>() < 1) {
    throw ConfigError("config needs T >= 1");
  }
  return cfg;
}

namespace {

bool is_continuous(const json& cfg) {
  const auto& g = cfg.at("game");
  return g.contains("toy") && g["toy"].get<std::string>() == "G2";
}

FiniteGame finite_game_from(const json& cfg) {
  const auto& g = cfg.at("game");
  if (g.contains("toy")) {
    const std::string toy = g["toy"].get<std::string>();
    if (toy == "G1") return make_g1();
    throw ConfigError("unknown finite toy game: " + toy);
  }
  if (g.contains("file")) return load_game_json(read_file(g["file"].get<std::string>()));
  if (g.contains("inline")) return load_game_json(g["inline"].dump());
  throw ConfigError("game spec needs 'toy', 'file' or 'inline'");
}

TieRule tie_rule_from(const json& agent) {
  const std::string t = agent.value("tie_rule", std::string("deterministic"));
  if (t == "deterministic") return TieRule::Deterministic;
  if (t == "randomized") return TieRule::Randomized;
  throw ConfigError("unknown tie rule: " + t);
}

ScalarForecaster::Config forecaster_cfg_from(const json& agent) {
  ScalarForecaster::Config fc;
  fc.grid_step = agent.value("grid_step", 0.01);
  fc.eps_nrbr = agent.value("eps_nrbr", std::max(fc.grid_step, 1e-6));
  const std::string ss = agent.value("start_scheme", std::string("every_round"));
  if (ss == "every_round") fc.start_scheme = StartScheme::EveryRound;
  else if (ss == "dyadic") fc.start_scheme = StartScheme::Dyadic;
  else throw ConfigError("unknown start scheme: " + ss);
  return fc;
}

std::unique_ptr<FiniteAgent> finite_agent_from(const json& cfg, const FiniteGame& game) {
  const auto& a = cfg.at("agent");
  const std::string kind = a.at("kind").get<std::string>();
  if (kind == "exact_br") return std::make_unique<ExactBRAgent>(game, tie_rule_from(a));
  if (kind == "scripted") {
    std::vector<Vector> fs;
    for (const auto& row : a.at("forecasts")) {
      Vector p(game.m);
      for (int j = 0; j < game.m; ++j) p[j] = row[j].get<double>();
      fs.push_back(p);
    }
    return std::make_unique<ScriptedForecastAgent>(game, std::move(fs), tie_rule_from(a));
  }
  if (kind == "calibrated") {
    return std::make_unique<CalibratedAgent>(game, forecaster_cfg_from(a), tie_rule_from(a),
                                             a.value("binning", std::string("deterministic")) ==
                                                 "deterministic");
  }
  throw ConfigError("unknown agent kind: " + kind);
}

RateModel rate_from(const json& p) {
  RateModel r;
  if (!p.contains("rate")) return r;
  const auto& j = p["rate"];
  const std::string form = j.value("form", std::string("log_sqrt"));
  if (form == "log_sqrt") r.form = RateModel::Form::LogSqrt;
  else if (form == "power") r.form = RateModel::Form::Power;
  else throw ConfigError("unknown rate form: " + form);
  r.c = j.value("c", 1.0);
  r.beta = j.value("beta", 2.0);
  return r;
}

ParamCase case_from(const std::string& s) {
  if (s == "I") return ParamCase::I;
  if (s == "II") return ParamCase::II;
  if (s == "III") return ParamCase::III;
  throw ConfigError("unknown parameter case: " + s);
}

}  // namespace

json summarize_transcript(const Transcript& tr, const ExperimentConfig& config,
                          std::uint64_t seed) {
  const json& cfg = config.raw;
  json s;
  s["seed"] = seed;
  double avg = 0.0;
  long long explore_rounds = 0;
  for (const auto& row : tr.rows) {
    avg += row.u_p;
    if (row.epoch == 0) ++explore_rounds;
  }
  if (!tr.rows.empty()) avg /= static_cast<double>(tr.rows.size());
  s["avg_principal_utility"] = avg;

  double v_star = 0.0;
  if (is_continuous(cfg)) {
    v_star = solve_continuous(make_g2()).first;
    s["swap_regret"] = nullptr;
    const double tent_eps = cfg.at("agent").value("tent_eps", 0.05);
    const TentBinning tb = build_tent_binning(make_g2().domain, tent_eps);
    const AdaptiveCalErr ac =
        adaptive_cal_err(tr, tb.spec, nullptr, WindowScheme::default_for(tr.size()));
    s["max_adaptive_cal_err"] = ac.max_err;
  } else {
    const FiniteGame game = finite_game_from(cfg);
    v_star = solve_stackelberg(game).value;
    s["swap_regret"] = swap_regret(game, tr);
    const BinningSpec binning = make_br_binning(game, true);
    const AdaptiveCalErr ac =
        adaptive_cal_err(tr, binning, &game, WindowScheme::default_for(tr.size()));
    s["max_adaptive_cal_err"] = ac.max_err;
  }
  s["V_star"] = v_star;
  s["gap"] = v_star - avg;
  const std::string pkind = cfg.at("principal").at("kind").get<std::string>();
  s["phases"] = {{"explore", pkind == "etc" ? explore_rounds : 0},
                 {"commit", pkind == "etc" ? tr.size() - explore_rounds : tr.size()}};
  return s;
}

RunOutput run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  const json& cfg = config.raw;
  const auto t0 = std::chrono::steady_clock::now();
  const long long T = cfg.at("T").get<long long>();
  const auto& pj = cfg.at("principal");
  const std::string pkind = pj.at("kind").get<std::string>();
  RngStream principal_rng = derive_stream(seed, "principal");

  RunOutput out;
  json committed = nullptr;

  if (is_continuous(cfg)) {
    static const ContinuousGame g2 = make_g2();
    const auto& a = cfg.at("agent");
    std::unique_ptr<ContinuousAgent> agent;
    const std::string akind = a.at("kind").get<std::string>();
    if (akind == "exact_br") {
      agent = std::make_unique<ExactBRContinuousAgent>(g2);
    } else if (akind == "calibrated") {
      ScalarForecaster::Config fc = forecaster_cfg_from(a);
      if (!a.contains("grid_step")) fc.grid_step = 0.0;  // default: tent half-step
      agent = std::make_unique<CalibratedContinuousAgent>(g2, a.value("tent_eps", 0.05), fc);
    } else {
      throw ConfigError("unknown continuous agent kind: " + akind);
    }
    ContinuousEnv env(g2, std::move(agent), seed);
    if (pkind == "gdwog") {
      GDwoGConfig gc;
      gc.gamma0 = pj.value("gamma0", 0.5);
      gc.delta0 = pj.value("delta0", 0.3);
      gc.epochs = pj.value("epochs", 100);
      gc.epoch_length = pj.value("epoch_length", 1);
      if (static_cast<long long>(gc.epochs) * gc.epoch_length > T) {
        throw BudgetError("gdwog epochs * epoch_length exceeds T");
      }
      lazy_gdwog(env, gc, principal_rng);
    } else if (pkind == "constant") {
      Vector h(1);
      h << pj.at("h")[0].get<double>();
      for (long long t = 0; t < T; ++t) env.play(h, 0);
    } else {
      throw ConfigError("principal kind '" + pkind + "' unsupported for continuous games");
    }
    out.transcript = env.transcript();
  } else {
    FiniteGame game = finite_game_from(cfg);
    FiniteEnv env(game, finite_agent_from(cfg, game), seed,
                  cfg.value("disclosure", std::string("full")) == "sampled");
    if (pkind == "uniform_random") {
      for (long long t = 0; t < T; ++t) env.play(sample_simplex_uniform(principal_rng, game.m), 0);
    } else if (pkind == "constant") {
      Vector h(game.m);
      for (int j = 0; j < game.m; ++j) h[j] = pj.at("h")[j].get<double>();
      for (long long t = 0; t < T; ++t) env.play(h, 0);
    } else if (pkind == "scripted") {
      std::vector<Vector> hs;
      for (const auto& row : pj.at("strategies")) {
        Vector h(game.m);
        for (int j = 0; j < game.m; ++j) h[j] = row[j].get<double>();
        hs.push_back(h);
      }
      if (hs.empty()) throw ConfigError("scripted principal needs strategies");
      for (long long t = 0; t < T; ++t) env.play(hs[static_cast<size_t>(t) % hs.size()], 0);
    } else if (pkind == "etc") {
      ETCConfig ec;
      ec.T = T;
      ec.which = case_from(pj.value("case", std::string("II")));
      ec.eps2 = pj.value("eps2", 0.05);
      ec.eps1 = pj.value("eps1", ec.eps2);
      ec.delta = pj.value("delta", 0.01);
      ec.eps_prime = pj.value("eps_prime", 0.05);
      ec.eta = pj.value("eta", 0.0);
      ec.init_count = pj.value("init_count", 10);
      ec.max_directions = pj.value("max_directions", 24);
      ec.rate = rate_from(pj);
      if (pj.contains("post_process") && !pj["post_process"].is_null()) {
        PostProcessParams pp;
        const auto& pq = pj["post_process"];
        pp.lambda = pq.value("lambda", 0.01);
        pp.L = pq.value("L", 1);
        pp.c = pq.value("c", 1.0);
        pp.eps = pq.value("eps", ec.eps_prime);
        pp.eta = pq.value("eta", ec.eta);
        ec.post = pp;
      }
      ETCResult r = explore_then_commit(env, ec, principal_rng);
      committed = {{"h", std::vector<double>(r.h_commit.data(), r.h_commit.data() + game.m)},
                   {"y", r.y_commit},
                   {"explore_rounds", r.explore_rounds}};
    } else {
      throw ConfigError("unknown principal kind: " + pkind);
    }
    out.transcript = env.transcript();
  }

  out.summary = summarize_transcript(out.transcript, config, seed);
  out.summary["committed"] = committed;
  out.summary["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

json audit_transcript(const Transcript& tr, const FiniteGame* game,
                      const std::string& binning_kind, const std::string& scheme,
                      double tent_eps) {
  BinningSpec binning;
  if (binning_kind == "deterministic" || binning_kind == "randomized") {
    if (game == nullptr) throw ConfigError("BR binning audit needs a game");
    binning = make_br_binning(*game, binning_kind == "deterministic");
  } else if (binning_kind == "tent") {
    Domain dom;
    dom.kind = Domain::Kind::Box;
    dom.dim = tr.m;
    dom.lo = Vector::Constant(tr.m, -1.0);
    dom.hi = Vector::Constant(tr.m, 1.0);
    binning = build_tent_binning(dom, tent_eps).spec;
  } else {
    throw ConfigError("unknown audit binning: " + binning_kind);
  }
  WindowScheme ws = WindowScheme::default_for(tr.size());
  if (scheme == "all") ws.kind = WindowScheme::Kind::AllPairs;
  else if (scheme == "dyadic") ws.kind = WindowScheme::Kind::Dyadic;
  else if (scheme == "full") ws.kind = WindowScheme::Kind::FullOnly;
  else if (scheme != "default") throw ConfigError("unknown audit scheme: " + scheme);

  const AdaptiveCalErr ac = adaptive_cal_err(tr, binning, game, ws);
  json out;
  out["max_adaptive_cal_err"] = ac.max_err;
  out["worst_window"] = {{"s", ac.worst.s}, {"t", ac.worst.t}, {"bin", ac.worst.bin}};
  json per_bin = json::array();
  for (const auto& wsb : ac.per_bin_full) {
    per_bin.push_back({{"bin", wsb.bin},
                       {"n_eff", wsb.n_eff},
                       {"cal_err", wsb.cal_err}});
  }
  out["per_bin_full_window"] = per_bin;
  out["swap_regret"] = game ? json(swap_regret(*game, tr)) : json(nullptr);
  out["l1_score"] = standard_cal_score(tr, binning, game);
  return out;
}

json solve_game_file(const std::string& game_json_or_toy) {
  json out;
  if (game_json_or_toy == "G2") {
    auto [v, x] = solve_continuous(make_g2());
    out["V_star"] = v;
    out["x_star"] = x;
    return out;
  }
  const FiniteGame game =
      game_json_or_toy == "G1" ? make_g1() : load_game_json(game_json_or_toy);
  const StackelbergSolution sol = solve_stackelberg(game);
  out["V_star"] = sol.value;
  out["h_star"] = std::vector<double>(sol.strategy.data(), sol.strategy.data() + game.m);
  out["y_star"] = sol.agent_action;
  json radii = json::array();
  for (int y = 0; y < game.k; ++y) radii.push_back(chebyshev_radius(game, y).first);
  out["chebyshev_radii"] = radii;
  return out;
}

bool validate_schema(const json& doc, const json& schema, std::string* why) {
  const auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (schema.contains("type")) {
    const std::string t = schema["type"].get<std::string>();
    const bool ok = (t == "object" && doc.is_object()) || (t == "array" && doc.is_array()) ||
                    (t == "number" && doc.is_number()) ||
                    (t == "integer" && doc.is_number_integer()) ||
                    (t == "string" && doc.is_string()) || (t == "boolean" && doc.is_boolean()) ||
                    (t == "null" && doc.is_null()) ||
                    doc.is_null();  // every field is nullable (e.g. swap_regret)
    if (!ok) return fail("type mismatch: expected " + t);
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!doc.contains(key.get<std::string>())) {
        return fail("missing required key: " + key.get<std::string>());
      }
    }
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (doc.contains(key) && !validate_schema(doc[key], sub, why)) return false;
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    for (const auto& el : doc) {
      if (!validate_schema(el, schema["items"], why)) return false;
    }
  }
  return true;
}

}  // namespace csg
