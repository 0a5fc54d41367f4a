// Copyright 2026 the xdial authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end for the simulation framework.

#include <atomic>
#include <csignal>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xdial/annotation.hpp"
#include "xdial/corpus_store.hpp"
#include "xdial/goal.hpp"
#include "xdial/goal_calibration.hpp"
#include "xdial/session_api.hpp"
#include "xdial/session_server.hpp"
#include "xdial/sim_harness.hpp"
#include "xdial/template_nlg.hpp"
#include "xdial/venue_db.hpp"

namespace {

using namespace xdial;
using nlohmann::json;

void emit(const std::string& path, const json& j) {
  const std::string text = corpus::dump(j);
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    corpus::write_text_file(path, text);
  }
}

struct DbSource {
  std::string path;
  std::uint64_t seed = goal::kCalibrationDbSeed;

  void add(CLI::App* app) {
    app->add_option("--db", path, "database JSON (default: generated from --db-seed)");
    app->add_option("--db-seed", seed, "seed of the generated database")->capture_default_str();
  }
  db::Database load() const {
    return path.empty() ? db::generate_database(seed) : db::database_from_json(corpus::read_json_file(path));
  }
};

struct SimOptions {
  std::string level = "da";
  std::string wizard = "rule";
  int max_turns = 40;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--level", level, "da or nl")->capture_default_str();
    app->add_option("--wizard", wizard, "rule or oracle")->capture_default_str();
    app->add_option("--max-turns", max_turns, "cap on utterances")->capture_default_str();
    app->add_option("--seed", seed, "simulation seed")->capture_default_str();
  }
  sim::SimConfig config() const {
    sim::SimConfig cfg;
    cfg.level = sim::level_from_string(level);
    cfg.mode = wizard::mode_from_string(wizard);
    cfg.max_turns = max_turns;
    cfg.seed = seed;
    return cfg;
  }
};

std::vector<corpus::DialogueRecord> read_corpus(const std::string& path) {
  return corpus::import_corpus(corpus::read_json_file(path));
}

json state_json(const corpus::Turn& t) {
  if (t.user_state) return user::to_json(*t.user_state);
  if (t.sys_state) return wizard::to_json(*t.sys_state);
  return nullptr;
}

std::atomic<api::HttpServer*> g_server{nullptr};

void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xdial: cross-domain task-oriented dialogue simulation"};
  app.require_subcommand(1);

  // gen-db
  auto* gen_db = app.add_subcommand("gen-db", "generate a synthetic venue database");
  std::uint64_t db_seed = 1;
  db::GenOptions gen;
  std::string db_out;
  gen_db->add_option("--seed", db_seed)->capture_default_str();
  gen_db->add_option("--attr", gen.sizes.attraction, "attractions")->capture_default_str();
  gen_db->add_option("--rest", gen.sizes.restaurant, "restaurants")->capture_default_str();
  gen_db->add_option("--hotel", gen.sizes.hotel, "hotels")->capture_default_str();
  gen_db->add_option("--out", db_out, "output file (default stdout)");
  gen_db->callback([&] {
    const auto db = db::generate_database(db_seed, gen);
    emit(db_out, db::to_json(db));
    std::cerr << "attractions " << db.size(Domain::Attraction) << ", restaurants " << db.size(Domain::Restaurant)
              << ", hotels " << db.size(Domain::Hotel) << "\n";
  });

  // gen-goals
  auto* gen_goals = app.add_subcommand("gen-goals", "sample user goals");
  DbSource goals_db;
  goals_db.add(gen_goals);
  int n_goals = 10;
  std::uint64_t goal_seed = 0;
  std::string goals_out;
  gen_goals->add_option("--n", n_goals)->capture_default_str();
  gen_goals->add_option("--seed", goal_seed)->capture_default_str();
  gen_goals->add_option("--out", goals_out, "output file (default stdout)");
  gen_goals->callback([&] {
    const auto db = goals_db.load();
    goal::GoalGenConfig cfg;
    json list = json::array();
    for (int i = 0; i < n_goals; ++i) {
      cfg.seed = Rng::derive(goal_seed, static_cast<std::uint64_t>(i));
      list.push_back(goal::to_json(goal::generate_goal(cfg, db)));
    }
    emit(goals_out, list);
  });

  // calibrate-goals
  auto* calibrate = app.add_subcommand("calibrate-goals", "grid-search the goal generator probabilities");
  DbSource cal_db;
  cal_db.add(calibrate);
  goal::CalibrationOptions cal_opt;
  std::string cal_out;
  calibrate->add_option("--coarse-goals", cal_opt.coarse_goals)->capture_default_str();
  calibrate->add_option("--fine-goals", cal_opt.fine_goals)->capture_default_str();
  calibrate->add_option("--tuple-goals", cal_opt.tuple_goals)->capture_default_str();
  calibrate->add_option("--seed", cal_opt.seed)->capture_default_str();
  calibrate->add_option("--out", cal_out, "full grid as JSON");
  calibrate->callback([&] {
    const auto r = goal::calibrate({}, cal_db.load(), {}, cal_opt);
    if (!cal_out.empty()) emit(cal_out, r.to_json());
    std::cout << r.to_json()["best"].dump(2) << "\n";
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run closed-loop sessions");
  DbSource sim_db;
  sim_db.add(simulate);
  SimOptions sim_opt;
  sim_opt.add(simulate);
  std::string goal_file, goal_type, sim_out;
  int n_sessions = 1;
  simulate->add_option("--goal", goal_file, "goal JSON, or a list of goals");
  simulate->add_option("--goal-type", goal_type, "S, M, M+T, CM or CM+T");
  simulate->add_option("--n", n_sessions, "sessions when sampling goals")->capture_default_str();
  simulate->add_option("--out", sim_out, "corpus output (default stdout)");
  simulate->callback([&] {
    const auto db = sim_db.load();
    const auto cfg = sim_opt.config();
    std::vector<goal::UserGoal> goals;
    if (!goal_file.empty()) {
      const json j = corpus::read_json_file(goal_file);
      if (j.is_array()) {
        for (const auto& g : j) goals.push_back(goal::goal_from_json(g));
      } else {
        goals.push_back(goal::goal_from_json(j));
      }
    } else {
      for (int k = 0; k < n_sessions; ++k) {
        const auto s = Rng::derive(cfg.seed, static_cast<std::uint64_t>(k));
        if (goal_type.empty()) {
          goal::GoalGenConfig g = cfg.goals;
          g.seed = Rng::derive(s, 0);
          goals.push_back(goal::generate_goal(g, db));
        } else {
          goals.push_back(sim::sample_goal_of_type(cfg.goals, db, goal::goal_type_from_string(goal_type),
                                                   Rng::derive(s, 0)));
        }
      }
    }
    std::vector<corpus::DialogueRecord> records;
    int finished = 0;
    for (std::size_t k = 0; k < goals.size(); ++k) {
      records.push_back(sim::run_session(cfg, db, goals[k], Rng::derive(cfg.seed, k), "session-" + std::to_string(k)));
      finished += records.back().meta.finished.value_or(false) ? 1 : 0;
    }
    emit(sim_out, corpus::export_corpus(records));
    std::cerr << finished << " of " << records.size() << " sessions finished\n";
  });

  // finish-rate
  auto* finish = app.add_subcommand("finish-rate", "task finish rate per goal type");
  DbSource fr_db;
  fr_db.add(finish);
  SimOptions fr_opt;
  fr_opt.add(finish);
  int n_runs = 1000;
  std::vector<std::string> type_names;
  std::string fr_out;
  bool fr_with_corpus = false;
  finish->add_option("--n-runs", n_runs, "sessions per goal type")->capture_default_str();
  finish->add_option("--types", type_names, "goal types (default all)");
  finish->add_option("--out", fr_out, "export file (default stdout)");
  finish->add_flag("--with-corpus", fr_with_corpus, "include every dialogue in the export");
  finish->callback([&] {
    auto cfg = fr_opt.config();
    cfg.n_runs = n_runs;
    std::vector<goal::GoalType> types;
    for (const auto& t : type_names) types.push_back(goal::goal_type_from_string(t));
    if (types.empty()) types.assign(goal::kAllGoalTypes.begin(), goal::kAllGoalTypes.end());
    const auto r = sim::finish_rate(cfg, fr_db.load(), types);
    emit(fr_out, fr_with_corpus ? r.to_json() : r.summary());
    if (!fr_out.empty()) {
      for (const auto& [t, tr] : r.by_type) std::cerr << goal::to_string(t) << " " << tr.rate() << "\n";
    }
  });

  // serve
  auto* serve = app.add_subcommand("serve", "JSON-over-HTTP session service");
  DbSource serve_db;
  serve_db.add(serve);
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->callback([&] {
    const auto db = serve_db.load();
    api::SessionManager sessions(db);
    api::HttpServer server(sessions);
    if (!server.bind(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving on http://" << host << ":" << port << " (api_version " << api::kApiVersion << ")\n";
    server.listen_after_bind();
    g_server = nullptr;
  });

  // annotate
  auto* annotate = app.add_subcommand("annotate", "derive dialogue acts again, in place");
  DbSource ann_db;
  ann_db.add(annotate);
  std::string ann_in, ann_out;
  annotate->add_option("--in", ann_in, "corpus JSON")->required();
  annotate->add_option("--out", ann_out, "output (default: overwrite --in)");
  annotate->callback([&] {
    const auto db = ann_db.load();
    auto records = read_corpus(ann_in);
    int changed = 0;
    for (auto& r : records) changed += sim::annotate(r, db);
    emit(ann_out.empty() ? ann_in : ann_out, corpus::export_corpus(records));
    std::cerr << changed << " turns changed\n";
  });

  // agreement
  auto* agree = app.add_subcommand("agreement", "compare two annotations of one corpus");
  std::string gold_in, pred_in, agree_out;
  agree->add_option("--gold", gold_in)->required();
  agree->add_option("--pred", pred_in)->required();
  agree->add_option("--out", agree_out, "report (default stdout)");
  agree->callback([&] {
    const auto gold = read_corpus(gold_in);
    const auto pred = read_corpus(pred_in);
    std::map<std::string, const corpus::DialogueRecord*> by_id;
    for (const auto& r : pred) by_id[r.id] = &r;
    std::vector<ActList> ga, pa;
    std::vector<json> gs, ps;
    for (const auto& g : gold) {
      auto it = by_id.find(g.id);
      if (it == by_id.end()) throw std::runtime_error("dialogue " + g.id + " is missing from " + pred_in);
      if (it->second->turns.size() != g.turns.size()) {
        throw std::runtime_error("dialogue " + g.id + " has a different number of turns");
      }
      for (std::size_t i = 0; i < g.turns.size(); ++i) {
        ga.push_back(g.turns[i].acts);
        pa.push_back(it->second->turns[i].acts);
        gs.push_back(state_json(g.turns[i]));
        ps.push_back(state_json(it->second->turns[i]));
      }
    }
    emit(agree_out, annotation::agreement(ga, pa, gs, ps).to_json());
  });

  // nlg-extract
  auto* extract = app.add_subcommand("nlg-extract", "collect delexicalized templates from a corpus");
  std::string ex_in, ex_out;
  extract->add_option("--in", ex_in, "corpus JSON with utterances")->required();
  extract->add_option("--out", ex_out, "template store (default stdout)");
  extract->callback([&] {
    nlg::TemplateStore store;
    int used = 0;
    for (const auto& r : read_corpus(ex_in)) {
      for (const auto& t : r.turns) {
        if (t.utterance.empty() || t.acts.empty()) continue;
        nlg::extract(store, t.role == corpus::Speaker::User ? nlg::Role::User : nlg::Role::System, t.acts,
                     t.utterance);
        ++used;
      }
    }
    emit(ex_out, store.to_json());
    std::cerr << used << " turns, " << store.size() << " keys\n";
  });

  // nlg-gen
  auto* nlg_gen = app.add_subcommand("nlg-gen", "render acts with templates");
  std::string gen_templates, gen_in, gen_out, gen_acts, gen_role = "sys";
  std::uint64_t gen_seed = 0;
  nlg_gen->add_option("--templates", gen_templates, "template store (default: bundled English)");
  nlg_gen->add_option("--in", gen_in, "corpus whose utterances are regenerated");
  nlg_gen->add_option("--acts", gen_acts, "one act list as JSON, rendered to stdout");
  nlg_gen->add_option("--role", gen_role, "usr or sys, with --acts")->capture_default_str();
  nlg_gen->add_option("--seed", gen_seed)->capture_default_str();
  nlg_gen->add_option("--out", gen_out, "corpus output with --in (default stdout)");
  nlg_gen->callback([&] {
    const nlg::TemplateStore store = gen_templates.empty()
                                         ? nlg::TemplateStore::english()
                                         : nlg::TemplateStore::from_json(corpus::read_json_file(gen_templates));
    Rng rng(gen_seed);
    if (!gen_acts.empty()) {
      std::cout << nlg::generate(store, nlg::role_from_string(gen_role), acts_from_json(corpus::parse(gen_acts)), rng)
                << "\n";
      return;
    }
    if (gen_in.empty()) throw CLI::ValidationError("nlg-gen", "needs --in or --acts");
    auto records = read_corpus(gen_in);
    std::vector<std::string> hyp;
    std::vector<std::vector<std::string>> refs;
    int missing = 0;
    for (auto& r : records) {
      for (auto& t : r.turns) {
        if (t.acts.empty()) continue;
        const auto role = t.role == corpus::Speaker::User ? nlg::Role::User : nlg::Role::System;
        std::string text;
        try {
          text = nlg::generate(store, role, t.acts, rng);
        } catch (const nlg::NoTemplate&) {
          ++missing;
        }
        if (!t.utterance.empty()) {
          hyp.push_back(text);
          refs.push_back({t.utterance});
        }
        t.utterance = text;
      }
    }
    emit(gen_out, corpus::export_corpus(records));
    std::cerr << missing << " turns without a template";
    if (!hyp.empty()) std::cerr << ", BLEU against the input text " << nlg::corpus_bleu(hyp, refs);
    std::cerr << "\n";
  });

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics");
  std::string st_in, st_out, st_csv;
  stats->add_option("--in", st_in, "corpus JSON")->required();
  stats->add_option("--out", st_out, "stats JSON (default stdout)");
  stats->add_option("--csv", st_csv, "turn histogram CSV");
  stats->callback([&] {
    const auto s = corpus::compute_stats(read_corpus(st_in));
    emit(st_out, corpus::to_json(s));
    if (!st_csv.empty()) corpus::write_text_file(st_csv, corpus::histogram_csv(s));
  });

  // import-release
  auto* import = app.add_subcommand("import-release", "convert the released corpus to the canonical schema");
  std::string im_in, im_out, im_split;
  import->add_option("--in", im_in, "released JSON (object keyed by dialogue id)")->required();
  import->add_option("--out", im_out, "canonical corpus (default stdout)");
  import->add_option("--split", im_split, "split label, e.g. train");
  import->callback([&] {
    const auto records = corpus::import_release(corpus::read_json_file(im_in), im_split);
    emit(im_out, corpus::export_corpus(records));
    std::cerr << records.size() << " dialogues imported\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
