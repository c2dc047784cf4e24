// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// percept-tok: command-line front end. Precedence for every knob is
// config file > command-line flag > PERCEPT_TOK_SEED (seed only) > default.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "percept_tok/config.hpp"
#include "percept_tok/datagen.hpp"
#include "percept_tok/error.hpp"
#include "percept_tok/eval.hpp"
#include "percept_tok/grammar.hpp"
#include "percept_tok/io.hpp"
#include "percept_tok/losses.hpp"
#include "percept_tok/parallel.hpp"

namespace fs = std::filesystem;
using namespace percept;

namespace {

std::string tokens_to_text(std::span<const TokenId> tokens, const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += vocab.id_to_surface(tokens[i]);
  }
  return out + '\n';
}

std::vector<TokenId> read_tokens(const std::string& path, const Vocabulary& vocab) {
  std::istringstream in(io::read_file(path));
  std::vector<TokenId> out;
  std::string word;
  while (in >> word) out.push_back(vocab.surface_to_id(word));
  return out;
}

Distribution read_distribution(const std::string& path) {
  try {
    Distribution d{nlohmann::json::parse(io::read_file(path)).get<std::vector<double>>()};
    return d;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, path + ": expected a JSON array of probabilities (" + e.what() + ")");
  }
}

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  io::write_file_atomic(path, out);
}

struct Cli {
  RunConfig cfg;
  std::string config_path;
  bool seed_given = false;

  // Resolves precedence once flags are parsed.
  void finalize(const CLI::App& app) {
    seed_given = app.get_option("--seed")->count() > 0;
    if (!seed_given) {
      if (const char* env = std::getenv("PERCEPT_TOK_SEED")) {
        try {
          cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
          fail(ErrorCode::kInvalidArgument, "PERCEPT_TOK_SEED must be an unsigned integer");
        }
      }
    }
    if (!config_path.empty()) cfg.merge_file(config_path);
    if (cfg.jobs <= 0) cfg.jobs = default_jobs();
    cfg.corpus.bench = cfg.bench;
    cfg.corpus.jobs = cfg.jobs;
  }

  Vocabulary vocab() const { return Vocabulary::load(cfg.paths.vocab); }
  Codebook codebook() const { return load_codebook(cfg.paths.codebook); }
  PromptTemplates templates() const {
    return cfg.paths.templates.empty() ? PromptTemplates::defaults() : PromptTemplates::load(cfg.paths.templates);
  }
};

std::vector<DepthMap> suite_depth_maps(const std::string& suite_path, std::span<const BenchmarkItem> items) {
  const fs::path base = fs::path(suite_path).parent_path();
  std::vector<DepthMap> maps;
  for (const auto& item : items) {
    maps.push_back(canonicalize(read_pgm((base / item.depth_pgm_path).string())));
  }
  return maps;
}

void print_report(const EvalReport& r, const std::string& report_path) {
  std::cout << r.to_table();
  if (!report_path.empty()) io::write_file_atomic(report_path, r.to_json().dump(2) + '\n');
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  RunConfig& cfg = cli.cfg;
  CLI::App app{"Perception-token toolkit: tokenizers, data synthesis, constrained decoding, evaluation"};
  app.name("percept-tok");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Random seed (falls back to $PERCEPT_TOK_SEED)");
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--config", cli.config_path, "JSON config; its values override flags");
  app.add_option("--vocab", cfg.paths.vocab, "Vocabulary JSON")->capture_default_str();
  app.add_option("--codebook", cfg.paths.codebook, "Codebook JSON header")->capture_default_str();

  std::function<void()> action;

  // vocab
  auto* vocab_cmd = app.add_subcommand("vocab", "Vocabulary files");
  vocab_cmd->require_subcommand(1);
  auto* vocab_build = vocab_cmd->add_subcommand("build", "Write the expanded vocabulary");
  std::string vocab_out = "vocab.json";
  vocab_build->add_option("--base-size", cfg.base_size, "Number of base tokens")->capture_default_str();
  vocab_build->add_option("--out", vocab_out, "Output path")->capture_default_str();
  vocab_build->callback([&] {
    action = [&] {
      const Vocabulary v = Vocabulary::build(cfg.base_size);
      v.save(vocab_out);
      std::cout << "wrote " << vocab_out << " (" << v.size() << " tokens)\n";
    };
  });

  // codebook
  auto* cb_cmd = app.add_subcommand("codebook", "Depth codebook training and coding");
  cb_cmd->require_subcommand(1);
  auto* cb_train = cb_cmd->add_subcommand("train", "Train the patch codebook");
  std::string cb_out = "codebook.json";
  std::string pgm_dir;
  cb_train->add_option("--maps", cfg.codebook.maps, "Procedural training maps")->capture_default_str();
  cb_train->add_option("--pgm-dir", pgm_dir, "Train on every *.pgm in this directory instead");
  cb_train->add_option("--k", cfg.codebook.k, "Codebook size")->capture_default_str();
  cb_train->add_option("--patches-per-map", cfg.codebook.patches_per_map, "Patches sampled per map (0 = all)")
      ->capture_default_str();
  cb_train->add_option("--max-iters", cfg.codebook.max_iters)->capture_default_str();
  cb_train->add_option("--tol", cfg.codebook.tol)->capture_default_str();
  cb_train->add_option("--out", cb_out, "Output header path (.bin sidecar alongside)")->capture_default_str();
  cb_train->callback([&] {
    action = [&] {
      std::vector<DepthMap> maps;
      if (!pgm_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(pgm_dir)) {
          if (e.path().extension() == ".pgm") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) maps.push_back(canonicalize(read_pgm(f.string())));
      } else {
        for (auto& s : make_scenes(cfg.seed, SceneStream::kCodebook, cfg.codebook.maps, {}, cfg.jobs)) {
          maps.push_back(std::move(s.depth));
        }
      }
      const PatchSet patches = training_patches(maps, cfg.codebook.patches_per_map, cfg.seed);
      TrainOptions opts;
      opts.k = cfg.codebook.k;
      opts.seed = cfg.seed;
      opts.max_iters = cfg.codebook.max_iters;
      opts.tol = cfg.codebook.tol;
      opts.jobs = cfg.jobs;
      TrainStats stats;
      const Codebook cb = train_codebook(patches, opts, &stats);
      save_codebook(cb_out, cb);
      std::cout << "trained k=" << cb.k << " on " << patches.size() << " patches from " << maps.size()
                << " maps; " << stats.iterations << " iterations, final mse " << stats.objective.back()
                << "\nwrote " << cb_out << "\n";
    };
  });

  auto* cb_encode = cb_cmd->add_subcommand("encode", "Depth PGM -> depth-token span");
  std::string enc_in, enc_out;
  cb_encode->add_option("--in", enc_in, "Input PGM")->required();
  cb_encode->add_option("--out", enc_out, "Output token file")->required();
  cb_encode->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      const CodeGrid grid = encode(canonicalize(read_pgm(enc_in)), cli.codebook(), cfg.jobs);
      io::write_file_atomic(enc_out, tokens_to_text(grid_to_tokens(grid, v), v));
    };
  });

  auto* cb_decode = cb_cmd->add_subcommand("decode", "Depth-token span -> 320x320 PGM");
  std::string dec_in, dec_out;
  cb_decode->add_option("--in", dec_in, "Input token file")->required();
  cb_decode->add_option("--out", dec_out, "Output PGM")->required();
  cb_decode->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      const DepthMap map = decode(tokens_to_grid(read_tokens(dec_in, v), v), cli.codebook());
      io::write_file_atomic(dec_out, encode_pgm(map));
    };
  });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Training-corpus synthesis");
  synth_cmd->require_subcommand(1);
  synth_cmd->add_option("--templates", cfg.paths.templates, "Prompt template JSON");
  std::string synth_out;
  auto* synth_depth = synth_cmd->add_subcommand("depth", "depth_gen + depth CoT/direct samples");
  synth_depth->add_option("--n", cfg.corpus.depth_gen, "depth_gen samples")->capture_default_str();
  synth_depth->add_option("--cot-images", cfg.corpus.depth_cot_images, "Images with a CoT + direct pair")
      ->capture_default_str();
  synth_depth->add_option("--out", synth_out, "Output JSONL")->required();
  synth_depth->callback([&] {
    action = [&] {
      const Corpus c = build_depth_corpus(cfg.corpus, cli.codebook(), cli.vocab(), cli.templates(), cfg.seed);
      io::write_file_atomic(synth_out, corpus_to_jsonl(c.samples, cli.vocab()));
      std::cout << "wrote " << c.samples.size() << " samples to " << synth_out << " (" << c.skipped
                << " CoT images skipped)\n";
    };
  });
  auto* synth_count_cmd = synth_cmd->add_subcommand("count", "bbox_gen + counting CoT/direct samples");
  synth_count_cmd->add_option("--bbox-gen", cfg.corpus.bbox_gen)->capture_default_str();
  synth_count_cmd->add_option("--cot", cfg.corpus.count_cot)->capture_default_str();
  synth_count_cmd->add_option("--direct", cfg.corpus.count_direct)->capture_default_str();
  synth_count_cmd->add_option("--out", synth_out, "Output JSONL")->required();
  synth_count_cmd->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      const Corpus c = build_count_corpus(cfg.corpus, v, cli.templates(), cfg.seed);
      io::write_file_atomic(synth_out, corpus_to_jsonl(c.samples, v));
      std::cout << "wrote " << c.samples.size() << " samples to " << synth_out << "\n";
    };
  });

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark suites");
  bench_cmd->require_subcommand(1);
  auto* bench_gen = bench_cmd->add_subcommand("gen", "Relative-depth suites, depth PGMs and a counting suite");
  std::vector<int> bench_ns{2, 3, 4, 5};
  std::string bench_dir = "bench";
  bench_gen->add_option("--n", bench_ns, "Marker counts (2..5)")->capture_default_str();
  bench_gen->add_option("--scenes", cfg.bench_scenes, "Scenes per suite")->capture_default_str();
  bench_gen->add_option("--delta-depth", cfg.bench.delta_depth)->capture_default_str();
  bench_gen->add_option("--delta-xy", cfg.bench.delta_xy_fraction, "Fraction of min(W,H)")->capture_default_str();
  bench_gen->add_option("--band-lo", cfg.bench.band_lo)->capture_default_str();
  bench_gen->add_option("--band-hi", cfg.bench.band_hi)->capture_default_str();
  bench_gen->add_option("--max-attempts", cfg.bench.max_attempts)->capture_default_str();
  bench_gen->add_option("--out-dir", bench_dir)->capture_default_str();
  bench_gen->callback([&] {
    action = [&] {
      const auto scenes = make_scenes(cfg.seed, SceneStream::kBenchmark, cfg.bench_scenes, {}, cfg.jobs);
      const fs::path dir(bench_dir);
      for (const auto& s : scenes) io::write_file_atomic(join(dir / "depth", s.id + ".pgm"), encode_pgm(s.depth));
      for (int n : bench_ns) {
        const BenchmarkSuite suite = build_benchmark(scenes, n, cfg.bench, cfg.seed);
        std::vector<std::string> lines;
        for (const auto& item : suite.items) lines.push_back(bench_item_to_jsonl(item));
        const std::string path = join(dir, "bench_n" + std::to_string(n) + ".jsonl");
        write_lines(path, lines);
        std::cout << "wrote " << suite.items.size() << " items to " << path << " (" << suite.skipped
                  << " scenes infeasible)\n";
      }
      std::vector<std::string> lines;
      for (const auto& item : build_count_suite(scenes, cfg.seed)) lines.push_back(count_item_to_jsonl(item));
      write_lines(join(dir, "count.jsonl"), lines);
      std::cout << "wrote " << lines.size() << " items to " << join(dir, "count.jsonl") << "\n";
    };
  });

  auto* bench_oracle = bench_cmd->add_subcommand("oracle", "Ground-truth-token responses for a suite");
  std::string oracle_kind = "depth", oracle_suite, oracle_out;
  bool bilinear = false;
  bench_oracle->add_option("--kind", oracle_kind)->check(CLI::IsMember({"depth", "count"}))->capture_default_str();
  bench_oracle->add_option("--suite", oracle_suite)->required();
  bench_oracle->add_option("--out", oracle_out)->required();
  bench_oracle->add_flag("--bilinear", bilinear, "Bilinear disparity lookup");
  bench_oracle->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      std::vector<Response> responses;
      if (oracle_kind == "depth") {
        std::vector<BenchmarkItem> items;
        for (const auto& l : io::read_lines(oracle_suite)) items.push_back(bench_item_from_jsonl(l));
        const auto maps = suite_depth_maps(oracle_suite, items);
        responses = oracle_depth_responses(items, maps, cli.codebook(), v, bilinear);
      } else {
        std::vector<CountItem> items;
        for (const auto& l : io::read_lines(oracle_suite)) items.push_back(count_item_from_jsonl(l));
        responses = oracle_count_responses(items, v);
      }
      std::vector<std::string> lines;
      for (const auto& r : responses) lines.push_back(response_to_jsonl(r, v));
      write_lines(oracle_out, lines);
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score responses against a suite");
  eval_cmd->require_subcommand(1);
  std::string eval_suite, eval_responses, eval_report;
  for (auto* sub : {eval_cmd->add_subcommand("depth", "Relative-depth accuracy"),
                    eval_cmd->add_subcommand("count", "Counting accuracy")}) {
    sub->add_option("--suite", eval_suite)->required();
    sub->add_option("--responses", eval_responses)->required();
    sub->add_option("--report", eval_report, "Write the JSON report here");
    if (sub->get_name() == "depth") {
      sub->add_flag("--bilinear", bilinear, "Bilinear disparity lookup");
      sub->callback([&] {
        action = [&] {
          const Vocabulary v = cli.vocab();
          std::vector<BenchmarkItem> items;
          for (const auto& l : io::read_lines(eval_suite)) items.push_back(bench_item_from_jsonl(l));
          const auto report = relative_depth_accuracy(read_responses(eval_responses, v), items, cli.codebook(), v,
                                                      {bilinear});
          std::cout << report.label.to_table() << report.map_consistency.to_table();
          if (!eval_report.empty()) {
            nlohmann::ordered_json j;
            j["label"] = report.label.to_json();
            j["map_consistency"] = report.map_consistency.to_json();
            io::write_file_atomic(eval_report, j.dump(2) + '\n');
          }
        };
      });
    } else {
      sub->callback([&] {
        action = [&] {
          const Vocabulary v = cli.vocab();
          std::vector<CountItem> items;
          for (const auto& l : io::read_lines(eval_suite)) items.push_back(count_item_from_jsonl(l));
          print_report(counting_accuracy(read_responses(eval_responses, v), items, v), eval_report);
        };
      });
    }
  }

  // loss
  auto* loss_cmd = app.add_subcommand("loss", "Loss evaluation");
  loss_cmd->require_subcommand(1);
  auto* loss_recon = loss_cmd->add_subcommand("recon", "MSE of a predicted depth span against a target map");
  std::string loss_pred, loss_target;
  loss_recon->add_option("--pred", loss_pred, "Predicted token file")->required();
  loss_recon->add_option("--target", loss_target, "Target PGM")->required();
  loss_recon->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      const double mse = recon_mse(read_tokens(loss_pred, v), canonicalize(read_pgm(loss_target)), cli.codebook(), v);
      std::printf("%.17g\n", mse);
    };
  });
  auto* loss_distill = loss_cmd->add_subcommand("distill", "Distillation loss of q (codes) against p (V')");
  std::string loss_q, loss_p;
  loss_distill->add_option("--q", loss_q, "JSON array over specialist codes")->required();
  loss_distill->add_option("--p", loss_p, "JSON array over the vocabulary")->required();
  loss_distill->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      const double loss = distill_loss(read_distribution(loss_q), read_distribution(loss_p),
                                       SpecialistMapping::identity(v), cfg.epsilon);
      std::printf("%.17g\n", loss);
    };
  });

  // mask-serve
  auto* mask_cmd = app.add_subcommand("mask-serve", "Serve grammar masks over stdin/stdout");
  mask_cmd->add_option("--grammar", cfg.grammar, "Built-in grammar name or JSON path")->capture_default_str();
  mask_cmd->callback([&] {
    action = [&] {
      const Vocabulary v = cli.vocab();
      const auto names = GrammarAutomaton::builtin_names();
      const GrammarAutomaton g = std::find(names.begin(), names.end(), cfg.grammar) != names.end()
                                     ? GrammarAutomaton::builtin(cfg.grammar, v)
                                     : GrammarAutomaton::load(cfg.grammar, v);
      MaskService service(g);
      service.serve(std::cin, std::cout);
    };
  });

  // config
  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration as JSON");
  config_cmd->callback([&] { action = [&] { std::cout << cfg.to_json().dump(2) << "\n"; }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    // Help for the deepest subcommand reached before the error.
    const CLI::App* at = &app;
    while (!at->get_subcommands().empty()) at = at->get_subcommands().front();
    std::cerr << "error: Usage: " << e.what() << "\n" << at->help();
    return 2;
  }
  try {
    cli.finalize(app);
    if (action) action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
