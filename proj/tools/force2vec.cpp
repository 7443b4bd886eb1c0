// Command-line front end: embed graphs, evaluate embeddings, export 2-D
// layouts, and sweep hyperparameters.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "force2vec/csr_graph.hpp"
#include "force2vec/embedding_io.hpp"
#include "force2vec/evaluation.hpp"
#include "force2vec/trainer.hpp"

namespace f2v = force2vec;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumerical = 4;

unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

f2v::CsrGraph load_graph(const std::string& path, const std::string& format,
                         bool symmetrize, f2v::LoadStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw f2v::IoError("cannot open input file: " + path);
  f2v::LoadOptions opts;
  opts.symmetrize = symmetrize;
  std::string fmt = format;
  if (fmt == "auto")
    fmt = path.size() > 4 && path.substr(path.size() - 4) == ".mtx" ? "mtx"
                                                                    : "edgelist";
  if (fmt == "mtx") return f2v::load_matrix_market(in, opts, stats);
  if (fmt == "edgelist") return f2v::load_edge_list(in, opts, stats);
  throw f2v::UsageError("unknown format \"" + format + "\"");
}

f2v::EmbeddingMatrix load_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw f2v::IoError("cannot open embedding file: " + path);
  return f2v::read_embedding(in);
}

struct EmbedFlags {
  std::string input;
  std::string format = "auto";
  std::string output;
  std::string model = "sigmoid";
  std::uint32_t dim = 128;
  std::uint32_t epochs = 1200;
  f2v::VertexId batch = 384;
  std::uint32_t nsamples = 6;
  double lr = 0.02;
  std::uint32_t walk_length = 0;
  unsigned workers = default_workers();
  std::uint64_t seed = 1;
  bool monitor_loss = false;
  bool symmetrize = true;
  std::string lr_decay = "constant";
};

void add_embed_flags(CLI::App* cmd, EmbedFlags& f, bool need_output) {
  cmd->add_option("--input", f.input, "graph file")->required();
  cmd->add_option("--format", f.format, "edgelist|mtx|auto")
      ->check(CLI::IsMember({"edgelist", "mtx", "auto"}));
  auto* out = cmd->add_option("--output", f.output, "embedding output path");
  if (need_output) out->required();
  cmd->add_option("--model", f.model, "sigmoid|tdist|fr|fa|linlog")
      ->check(CLI::IsMember({"sigmoid", "tdist", "fr", "fa", "linlog"}));
  cmd->add_option("--dim", f.dim)->check(CLI::Range(1u, 1u << 20));
  cmd->add_option("--epochs", f.epochs)->check(CLI::Range(1u, ~0u));
  cmd->add_option("--batch", f.batch)->check(CLI::Range(f2v::VertexId(1), ~f2v::VertexId(0)));
  cmd->add_option("--nsamples", f.nsamples)->check(CLI::Range(1u, ~0u));
  cmd->add_option("--lr", f.lr)->check(CLI::PositiveNumber);
  cmd->add_option("--walk-length", f.walk_length,
                  "0 = one-hop contexts; >0 = random-walk contexts");
  cmd->add_option("--workers", f.workers)
      ->envname("FORCE2VEC_WORKERS")
      ->check(CLI::Range(1u, 4096u));
  cmd->add_option("--seed", f.seed)->envname("FORCE2VEC_SEED");
  cmd->add_flag("--monitor-loss", f.monitor_loss,
                "print per-epoch loss lines on stderr");
  cmd->add_flag("--symmetrize,!--no-symmetrize", f.symmetrize,
                "insert the reverse of every input arc (default on)");
  cmd->add_option("--lr-decay", f.lr_decay, "constant|linear")
      ->check(CLI::IsMember({"constant", "linear"}));
}

f2v::TrainConfig make_config(const EmbedFlags& f) {
  f2v::TrainConfig cfg;
  cfg.dim = f.dim;
  cfg.batch = f.batch;
  cfg.negatives = f.nsamples;
  cfg.lr = static_cast<float>(f.lr);
  cfg.epochs = f.epochs;
  cfg.model.kind = f2v::parse_force_kind(f.model);
  cfg.mode = f.walk_length > 0 ? f2v::SampleMode::walk(f.walk_length)
                               : f2v::SampleMode::one_hop();
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  cfg.monitor_loss = f.monitor_loss;
  cfg.lr_decay = f.lr_decay == "linear" ? f2v::TrainConfig::LrDecay::LinearToZero
                                        : f2v::TrainConfig::LrDecay::Constant;
  return cfg;
}

f2v::TrainResult run_embed(const EmbedFlags& flags, const f2v::CsrGraph& g,
                           std::vector<double>* loss_curve = nullptr) {
  const f2v::TrainConfig cfg = make_config(flags);
  f2v::ProgressFn progress;
  if (flags.monitor_loss)
    progress = [](std::uint32_t epoch, double loss, double elapsed_ms) {
      std::cerr << "epoch " << epoch << " loss " << loss << " elapsed_ms "
                << static_cast<long long>(elapsed_ms) << '\n';
    };
  f2v::TrainResult result = f2v::train(g, cfg, progress);
  if (loss_curve) *loss_curve = result.epoch_loss;
  return result;
}

void print_memory_estimate(const f2v::CsrGraph& g, std::uint32_t dim) {
  const std::uint64_t n = g.num_vertices();
  const std::uint64_t m = g.num_edges() / 2;
  std::cout << "estimated_memory_bytes="
            << 4 * n + 8 * m + 4 * n * std::uint64_t(dim) << '\n';
}

int cmd_embed(const EmbedFlags& flags) {
  f2v::LoadStats stats;
  const f2v::CsrGraph g = load_graph(flags.input, flags.format, flags.symmetrize, &stats);
  print_memory_estimate(g, flags.dim);
  if (stats.duplicates_dropped || stats.self_loops_dropped)
    std::cerr << "dropped " << stats.duplicates_dropped << " duplicate arcs, "
              << stats.self_loops_dropped << " self-loops\n";

  const auto start = std::chrono::steady_clock::now();
  const f2v::TrainResult result = run_embed(flags, g);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  std::ofstream out(flags.output);
  if (!out) throw f2v::IoError("cannot open output file: " + flags.output);
  f2v::write_embedding(out, result.embedding);
  if (!g.original_ids().empty()) {
    std::ofstream remap(flags.output + ".remap");
    if (!remap) throw f2v::IoError("cannot write remap table");
    f2v::write_remap_table(g, remap);
  }
  std::cout << "n=" << g.num_vertices() << " m=" << g.num_edges() / 2
            << " epochs=" << flags.epochs << " wall_time_s=" << secs << '\n';
  return 0;
}

struct EvalFlags {
  std::string embedding;
  std::string graph;
  std::string format = "auto";
  std::string task;
  std::string labels;
  double train_fraction = 0.25;
  std::uint64_t seed = 1;
  unsigned repeats = 1;
};

void add_eval_task_flags(CLI::App* cmd, EvalFlags& f, bool need_task) {
  auto* task = cmd->add_option("--task", f.task, "linkpred|nodeclass|cluster")
                   ->check(CLI::IsMember({"linkpred", "nodeclass", "cluster"}));
  if (need_task) task->required();
  cmd->add_option("--labels", f.labels, "label file (nodeclass)");
  cmd->add_option("--train-fraction", f.train_fraction)
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--repeats", f.repeats, "splits to average over (nodeclass)")
      ->check(CLI::Range(1u, 1000u));
}

std::string eval_task(const f2v::CsrGraph& g, const f2v::EmbeddingMatrix& z,
                      const EvalFlags& flags) {
  if (z.rows() != g.num_vertices())
    throw f2v::RangeError("embedding has " + std::to_string(z.rows()) +
                          " rows but graph has " +
                          std::to_string(g.num_vertices()) + " vertices");
  std::ostringstream out;
  if (flags.task == "linkpred") {
    f2v::Rng rng(flags.seed, 0x417);
    const auto ds = f2v::build_link_dataset(g, rng);
    out << "accuracy=" << f2v::link_prediction_accuracy(z, ds);
  } else if (flags.task == "nodeclass") {
    if (flags.labels.empty())
      throw f2v::UsageError("nodeclass requires --labels");
    std::ifstream in(flags.labels);
    if (!in) throw f2v::IoError("cannot open label file: " + flags.labels);
    const auto labels = f2v::load_labels(in, g.num_vertices());
    double micro = 0.0, macro = 0.0;
    for (unsigned r = 0; r < flags.repeats; ++r) {
      f2v::Rng rng = f2v::Rng::keyed(flags.seed, {0x519, r});
      const auto f1 = f2v::node_classification(z, labels, flags.train_fraction, rng);
      micro += f1.micro;
      macro += f1.macro;
    }
    out << "f1_micro=" << micro / flags.repeats
        << " f1_macro=" << macro / flags.repeats;
  } else if (flags.task == "cluster") {
    f2v::Rng rng(flags.seed, 0x61b);
    const auto best = f2v::best_modularity_sweep(g, z, rng);
    out << "best_k=" << best.k << " modularity=" << best.q;
  } else {
    throw f2v::UsageError("unknown task \"" + flags.task + "\"");
  }
  return out.str();
}

int cmd_eval(const EvalFlags& flags) {
  const f2v::CsrGraph g = load_graph(flags.graph, flags.format, true);
  const f2v::EmbeddingMatrix z = load_embedding(flags.embedding);
  std::cout << eval_task(g, z, flags) << '\n';
  return 0;
}

struct LayoutFlags {
  std::string embedding;
  std::string labels;
  std::string out_svg;
  std::string out_tsv;
};

int cmd_layout(const LayoutFlags& flags) {
  if (flags.out_svg.empty() && flags.out_tsv.empty())
    throw f2v::UsageError("layout: pass --out-svg and/or --out-tsv");
  const f2v::EmbeddingMatrix z = load_embedding(flags.embedding);
  f2v::LabeledNodes labels;
  const f2v::LabeledNodes* labels_ptr = nullptr;
  if (!flags.labels.empty()) {
    std::ifstream in(flags.labels);
    if (!in) throw f2v::IoError("cannot open label file: " + flags.labels);
    labels = f2v::load_labels(in, z.rows());
    labels_ptr = &labels;
  }
  if (!flags.out_tsv.empty()) {
    std::ofstream out(flags.out_tsv);
    if (!out) throw f2v::IoError("cannot open output file: " + flags.out_tsv);
    f2v::write_layout_tsv(out, z, labels_ptr);
  }
  if (!flags.out_svg.empty()) {
    std::ofstream out(flags.out_svg);
    if (!out) throw f2v::IoError("cannot open output file: " + flags.out_svg);
    f2v::write_layout_svg(out, z, labels_ptr);
  }
  return 0;
}

struct SweepFlags {
  std::string param;
  std::vector<std::string> values;
  std::string curve_prefix = "sweep_loss_";
};

int cmd_sweep(const SweepFlags& sweep, EmbedFlags embed, EvalFlags eval) {
  if (sweep.values.empty()) throw f2v::UsageError("sweep: empty --values");
  const f2v::CsrGraph g =
      load_graph(embed.input, embed.format, embed.symmetrize);
  for (const std::string& value : sweep.values) {
    EmbedFlags f = embed;
    try {
      if (sweep.param == "lr")
        f.lr = std::stod(value);
      else if (sweep.param == "nsamples")
        f.nsamples = static_cast<std::uint32_t>(std::stoul(value));
      else if (sweep.param == "dim")
        f.dim = static_cast<std::uint32_t>(std::stoul(value));
    } catch (const std::exception&) {
      throw f2v::UsageError("sweep: bad value \"" + value + "\"");
    }
    std::vector<double> curve;
    const f2v::TrainResult result = run_embed(f, g, &curve);
    if (f.monitor_loss && !curve.empty()) {
      const std::string path = sweep.curve_prefix + value + ".txt";
      std::ofstream out(path);
      if (!out) throw f2v::IoError("cannot write loss curve: " + path);
      for (std::size_t e = 0; e < curve.size(); ++e)
        out << e << ' ' << curve[e] << '\n';
    }
    std::cout << sweep.param << '=' << value << ' '
              << eval_task(g, result.embedding, eval) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel force-directed graph embedding"};
  app.require_subcommand(1);

  EmbedFlags embed_flags;
  auto* embed = app.add_subcommand("embed", "train an embedding");
  add_embed_flags(embed, embed_flags, /*need_output=*/true);

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "evaluate an embedding");
  eval->add_option("--embedding", eval_flags.embedding)->required();
  eval->add_option("--graph", eval_flags.graph)->required();
  eval->add_option("--format", eval_flags.format, "edgelist|mtx|auto")
      ->check(CLI::IsMember({"edgelist", "mtx", "auto"}));
  eval->add_option("--seed", eval_flags.seed)->envname("FORCE2VEC_SEED");
  add_eval_task_flags(eval, eval_flags, /*need_task=*/true);

  LayoutFlags layout_flags;
  auto* layout = app.add_subcommand("layout", "export a 2-D layout");
  layout->add_option("--embedding", layout_flags.embedding)->required();
  layout->add_option("--labels", layout_flags.labels);
  layout->add_option("--out-svg", layout_flags.out_svg);
  layout->add_option("--out-tsv", layout_flags.out_tsv);

  SweepFlags sweep_flags;
  EmbedFlags sweep_embed;
  EvalFlags sweep_eval;
  auto* sweep = app.add_subcommand("sweep", "train/evaluate over a parameter grid");
  sweep->add_option("--param", sweep_flags.param, "lr|nsamples|dim")
      ->required()
      ->check(CLI::IsMember({"lr", "nsamples", "dim"}));
  sweep->add_option("--values", sweep_flags.values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--curve-prefix", sweep_flags.curve_prefix,
                    "loss-curve file prefix (with --monitor-loss)");
  add_embed_flags(sweep, sweep_embed, /*need_output=*/false);
  sweep->add_option("--seed-eval", sweep_eval.seed);
  add_eval_task_flags(sweep, sweep_eval, /*need_task=*/true);

  try {
    app.parse(argc, argv);
    if (embed->parsed()) return cmd_embed(embed_flags);
    if (eval->parsed()) return cmd_eval(eval_flags);
    if (layout->parsed()) return cmd_layout(layout_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_embed, sweep_eval);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const f2v::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const f2v::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const f2v::RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const f2v::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const f2v::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
