#include "cli_commands.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "dll/csv.hpp"
#include "dll/datasets.hpp"
#include "dll/eval.hpp"
#include "dll/sampler.hpp"
#include "dll/svg.hpp"
#include "dll/trainer.hpp"

namespace fs = std::filesystem;

namespace dll::cli {
namespace {

const std::set<std::string> kGenParamKeys = {
    "cluster-count", "cluster-radius", "cluster-std",     "ring-radius",     "ring-noise",
    "swiss-noise",   "waves-amplitude", "waves-frequency", "waves-noise"};

GeneratorParams read_gen_params(const FlagSet& f) {
  GeneratorParams p;
  p.cluster_count = static_cast<int>(f.get_long("cluster-count", p.cluster_count));
  p.cluster_radius = f.get_double("cluster-radius", p.cluster_radius);
  p.cluster_std = f.get_double("cluster-std", p.cluster_std);
  p.ring_radius = f.get_double("ring-radius", p.ring_radius);
  p.ring_noise = f.get_double("ring-noise", p.ring_noise);
  p.swiss_noise = f.get_double("swiss-noise", p.swiss_noise);
  p.waves_amplitude = f.get_double("waves-amplitude", p.waves_amplitude);
  p.waves_frequency = f.get_double("waves-frequency", p.waves_frequency);
  p.waves_noise = f.get_double("waves-noise", p.waves_noise);
  return p;
}

std::set<std::string> with_gen_params(std::set<std::string> keys) {
  keys.insert(kGenParamKeys.begin(), kGenParamKeys.end());
  return keys;
}

TrainConfig read_train_config(const FlagSet& f) {
  TrainConfig cfg;
  cfg.space = space_from_string(f.get_str("space", "eps"));
  cfg.form = form_from_string(f.get_str("form", "weighted"));
  cfg.dataset = dataset_from_string(f.get_str("dataset", "ring"));
  cfg.epochs = f.get_u64("epochs", kDefaultEpochs);
  cfg.batch_size = f.get_u64("batch", kDefaultBatch);
  cfg.learning_rate = f.get_double("lr", kDefaultLearningRate);
  cfg.seed = f.get_u64("seed", 1);
  cfg.t_min = f.get_double("t-min", kDefaultTMin);
  cfg.eval_draws_per_point = static_cast<int>(f.get_long("eval-draws", kDefaultEvalDraws));
  cfg.hidden_width = static_cast<int>(f.get_long("width", 128));
  cfg.validate();
  return cfg;
}

void make_parent_dirs(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

double model_test_loss(const DenoiserModel& model, const PointCloud& test, LossForm form,
                       int eval_draws, uint64_t eval_seed, double t_min) {
  const ModelPredictor pred(model);
  const LossEvalResult r = eval_losses(pred, test, eval_draws, eval_seed, t_min);
  switch (form) {
    case LossForm::Nelbo: return r.nelbo;
    case LossForm::Weighted: return r.weighted;
    case LossForm::Rescaled: return r.rescaled;
  }
  throw RangeError("bad form");
}

PointCloud head(const PointCloud& c, size_t n) {
  if (n == 0 || n >= c.n) return c;
  PointCloud out = c;
  out.n = n;
  out.pts.assign(c.pts.begin(), c.pts.begin() + 2 * n);
  return out;
}

}  // namespace

int cmd_gen_data(const FlagSet& f) {
  f.check_allowed(with_gen_params({"kind", "n", "seed", "out"}));
  const DatasetKind kind = dataset_from_string(f.require_str("kind"));
  const size_t n = f.get_u64("n", 100000);
  const uint64_t seed = f.get_u64("seed", 1);
  const std::string out = f.require_str("out");
  const PointCloud cloud = generate(kind, n, seed, read_gen_params(f));
  make_parent_dirs(out);
  write_cloud_csv(cloud, out);
  return 0;
}

int cmd_train(const FlagSet& f) {
  f.check_allowed(with_gen_params({"dataset", "space", "form", "n", "data-seed", "test-fraction",
                                   "epochs", "batch", "lr", "seed", "t-min", "eval-draws",
                                   "width", "out"}));
  const TrainConfig cfg = read_train_config(f);
  const size_t n = f.get_u64("n", 100000);
  const uint64_t data_seed = f.get_u64("data-seed", 1);
  const double test_fraction = f.get_double("test-fraction", 0.1);
  const std::string out_dir = f.require_str("out");

  const PointCloud cloud = generate(cfg.dataset, n, data_seed, read_gen_params(f));
  const auto [train_cloud, test_cloud] = split(cloud, test_fraction);

  const RunRecord rec = train(cfg, train_cloud, test_cloud);

  fs::create_directories(out_dir);
  save_checkpoint(rec.model, out_dir + "/model.ckpt");
  write_epochs_csv(rec.epochs, out_dir + "/epochs.csv");
  write_bins_csv(rec.bins, out_dir + "/bins.csv");
  std::cerr << "trained " << to_string(cfg.space) << "/" << to_string(cfg.form) << " on "
            << to_string(cfg.dataset) << " (" << rec.epochs.size() << " epochs, "
            << format_g9(rec.wall_seconds) << " s)\n";
  return 0;
}

int cmd_sample(const FlagSet& f) {
  f.check_allowed({"checkpoint", "num-steps", "num-samples", "seed", "clip-lo", "clip-hi", "out"});
  SampleConfig cfg;
  cfg.num_steps = static_cast<int>(f.get_long("num-steps", 512));
  cfg.num_samples = f.get_u64("num-samples", 2000);
  cfg.seed = f.get_u64("seed", 7);
  if (f.has("clip-lo") != f.has("clip-hi"))
    throw UsageError("--clip-lo and --clip-hi must be given together");
  if (f.has("clip-lo"))
    cfg.clip = std::make_pair(f.get_double("clip-lo", 0.0), f.get_double("clip-hi", 0.0));
  cfg.validate();

  const DenoiserModel model = load_checkpoint(f.require_str("checkpoint"));
  const ModelPredictor pred(model);
  const PointCloud cloud = sample(pred, cfg);
  const std::string out = f.require_str("out");
  make_parent_dirs(out);
  write_cloud_csv(cloud, out);
  return 0;
}

int cmd_eval(const FlagSet& f) {
  f.check_allowed({"checkpoint", "test", "samples", "out", "form", "dataset", "seed",
                   "eval-draws", "eval-seed", "t-min", "moments-n"});
  const DenoiserModel model = load_checkpoint(f.require_str("checkpoint"));
  const PointCloud test = read_cloud_csv(f.require_str("test"));
  const PointCloud samples = read_cloud_csv(f.require_str("samples"));
  if (test.pts.size() % 2 != 0 || samples.pts.size() % 2 != 0)
    throw IoError("eval: malformed cloud csv");

  const LossForm form = form_from_string(f.get_str("form", "weighted"));
  const int eval_draws = static_cast<int>(f.get_long("eval-draws", kDefaultEvalDraws));
  const uint64_t eval_seed = f.get_u64("eval-seed", 9000);
  const double t_min = f.get_double("t-min", kDefaultTMin);
  const size_t moments_n = f.get_u64("moments-n", 0);

  MetricsCsvRow row;
  row.space = to_string(model.predict_space);
  row.form = to_string(form);
  row.dataset = f.get_str("dataset", "ring");
  row.seed = f.get_u64("seed", 1);
  row.loss = model_test_loss(model, test, form, eval_draws, eval_seed, t_min);
  const PointCloud ref = head(test, moments_n);
  const PointCloud gen = head(samples, moments_n);
  row.mean_dist = mean_distance(ref, gen);
  row.covar_dist = covariance_distance(ref, gen);

  const std::string out = f.require_str("out");
  make_parent_dirs(out);
  append_metrics_csv(row, out);
  std::cout << row.space << ',' << row.form << ',' << row.dataset << ',' << row.seed << ','
            << format_g9(row.loss) << ',' << format_g9(row.mean_dist) << ','
            << format_g9(row.covar_dist) << '\n';
  return 0;
}

namespace {

struct SweepCell {
  DatasetKind dataset;
  TargetSpace space;
  LossForm form;
  uint64_t seed;
  std::string dir;
};

size_t cell_threads() {
  const char* env = std::getenv("DLL_THREADS");
  if (env == nullptr) return 1;
  const long v = std::atol(env);
  return v < 1 ? 1 : static_cast<size_t>(v);
}

}  // namespace

int cmd_sweep(const FlagSet& f) {
  f.check_allowed(with_gen_params({"datasets", "spaces", "forms", "seeds", "n", "data-seed",
                                   "test-fraction", "epochs", "batch", "lr", "t-min",
                                   "eval-draws", "width", "num-steps", "num-samples",
                                   "eval-seed", "moments-n", "out"}));
  const std::string out_dir = f.require_str("out");
  const size_t n = f.get_u64("n", 100000);
  const uint64_t data_seed = f.get_u64("data-seed", 1);
  const double test_fraction = f.get_double("test-fraction", 0.1);
  const int num_steps = static_cast<int>(f.get_long("num-steps", 512));
  const size_t num_samples = f.get_u64("num-samples", 2000);
  const uint64_t eval_seed = f.get_u64("eval-seed", 9000);
  const size_t moments_n = f.get_u64("moments-n", 2000);
  const GeneratorParams gen_params = read_gen_params(f);

  std::vector<SweepCell> cells;
  for (const auto& ds : f.get_list("datasets", "ring"))
    for (const auto& sp : f.get_list("spaces", "x,eps,v,s"))
      for (const auto& fm : f.get_list("forms", "nelbo,weighted"))
        for (const auto& sd : f.get_list("seeds", "1")) {
          SweepCell c;
          c.dataset = dataset_from_string(ds);
          c.space = space_from_string(sp);
          c.form = form_from_string(fm);
          c.seed = std::stoull(sd);
          if (c.form == LossForm::Rescaled)
            throw UsageError("sweep: training forms are nelbo|weighted");
          c.dir = out_dir + "/" + ds + "_" + sp + "_" + fm + "_seed" + sd;
          cells.push_back(std::move(c));
        }

  fs::create_directories(out_dir);

  // Clouds are shared per dataset kind across cells.
  std::map<DatasetKind, std::pair<PointCloud, PointCloud>> clouds;
  for (const auto& c : cells) {
    if (clouds.count(c.dataset) == 0) {
      const PointCloud cloud = generate(c.dataset, n, data_seed, gen_params);
      clouds[c.dataset] = split(cloud, test_fraction);
    }
  }

  std::vector<MetricsCsvRow> rows(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;

  auto run_cell = [&](const SweepCell& c, size_t idx) {
    const auto& [train_cloud, test_cloud] = clouds.at(c.dataset);
    fs::create_directories(c.dir);
    const std::string ckpt = c.dir + "/model.ckpt";

    DenoiserModel model;
    if (fs::exists(ckpt)) {  // resumable: completed training detected by checkpoint
      model = load_checkpoint(ckpt);
    } else {
      TrainConfig cfg = read_train_config(f);
      cfg.space = c.space;
      cfg.form = c.form;
      cfg.dataset = c.dataset;
      cfg.seed = c.seed;
      const RunRecord rec = train(cfg, train_cloud, test_cloud);
      model = rec.model;
      save_checkpoint(model, ckpt);
      write_epochs_csv(rec.epochs, c.dir + "/epochs.csv");
      write_bins_csv(rec.bins, c.dir + "/bins.csv");
    }

    const std::string samples_path = c.dir + "/samples.csv";
    if (!fs::exists(samples_path)) {
      SampleConfig scfg;
      scfg.num_steps = num_steps;
      scfg.num_samples = num_samples;
      scfg.seed = c.seed;
      const ModelPredictor pred(model);
      write_cloud_csv(sample(pred, scfg), samples_path);
    }
    // metrics always come from the file, so fresh and resumed sweeps agree
    const PointCloud gen_cloud = read_cloud_csv(samples_path);

    MetricsCsvRow row;
    row.space = to_string(c.space);
    row.form = to_string(c.form);
    row.dataset = to_string(c.dataset);
    row.seed = c.seed;
    row.loss = model_test_loss(model, test_cloud, c.form,
                               static_cast<int>(f.get_long("eval-draws", kDefaultEvalDraws)),
                               eval_seed, f.get_double("t-min", kDefaultTMin));
    const PointCloud ref = head(test_cloud, moments_n);
    const PointCloud gen_head = head(gen_cloud, moments_n);
    row.mean_dist = mean_distance(ref, gen_head);
    row.covar_dist = covariance_distance(ref, gen_head);
    rows[idx] = row;

    std::lock_guard lock(log_mutex);
    std::cerr << "cell " << c.dir << ": loss=" << format_g9(row.loss)
              << " mean_dist=" << format_g9(row.mean_dist)
              << " covar_dist=" << format_g9(row.covar_dist) << "\n";
  };

  const size_t n_threads = std::min(cell_threads(), cells.size());
  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      try {
        run_cell(cells[idx], idx);
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        failures[idx] = e.what();
        std::cerr << "cell " << cells[idx].dir << " FAILED: " << e.what() << "\n";
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<MetricsCsvRow> ok_rows;
  bool any_failed = false;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (failures[i].empty()) {
      ok_rows.push_back(rows[i]);
    } else {
      any_failed = true;
    }
  }
  write_metrics_csv(ok_rows, out_dir + "/metrics.csv");
  return any_failed ? 4 : 0;
}

int cmd_plot(const FlagSet& f) {
  f.check_allowed({"kind", "in", "out"});
  const std::string kind = f.require_str("kind");
  const std::string out = f.require_str("out");
  make_parent_dirs(out);

  if (kind == "scatter") {
    std::vector<SvgSeries> clouds;
    for (const auto& path : f.get_list("in", "")) {
      const PointCloud c = read_cloud_csv(path);
      SvgSeries s;
      s.label = fs::path(path).stem().string();
      s.x.reserve(c.n);
      s.y.reserve(c.n);
      for (size_t i = 0; i < c.n; ++i) {
        s.x.push_back(c.pts[2 * i]);
        s.y.push_back(c.pts[2 * i + 1]);
      }
      clouds.push_back(std::move(s));
    }
    write_scatter_svg(clouds, "point clouds", out);
    return 0;
  }

  if (kind == "epochs") {
    const auto rows = read_epochs_csv(f.require_str("in"));
    if (rows.empty()) throw IoError("epochs csv has no rows");
    SvgSeries train{"train_loss", {}, {}}, nelbo{"test_nelbo", {}, {}},
        weighted{"test_weighted", {}, {}}, rescaled{"test_rescaled", {}, {}};
    for (const auto& r : rows) {
      const double e = static_cast<double>(r.epoch);
      train.x.push_back(e);
      train.y.push_back(r.train_loss);
      nelbo.x.push_back(e);
      nelbo.y.push_back(r.test_nelbo);
      weighted.x.push_back(e);
      weighted.y.push_back(r.test_weighted);
      rescaled.x.push_back(e);
      rescaled.y.push_back(r.test_rescaled);
    }
    write_lines_svg({train, nelbo, weighted, rescaled}, "loss vs epoch", "epoch", "loss", false,
                    out);
    return 0;
  }

  if (kind == "bins") {
    const auto rows = read_bins_csv(f.require_str("in"));
    if (rows.empty()) throw IoError("bins csv has no rows");
    const size_t last_epoch = rows.back().epoch;
    SvgSeries s{"mean_loss", {}, {}};
    for (const auto& r : rows) {
      if (r.epoch != last_epoch || r.count == 0) continue;
      s.x.push_back(0.5 * (r.bin_lo + r.bin_hi));
      s.y.push_back(r.mean_loss);
    }
    write_lines_svg({s}, "loss vs timestep (epoch " + std::to_string(last_epoch) + ")", "t",
                    "mean loss", false, out);
    return 0;
  }

  if (kind == "scaling") {
    // Divergent at both endpoints; plotted on [0.01, 0.99].
    std::vector<double> grid;
    for (double t = 0.01; t <= 0.9901; t += 0.0025) grid.push_back(t);
    const auto cols = scaling_curves(grid);
    std::vector<SvgSeries> series(4);
    const char* names[4] = {"x", "eps", "v", "s"};
    for (int c = 0; c < 4; ++c) {
      series[c].label = names[c];
      series[c].x = grid;
      series[c].y = cols[c];
    }
    write_lines_svg(series, "SNR scalings 1/w(t)", "t", "log10 scaling", true, out);
    return 0;
  }

  throw UsageError("unknown plot kind '" + kind + "' (expected scatter|epochs|bins|scaling)");
}

void print_usage() {
  std::cout <<
      "dll - continuous-time diffusion on 2D synthetic data\n"
      "\n"
      "usage: dll <command> [--flag value ...] [--config file]\n"
      "\n"
      "commands:\n"
      "  gen-data  --kind cluster|ring|swiss|waves --n N --seed S --out FILE.csv\n"
      "  train     --dataset K --space x|eps|v|s --form nelbo|weighted --out DIR\n"
      "            [--n 100000 --data-seed 1 --test-fraction 0.1 --epochs E\n"
      "             --batch 512 --lr 1e-3 --seed 1 --t-min T --eval-draws 8]\n"
      "  sample    --checkpoint DIR/model.ckpt --num-steps N --num-samples M\n"
      "            --seed S --out FILE.csv [--clip-lo L --clip-hi H]\n"
      "  eval      --checkpoint CKPT --test TEST.csv --samples GEN.csv --out METRICS.csv\n"
      "            [--form F --dataset K --seed S --eval-draws 8 --eval-seed 9000\n"
      "             --moments-n 0]\n"
      "  sweep     --out DIR [--datasets ring --spaces x,eps,v,s --forms nelbo,weighted\n"
      "             --seeds 1 --num-steps 512 --num-samples 2000 ...train flags]\n"
      "  plot      --kind scatter|epochs|bins|scaling --in FILE[,FILE...] --out FILE.svg\n"
      "\n"
      "Config files hold one key=value pair per line (# comments); flags override.\n"
      "DLL_THREADS caps sweep cell parallelism (default 1). DLL_KERNELS=scalar|avx2\n"
      "overrides the compute backend.\n";
}

}  // namespace dll::cli
