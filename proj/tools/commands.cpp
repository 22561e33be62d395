#include "commands.hpp"

#include "soprc/distributions.hpp"
#include "soprc/kernels.hpp"
#include "soprc/metrics.hpp"
#include "soprc/model.hpp"
#include "soprc/simlab.hpp"
#include "soprc/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

namespace soprc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Options whose values land in the effective config only when given on the
// command line, so they override the config file and the defaults.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <class T>
  void add(const std::string& flag, const std::string& key, const std::string& help) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(flag, *store, help);
    if constexpr (requires { store->push_back(store->front()); }) opt->delimiter(',');
    entries_.push_back({opt, key, [store] { return json(*store); }});
  }

  void add_switch(const std::string& flag, const std::string& key, const std::string& help) {
    auto store = std::make_shared<bool>(false);
    CLI::Option* opt = app_->add_flag(flag, *store, help);
    entries_.push_back({opt, key, [store] { return json(*store); }});
  }

  void apply(json& cfg) const {
    for (const auto& e : entries_)
      if (e.opt->count() > 0) cfg[e.key] = e.value();
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::string key;
    std::function<json()> value;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

struct Common {
  std::string config_path;
  std::string out;
  bool json_mirror = false;
  int threads = 1;
};

void merge_config_file(const std::string& path, json& cfg) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  json file;
  try {
    file = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!file.is_object()) throw SpecError("config file must hold a JSON object");
  for (const auto& [key, value] : file.items()) {
    if (!cfg.contains(key)) throw SpecError("unknown config key '" + key + "'");
    cfg[key] = value;
  }
}

json effective_config(json defaults, const Common& common, const Flags& flags) {
  merge_config_file(common.config_path, defaults);
  flags.apply(defaults);
  return defaults;
}

fs::path output_dir() {
  const char* env = std::getenv("SOPRC_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

fs::path resolve_output(const std::string& explicit_path, const std::string& default_name) {
  fs::path p = explicit_path.empty() ? output_dir() / default_name : fs::path(explicit_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

fs::path sibling(const fs::path& p, const std::string& ext) {
  fs::path q = p;
  q.replace_extension(ext);
  return q;
}

ScoreDistribution distribution_from(const json& cfg) {
  ScoreDistribution d = ScoreDistribution::defaults(dist_kind_from_string(cfg.at("dist")));
  auto pair = [](const json& v) {
    const auto xs = v.get<std::vector<double>>();
    if (xs.size() != 2) throw SpecError("distribution parameters take two values");
    return std::array<double, 2>{xs[0], xs[1]};
  };
  if (!cfg.at("pos_params").is_null()) d.pos_params = pair(cfg.at("pos_params"));
  if (!cfg.at("neg_params").is_null()) d.neg_params = pair(cfg.at("neg_params"));
  d.validate();
  return d;
}

void add_dist_flags(Flags& f) {
  f.add<std::string>("--dist", "dist", "binormal | bibeta | offset_uniform");
  f.add<std::vector<double>>("--pos-params", "pos_params", "positive-class parameters a,b");
  f.add<std::vector<double>>("--neg-params", "neg_params", "negative-class parameters a,b");
}

void add_common(CLI::App* app, Common& c, bool with_threads) {
  app->add_option("--config", c.config_path, "JSON config file; flags override it");
  app->add_flag("--json", c.json_mirror, "also write tables as JSON");
  if (with_threads)
    app->add_option("--threads", c.threads, "OpenMP threads (outputs do not depend on it)")
        ->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

json train_defaults() {
  return {{"data", nullptr},        {"val", nullptr},        {"header", true},
          {"iters", 2000},          {"beta", 0.001},         {"npos", 8},
          {"nneg", 32},             {"seed", 0},             {"model", "linear"},
          {"hidden", 16},           {"output_bound", 1.0},   {"lr", 0.1},
          {"schedule", "constant"}, {"weight_decay", 4e-4},  {"lambda1", 0.0},
          {"lambda2", 0.0},         {"tau1", 1.0},           {"tau2", 0.1},
          {"prior", nullptr},       {"eval_every", 100},     {"aux_gradient", false}};
}

TrainConfig train_config_from(const json& cfg) {
  TrainConfig tc;
  tc.max_iters = cfg.at("iters").get<std::size_t>();
  tc.beta = cfg.at("beta").get<double>();
  tc.n_pos = cfg.at("npos").get<std::size_t>();
  tc.n_neg = cfg.at("nneg").get<std::size_t>();
  tc.seed = cfg.at("seed").get<std::uint64_t>();
  tc.lr.kind = lr_kind_from_string(cfg.at("schedule").get<std::string>());
  tc.lr.value = cfg.at("lr").get<double>();
  tc.weight_decay = cfg.at("weight_decay").get<double>();
  tc.lambda1 = cfg.at("lambda1").get<double>();
  tc.lambda2 = cfg.at("lambda2").get<double>();
  tc.surrogate.tau1 = cfg.at("tau1").get<double>();
  tc.surrogate.tau2 = cfg.at("tau2").get<double>();
  if (!cfg.at("prior").is_null()) tc.prior_override = cfg.at("prior").get<double>();
  tc.eval_every = cfg.at("eval_every").get<std::size_t>();
  tc.aux_gradient = cfg.at("aux_gradient").get<bool>();
  tc.validate();
  return tc;
}

struct TrainCmd {
  CLI::App* app;
  Common common;
  Flags flags;
  std::string out_dir;

  explicit TrainCmd(CLI::App& root)
      : app(root.add_subcommand("train", "fit a scorer with the smoothed AUPRC objective")),
        flags(app) {
    add_common(app, common, false);
    app->add_option("--out-dir", out_dir, "output directory (default $SOPRC_OUT_DIR or .)");
    flags.add<std::string>("--data", "data", "training CSV (label,f1,...)");
    flags.add<std::string>("--val", "val", "validation CSV");
    flags.add<bool>("--header", "header", "CSV files start with a header line (default true)");
    flags.add<std::size_t>("--iters", "iters", "iterations T");
    flags.add<double>("--beta", "beta", "moving-average rate");
    flags.add<std::size_t>("--npos", "npos", "positives per batch");
    flags.add<std::size_t>("--nneg", "nneg", "negatives per batch");
    flags.add<std::uint64_t>("--seed", "seed", "master seed");
    flags.add<std::string>("--model", "model", "linear | mlp1");
    flags.add<std::size_t>("--hidden", "hidden", "hidden units for mlp1");
    flags.add<double>("--output-bound", "output_bound", "scores lie in [-B, B]");
    flags.add<double>("--lr", "lr", "learning-rate parameter");
    flags.add<std::string>("--schedule", "schedule", "constant | inverse | pl");
    flags.add<double>("--weight-decay", "weight_decay", "L2 coefficient");
    flags.add<double>("--lambda1", "lambda1", "semi-variance weight on positives");
    flags.add<double>("--lambda2", "lambda2", "semi-variance weight on negatives");
    flags.add<double>("--tau1", "tau1", "ell1 margin");
    flags.add<double>("--tau2", "tau2", "ell2 temperature");
    flags.add<double>("--prior", "prior", "override the data prior");
    flags.add<std::size_t>("--eval-every", "eval_every", "validation interval (0 = end only)");
    flags.add_switch("--aux-gradient", "aux_gradient", "differentiate through the v update");
  }

  int run(std::ostream& out) {
    const json cfg = effective_config(train_defaults(), common, flags);
    if (cfg.at("data").is_null()) throw SpecError("--data is required");
    const TrainConfig tc = train_config_from(cfg);
    const bool header = cfg.at("header").get<bool>();

    const Dataset data = load_dataset(cfg.at("data").get<std::string>(), header);
    std::optional<Dataset> val;
    if (!cfg.at("val").is_null()) {
      val.emplace(load_dataset(cfg.at("val").get<std::string>(), header));
      if (val->dim() != data.dim()) throw ShapeError("validation and training dimensions differ");
    }

    // stream 0 of the seed drives batches, stream 1 the initial weights
    Rng init_rng = RngHandle{tc.seed, 1}.stream();
    const ScorerModel init = ScorerModel::random(
        scorer_kind_from_string(cfg.at("model").get<std::string>()), data.dim(),
        cfg.at("hidden").get<std::size_t>(), cfg.at("output_bound").get<double>(), init_rng);

    const TrainResult result = train(data, init, tc, val ? &*val : nullptr);

    const fs::path dir = out_dir.empty() ? output_dir() : fs::path(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    {
      auto f = open_out(dir / "model.json");
      f << result.model.to_json() << '\n';
      outputs.push_back((dir / "model.json").string());
    }
    {
      auto f = open_out(dir / "trace.csv");
      result.trace.write_csv(f);
      outputs.push_back((dir / "trace.csv").string());
    }
    if (common.json_mirror) {
      json rows = json::array();
      for (const auto& r : result.trace.records) {
        json row = {{"iter", r.iter}, {"loss", r.loss}, {"reg", r.reg},
                    {"grad_norm", r.grad_norm}, {"lr", r.lr}};
        row["val_auprc"] = r.val_auprc ? json(*r.val_auprc) : json(nullptr);
        rows.push_back(row);
      }
      auto f = open_out(dir / "trace.json");
      f << rows.dump(2) << '\n';
      outputs.push_back((dir / "trace.json").string());
    }
    RunManifest m{"train", cfg, tc.seed, SOPRC_VERSION, outputs};
    m.write(dir / "manifest.json");

    for (const auto& w : result.trace.warnings) out << "warning: " << w << '\n';
    const auto& last = result.trace.records.back();
    out << "iterations " << last.iter << '\n' << "final_loss " << format_double(last.loss) << '\n';
    if (last.val_auprc) out << "val_auprc " << format_double(*last.val_auprc) << '\n';
    out << "wrote " << (dir / "model.json").string() << ", " << (dir / "trace.csv").string()
        << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalCmd {
  CLI::App* app;
  std::string data_path, model_path, pr_path;
  bool header = true;
  bool as_json = false;
  double tau1 = 1.0, tau2 = 0.1;

  explicit EvalCmd(CLI::App& root)
      : app(root.add_subcommand("eval", "score a dataset with a saved model")) {
    app->add_option("--data", data_path, "dataset CSV")->required();
    app->add_option("--model", model_path, "model.json from train")->required();
    app->add_option("--pr-curve", pr_path, "write recall,precision CSV here");
    app->add_option("--header", header, "dataset starts with a header line (default true)");
    app->add_option("--tau1", tau1, "ell1 margin");
    app->add_option("--tau2", tau2, "ell2 temperature");
    app->add_flag("--json", as_json, "print the metrics as JSON");
  }

  int run(std::ostream& out) {
    std::ifstream in(model_path);
    if (!in) throw Error("cannot open model file: " + model_path);
    std::stringstream text;
    text << in.rdbuf();
    const ScorerModel model = ScorerModel::from_json(text.str());
    const Dataset data = load_dataset(data_path, header);
    if (model.input_dim() != data.dim())
      throw ShapeError("model expects " + std::to_string(model.input_dim()) +
                       " features but the dataset has " + std::to_string(data.dim()));

    const ScoreSet scores = score_dataset(model, data);
    SurrogateParams params{tau1, tau2, data.prior(), 1e-8};
    params.validate();
    const double auprc = empirical_auprc(scores, data.prior());
    const double risk = surrogate_risk(scores, params);
    const double ap = ap_loss(scores, params);

    if (!pr_path.empty()) {
      const fs::path p = resolve_output(pr_path, "pr_curve.csv");
      auto f = open_out(p);
      pr_curve(scores, data.prior()).write_csv(f);
    }
    if (as_json) {
      out << json{{"empirical_auprc", auprc}, {"surrogate_risk", risk}, {"ap_loss", ap}}.dump(2)
          << '\n';
    } else {
      out << "empirical_auprc " << format_double(auprc) << '\n'
          << "surrogate_risk " << format_double(risk) << '\n'
          << "ap_loss " << format_double(ap) << '\n';
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimCmd {
  CLI::App* app;
  Common common;
  Flags flags;
  std::string name;
  std::function<json()> defaults;
  std::function<ResultTable(const json&, std::ostream&)> body;

  SimCmd(CLI::App* parent, const std::string& n, const std::string& help)
      : app(parent->add_subcommand(n, help)), flags(app), name(n) {
    add_common(app, common, true);
    app->add_option("--out", common.out, "CSV path (default $SOPRC_OUT_DIR/" + n + ".csv)");
    flags.add<std::uint64_t>("--seed", "seed", "master seed");
    flags.add<std::size_t>("--repeats", "repeats", "Monte-Carlo repeats");
  }

  int run(std::ostream& out) {
    const json cfg = effective_config(defaults(), common, flags);
    set_num_threads(common.threads);
    const ResultTable table = body(cfg, out);

    const fs::path csv = resolve_output(common.out, name + ".csv");
    std::vector<std::string> outputs{csv.string()};
    {
      auto f = open_out(csv);
      table.write_csv(f);
    }
    if (common.json_mirror) {
      const fs::path js = sibling(csv, ".json");
      auto f = open_out(js);
      f << table.to_json().dump(2) << '\n';
      outputs.push_back(js.string());
    }
    RunManifest m{"simulate " + name, cfg, cfg.at("seed").get<std::uint64_t>(), SOPRC_VERSION,
                  outputs};
    m.write(sibling(csv, ".manifest.json"));
    out << "wrote " << csv.string() << '\n';
    return kExitOk;
  }
};

void setup_bias(SimCmd& c) {
  add_dist_flags(c.flags);
  c.flags.add<double>("--pi", "pi", "population prior");
  c.flags.add<double>("--pi0", "pi0", "batch sampling rate");
  c.flags.add<std::vector<std::size_t>>("--sizes", "sizes", "batch sizes n");
  c.flags.add<std::size_t>("--population", "population", "population size");
  c.flags.add<double>("--tau1", "tau1", "ell1 margin");
  c.flags.add<double>("--tau2", "tau2", "ell2 temperature");
  c.flags.add_switch("--coupled", "coupled", "let v evolve by moving average");
  c.flags.add<std::size_t>("--coupled-steps", "coupled_steps", "moving-average steps per repeat");
  c.flags.add<double>("--coupled-beta", "coupled_beta", "moving-average rate");
  c.defaults = [] {
    BiasExperimentSpec s;
    return json{{"dist", "binormal"},
                {"pos_params", nullptr},
                {"neg_params", nullptr},
                {"seed", s.seed},
                {"repeats", s.repeats},
                {"pi", s.prior_pi},
                {"pi0", s.sample_rate_pi0},
                {"sizes", s.batch_sizes},
                {"population", s.population_size},
                {"tau1", s.surrogate.tau1},
                {"tau2", s.surrogate.tau2},
                {"coupled", s.coupled},
                {"coupled_steps", s.coupled_steps},
                {"coupled_beta", s.coupled_beta}};
  };
  c.body = [](const json& cfg, std::ostream&) {
    BiasExperimentSpec s;
    s.distribution = distribution_from(cfg);
    s.seed = cfg.at("seed").get<std::uint64_t>();
    s.repeats = cfg.at("repeats").get<std::size_t>();
    s.prior_pi = cfg.at("pi").get<double>();
    s.sample_rate_pi0 = cfg.at("pi0").get<double>();
    s.batch_sizes = cfg.at("sizes").get<std::vector<std::size_t>>();
    s.population_size = cfg.at("population").get<std::size_t>();
    s.surrogate.tau1 = cfg.at("tau1").get<double>();
    s.surrogate.tau2 = cfg.at("tau2").get<double>();
    s.surrogate.prior_pi = s.prior_pi;
    s.coupled = cfg.at("coupled").get<bool>();
    s.coupled_steps = cfg.at("coupled_steps").get<std::size_t>();
    s.coupled_beta = cfg.at("coupled_beta").get<double>();
    return run_bias_experiment(s);
  };
}

void setup_interp(SimCmd& c) {
  add_dist_flags(c.flags);
  c.flags.add<std::vector<std::size_t>>("--sizes", "sizes", "knot counts n");
  c.flags.add<std::size_t>("--target-len", "target_len", "interpolation length N+");
  c.flags.add<double>("--qlo", "quantile_lo", "lower quantile level of the analytic series");
  c.flags.add<double>("--qhi", "quantile_hi", "upper quantile level of the analytic series");
  c.defaults = [] {
    InterpExperimentSpec s;
    s.distribution = ScoreDistribution::defaults(DistKind::bibeta);
    return json{{"dist", "bibeta"},        {"pos_params", nullptr},
                {"neg_params", nullptr},   {"seed", s.seed},
                {"repeats", s.repeats},    {"sizes", s.n_values},
                {"target_len", s.target_len}, {"quantile_lo", s.quantile_lo},
                {"quantile_hi", s.quantile_hi}};
  };
  c.body = [](const json& cfg, std::ostream&) {
    InterpExperimentSpec s;
    s.distribution = distribution_from(cfg);
    s.seed = cfg.at("seed").get<std::uint64_t>();
    s.repeats = cfg.at("repeats").get<std::size_t>();
    s.n_values = cfg.at("sizes").get<std::vector<std::size_t>>();
    s.target_len = cfg.at("target_len").get<std::size_t>();
    s.quantile_lo = cfg.at("quantile_lo").get<double>();
    s.quantile_hi = cfg.at("quantile_hi").get<double>();
    return run_interp_experiment(s);
  };
}

void setup_ema(SimCmd& c) {
  add_dist_flags(c.flags);
  c.flags.add<std::vector<double>>("--betas", "betas", "moving-average rates");
  c.flags.add<std::size_t>("--steps", "steps", "steps T");
  c.flags.add<std::size_t>("--num-pos", "num_pos", "N+");
  c.flags.add<std::size_t>("--batch-pos", "batch_pos", "n+ per step");
  c.flags.add<double>("--range-lo", "range_lo", "score range lower end");
  c.flags.add<double>("--range-hi", "range_hi", "score range upper end");
  c.flags.add<double>("--v-init", "v_init", "initial value of every entry of v");
  c.flags.add<double>("--fit-snr", "fit_snr", "decay fit keeps steps with bias above this many SEs");
  c.defaults = [] {
    EmaExperimentSpec s;
    return json{{"dist", "binormal"},      {"pos_params", nullptr},
                {"neg_params", nullptr},   {"seed", s.seed},
                {"repeats", s.repeats},    {"betas", s.betas},
                {"steps", s.steps},        {"num_pos", s.num_pos},
                {"batch_pos", s.batch_pos}, {"range_lo", s.range.lo},
                {"range_hi", s.range.hi},  {"v_init", s.v_init},
                {"fit_snr", s.fit_snr}};
  };
  c.body = [](const json& cfg, std::ostream& out) {
    EmaExperimentSpec s;
    s.distribution = distribution_from(cfg);
    s.seed = cfg.at("seed").get<std::uint64_t>();
    s.repeats = cfg.at("repeats").get<std::size_t>();
    s.betas = cfg.at("betas").get<std::vector<double>>();
    s.steps = cfg.at("steps").get<std::size_t>();
    s.num_pos = cfg.at("num_pos").get<std::size_t>();
    s.batch_pos = cfg.at("batch_pos").get<std::size_t>();
    s.range = {cfg.at("range_lo").get<double>(), cfg.at("range_hi").get<double>()};
    s.v_init = cfg.at("v_init").get<double>();
    s.fit_snr = cfg.at("fit_snr").get<double>();
    const auto res = run_ema_experiment(s);
    for (const auto& b : res.per_beta) {
      const double mx =
          b.var_ratio.empty() ? 0.0 : *std::max_element(b.var_ratio.begin(), b.var_ratio.end());
      out << "beta " << format_double(b.beta) << ": max var ratio " << format_double(mx)
          << " (bound " << format_double(b.bound()) << "), decay slope "
          << format_double(b.decay_slope) << " (log(1-beta) " << format_double(std::log1p(-b.beta))
          << ")\n";
    }
    return res.to_table();
  };
}

void setup_stability(SimCmd& c) {
  c.flags.add<std::vector<std::size_t>>("--sizes", "sizes", "dataset sizes N");
  c.flags.add<double>("--pi", "pi", "dataset prior");
  c.flags.add<std::size_t>("--iters", "iters", "training iterations");
  c.flags.add<std::size_t>("--npos", "npos", "positives per batch");
  c.flags.add<std::size_t>("--nneg", "nneg", "negatives per batch");
  c.flags.add<double>("--beta", "beta", "moving-average rate");
  c.flags.add<double>("--lr", "lr", "learning-rate parameter");
  c.flags.add<std::string>("--schedule", "schedule", "constant | inverse | pl");
  c.flags.add<double>("--weight-decay", "weight_decay", "L2 coefficient");
  c.flags.add<std::uint64_t>("--train-seed", "train_seed", "seed shared by both training runs");
  c.flags.add<double>("--init-weight", "init_weight", "every initial weight");
  c.defaults = [] {
    StabilitySpec s;
    return json{{"seed", s.seed},
                {"repeats", s.num_perturbations},
                {"sizes", s.sizes},
                {"pi", s.prior_pi},
                {"iters", s.train.max_iters},
                {"npos", s.train.n_pos},
                {"nneg", s.train.n_neg},
                {"beta", s.train.beta},
                {"lr", s.train.lr.value},
                {"schedule", to_string(s.train.lr.kind)},
                {"weight_decay", s.train.weight_decay},
                {"train_seed", s.train.seed},
                {"init_weight", s.init_weight}};
  };
  c.body = [](const json& cfg, std::ostream&) {
    StabilitySpec s;
    s.seed = cfg.at("seed").get<std::uint64_t>();
    s.sizes = cfg.at("sizes").get<std::vector<std::size_t>>();
    s.prior_pi = cfg.at("pi").get<double>();
    // one repeat = one replaced point per class
    s.num_perturbations = cfg.at("repeats").get<std::size_t>();
    s.train.max_iters = cfg.at("iters").get<std::size_t>();
    s.train.n_pos = cfg.at("npos").get<std::size_t>();
    s.train.n_neg = cfg.at("nneg").get<std::size_t>();
    s.train.beta = cfg.at("beta").get<double>();
    s.train.lr.kind = lr_kind_from_string(cfg.at("schedule").get<std::string>());
    s.train.lr.value = cfg.at("lr").get<double>();
    s.train.weight_decay = cfg.at("weight_decay").get<double>();
    s.train.seed = cfg.at("train_seed").get<std::uint64_t>();
    s.init_weight = cfg.at("init_weight").get<double>();
    return run_stability_probe(s);
  };
}

// ---------------------------------------------------------------------------
// make-blobs
// ---------------------------------------------------------------------------

struct BlobsCmd {
  CLI::App* app;
  std::size_t n = 5000;
  std::size_t dim = 2;
  double pi = 0.1;
  std::uint64_t seed = 1;
  std::string out_path;

  explicit BlobsCmd(CLI::App& root)
      : app(root.add_subcommand("make-blobs", "write a two-class Gaussian blob dataset")) {
    app->add_option("--n", n, "number of points");
    app->add_option("--dim", dim, "feature dimension");
    app->add_option("--pi", pi, "fraction of positives");
    app->add_option("--seed", seed, "seed");
    app->add_option("--out", out_path, "CSV path")->required();
  }

  int run(std::ostream& out) {
    Rng rng = RngHandle{seed, 0}.stream();
    const Dataset d = make_blobs(n, pi, rng, dim);
    const fs::path p = resolve_output(out_path, "blobs.csv");
    auto f = open_out(p);
    write_dataset(f, d);
    out << "wrote " << p.string() << " (" << d.num_pos() << " positives, " << d.num_neg()
        << " negatives)\n";
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App root{"Stochastic AUPRC optimisation: training, evaluation and simulations", "soprc"};
  root.require_subcommand(1);
  root.set_version_flag("--version", SOPRC_VERSION);

  TrainCmd train_cmd(root);
  EvalCmd eval_cmd(root);
  BlobsCmd blobs_cmd(root);
  CLI::App* sim = root.add_subcommand("simulate", "Monte-Carlo experiments");
  sim->require_subcommand(1);
  SimCmd bias(sim, "bias", "estimator bias against the population surrogate risk");
  SimCmd interp(sim, "interp", "interpolation sup-error");
  SimCmd ema(sim, "ema", "moving-average variance and bias decay");
  SimCmd stab(sim, "stability", "leave-one-out parameter distance");
  setup_bias(bias);
  setup_interp(interp);
  setup_ema(ema);
  setup_stability(stab);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    root.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      root.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (train_cmd.app->parsed()) return train_cmd.run(out);
    if (eval_cmd.app->parsed()) return eval_cmd.run(out);
    if (blobs_cmd.app->parsed()) return blobs_cmd.run(out);
    for (SimCmd* c : {&bias, &interp, &ema, &stab})
      if (c->app->parsed()) return c->run(out);
    err << root.help();
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: bad config value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace soprc::cli
