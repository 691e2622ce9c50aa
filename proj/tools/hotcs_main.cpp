// Command-line surface: `run` binds JSON configs to pipelines and writes
// CSV + manifest; `hot` builds a steered transform from reference CSVs;
// `metrics` profiles a coefficient vector. Exit codes: 0 ok, 2 invalid
// input, 3 runtime failure. Human text goes to stderr; stdout is JSON.

#include "hotcs/metrics.hpp"
#include "hotcs/pipelines.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hotcs;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

void check_keys(const json& j, const std::string& scope,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad("config: " + scope + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      const std::string where = scope.empty() ? item.key() : scope + "." + item.key();
      bad("config: unknown key \"" + where + "\"");
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

SolverConfig parse_solver(const json& j, const std::string& scope, SolverConfig cfg) {
  check_keys(j, scope,
             {"kind", "max_atoms", "residual_tol", "epsilon_rel", "lambda_rel", "max_iters"});
  if (j.contains("kind")) cfg.kind = solver_kind_from_string(j.at("kind").get<std::string>());
  cfg.max_atoms = get_or<Index>(j, "max_atoms", cfg.max_atoms);
  cfg.residual_tol = get_or<double>(j, "residual_tol", cfg.residual_tol);
  cfg.epsilon_rel = get_or<double>(j, "epsilon_rel", cfg.epsilon_rel);
  cfg.lambda_rel = get_or<double>(j, "lambda_rel", cfg.lambda_rel);
  cfg.max_iters = get_or<int>(j, "max_iters", cfg.max_iters);
  return cfg;
}

SweepGridConfig parse_grid(const json& j) {
  SweepGridConfig grid;
  check_keys(j, "grid", {"ratios", "snrs_db", "trials", "success_threshold", "steps_per_trial"});
  grid.ratios = get_or<std::vector<double>>(j, "ratios", grid.ratios);
  grid.snrs_db = get_or<std::vector<double>>(j, "snrs_db", grid.snrs_db);
  grid.trials = get_or<Index>(j, "trials", grid.trials);
  grid.success_threshold = get_or<double>(j, "success_threshold", grid.success_threshold);
  grid.steps_per_trial = get_or<Index>(j, "steps_per_trial", grid.steps_per_trial);
  return grid;
}

SignalSource parse_source(const json& j, SignalSource::Kind fallback_kind) {
  SignalSource source;
  source.kind = fallback_kind;
  if (j.is_null()) return source;
  check_keys(j, "source", {"kind", "path", "audio", "channel", "image"});
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "audio") {
      source.kind = SignalSource::Kind::Audio;
    } else if (kind == "channel") {
      source.kind = SignalSource::Kind::Channel;
    } else if (kind == "image") {
      source.kind = SignalSource::Kind::Image;
    } else if (kind == "file") {
      source.kind = SignalSource::Kind::File;
    } else {
      bad("config: unknown source.kind \"" + kind + "\"");
    }
  }
  if (j.contains("audio")) {
    const json& a = j.at("audio");
    check_keys(a, "source.audio",
               {"n", "num_modes", "damping", "amp_decay", "amplitude", "phase_spread"});
    source.audio.n = get_or<Index>(a, "n", source.audio.n);
    source.audio.num_modes = get_or<int>(a, "num_modes", source.audio.num_modes);
    source.audio.damping = get_or<double>(a, "damping", source.audio.damping);
    source.audio.amp_decay = get_or<double>(a, "amp_decay", source.audio.amp_decay);
    source.audio.amplitude = get_or<double>(a, "amplitude", source.audio.amplitude);
    source.audio.phase_spread = get_or<double>(a, "phase_spread", source.audio.phase_spread);
  }
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    check_keys(c, "source.channel", {"n", "t", "paths", "ar_coeff", "angles"});
    source.channel.n = get_or<Index>(c, "n", source.channel.n);
    source.channel.t = get_or<Index>(c, "t", source.channel.t);
    source.channel.paths = get_or<int>(c, "paths", source.channel.paths);
    source.channel.ar_coeff = get_or<double>(c, "ar_coeff", source.channel.ar_coeff);
    source.channel.angles = get_or<std::vector<double>>(c, "angles", source.channel.angles);
  }
  if (j.contains("image")) {
    const json& i = j.at("image");
    check_keys(i, "source.image", {"rows", "cols", "num_rects", "gradient", "texture"});
    source.image.rows = get_or<Index>(i, "rows", source.image.rows);
    source.image.cols = get_or<Index>(i, "cols", source.image.cols);
    source.image.num_rects = get_or<int>(i, "num_rects", source.image.num_rects);
    source.image.gradient = get_or<double>(i, "gradient", source.image.gradient);
    source.image.texture = get_or<double>(i, "texture", source.image.texture);
  }
  if (source.kind == SignalSource::Kind::File) {
    if (!j.contains("path")) bad("config: source.path is required for file sources");
    source.path = j.at("path").get<std::string>();
  } else if (j.contains("path")) {
    bad("config: source.path only applies to file sources");
  }
  return source;
}

PriorTransform parse_prior(const json* j, PriorKind fallback_kind, Index n) {
  PriorKind kind = fallback_kind;
  int levels = 0;
  if (j) {
    check_keys(*j, "prior", {"kind", "n", "levels"});
    if (j->contains("kind")) kind = prior_kind_from_string(j->at("kind").get<std::string>());
    n = get_or<Index>(*j, "n", n);
    levels = get_or<int>(*j, "levels", 0);
  }
  switch (kind) {
    case PriorKind::Identity: return PriorTransform::identity(n);
    case PriorKind::Dft: return PriorTransform::dft(n);
    case PriorKind::Dct2: return PriorTransform::dct2(n);
    case PriorKind::Haar: return PriorTransform::haar(n, levels);
    case PriorKind::Custom: break;
  }
  bad("config: prior.kind \"custom\" is only available through transform JSON files");
}

bool vector_has_imag(const CVector& v) {
  return v.size() > 0 && v.imag().cwiseAbs().maxCoeff() != 0.0;
}

/// Measurement count for vector pipelines: an absolute count or a ratio of
/// the signal length, but not both.
Index resolve_measurements(const json& cfg, Index n, Index fallback) {
  const bool has_m = cfg.contains("num_measurements");
  const bool has_r = cfg.contains("ratio");
  if (has_m && has_r) bad("config: give either ratio or num_measurements, not both");
  if (has_m) {
    const Index m = cfg.at("num_measurements").get<Index>();
    if (m < 1 || m > n) bad("config: num_measurements outside [1, n]");
    return m;
  }
  if (has_r) {
    const double ratio = cfg.at("ratio").get<double>();
    if (!(ratio > 0.0) || ratio > 1.0) bad("config: ratio outside (0, 1]");
    return std::clamp<Index>(static_cast<Index>(std::llround(ratio * static_cast<double>(n))), 1,
                             n);
  }
  return std::min(fallback, n);
}

struct RunPlan {
  std::string pipeline;
  std::uint64_t seed = 1;
  Index threads = 1;
  std::string out_dir = ".";
  json config_echo;
  std::function<PipelineReport()> execute;
};

CVector load_vector_signal(const SignalSource& source, std::uint64_t seed,
                           const std::string& pipeline) {
  switch (source.kind) {
    case SignalSource::Kind::Audio: return gen_audio(source.audio, seed);
    case SignalSource::Kind::File: return load_csv_vector(source.path);
    default: bad("config: " + pipeline + " needs an audio or file source");
  }
}

RMatrix load_image_signal(const SignalSource& source, std::uint64_t seed) {
  switch (source.kind) {
    case SignalSource::Kind::Image: return gen_image(source.image, seed);
    case SignalSource::Kind::File: return load_pgm(source.path);
    default: bad("config: image pipelines need an image or file source");
  }
}

RunPlan make_plan(json cfg, const std::optional<std::uint64_t>& seed_flag,
                  const std::optional<Index>& threads_flag,
                  const std::optional<std::string>& out_flag) {
  if (!cfg.contains("schema_version") || !cfg.at("schema_version").is_number_integer() ||
      cfg.at("schema_version").get<int>() != 1) {
    bad("config: schema_version must be the integer 1");
  }
  if (!cfg.contains("pipeline")) bad("config: missing \"pipeline\"");
  const std::string pipeline = cfg.at("pipeline").get<std::string>();

  RunPlan plan;
  plan.pipeline = pipeline;
  plan.seed = get_or<std::uint64_t>(cfg, "seed", 1);
  if (seed_flag) plan.seed = *seed_flag;
  plan.threads = get_or<Index>(cfg, "threads", 1);
  if (threads_flag) plan.threads = *threads_flag;
  if (plan.threads < 1) bad("config: threads must be >= 1");
  plan.out_dir = get_or<std::string>(cfg, "out_dir", ".");
  if (out_flag) plan.out_dir = *out_flag;

  const std::uint64_t seed = plan.seed;
  const Index threads = plan.threads;
  const json* prior_cfg = cfg.contains("prior") ? &cfg.at("prior") : nullptr;
  const std::initializer_list<const char*> common = {"schema_version", "pipeline", "seed",
                                                     "threads", "out_dir", "prior", "source",
                                                     "solver"};

  auto with = [&common](std::initializer_list<const char*> extra) {
    std::vector<const char*> keys(common);
    keys.insert(keys.end(), extra);
    return keys;
  };
  auto check_top = [&cfg](const std::vector<const char*>& keys) {
    if (!cfg.is_object()) bad("config: top level must be a JSON object");
    for (const auto& item : cfg.items()) {
      bool known = false;
      for (const char* k : keys) {
        if (item.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) bad("config: unknown key \"" + item.key() + "\"");
    }
  };

  if (pipeline == "boost" || pipeline == "weak_guides_strong") {
    const bool wgs = pipeline == "weak_guides_strong";
    check_top(with(wgs ? std::initializer_list<const char*>{"num_measurements", "ratio", "snr_db",
                                                            "weak_solver", "hyper_sweep"}
                       : std::initializer_list<const char*>{"num_measurements", "ratio", "snr_db",
                                                            "rounds"}));
    const SignalSource source =
        parse_source(cfg.contains("source") ? cfg.at("source") : json(), SignalSource::Kind::Audio);
    const CVector signal = load_vector_signal(source, mix_seed(seed, 1), pipeline);
    const PriorTransform prior = parse_prior(prior_cfg, PriorKind::Dct2, signal.size());
    if (prior.dim() != signal.size()) {
      bad("config: prior.n does not match the source dimension");
    }
    const Index m = resolve_measurements(cfg, signal.size(), 90);
    const double snr = get_or<double>(cfg, "snr_db", 30.0);
    Rng prng(mix_seed(seed, 2));
    const bool complex_domain = !prior.is_real() || vector_has_imag(signal);
    const MeasurementModel model = make_measurement_model(
        complex_domain ? prng.cgaussian_sensing(m, signal.size())
                       : prng.gaussian_sensing(m, signal.size()),
        0.0, snr);

    if (wgs) {
      SolverConfig weak;
      weak.max_atoms = 12;
      if (cfg.contains("weak_solver")) weak = parse_solver(cfg.at("weak_solver"), "weak_solver", weak);
      SolverConfig strong;
      strong.kind = SolverKind::Bp;
      strong.max_iters = 5000;
      if (cfg.contains("solver")) strong = parse_solver(cfg.at("solver"), "solver", strong);
      const std::vector<double> sweep = get_or<std::vector<double>>(
          cfg, "hyper_sweep", {0.01, 0.02, 0.035, 0.06, 0.1});
      plan.execute = [=] {
        return weak_guides_strong(signal, model, prior, weak, strong, sweep, mix_seed(seed, 3));
      };
    } else {
      SolverConfig weak;
      weak.max_atoms = 4;
      if (cfg.contains("solver")) weak = parse_solver(cfg.at("solver"), "solver", weak);
      const Index rounds = get_or<Index>(cfg, "rounds", 3);
      plan.execute = [=] {
        return boost_weak_learner(signal, model, prior, rounds, weak, mix_seed(seed, 3));
      };
    }
  } else if (pipeline == "sequential_channel") {
    check_top(with({"ratio", "snr_db"}));
    const SignalSource source = parse_source(
        cfg.contains("source") ? cfg.at("source") : json(), SignalSource::Kind::Channel);
    if (source.kind != SignalSource::Kind::Channel) {
      bad("config: source.kind must be \"channel\" for sequential_channel");
    }
    const auto trace = gen_channel_trace(source.channel, mix_seed(seed, 1));
    const PriorTransform prior = parse_prior(prior_cfg, PriorKind::Dft, source.channel.n);
    if (prior.dim() != source.channel.n) bad("config: prior.n does not match the channel size");
    const double ratio = get_or<double>(cfg, "ratio", 0.45);
    const double snr = get_or<double>(cfg, "snr_db", 30.0);
    SolverConfig solver;
    solver.kind = SolverKind::Bp;
    if (cfg.contains("solver")) solver = parse_solver(cfg.at("solver"), "solver", solver);
    plan.execute = [=] {
      return sequential_estimation(trace, ratio, snr, prior, solver, mix_seed(seed, 2));
    };
  } else if (pipeline == "phase_transition") {
    check_top(with({"grid"}));
    const SignalSource source =
        parse_source(cfg.contains("source") ? cfg.at("source") : json(), SignalSource::Kind::Audio);
    Index n = 0;
    PriorKind fallback = PriorKind::Dct2;
    switch (source.kind) {
      case SignalSource::Kind::Audio: n = source.audio.n; break;
      case SignalSource::Kind::Channel:
        n = source.channel.n;
        fallback = PriorKind::Dft;
        break;
      case SignalSource::Kind::File: n = load_csv_vector(source.path).size(); break;
      case SignalSource::Kind::Image:
        bad("config: image sources go through the image_cs pipeline");
    }
    const PriorTransform prior = parse_prior(prior_cfg, fallback, n);
    const SweepGridConfig grid =
        cfg.contains("grid") ? parse_grid(cfg.at("grid")) : SweepGridConfig{};
    SolverConfig solver;
    solver.kind = SolverKind::Bp;
    solver.max_iters = 4000;
    if (cfg.contains("solver")) solver = parse_solver(cfg.at("solver"), "solver", solver);
    plan.execute = [=] {
      return phase_transition_sweep(source, grid, prior, solver, mix_seed(seed, 1), threads);
    };
  } else if (pipeline == "image_topk" || pipeline == "image_cs") {
    const bool cs = pipeline == "image_cs";
    check_top(with(cs ? std::initializer_list<const char*>{"num_refs", "grid"}
                      : std::initializer_list<const char*>{"num_refs", "keep_fractions"}));
    const SignalSource source =
        parse_source(cfg.contains("source") ? cfg.at("source") : json(), SignalSource::Kind::Image);
    const RMatrix img = load_image_signal(source, mix_seed(seed, 1));
    const PriorTransform prior = parse_prior(prior_cfg, PriorKind::Haar, img.rows());
    if (prior.dim() != img.rows()) bad("config: prior.n does not match the image height");
    const Index num_refs = get_or<Index>(cfg, "num_refs", 8);
    if (cs) {
      const SweepGridConfig grid =
          cfg.contains("grid") ? parse_grid(cfg.at("grid")) : SweepGridConfig{};
      SolverConfig solver;
      solver.kind = SolverKind::Lasso;
      solver.lambda_rel = -1.0;
      solver.max_iters = 3000;
      if (cfg.contains("solver")) solver = parse_solver(cfg.at("solver"), "solver", solver);
      plan.execute = [=] {
        return image_cs_reconstruction(img, prior, num_refs, grid, solver, mix_seed(seed, 2),
                                       threads);
      };
    } else {
      const std::vector<double> fractions =
          get_or<std::vector<double>>(cfg, "keep_fractions", {0.05});
      plan.execute = [=] { return image_topk_compression(img, prior, num_refs, fractions); };
    }
  } else {
    bad("config: unknown pipeline \"" + pipeline + "\"");
  }

  cfg["seed"] = plan.seed;
  cfg["threads"] = plan.threads;
  cfg["out_dir"] = plan.out_dir;
  plan.config_echo = std::move(cfg);
  return plan;
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag,
            const std::optional<Index>& threads_flag,
            const std::optional<std::string>& out_flag) {
  const json cfg = load_json_file(config_path);
  RunPlan plan;
  try {
    plan = make_plan(cfg, seed_flag, threads_flag, out_flag);
  } catch (const json::exception& e) {
    bad(std::string("config: ") + e.what());
  }

  const auto start = std::chrono::steady_clock::now();
  const PipelineReport report = plan.execute();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(plan.out_dir);
  const fs::path csv_path = fs::path(plan.out_dir) / (plan.pipeline + ".csv");
  const fs::path manifest_path = fs::path(plan.out_dir) / "manifest.json";
  write_csv(csv_path.string(), report.table);

  json extras;
  extras["outputs"] = {{"csv", csv_path.string()}};
  extras["wall_seconds"] = wall;
  extras["summary"] = report.summary;
  write_manifest(manifest_path.string(), plan.config_echo, plan.seed, extras);

  json out;
  out["pipeline"] = plan.pipeline;
  out["seed"] = plan.seed;
  out["csv"] = csv_path.string();
  out["manifest"] = manifest_path.string();
  out["summary"] = report.summary;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_hot(const std::string& prior_name, int levels, const std::vector<std::string>& ref_paths,
            const std::string& out_path) {
  std::vector<CVector> refs;
  refs.reserve(ref_paths.size());
  for (const auto& p : ref_paths) refs.push_back(load_csv_vector(p));
  const Index n = refs.front().size();

  const PriorKind kind = prior_kind_from_string(prior_name);
  json prior_json{{"kind", to_string(kind)}, {"n", n}, {"levels", levels}};
  const PriorTransform prior = parse_prior(&prior_json, kind, n);
  const PosteriorTransform post = construct_hot_multi(prior, ReferenceSet(refs));
  write_json_file(out_path, posterior_to_json(post));

  const CMatrix delta = post.matrix() - prior.matrix();
  const DomainComparison cmp = domain_compare(post.matrix(), prior.matrix());
  const auto pivots = post.pivots();

  json diag;
  diag["file"] = out_path;
  diag["n"] = n;
  diag["num_refs"] = static_cast<Index>(refs.size());
  diag["pivots"] = pivots;
  json alpha_abs = json::array();
  for (const Complex& a : post.alphas()) alpha_abs.push_back(std::abs(a));
  diag["alpha_abs"] = alpha_abs;
  json trivial = json::array();
  for (bool t : post.trivial_flags()) trivial.push_back(t);
  diag["trivial"] = trivial;
  diag["delta_frobenius"] = delta.norm();
  diag["delta_frobenius_rel"] = cmp.relative_error;
  diag["rho_vs_prior"] = cmp.column_correlation;

  // Per reference: how much of D_postᴴ r_i leaks outside the pivots claimed
  // so far, relative to ‖r_i‖.
  json residuals = json::array();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const CVector w = post.analyze(refs[i]);
    double worst = 0.0;
    for (Index idx = 0; idx < w.size(); ++idx) {
      bool claimed = false;
      for (std::size_t k = 0; k <= i; ++k) {
        if (pivots[k] == idx) {
          claimed = true;
          break;
        }
      }
      if (!claimed) worst = std::max(worst, std::abs(w[idx]));
    }
    residuals.push_back(worst / refs[i].norm());
  }
  diag["constraint_residual_rel"] = residuals;

  std::cout << diag.dump() << "\n";
  return 0;
}

int cmd_metrics(const std::string& path, Index k) {
  const CVector v = load_csv_vector(path);
  if (v.norm() == 0.0) bad("metrics: vector is identically zero");
  if (k < 1 || k > v.size()) bad("metrics: k outside [1, n]");
  const SparsityProfile profile = sparsity_profile(v, k);

  json out;
  out["n"] = v.size();
  out["k"] = k;
  out["gamma_k"] = profile.gamma_k;
  out["odd"] = profile.odd;
  out["l0"] = profile.l0;
  out["l1"] = profile.l1;
  out["l2"] = profile.l2;
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prior-steered sparse transform toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute a pipeline described by a JSON config");
  std::string config_path;
  std::uint64_t seed_val = 0;
  Index threads_val = 0;
  std::string out_val;
  run->add_option("--config", config_path, "Path to the run config JSON")->required();
  auto* seed_opt = run->add_option("--seed", seed_val, "Master seed override");
  auto* threads_opt = run->add_option("--threads", threads_val, "Worker cap override");
  auto* out_opt = run->add_option("--out", out_val, "Output directory override");

  auto* hot = app.add_subcommand("hot", "Build a steered transform from reference CSVs");
  std::string prior_name = "dct2";
  int levels = 0;
  std::string hot_out;
  std::vector<std::string> ref_paths;
  hot->add_option("--prior", prior_name, "Prior kind: identity, dft, dct2, haar");
  hot->add_option("--levels", levels, "Haar stages (0 = deepest)");
  hot->add_option("--out", hot_out, "Output path for the transform JSON")->required();
  hot->add_option("refs", ref_paths, "Reference vector CSVs, steering order")
      ->required()
      ->expected(-1);

  auto* metrics = app.add_subcommand("metrics", "Sparsity profile of a vector CSV");
  std::string vec_path;
  Index k = 1;
  metrics->add_option("vector", vec_path, "Vector CSV path")->required();
  metrics->add_option("k", k, "Energy-concentration budget (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) {
      return cmd_run(config_path,
                     seed_opt->count() ? std::optional<std::uint64_t>(seed_val) : std::nullopt,
                     threads_opt->count() ? std::optional<Index>(threads_val) : std::nullopt,
                     out_opt->count() ? std::optional<std::string>(out_val) : std::nullopt);
    }
    if (hot->parsed()) return cmd_hot(prior_name, levels, ref_paths, hot_out);
    if (metrics->parsed()) return cmd_metrics(vec_path, k);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
