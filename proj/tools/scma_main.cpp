// Command-line front end: reproducible design, metrics, and simulation runs
// driven by INI configs, emitting artifacts plus a resolved manifest that can
// be fed back in to repeat the run bit for bit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "run_config.hpp"
#include "scma/codebook.hpp"
#include "scma/link.hpp"
#include "scma/metrics.hpp"
#include "scma/optimizer.hpp"
#include "scma/signature.hpp"
#include "scma/types.hpp"

namespace {

namespace fs = std::filesystem;
using scma::tools::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path,
                              "run configuration file (INI)");
  if (config_required) opt->required();
  cmd->add_option("--out-dir", args.out_dir,
                  "directory for artifacts (overrides [run] out_dir)");
  cmd->add_option("--seed", args.seed,
                  "random seed (overrides [run] seed)");
  cmd->add_option("--threads", args.threads,
                  "worker cap, 0 = all cores (overrides [run] threads)");
}

struct RunContext {
  RunConfig config;
  std::string command;
  fs::path out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  RunConfig manifest;

  fs::path resolve(const std::string& name) const { return out_dir / name; }

  void write_manifest() const {
    manifest.write(out_dir / "manifest.ini");
  }
};

RunContext make_context(const CommonArgs& args, const std::string& command) {
  RunContext ctx;
  ctx.command = command;
  if (!args.config_path.empty()) {
    ctx.config = RunConfig::parse_file(args.config_path);
  }
  // informational echo in manifests; accept it back on reread
  ctx.config.get_string("run", "command", command);

  std::string out_dir = ctx.config.get_string("run", "out_dir", ".");
  if (!args.out_dir.empty()) out_dir = args.out_dir;
  ctx.out_dir = out_dir;
  fs::create_directories(ctx.out_dir);

  std::optional<std::uint64_t> seed = args.seed;
  if (!seed) seed = ctx.config.get_optional_uint64("run", "seed");
  if (!seed) {
    // no seed anywhere: generate one and record it in the manifest
    std::random_device device;
    seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  } else {
    ctx.config.get_optional_uint64("run", "seed");  // consume if present
  }
  ctx.seed = *seed;

  int threads = static_cast<int>(ctx.config.get_int("run", "threads", 0));
  if (args.threads) threads = *args.threads;
  ctx.threads = threads;

  ctx.manifest.set("run", "command", command);
  ctx.manifest.set("run", "seed", std::to_string(ctx.seed));
  ctx.manifest.set("run", "threads", std::to_string(ctx.threads));
  ctx.manifest.set("run", "out_dir", ctx.out_dir.string());
  return ctx;
}

// --- shared pieces -------------------------------------------------------

/// Commands that consume a codebook set accept either a built-in reference
/// id or a codebook JSON file.
scma::CodebookSet resolve_source(RunContext& ctx, const std::string& section) {
  const std::string source = ctx.config.require_string(section, "source");
  ctx.manifest.set(section, "source", source);
  if (source == "reference") {
    const std::string id = ctx.config.require_string(section, "reference");
    ctx.manifest.set(section, "reference", id);
    return scma::reference_codebooks(id);
  }
  if (source == "file") {
    const std::string input = ctx.config.require_string(section, "input");
    ctx.manifest.set(section, "input", input);
    return scma::load_codebooks(input);
  }
  throw std::invalid_argument("config key " + section +
                              ".source must be 'reference' or 'file', got '" +
                              source + "'");
}

nlohmann::ordered_json med_to_json(const scma::MedEstimate& med) {
  nlohmann::ordered_json j{{"value", med.value},
                           {"method", med.method},
                           {"pairs_examined", med.pairs_examined},
                           {"degenerate", med.degenerate}};
  if (med.method == "monte_carlo") {
    j["samples_per_batch"] = med.samples_per_batch;
    j["batches"] = med.batches;
    j["seed"] = med.seed;
  }
  if (med.colliding_pair) {
    j["colliding_pair"] = {(*med.colliding_pair)[0], (*med.colliding_pair)[1]};
  }
  return j;
}

// --- subcommands ---------------------------------------------------------

int cmd_info(const std::string& template_name) {
  const scma::SignatureTemplate t = scma::builtin_template(template_name);
  std::cout << "template " << t.name << ": " << t.resources << " resources, "
            << t.users << " users, " << t.superposed
            << " superposed per resource\n";
  std::cout << "overload factor: " << 100 * t.users / t.resources << "%\n";
  std::cout << "indicator matrix:\n";
  const auto f = scma::indicator_matrix(t);
  for (int k = 0; k < t.resources; ++k) {
    std::cout << " ";
    for (int j = 0; j < t.users; ++j) std::cout << ' ' << f[k * t.users + j];
    std::cout << '\n';
  }
  const auto g = scma::girth(f, t.resources, t.users);
  if (g) {
    std::cout << "factor graph girth: " << *g << '\n';
  } else {
    std::cout << "factor graph girth: none (acyclic)\n";
  }
  return kExitOk;
}

int cmd_build(RunContext& ctx) {
  const std::string source = ctx.config.require_string("build", "source");
  ctx.manifest.set("build", "source", source);

  scma::CodebookSet cs;
  if (source == "reference") {
    const std::string id = ctx.config.require_string("build", "reference");
    ctx.manifest.set("build", "reference", id);
    cs = scma::reference_codebooks(id);
  } else if (source == "file") {
    const std::string input = ctx.config.require_string("build", "input");
    ctx.manifest.set("build", "input", input);
    cs = scma::load_codebooks(input);
  } else if (source == "design") {
    const std::string template_name =
        ctx.config.require_string("build", "template");
    const int m =
        static_cast<int>(ctx.config.get_int("build", "modulation_order", 4));
    scma::DesignPoint dp;
    dp.energies = ctx.config.get_double_list("build", "energies");
    dp.phases = ctx.config.get_double_list("build", "phases");
    dp.omega = ctx.config.get_double("build", "omega", 0.0);
    const scma::SignatureTemplate t = scma::builtin_template(template_name);
    cs = scma::build_codebooks(t, dp, m);
    ctx.manifest.set("build", "template", template_name);
    ctx.manifest.set("build", "modulation_order", std::to_string(m));
    ctx.manifest.set_double_list("build", "energies", dp.energies);
    ctx.manifest.set_double_list("build", "phases", dp.phases);
    ctx.manifest.set_double("build", "omega", dp.omega);
  } else {
    throw std::invalid_argument(
        "config key build.source must be 'reference', 'design' or 'file', "
        "got '" +
        source + "'");
  }

  const std::string output =
      ctx.config.get_string("build", "output", "codebook.json");
  ctx.manifest.set("build", "output", output);
  ctx.config.finish();

  scma::save_codebooks(cs, ctx.resolve(output));
  ctx.write_manifest();
  std::cout << "wrote " << ctx.resolve(output).string() << '\n';
  return kExitOk;
}

int cmd_metrics(RunContext& ctx) {
  const scma::CodebookSet cs = resolve_source(ctx, "metrics");

  const std::string med_method =
      ctx.config.get_string("metrics", "med", "exact");
  ctx.manifest.set("metrics", "med", med_method);
  scma::MedEstimate med;
  if (med_method == "exact") {
    scma::MedOptions opts;
    opts.threads = ctx.threads;
    const std::string algorithm =
        ctx.config.get_string("metrics", "algorithm", "difference");
    if (algorithm == "difference") {
      opts.algorithm = scma::MedAlgorithm::DifferenceSweep;
    } else if (algorithm == "pairs") {
      opts.algorithm = scma::MedAlgorithm::PairSweep;
    } else {
      throw std::invalid_argument(
          "config key metrics.algorithm must be 'difference' or 'pairs'");
    }
    opts.max_points =
        ctx.config.get_uint64("metrics", "max_points", opts.max_points);
    ctx.manifest.set("metrics", "algorithm", algorithm);
    ctx.manifest.set("metrics", "max_points",
                     std::to_string(opts.max_points));
    med = scma::med_exact(cs, opts);
  } else if (med_method == "monte_carlo") {
    const int samples =
        static_cast<int>(ctx.config.get_int("metrics", "samples", 5000));
    const int batches =
        static_cast<int>(ctx.config.get_int("metrics", "batches", 20));
    ctx.manifest.set("metrics", "samples", std::to_string(samples));
    ctx.manifest.set("metrics", "batches", std::to_string(batches));
    med = scma::med_monte_carlo(cs, samples, batches, ctx.seed, ctx.threads);
  } else {
    throw std::invalid_argument(
        "config key metrics.med must be 'exact' or 'monte_carlo', got '" +
        med_method + "'");
  }

  const scma::MpdReport mpd = scma::mpd_report(cs);

  const std::string output =
      ctx.config.get_string("metrics", "output", "metrics.json");
  ctx.manifest.set("metrics", "output", output);
  ctx.config.finish();

  nlohmann::ordered_json doc;
  doc["med"] = med_to_json(med);
  doc["mpd"] = {{"per_user", mpd.per_user},
                {"system", mpd.system},
                {"degenerate", mpd.degenerate}};
  if (mpd.closed_form) doc["mpd"]["closed_form"] = *mpd.closed_form;

  std::ofstream out(ctx.resolve(output));
  if (!out) {
    throw scma::ValidationError("cannot write " + ctx.resolve(output).string());
  }
  out << doc.dump(2) << '\n';
  ctx.write_manifest();
  std::cout << "med " << med.value << " (" << med.method << "), system mpd "
            << mpd.system << '\n';
  return kExitOk;
}

int cmd_optimize(RunContext& ctx) {
  const std::string template_name =
      ctx.config.require_string("optimize", "template");
  const int m =
      static_cast<int>(ctx.config.get_int("optimize", "modulation_order", 4));
  const scma::SignatureTemplate t = scma::builtin_template(template_name);

  scma::GaConfig ga;
  ga.kappa = ctx.config.get_double("optimize", "kappa", ga.kappa);
  ga.population =
      static_cast<int>(ctx.config.get_int("optimize", "population", 50));
  ga.generations =
      static_cast<int>(ctx.config.get_int("optimize", "generations", 50));
  const std::string med_method =
      ctx.config.get_string("optimize", "med", "exact");
  if (med_method == "exact") {
    ga.med_method = scma::MedMethod::Exact;
  } else if (med_method == "monte_carlo") {
    ga.med_method = scma::MedMethod::MonteCarlo;
  } else {
    throw std::invalid_argument(
        "config key optimize.med must be 'exact' or 'monte_carlo'");
  }
  ga.mc_samples =
      static_cast<int>(ctx.config.get_int("optimize", "samples", ga.mc_samples));
  ga.mc_batches =
      static_cast<int>(ctx.config.get_int("optimize", "batches", ga.mc_batches));
  ga.crossover_rate =
      ctx.config.get_double("optimize", "crossover_rate", ga.crossover_rate);
  ga.mutation_rate =
      ctx.config.get_double("optimize", "mutation_rate", ga.mutation_rate);
  ga.mutation_scale =
      ctx.config.get_double("optimize", "mutation_scale", ga.mutation_scale);
  ga.elitism_count =
      static_cast<int>(ctx.config.get_int("optimize", "elitism", 2));
  ga.omega_max = ctx.config.get_double("optimize", "omega_max", ga.omega_max);
  ga.seed = ctx.seed;
  ga.threads = ctx.threads;

  const std::string codebook_output =
      ctx.config.get_string("optimize", "codebook_output", "codebook.json");
  const std::string result_output =
      ctx.config.get_string("optimize", "result_output", "result.json");
  const std::string history_output =
      ctx.config.get_string("optimize", "history_output", "history.csv");

  ctx.manifest.set("optimize", "template", template_name);
  ctx.manifest.set("optimize", "modulation_order", std::to_string(m));
  ctx.manifest.set_double("optimize", "kappa", ga.kappa);
  ctx.manifest.set("optimize", "population", std::to_string(ga.population));
  ctx.manifest.set("optimize", "generations",
                   std::to_string(ga.generations));
  ctx.manifest.set("optimize", "med", med_method);
  ctx.manifest.set("optimize", "samples", std::to_string(ga.mc_samples));
  ctx.manifest.set("optimize", "batches", std::to_string(ga.mc_batches));
  ctx.manifest.set_double("optimize", "crossover_rate", ga.crossover_rate);
  ctx.manifest.set_double("optimize", "mutation_rate", ga.mutation_rate);
  ctx.manifest.set_double("optimize", "mutation_scale", ga.mutation_scale);
  ctx.manifest.set("optimize", "elitism", std::to_string(ga.elitism_count));
  ctx.manifest.set_double("optimize", "omega_max", ga.omega_max);
  ctx.manifest.set("optimize", "codebook_output", codebook_output);
  ctx.manifest.set("optimize", "result_output", result_output);
  ctx.manifest.set("optimize", "history_output", history_output);
  ctx.config.finish();

  const scma::OptimizationResult result = scma::ga_optimize(t, m, ga);

  nlohmann::ordered_json doc;
  doc["template"] = template_name;
  doc["modulation_order"] = m;
  doc["kappa"] = ga.kappa;
  doc["seed"] = ga.seed;
  doc["feasible"] = result.feasible_found;
  doc["best_med"] = result.best_med;
  doc["best_mpd"] = result.best_mpd;
  doc["evaluations"] = result.evaluations;
  doc["design_point"] = {{"energies", result.best.energies},
                         {"phases", result.best.phases},
                         {"omega", result.best.omega}};
  doc["history"] = result.history;
  {
    std::ofstream out(ctx.resolve(result_output));
    if (!out) {
      throw scma::ValidationError("cannot write " +
                                  ctx.resolve(result_output).string());
    }
    out << doc.dump(2) << '\n';
  }
  {
    std::ofstream out(ctx.resolve(history_output));
    if (!out) {
      throw scma::ValidationError("cannot write " +
                                  ctx.resolve(history_output).string());
    }
    out << "generation,best_med\n";
    for (std::size_t g = 0; g < result.history.size(); ++g) {
      out << g + 1 << ',' << RunConfig::format_double(result.history[g])
          << '\n';
    }
  }

  if (!result.feasible_found) {
    ctx.write_manifest();
    std::cerr << "no design point satisfied the product-distance floor "
              << ga.kappa << "; best achieved " << result.best_mpd << '\n';
    return kExitInfeasible;
  }

  const scma::CodebookSet cs = scma::build_codebooks(t, result.best, m);
  scma::save_codebooks(cs, ctx.resolve(codebook_output));
  ctx.write_manifest();
  std::cout << "best med " << result.best_med << " (mpd " << result.best_mpd
            << ") after " << result.evaluations << " evaluations\n";
  return kExitOk;
}

int cmd_simulate(RunContext& ctx) {
  const scma::CodebookSet cs = resolve_source(ctx, "simulate");

  scma::SweepConfig sweep;
  sweep.ebn0_db = ctx.config.get_double_list("simulate", "ebn0_db");

  const std::string channel =
      ctx.config.get_string("simulate", "channel", "awgn");
  if (channel == "awgn") {
    sweep.channel = scma::ChannelKind::Awgn;
  } else if (channel == "rayleigh") {
    sweep.channel = scma::ChannelKind::Rayleigh;
  } else {
    throw std::invalid_argument(
        "config key simulate.channel must be 'awgn' or 'rayleigh'");
  }
  const std::string decoder =
      ctx.config.get_string("simulate", "decoder", "mpa");
  if (decoder == "mpa") {
    sweep.decoder = scma::DecoderKind::Mpa;
  } else if (decoder == "ml") {
    sweep.decoder = scma::DecoderKind::Ml;
  } else {
    throw std::invalid_argument(
        "config key simulate.decoder must be 'mpa' or 'ml'");
  }
  const std::string mapping =
      ctx.config.get_string("simulate", "mapping", "gray");
  if (mapping == "gray") {
    sweep.mapping = scma::BitMapping::Gray;
  } else if (mapping == "natural") {
    sweep.mapping = scma::BitMapping::Natural;
  } else {
    throw std::invalid_argument(
        "config key simulate.mapping must be 'gray' or 'natural'");
  }
  sweep.mpa.iterations =
      static_cast<int>(ctx.config.get_int("simulate", "iterations", 8));
  sweep.mpa.damping = ctx.config.get_double("simulate", "damping", 0.0);
  const std::string domain =
      ctx.config.get_string("simulate", "domain", "log");
  if (domain == "log") {
    sweep.mpa.domain = scma::MpaDomain::Log;
  } else if (domain == "probability") {
    sweep.mpa.domain = scma::MpaDomain::Probability;
  } else {
    throw std::invalid_argument(
        "config key simulate.domain must be 'log' or 'probability'");
  }
  sweep.min_errors = ctx.config.get_uint64("simulate", "min_errors", 200);
  sweep.min_errors_per_user =
      ctx.config.get_uint64("simulate", "min_errors_per_user", 0);
  sweep.max_bits = ctx.config.get_uint64("simulate", "max_bits", 100000000);
  sweep.seed = ctx.seed;
  sweep.threads = ctx.threads;

  const std::string csv_output =
      ctx.config.get_string("simulate", "csv_output", "ber.csv");
  const std::string json_output =
      ctx.config.get_string("simulate", "json_output", "ber.json");
  // informational key, carried through manifests
  ctx.config.get_string("simulate", "eb_definition", "");

  ctx.manifest.set_double_list("simulate", "ebn0_db", sweep.ebn0_db);
  ctx.manifest.set("simulate", "channel", channel);
  ctx.manifest.set("simulate", "decoder", decoder);
  ctx.manifest.set("simulate", "mapping", mapping);
  ctx.manifest.set("simulate", "iterations",
                   std::to_string(sweep.mpa.iterations));
  ctx.manifest.set_double("simulate", "damping", sweep.mpa.damping);
  ctx.manifest.set("simulate", "domain", domain);
  ctx.manifest.set("simulate", "min_errors",
                   std::to_string(sweep.min_errors));
  ctx.manifest.set("simulate", "min_errors_per_user",
                   std::to_string(sweep.min_errors_per_user));
  ctx.manifest.set("simulate", "max_bits", std::to_string(sweep.max_bits));
  ctx.manifest.set("simulate", "csv_output", csv_output);
  ctx.manifest.set("simulate", "json_output", json_output);
  ctx.manifest.set("simulate", "eb_definition",
                   "Eb = 1/log2(M) per user bit; unit average codeword "
                   "energy; sigma^2 = N0 per complex dimension");
  ctx.config.finish();

  const scma::BerCurve curve = scma::ber_sweep(cs, sweep);
  scma::save_ber_csv(curve, ctx.resolve(csv_output));
  scma::save_ber_json(curve, ctx.resolve(json_output));
  ctx.write_manifest();
  std::cout << "wrote " << ctx.resolve(csv_output).string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power-imbalanced SCMA codebook design and verification"};
  app.require_subcommand(1);

  CommonArgs info_args, build_args, metrics_args, optimize_args,
      simulate_args;
  std::string info_template;

  CLI::App* info = app.add_subcommand(
      "info", "describe a built-in spreading template");
  info->add_option("template", info_template, "template name, e.g. S4x6");
  add_common_flags(info, info_args, false);

  CLI::App* build = app.add_subcommand(
      "build", "construct a codebook set and write it as JSON");
  add_common_flags(build, build_args, true);

  CLI::App* metrics = app.add_subcommand(
      "metrics", "distance metrics for a codebook set");
  add_common_flags(metrics, metrics_args, true);

  CLI::App* optimize = app.add_subcommand(
      "optimize", "search for a design point maximizing the MED");
  add_common_flags(optimize, optimize_args, true);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "link-level BER sweep");
  add_common_flags(simulate, simulate_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (info->parsed()) {
      std::string name = info_template;
      if (name.empty() && !info_args.config_path.empty()) {
        RunConfig cfg = RunConfig::parse_file(info_args.config_path);
        name = cfg.require_string("info", "template");
      }
      if (name.empty()) {
        throw std::invalid_argument(
            "info needs a template name (argument or [info] template)");
      }
      return cmd_info(name);
    }
    if (build->parsed()) {
      RunContext ctx = make_context(build_args, "build");
      return cmd_build(ctx);
    }
    if (metrics->parsed()) {
      RunContext ctx = make_context(metrics_args, "metrics");
      return cmd_metrics(ctx);
    }
    if (optimize->parsed()) {
      RunContext ctx = make_context(optimize_args, "optimize");
      return cmd_optimize(ctx);
    }
    if (simulate->parsed()) {
      RunContext ctx = make_context(simulate_args, "simulate");
      return cmd_simulate(ctx);
    }
  } catch (const scma::BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const scma::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
