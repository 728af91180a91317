// blindest: command-line front end for the blind estimators, the Monte-Carlo
// harness and the beamspace denoiser.
//
// Exit codes: 0 success, 2 usage or invalid parameters, 3 data errors.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blindest/blindest.hpp"
#include "blindest/sim/config.hpp"
#include "blindest/sim/sweep.hpp"
#include "blindest/sim/vector_io.hpp"

namespace {

using json = nlohmann::json;
using namespace blindest;

constexpr int kUsageError = 2;
constexpr int kDataError = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  io::detail::write_file(path, text);
}

// Options given on the command line, forwarded to the config key handlers.
using Overrides = std::map<std::string, std::string>;

void add_override(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                  const std::string& help) {
  app->add_option_function<std::string>(flag, [&ov, key](const std::string& v) { ov[key] = v; }, help);
}

// ---------------------------------------------------------------- estimate
struct EstimateArgs {
  std::string input;
  std::string format = "csv";
  double q = 1.0;
  std::string r = "inf";
  bool em = false;
  bool em_accelerated = false;
  int em_max_iterations = 30;
  double em_tolerance = 1e-3;
  double em_noise_fraction = 0.4;
};

json em_json(const EmResult& r) {
  return {{"noise_power", r.noise_power},
          {"signal_power", r.signal_power},
          {"activity_rate", r.activity_rate},
          {"snr", r.noise_power > 0.0 ? r.signal_power / r.noise_power : 0.0},
          {"iterations", r.iterations}};
}

int run_estimate(const EstimateArgs& a) {
  const ComplexVector y = io::read_vector(a.input, io::parse_format(a.format));
  const double r = sim::detail::to_double("r", a.r);
  const EstimateReport rep = estimate_all(y, a.q, r);
  json out = {{"dimension", y.size()},
              {"noise_power", rep.noise_power_hat},
              {"signal_power", rep.signal_power_hat},
              {"snr", rep.snr_hat},
              {"activity_rate", rep.activity_rate_hat},
              {"noise_power_parametric", rep.noise_power_parametric_hat},
              {"q", a.q},
              {"r", std::isinf(r) ? json("inf") : json(r)}};
  if (a.em) {
    out["em_baseline"] = em_json(em_estimate(y, baseline_config(y, a.em_noise_fraction, a.em_max_iterations, a.em_tolerance)));
  }
  if (a.em_accelerated) {
    out["em_accelerated"] = em_json(em_estimate(y, accelerated_config(y, a.em_max_iterations, a.em_tolerance)));
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- simulate
struct SimulateArgs {
  std::string config;
  std::string output = "-";
  std::string summary;
  Overrides overrides;
};

int run_simulate(const SimulateArgs& a) {
  sim::SweepConfig cfg;
  if (!a.config.empty()) sim::apply_all(cfg, sim::read_key_values(a.config), sim::apply_sweep_key);
  sim::apply_all(cfg, a.overrides, sim::apply_sweep_key);
  const sim::SweepResult res = sim::run_sweep(cfg);
  std::ostringstream rec;
  sim::write_records_csv(rec, cfg, res.records);
  write_text(a.output, rec.str());
  std::ostringstream sum;
  sim::write_summary_csv(sum, res.summary);
  if (!a.summary.empty()) {
    write_text(a.summary, sum.str());
  } else if (!a.output.empty() && a.output != "-") {
    std::cout << sum.str();
  }
  return 0;
}

// ---------------------------------------------------------- em-convergence
int run_em_convergence(const SimulateArgs& a) {
  sim::EmConvergenceConfig cfg;
  if (!a.config.empty()) sim::apply_all(cfg, sim::read_key_values(a.config), sim::apply_em_convergence_key);
  sim::apply_all(cfg, a.overrides, sim::apply_em_convergence_key);
  const sim::EmConvergenceResult res = sim::run_em_convergence(cfg);
  std::ostringstream rec;
  sim::write_em_convergence_csv(rec, res.records);
  write_text(a.output, rec.str());
  std::ostringstream sum;
  sim::write_em_convergence_summary(sum, res.summary);
  if (!a.summary.empty()) {
    write_text(a.summary, sum.str());
  } else if (!a.output.empty() && a.output != "-") {
    std::cout << sum.str();
  }
  return 0;
}

// ----------------------------------------------------------------- denoise
struct DenoiseArgs {
  std::string input;
  std::string format = "csv";
  std::string output;
  std::string output_format;
  std::string truth;
  std::string mode = "median";
  std::optional<double> noise_power;
  bool quantized = false;
  int em_max_iterations = 30;
  double em_tolerance = 1e-3;
  double em_noise_fraction = 0.4;
};

int run_denoise(const DenoiseArgs& a) {
  const io::Format fmt = io::parse_format(a.format);
  const io::Format out_fmt = a.output_format.empty() ? fmt : io::parse_format(a.output_format);
  NoiseMode mode;
  if (a.mode == "known") {
    if (!a.noise_power) throw ParameterError("denoise: --mode known requires --noise-power");
    mode = KnownNoise{*a.noise_power};
  } else if (a.mode == "median") {
    mode = MedianBlind{};
  } else if (a.mode == "em") {
    mode = EmBlind{a.em_max_iterations, a.em_tolerance, a.em_noise_fraction};
  } else {
    throw ParameterError("denoise: unknown mode '" + a.mode + "' (known, median, em)");
  }
  const ChannelMatrix observed = io::read_matrix(a.input, fmt);
  const ChannelDenoiseResult res = denoise_channel_detailed(observed, mode, a.quantized);
  if (!a.output.empty()) io::write_matrix(a.output, res.estimate, out_fmt);

  json report = {{"rows", observed.rows()},
                 {"cols", observed.cols()},
                 {"mode", a.mode},
                 {"quantized", a.quantized},
                 {"thresholds", res.thresholds},
                 {"noise_powers", res.noise_powers}};
  if (!a.truth.empty()) {
    const ChannelMatrix truth = io::read_matrix(a.truth, fmt);
    report["mse"] = channel_mse(res.estimate, truth);
    report["observation_mse"] = channel_mse(observed, truth);
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------------- bench
struct BenchArgs {
  std::vector<std::size_t> dims{std::size_t{1} << 19, std::size_t{1} << 22};
  int repeats = 5;
  std::uint64_t seed = 1;
  bool em = false;
};

int run_bench(const BenchArgs& a) {
  if (a.repeats < 1) throw ParameterError("bench: repeats must be >= 1");
  using clock = std::chrono::steady_clock;
  json rows = json::array();
  for (std::size_t d : a.dims) {
    if (d < 1) throw ParameterError("bench: D must be >= 1");
    Rng rng = Rng::derive(a.seed, {d});
    const TrialSample t = sample_trial(BcgParams::from_snr(d, 0.1, 1.0), rng);
    const RealVector z = abs_squared(t.y);
    std::vector<double> median_ns, estimate_ns, em_ns;
    for (int rep = 0; rep < a.repeats; ++rep) {
      RealVector work = z;
      auto t0 = clock::now();
      volatile double m = sample_median_inplace(work);
      (void)m;
      median_ns.push_back(std::chrono::duration<double, std::nano>(clock::now() - t0).count());
      t0 = clock::now();
      volatile double n0 = estimate_all(t.y).noise_power_parametric_hat;
      (void)n0;
      estimate_ns.push_back(std::chrono::duration<double, std::nano>(clock::now() - t0).count());
      if (a.em) {
        t0 = clock::now();
        volatile double e = em_estimate(t.y, baseline_config(t.y, 0.4, 30, 1e-3)).noise_power;
        (void)e;
        em_ns.push_back(std::chrono::duration<double, std::nano>(clock::now() - t0).count());
      }
    }
    json row = {{"D", d},
                {"median_ns", sim::median_of(median_ns)},
                {"estimate_all_ns", sim::median_of(estimate_ns)},
                {"median_ns_per_entry", sim::median_of(median_ns) / static_cast<double>(d)}};
    if (a.em) row["em_baseline_ns"] = sim::median_of(em_ns);
    rows.push_back(row);
  }
  std::cout << json{{"repeats", a.repeats}, {"results", rows}}.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind noise/signal power, SNR and MSE estimation for sparse complex signals"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Blind estimates for one vector file (JSON report)");
  c_est->add_option("input", est.input, "Vector file")->required();
  c_est->add_option("--format", est.format, "csv or bin")->capture_default_str();
  c_est->add_option("--q", est.q, "Activity-rate norm index q")->capture_default_str();
  c_est->add_option("--r", est.r, "Activity-rate norm index r (number or inf)")->capture_default_str();
  c_est->add_flag("--em", est.em, "Also run baseline EM");
  c_est->add_flag("--em-accelerated", est.em_accelerated, "Also run median-initialized EM");
  c_est->add_option("--em-max-iterations", est.em_max_iterations)->capture_default_str();
  c_est->add_option("--em-tolerance", est.em_tolerance)->capture_default_str();
  c_est->add_option("--em-noise-fraction", est.em_noise_fraction, "Baseline N0_init / (||y||^2/D)")
      ->capture_default_str();

  SimulateArgs simu;
  auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo estimator sweep over a (D, p, SNR) grid");
  c_sim->add_option("--config", simu.config, "key=value config file (flags override it)");
  c_sim->add_option("--output,-o", simu.output, "Per-trial CSV ('-' for stdout)");
  c_sim->add_option("--summary", simu.summary, "Per-grid-point mean/stddev CSV");
  add_override(c_sim, simu.overrides, "--seed", "seed", "Master seed");
  add_override(c_sim, simu.overrides, "--trials", "trials", "Trials per grid point (default 10000)");
  add_override(c_sim, simu.overrides, "--dims", "dims", "Comma-separated D list");
  add_override(c_sim, simu.overrides, "--p", "p", "Comma-separated activity rates");
  add_override(c_sim, simu.overrides, "--snr", "snr", "Comma-separated linear SNRs");
  add_override(c_sim, simu.overrides, "--snr-db", "snr_db", "Comma-separated SNRs in dB");
  add_override(c_sim, simu.overrides, "--noise-power", "noise_power", "Noise power N0 (default 1)");
  add_override(c_sim, simu.overrides, "--estimators", "estimators", "blind,em-baseline,em-accelerated");
  add_override(c_sim, simu.overrides, "--em-max-iterations", "em_max_iterations", "EM iteration cap");
  add_override(c_sim, simu.overrides, "--em-tolerance", "em_tolerance", "EM tolerance");
  add_override(c_sim, simu.overrides, "--em-noise-fraction", "em_noise_fraction", "Baseline EM N0_init fraction");
  add_override(c_sim, simu.overrides, "--q", "q", "Activity-rate norm index q");
  add_override(c_sim, simu.overrides, "--r", "r", "Activity-rate norm index r");
  add_override(c_sim, simu.overrides, "--threads", "threads", "Worker threads (capped by BLINDEST_THREADS)");
  add_override(c_sim, simu.overrides, "--timing", "timing", "Add runtime columns (true/false)");

  SimulateArgs conv;
  auto* c_conv = app.add_subcommand("em-convergence", "Baseline vs. accelerated EM error against K^max");
  c_conv->add_option("--config", conv.config, "key=value config file (flags override it)");
  c_conv->add_option("--output,-o", conv.output, "Per-trial CSV ('-' for stdout)");
  c_conv->add_option("--summary", conv.summary, "Per-K median/mean CSV");
  add_override(c_conv, conv.overrides, "--seed", "seed", "Master seed");
  add_override(c_conv, conv.overrides, "--trials", "trials", "Trials (default 500)");
  add_override(c_conv, conv.overrides, "--dim", "D", "Dimension D (default 256)");
  add_override(c_conv, conv.overrides, "--p", "p", "Activity rate");
  add_override(c_conv, conv.overrides, "--snr", "snr", "Linear SNR");
  add_override(c_conv, conv.overrides, "--noise-power", "noise_power", "Noise power N0");
  add_override(c_conv, conv.overrides, "--max-k", "max_k", "Largest K^max (default 30)");
  add_override(c_conv, conv.overrides, "--baseline-noise-fraction", "baseline_noise_fraction",
               "Baseline N0_init fraction (default 1/6)");
  add_override(c_conv, conv.overrides, "--threads", "threads", "Worker threads");

  DenoiseArgs den;
  auto* c_den = app.add_subcommand("denoise", "Beamspace soft-threshold denoising of a channel matrix");
  c_den->add_option("input", den.input, "Antenna-domain matrix file")->required();
  c_den->add_option("--format", den.format, "csv or bin")->capture_default_str();
  c_den->add_option("--output,-o", den.output, "Denoised matrix file");
  c_den->add_option("--output-format", den.output_format, "csv or bin (default: input format)");
  c_den->add_option("--truth", den.truth, "Ground-truth matrix for an MSE report");
  c_den->add_option("--mode", den.mode, "known, median or em")->capture_default_str();
  c_den->add_option("--noise-power", den.noise_power, "Noise power for --mode known (Q0 for 1-bit input)");
  c_den->add_flag("--quantized", den.quantized, "Input is 1-bit quantized (entries +-1 +-j)");
  c_den->add_option("--em-max-iterations", den.em_max_iterations)->capture_default_str();
  c_den->add_option("--em-tolerance", den.em_tolerance)->capture_default_str();
  c_den->add_option("--em-noise-fraction", den.em_noise_fraction)->capture_default_str();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Median and estimator runtimes versus D");
  c_bench->add_option("--dims", bench.dims, "Dimensions")->delimiter(',');
  c_bench->add_option("--repeats", bench.repeats)->capture_default_str();
  c_bench->add_option("--seed", bench.seed)->capture_default_str();
  c_bench->add_flag("--em", bench.em, "Also time baseline EM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (c_est->parsed()) return run_estimate(est);
    if (c_sim->parsed()) return run_simulate(simu);
    if (c_conv->parsed()) return run_em_convergence(conv);
    if (c_den->parsed()) return run_denoise(den);
    if (c_bench->parsed()) return run_bench(bench);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
