// Deterministic Monte-Carlo sweeps over (D, p, SNR) grids and the EM
// convergence study. Each (grid point, trial) draws from its own derived RNG
// stream and records are emitted in canonical order, so output is a pure
// function of the configuration regardless of the worker count.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "blindest/blind_estimators.hpp"
#include "blindest/em_mixture.hpp"
#include "blindest/rng.hpp"
#include "blindest/signal_model.hpp"
#include "blindest/sim/parallel.hpp"
#include "blindest/sim/vector_io.hpp"

namespace blindest::sim {

struct SweepConfig {
  std::uint64_t master_seed = 1;
  int trials = 10000;
  std::vector<std::size_t> dims{64};
  std::vector<double> activity_rates{0.1};
  std::vector<double> snrs{1.0};
  double noise_power = 1.0;
  double q = 1.0;
  double r = kInfNorm;
  bool em_baseline = false;
  bool em_accelerated = false;
  int em_max_iterations = 30;
  double em_tolerance = 1e-3;
  double em_noise_fraction = 0.4;
  bool timing = false;  // adds runtime columns; output then no longer reproducible
  unsigned threads = 1;

  void validate() const {
    blindest::detail::require(trials >= 1, "sweep: trials must be >= 1");
    blindest::detail::require(!dims.empty() && !activity_rates.empty() && !snrs.empty(), "sweep: grid lists must be nonempty");
    for (auto d : dims) blindest::detail::require(d >= 1, "sweep: D must be >= 1");
    for (double p : activity_rates) blindest::detail::require(p > 0.0 && p <= 1.0, "sweep: p must lie in (0, 1]");
    for (double s : snrs) blindest::detail::require(s >= 0.0 && std::isfinite(s), "sweep: SNR must be finite and >= 0");
    blindest::detail::require(noise_power > 0.0 && std::isfinite(noise_power), "sweep: noise power must be > 0");
    blindest::detail::require(q >= 1.0 && q < r, "sweep: need 1 <= q < r");
    blindest::detail::require(em_max_iterations >= 1, "sweep: em max iterations must be >= 1");
    blindest::detail::require(em_tolerance >= 0.0, "sweep: em tolerance must be >= 0");
    blindest::detail::require(em_noise_fraction > 0.0 && em_noise_fraction < 1.0, "sweep: em noise fraction must lie in (0,1)");
  }

  std::size_t grid_size() const { return dims.size() * activity_rates.size() * snrs.size(); }
};

struct GridPoint {
  std::size_t index = 0;
  std::size_t dimension = 0;
  double activity_rate = 0.0;
  double snr = 0.0;
};

inline GridPoint grid_point(const SweepConfig& cfg, std::size_t index) {
  const std::size_t ns = cfg.snrs.size(), np = cfg.activity_rates.size();
  return {index, cfg.dims[index / (np * ns)], cfg.activity_rates[(index / ns) % np], cfg.snrs[index % ns]};
}

inline constexpr double kNotComputed = std::numeric_limits<double>::quiet_NaN();

struct TrialRecord {
  std::size_t grid_index = 0;
  int trial = 0;
  std::size_t dimension = 0;
  double activity_rate = 0.0;
  double snr = 0.0;
  double noise_power = 0.0;
  GenieStats genie;
  EstimateReport blind;
  double em_noise_power = kNotComputed;
  double em_signal_power = kNotComputed;
  double em_activity_rate = kNotComputed;
  int em_iterations = -1;
  double acc_noise_power = kNotComputed;
  double acc_signal_power = kNotComputed;
  double acc_activity_rate = kNotComputed;
  int acc_iterations = -1;
  std::int64_t blind_ns = 0;
  std::int64_t em_ns = 0;
  std::int64_t acc_ns = 0;
};

/// Names and accessors of the per-trial quantities that get summarized.
struct Metric {
  const char* name;
  double (*get)(const TrialRecord&);
};

inline const std::vector<Metric>& metrics() {
  static const std::vector<Metric> m = {
      {"genie_noise_power", [](const TrialRecord& t) { return t.genie.noise_power; }},
      {"genie_signal_power", [](const TrialRecord& t) { return t.genie.signal_power; }},
      {"genie_snr", [](const TrialRecord& t) { return t.genie.snr; }},
      {"noise_power_hat", [](const TrialRecord& t) { return t.blind.noise_power_hat; }},
      {"signal_power_hat", [](const TrialRecord& t) { return t.blind.signal_power_hat; }},
      {"snr_hat", [](const TrialRecord& t) { return t.blind.snr_hat; }},
      {"activity_rate_hat", [](const TrialRecord& t) { return t.blind.activity_rate_hat; }},
      {"noise_power_parametric_hat", [](const TrialRecord& t) { return t.blind.noise_power_parametric_hat; }},
      {"em_noise_power", [](const TrialRecord& t) { return t.em_noise_power; }},
      {"em_signal_power", [](const TrialRecord& t) { return t.em_signal_power; }},
      {"em_activity_rate", [](const TrialRecord& t) { return t.em_activity_rate; }},
      {"em_iterations", [](const TrialRecord& t) { return t.em_iterations < 0 ? kNotComputed : double(t.em_iterations); }},
      {"acc_em_noise_power", [](const TrialRecord& t) { return t.acc_noise_power; }},
      {"acc_em_signal_power", [](const TrialRecord& t) { return t.acc_signal_power; }},
      {"acc_em_activity_rate", [](const TrialRecord& t) { return t.acc_activity_rate; }},
      {"acc_em_iterations",
       [](const TrialRecord& t) { return t.acc_iterations < 0 ? kNotComputed : double(t.acc_iterations); }},
  };
  return m;
}

struct SummaryRow {
  std::size_t grid_index = 0;
  std::size_t dimension = 0;
  double activity_rate = 0.0;
  double snr = 0.0;
  std::string metric;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1); 0 for a single trial
};

struct SweepResult {
  std::vector<TrialRecord> records;  // grid-major, then trial index
  std::vector<SummaryRow> summary;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Two-pass mean and sample standard deviation.
inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return out;
}

inline TrialRecord run_trial(const SweepConfig& cfg, const GridPoint& gp, int trial) {
  Rng rng = Rng::derive(cfg.master_seed, {gp.index, static_cast<std::uint64_t>(trial)});
  const BcgParams params = BcgParams::from_snr(gp.dimension, gp.activity_rate, gp.snr, cfg.noise_power);
  const TrialSample sample = sample_trial(params, rng);

  TrialRecord rec;
  rec.grid_index = gp.index;
  rec.trial = trial;
  rec.dimension = gp.dimension;
  rec.activity_rate = gp.activity_rate;
  rec.snr = gp.snr;
  rec.noise_power = cfg.noise_power;
  rec.genie = genie_stats(sample);

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  rec.blind = estimate_all(sample.y, cfg.q, cfg.r);
  rec.blind_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count();

  if (cfg.em_baseline) {
    t0 = clock::now();
    const EmResult em =
        em_estimate(sample.y, baseline_config(sample.y, cfg.em_noise_fraction, cfg.em_max_iterations, cfg.em_tolerance));
    rec.em_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count();
    rec.em_noise_power = em.noise_power;
    rec.em_signal_power = em.signal_power;
    rec.em_activity_rate = em.activity_rate;
    rec.em_iterations = em.iterations;
  }
  if (cfg.em_accelerated) {
    t0 = clock::now();
    const EmResult em = em_estimate(sample.y, accelerated_config(sample.y, cfg.em_max_iterations, cfg.em_tolerance));
    rec.acc_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count();
    rec.acc_noise_power = em.noise_power;
    rec.acc_signal_power = em.signal_power;
    rec.acc_activity_rate = em.activity_rate;
    rec.acc_iterations = em.iterations;
  }
  return rec;
}

inline std::vector<SummaryRow> summarize(const SweepConfig& cfg, const std::vector<TrialRecord>& records) {
  std::vector<SummaryRow> rows;
  const std::size_t per_point = static_cast<std::size_t>(cfg.trials);
  for (std::size_t g = 0; g < cfg.grid_size(); ++g) {
    const GridPoint gp = grid_point(cfg, g);
    for (const Metric& m : metrics()) {
      std::vector<double> vals;
      vals.reserve(per_point);
      for (std::size_t t = 0; t < per_point; ++t) {
        const double v = m.get(records[g * per_point + t]);
        if (std::isfinite(v)) vals.push_back(v);
      }
      if (vals.empty()) continue;
      const MeanStd ms = mean_std(vals);
      rows.push_back({g, gp.dimension, gp.activity_rate, gp.snr, m.name, vals.size(), ms.mean, ms.stddev});
    }
  }
  return rows;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t per_point = static_cast<std::size_t>(cfg.trials);
  SweepResult res;
  res.records.resize(cfg.grid_size() * per_point);
  parallel_for(res.records.size(), effective_threads(cfg.threads), [&](std::size_t i) {
    res.records[i] = run_trial(cfg, grid_point(cfg, i / per_point), static_cast<int>(i % per_point));
  });
  res.summary = summarize(cfg, res.records);
  return res;
}

namespace detail {
inline std::string cell(double v) { return std::isnan(v) ? std::string("nan") : io::fmt_double(v); }
}  // namespace detail

inline void write_records_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<TrialRecord>& records) {
  os << "grid_index,trial,D,p,snr,noise_power";
  for (const Metric& m : metrics()) os << ',' << m.name;
  if (cfg.timing) os << ",blind_ns,em_ns,acc_em_ns";
  os << '\n';
  for (const TrialRecord& t : records) {
    os << t.grid_index << ',' << t.trial << ',' << t.dimension << ',' << detail::cell(t.activity_rate) << ','
       << detail::cell(t.snr) << ',' << detail::cell(t.noise_power);
    for (const Metric& m : metrics()) os << ',' << detail::cell(m.get(t));
    if (cfg.timing) os << ',' << t.blind_ns << ',' << t.em_ns << ',' << t.acc_ns;
    os << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "grid_index,D,p,snr,metric,count,mean,stddev\n";
  for (const SummaryRow& r : rows) {
    os << r.grid_index << ',' << r.dimension << ',' << detail::cell(r.activity_rate) << ',' << detail::cell(r.snr) << ','
       << r.metric << ',' << r.count << ',' << detail::cell(r.mean) << ',' << detail::cell(r.stddev) << '\n';
  }
}

// ---------------------------------------------------------------------------
// EM convergence study: early stopping disabled (tolerance 0) and K^max swept.

struct EmConvergenceConfig {
  std::uint64_t master_seed = 1;
  int trials = 500;
  std::size_t dimension = 256;
  double activity_rate = 0.1;
  double snr = 0.1;
  double noise_power = 1.0;
  int max_k = 30;
  double baseline_noise_fraction = 1.0 / 6.0;
  unsigned threads = 1;

  void validate() const {
    blindest::detail::require(trials >= 1, "em-convergence: trials must be >= 1");
    blindest::detail::require(dimension >= 1, "em-convergence: D must be >= 1");
    blindest::detail::require(activity_rate > 0.0 && activity_rate <= 1.0, "em-convergence: p must lie in (0, 1]");
    blindest::detail::require(snr >= 0.0 && std::isfinite(snr), "em-convergence: SNR must be >= 0");
    blindest::detail::require(noise_power > 0.0, "em-convergence: noise power must be > 0");
    blindest::detail::require(max_k >= 1, "em-convergence: max K must be >= 1");
    blindest::detail::require(baseline_noise_fraction > 0.0 && baseline_noise_fraction < 1.0,
                    "em-convergence: baseline noise fraction must lie in (0, 1)");
  }
};

struct EmConvergenceRecord {
  int trial = 0;
  int k_max = 0;
  double baseline_error = 0.0;     // |N0_EM - N0| / N0
  double accelerated_error = 0.0;
  int baseline_iterations = 0;
  int accelerated_iterations = 0;
};

struct EmConvergenceSummary {
  int k_max = 0;
  double baseline_median = 0.0;
  double accelerated_median = 0.0;
  double baseline_mean = 0.0;
  double accelerated_mean = 0.0;
};

struct EmConvergenceResult {
  std::vector<EmConvergenceRecord> records;  // trial-major, then K
  std::vector<EmConvergenceSummary> summary;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return kNotComputed;
  return sample_median_inplace(v);
}

inline EmConvergenceResult run_em_convergence(const EmConvergenceConfig& cfg) {
  cfg.validate();
  const auto kk = static_cast<std::size_t>(cfg.max_k);
  EmConvergenceResult res;
  res.records.resize(static_cast<std::size_t>(cfg.trials) * kk);
  parallel_for(static_cast<std::size_t>(cfg.trials), effective_threads(cfg.threads), [&](std::size_t t) {
    Rng rng = Rng::derive(cfg.master_seed, {0xE11ULL, t});
    const BcgParams params = BcgParams::from_snr(cfg.dimension, cfg.activity_rate, cfg.snr, cfg.noise_power);
    const TrialSample sample = sample_trial(params, rng);
    for (int k = 1; k <= cfg.max_k; ++k) {
      const EmResult base = em_estimate(sample.y, baseline_config(sample.y, cfg.baseline_noise_fraction, k, 0.0));
      const EmResult acc = em_estimate(sample.y, accelerated_config(sample.y, k, 0.0));
      res.records[t * kk + static_cast<std::size_t>(k - 1)] = {
          static_cast<int>(t),
          k,
          std::abs(base.noise_power - cfg.noise_power) / cfg.noise_power,
          std::abs(acc.noise_power - cfg.noise_power) / cfg.noise_power,
          base.iterations,
          acc.iterations};
    }
  });
  for (std::size_t k = 0; k < kk; ++k) {
    std::vector<double> b, a;
    for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.trials); ++t) {
      b.push_back(res.records[t * kk + k].baseline_error);
      a.push_back(res.records[t * kk + k].accelerated_error);
    }
    res.summary.push_back({static_cast<int>(k + 1), median_of(b), median_of(a), mean_std(b).mean, mean_std(a).mean});
  }
  return res;
}

inline void write_em_convergence_csv(std::ostream& os, const std::vector<EmConvergenceRecord>& records) {
  os << "trial,k_max,baseline_error,accelerated_error,baseline_iterations,accelerated_iterations\n";
  for (const auto& r : records) {
    os << r.trial << ',' << r.k_max << ',' << io::fmt_double(r.baseline_error) << ','
       << io::fmt_double(r.accelerated_error) << ',' << r.baseline_iterations << ',' << r.accelerated_iterations
       << '\n';
  }
}

inline void write_em_convergence_summary(std::ostream& os, const std::vector<EmConvergenceSummary>& rows) {
  os << "k_max,baseline_median,accelerated_median,baseline_mean,accelerated_mean\n";
  for (const auto& r : rows) {
    os << r.k_max << ',' << io::fmt_double(r.baseline_median) << ',' << io::fmt_double(r.accelerated_median) << ','
       << io::fmt_double(r.baseline_mean) << ',' << io::fmt_double(r.accelerated_mean) << '\n';
  }
}

}  // namespace blindest::sim
