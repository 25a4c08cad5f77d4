#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "omplab/bounds.hpp"
#include "omplab/errors.hpp"
#include "omplab/omp.hpp"
#include "omplab/random.hpp"
#include "omplab/sensing.hpp"
#include "omplab/signal.hpp"
#include "omplab/types.hpp"

// Seeded trial batches. Trial t derives everything it needs from
// substream_seed(master_seed, t):
//   substream 0 -> matrix draw (unless fixed_matrix reuses the config draw)
//   substream 1 -> signal support and magnitudes
//   substream 2 -> noise direction
// so a report is a pure function of its config, independent of how many
// worker threads ran it. OMP_LAB_THREADS caps the worker count.

namespace omplab {

enum class MagnitudeModel { unit, gaussian, decaying, zero };

inline const char* to_string(MagnitudeModel m) {
  switch (m) {
    case MagnitudeModel::unit: return "unit";
    case MagnitudeModel::gaussian: return "gaussian";
    case MagnitudeModel::decaying: return "decaying";
    case MagnitudeModel::zero: return "zero";
  }
  return "unit";
}

inline MagnitudeModel magnitude_from_string(const std::string& s) {
  if (s == "unit") return MagnitudeModel::unit;
  if (s == "gaussian") return MagnitudeModel::gaussian;
  if (s == "decaying") return MagnitudeModel::decaying;
  if (s == "zero") return MagnitudeModel::zero;
  throw ContractViolation("signal.magnitude: unknown value '" + s + "'");
}

enum class DecoderKind { omp, oracle };

struct Metric {
  enum class Kind { l1, l2, lq, success, sigma_ratio };
  Kind kind = Kind::l2;
  double q = 2.0;        // lq
  double tol = 1e-6;     // success: ||x*-x||_2 <= tol * ||x||_2
  double ratio_p = 1.0;  // sigma_ratio exponents
  double ratio_q = 2.0;

  const char* label() const {
    switch (kind) {
      case Kind::l1: return "l1";
      case Kind::l2: return "l2";
      case Kind::lq: return "lq";
      case Kind::success: return "success";
      case Kind::sigma_ratio: return "sigma_ratio";
    }
    return "l2";
  }
};

struct ExperimentConfig {
  MatrixSpec matrix;
  bool fixed_matrix = false;
  int sparsity = 1;
  MagnitudeModel magnitude = MagnitudeModel::unit;
  double noise_l2 = 0.0;
  int trials = 1;
  DecoderKind decoder = DecoderKind::omp;
  int omp_iterations = 1;
  double stop_rel = 1e-12;
  std::vector<Metric> metrics;
  std::uint64_t master_seed = 0;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool stopped_early = false;
  std::vector<double> values;  // aligned with config.metrics; NaN = undefined
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  nlohmann::json aggregates;
  std::string timestamp;
};

inline void validate_config(const ExperimentConfig& c) {
  const auto fail = [](const std::string& field, const std::string& msg) {
    throw ContractViolation("experiment config: " + field + ": " + msg);
  };
  if (c.matrix.rows < 1 || c.matrix.cols < 1) fail("matrix", "dimensions must be >= 1");
  if (c.matrix.ensemble == Ensemble::orthogonal && c.matrix.rows != c.matrix.cols) {
    fail("matrix", "orthogonal ensemble requires rows == cols");
  }
  if (c.matrix.ensemble != Ensemble::orthogonal && c.matrix.rows > c.matrix.cols) {
    fail("matrix", "random ensembles require rows <= cols");
  }
  if (c.sparsity < 0) fail("signal.sparsity", "must be >= 0");
  if (c.sparsity > c.matrix.cols) fail("signal.sparsity", "must be <= matrix.cols");
  if (c.magnitude == MagnitudeModel::decaying && 2 * c.sparsity > c.matrix.cols) {
    fail("signal.sparsity", "decaying model draws a 2k support; 2k must be <= matrix.cols");
  }
  if (!(c.noise_l2 >= 0.0)) fail("noise_l2", "must be >= 0");
  if (c.trials < 1) fail("trials", "must be >= 1");
  if (c.decoder == DecoderKind::omp) {
    if (c.omp_iterations < 1) fail("decoder.iterations", "must be >= 1");
    if (c.omp_iterations > c.matrix.cols) fail("decoder.iterations", "must be <= matrix.cols");
    if (!(c.stop_rel >= 0.0)) fail("decoder.stop_rel", "must be >= 0");
  } else if (c.sparsity < 1) {
    fail("signal.sparsity", "must be >= 1 for decoder 'oracle'");
  }
  std::vector<std::string> seen;
  for (const Metric& m : c.metrics) {
    for (const auto& s : seen) {
      if (s == m.label()) fail("metrics", std::string("duplicate metric '") + m.label() + "'");
    }
    seen.push_back(m.label());
    if (m.kind == Metric::Kind::lq && !(m.q >= 1.0)) fail("metrics.lq.q", "must be >= 1");
    if (m.kind == Metric::Kind::success && !(m.tol >= 0.0)) fail("metrics.success.tol", "must be >= 0");
    if (m.kind == Metric::Kind::sigma_ratio) {
      if (!(m.ratio_p >= 1.0 && m.ratio_q >= m.ratio_p)) {
        fail("metrics.sigma_ratio", "exponents must satisfy 1 <= p <= q");
      }
      if (c.sparsity < 1) fail("metrics.sigma_ratio", "requires signal.sparsity >= 1");
    }
  }
}

namespace detail {

inline TrialRecord run_trial(const ExperimentConfig& c, int t, const DenseMatrix* shared) {
  const std::uint64_t seed_t = substream_seed(c.master_seed, static_cast<std::uint64_t>(t));
  const int n = c.matrix.rows;
  const int N = c.matrix.cols;
  const int k = c.sparsity;

  std::optional<DenseMatrix> own;
  const DenseMatrix* Phi = shared;
  if (!Phi) {
    MatrixSpec spec = c.matrix;
    spec.seed = substream_seed(seed_t, 0);
    own.emplace(generate(spec));
    Phi = &*own;
  }

  Rng sig_rng(substream_seed(seed_t, 1));
  const int support_size = c.magnitude == MagnitudeModel::decaying ? 2 * k : k;
  const std::vector<int> draw = sample_distinct(sig_rng, N, support_size);
  Vector x(N, 0.0);
  for (int i = 0; i < support_size; ++i) {
    switch (c.magnitude) {
      case MagnitudeModel::unit:
        x[draw[i]] = sig_rng.next_double() < 0.5 ? 1.0 : -1.0;
        break;
      case MagnitudeModel::gaussian:
        x[draw[i]] = sig_rng.next_gaussian();
        break;
      case MagnitudeModel::decaying: {
        const double sign = sig_rng.next_double() < 0.5 ? 1.0 : -1.0;
        x[draw[i]] = sign / static_cast<double>(i + 1);
        break;
      }
      case MagnitudeModel::zero:
        break;
    }
  }

  Vector y = matvec(*Phi, x);
  if (c.noise_l2 > 0.0) {
    Rng noise_rng(substream_seed(seed_t, 2));
    Vector g;
    double gn = 0.0;
    do {
      g = gaussian_vector(noise_rng, n);
      gn = l2_norm(g);
    } while (gn == 0.0);
    for (int i = 0; i < n; ++i) y[i] += c.noise_l2 * g[i] / gn;
  }

  TrialRecord rec;
  rec.trial = t;
  rec.seed = seed_t;
  Vector estimate;
  if (c.decoder == DecoderKind::omp) {
    const RecoveryResult r = omp_decode(*Phi, y, OmpOptions{c.omp_iterations, c.stop_rel});
    estimate = r.estimate;
    rec.iterations = r.iterations_run;
    rec.stopped_early = r.stopped_early;
  } else {
    std::vector<int> t0(draw.begin(), draw.begin() + k);
    estimate = oracle_ls_decoder(*Phi, y, IndexSet::from_unsorted(std::move(t0)));
  }

  Vector diff = estimate;
  for (int i = 0; i < N; ++i) diff[i] -= x[i];
  rec.values.reserve(c.metrics.size());
  for (const Metric& m : c.metrics) {
    switch (m.kind) {
      case Metric::Kind::l1:
        rec.values.push_back(lp_norm(diff, 1.0));
        break;
      case Metric::Kind::l2:
        rec.values.push_back(l2_norm(diff));
        break;
      case Metric::Kind::lq:
        rec.values.push_back(lp_norm(diff, m.q));
        break;
      case Metric::Kind::success:
        rec.values.push_back(l2_norm(diff) <= m.tol * l2_norm(x) ? 1.0 : 0.0);
        break;
      case Metric::Kind::sigma_ratio: {
        const double sk = sigma_k(x, k, m.ratio_p);
        if (sk > 0.0) {
          const double scale = std::pow(static_cast<double>(k), 1.0 / m.ratio_p - 1.0 / m.ratio_q);
          rec.values.push_back(lp_norm(diff, m.ratio_q) * scale / sk);
        } else {
          rec.values.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        break;
      }
    }
  }
  return rec;
}

inline int worker_count(int trials) {
  if (const char* env = std::getenv("OMP_LAB_THREADS")) {
    const std::string s(env);
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (...) {
      throw ContractViolation("OMP_LAB_THREADS: not an integer: '" + s + "'");
    }
    if (pos != s.size() || v < 1) {
      throw ContractViolation("OMP_LAB_THREADS: must be a positive integer, got '" + s + "'");
    }
    return std::min(v, trials);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::min(static_cast<int>(hw ? hw : 1), trials);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace detail

/// Aggregates, recomputable from the per-trial records: mean/median/max for
/// each error norm (ascending-trial summation order), a rate for `success`,
/// and the worst defined ratio for `sigma_ratio`.
inline nlohmann::json compute_aggregates(const std::vector<Metric>& metrics,
                                         const std::vector<TrialRecord>& records) {
  nlohmann::json agg = nlohmann::json::object();
  for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
    const Metric& m = metrics[mi];
    switch (m.kind) {
      case Metric::Kind::success: {
        double sum = 0.0;
        for (const auto& r : records) sum += r.values[mi];
        agg["success"] = {{"rate", sum / records.size()}};
        break;
      }
      case Metric::Kind::sigma_ratio: {
        double worst = 0.0;
        std::uint64_t defined = 0;
        for (const auto& r : records) {
          const double v = r.values[mi];
          if (!std::isnan(v)) {
            worst = std::max(worst, v);
            ++defined;
          }
        }
        nlohmann::json entry{{"defined", defined}};
        entry["worst"] = defined ? nlohmann::json(worst) : nlohmann::json(nullptr);
        agg["sigma_ratio"] = std::move(entry);
        break;
      }
      default: {
        double sum = 0.0;
        double mx = 0.0;
        Vector sorted;
        sorted.reserve(records.size());
        for (const auto& r : records) {
          sum += r.values[mi];
          mx = std::max(mx, r.values[mi]);
          sorted.push_back(r.values[mi]);
        }
        std::sort(sorted.begin(), sorted.end());
        const std::size_t h = sorted.size() / 2;
        const double median =
            sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
        agg[m.label()] = {{"mean", sum / records.size()}, {"median", median}, {"max", mx}};
        break;
      }
    }
  }
  return agg;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  std::optional<DenseMatrix> shared;
  if (config.fixed_matrix) shared.emplace(generate(config.matrix));

  ExperimentReport report;
  report.config = config;
  report.records.resize(config.trials);

  const int workers = detail::worker_count(config.trials);
  if (workers <= 1) {
    for (int t = 0; t < config.trials; ++t) {
      report.records[t] = detail::run_trial(config, t, shared ? &*shared : nullptr);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= config.trials) return;
        try {
          report.records[t] = detail::run_trial(config, t, shared ? &*shared : nullptr);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  report.aggregates = compute_aggregates(config.metrics, report.records);
  report.timestamp = detail::utc_timestamp();
  return report;
}

// --- JSON (config and report) ---

inline nlohmann::json to_json(const Metric& m) {
  switch (m.kind) {
    case Metric::Kind::l1: return "l1";
    case Metric::Kind::l2: return "l2";
    case Metric::Kind::lq: return nlohmann::json{{"lq", {{"q", m.q}}}};
    case Metric::Kind::success: return nlohmann::json{{"success", {{"tol", m.tol}}}};
    case Metric::Kind::sigma_ratio:
      return nlohmann::json{{"sigma_ratio", {{"p", m.ratio_p}, {"q", m.ratio_q}}}};
  }
  return "l2";
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json decoder;
  if (c.decoder == DecoderKind::omp) {
    decoder = {{"type", "omp"}, {"iterations", c.omp_iterations}, {"stop_rel", c.stop_rel}};
  } else {
    decoder = {{"type", "oracle"}};
  }
  nlohmann::json metrics = nlohmann::json::array();
  for (const Metric& m : c.metrics) metrics.push_back(to_json(m));
  return nlohmann::json{
      {"v", 1},
      {"matrix",
       {{"ensemble", to_string(c.matrix.ensemble)},
        {"rows", c.matrix.rows},
        {"cols", c.matrix.cols},
        {"seed", c.matrix.seed}}},
      {"fixed_matrix", c.fixed_matrix},
      {"signal", {{"sparsity", c.sparsity}, {"magnitude", to_string(c.magnitude)}}},
      {"noise_l2", c.noise_l2},
      {"trials", c.trials},
      {"decoder", decoder},
      {"metrics", metrics},
      {"master_seed", c.master_seed}};
}

namespace detail {

template <typename T>
inline T get_field(const nlohmann::json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ContractViolation("experiment config: missing field " + path + key);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ContractViolation("experiment config: field " + path + key + " has the wrong type");
  }
}

template <typename T>
inline T get_or(const nlohmann::json& j, const std::string& path, const std::string& key,
                T fallback) {
  if (!j.contains(key)) return fallback;
  return get_field<T>(j, path, key);
}

}  // namespace detail

inline Metric metric_from_json(const nlohmann::json& j) {
  Metric m;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "l1") {
      m.kind = Metric::Kind::l1;
    } else if (s == "l2") {
      m.kind = Metric::Kind::l2;
    } else if (s == "success") {
      m.kind = Metric::Kind::success;
    } else {
      throw ContractViolation("experiment config: metrics: unknown metric '" + s + "'");
    }
    return m;
  }
  if (!j.is_object() || j.size() != 1) {
    throw ContractViolation(
        "experiment config: metrics: each entry must be a name or a one-key object");
  }
  const auto it = j.begin();
  const std::string key = it.key();
  const nlohmann::json& args = it.value();
  if (key == "lq") {
    m.kind = Metric::Kind::lq;
    m.q = detail::get_field<double>(args, "metrics.lq.", "q");
  } else if (key == "success") {
    m.kind = Metric::Kind::success;
    m.tol = detail::get_field<double>(args, "metrics.success.", "tol");
  } else if (key == "sigma_ratio") {
    m.kind = Metric::Kind::sigma_ratio;
    m.ratio_p = detail::get_field<double>(args, "metrics.sigma_ratio.", "p");
    m.ratio_q = detail::get_field<double>(args, "metrics.sigma_ratio.", "q");
  } else {
    throw ContractViolation("experiment config: metrics: unknown metric '" + key + "'");
  }
  return m;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  using detail::get_field;
  using detail::get_or;
  if (!j.is_object()) throw ContractViolation("experiment config: root must be an object");
  const int version = get_or<int>(j, "", "v", 1);
  if (version != 1) {
    throw ContractViolation("experiment config: v: unsupported schema version " +
                            std::to_string(version));
  }

  ExperimentConfig c;
  const auto jm = get_field<nlohmann::json>(j, "", "matrix");
  c.matrix.ensemble = ensemble_from_string(get_field<std::string>(jm, "matrix.", "ensemble"));
  c.matrix.rows = get_field<int>(jm, "matrix.", "rows");
  c.matrix.cols = get_field<int>(jm, "matrix.", "cols");
  c.matrix.seed = get_or<std::uint64_t>(jm, "matrix.", "seed", 0);
  c.fixed_matrix = get_or<bool>(j, "", "fixed_matrix", false);

  const auto js = get_field<nlohmann::json>(j, "", "signal");
  c.sparsity = get_field<int>(js, "signal.", "sparsity");
  c.magnitude = magnitude_from_string(get_or<std::string>(js, "signal.", "magnitude", "unit"));

  c.noise_l2 = get_or<double>(j, "", "noise_l2", 0.0);
  c.trials = get_field<int>(j, "", "trials");

  const auto jd = get_field<nlohmann::json>(j, "", "decoder");
  const std::string dtype = get_field<std::string>(jd, "decoder.", "type");
  if (dtype == "omp") {
    c.decoder = DecoderKind::omp;
    c.omp_iterations = get_field<int>(jd, "decoder.", "iterations");
    c.stop_rel = get_or<double>(jd, "decoder.", "stop_rel", 1e-12);
  } else if (dtype == "oracle") {
    c.decoder = DecoderKind::oracle;
  } else {
    throw ContractViolation("experiment config: decoder.type: unknown decoder '" + dtype + "'");
  }

  if (j.contains("metrics")) {
    const auto& jms = j.at("metrics");
    if (!jms.is_array()) throw ContractViolation("experiment config: metrics: must be an array");
    for (const auto& entry : jms) c.metrics.push_back(metric_from_json(entry));
  }
  c.master_seed = get_field<std::uint64_t>(j, "", "master_seed");
  validate_config(c);
  return c;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& rec : r.records) {
    nlohmann::json metrics = nlohmann::json::object();
    for (std::size_t mi = 0; mi < r.config.metrics.size(); ++mi) {
      const double v = rec.values[mi];
      metrics[r.config.metrics[mi].label()] =
          std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    }
    trials.push_back(nlohmann::json{{"trial", rec.trial},
                                    {"seed", rec.seed},
                                    {"iterations", rec.iterations},
                                    {"stopped_early", rec.stopped_early},
                                    {"metrics", metrics}});
  }
  return nlohmann::json{{"v", 1},
                        {"timestamp", r.timestamp},
                        {"config", to_json(r.config)},
                        {"trials", trials},
                        {"aggregates", r.aggregates}};
}

}  // namespace omplab
