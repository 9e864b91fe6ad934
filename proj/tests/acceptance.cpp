/* Copyright 2026 The banz Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when all of them pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "banz/attention.hpp"
#include "banz/bytes.hpp"
#include "banz/oracle.hpp"
#include "banz/pipeline.hpp"
#include "banz/trainer.hpp"

namespace {

using namespace banz;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct Verdict {
  int id;
  std::string title;
  bool passed;
  std::string detail;
};

std::vector<Verdict> verdicts;

void report(int id, const std::string& title, bool passed, const std::string& detail) {
  verdicts.push_back({id, title, passed, detail});
  std::printf("[%s] %2d %s: %s\n", passed ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

// Criterion 10 is checked on every PMF that passes through the prediction
// path in this program.
struct PmfAudit {
  std::size_t pmfs = 0;
  std::size_t bad_sum = 0;
  std::size_t bad_quantized = 0;
  double worst_sum = 0.0;

  void check(const Pmf& p, const QuantizedPmf& q) {
    ++pmfs;
    const double err = std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
    worst_sum = std::max(worst_sum, err);
    if (!(err <= 1e-9)) ++bad_sum;
    std::uint64_t total = 0;
    std::uint32_t least = kProbTotal;
    for (std::uint32_t c : q.counts) {
      total += c;
      least = std::min(least, c);
    }
    if (total != kProbTotal || least < 1 || !q.valid()) ++bad_quantized;
  }
};

PmfAudit audit;

// Every training step feeds criterion 8.
struct RhoAudit {
  std::size_t steps = 0;
  double worst = 0.0;
};

RhoAudit rho_audit;

std::vector<std::uint8_t> english_corpus() {
  std::vector<std::uint8_t> text = read_file(std::string(BANZ_TEST_DATA) + "/english.txt");
  text.resize(std::min<std::size_t>(text.size(), 65536));
  return text;
}

struct Coded {
  std::vector<std::uint8_t> container;
  double shannon_bits = 0.0;
};

Coded compress_audited(std::span<const std::uint8_t> input, const ModelSnapshot& m) {
  Coded out;
  CompressOptions o;
  o.observer = [&](std::size_t, const Pmf& p, const QuantizedPmf& q, Symbol s) {
    audit.check(p, q);
    out.shannon_bits += code_length_bits(q, s);
  };
  out.container = compress(input, m, o);
  return out;
}

std::vector<std::uint8_t> decompress_audited(std::span<const std::uint8_t> c,
                                             const ModelSnapshot& m) {
  return decompress(c, &m, [](std::size_t, const Pmf& p, const QuantizedPmf& q, Symbol) {
    audit.check(p, q);
  });
}

ModelSnapshot train_audited(std::span<const Symbol> corpus, const TrainConfig& config,
                            TrainHooks hooks = {}) {
  const double b = static_cast<double>(config.batch);
  auto inner = hooks.on_step;
  hooks.on_step = [inner, b](const StepReport& r, const TrainState& s) {
    if (r.accepted) {
      ++rho_audit.steps;
      rho_audit.worst = std::max(rho_audit.worst, std::abs(r.rho_sum - b) / b);
    }
    if (inner) inner(r, s);
  };
  return train(corpus, config, hooks);
}

// Inputs of varied shape: random bytes, small alphabets, runs, periodic
// patterns, text slices and ramps.
std::vector<std::uint8_t> random_input(std::mt19937_64& rng, std::span<const std::uint8_t> text) {
  const std::size_t n = rng() % 4097;
  std::vector<std::uint8_t> out(n);
  switch (rng() % 6) {
    case 0:
      for (auto& b : out) b = static_cast<std::uint8_t>(rng());
      break;
    case 1: {
      const unsigned k = 2 + static_cast<unsigned>(rng() % 6);
      for (auto& b : out) b = static_cast<std::uint8_t>('a' + rng() % k);
      break;
    }
    case 2: {
      std::size_t i = 0;
      while (i < n) {
        const auto value = static_cast<std::uint8_t>(rng() % 4 == 0 ? rng() : 0);
        for (std::size_t run = 1 + rng() % 200; run > 0 && i < n; --run) out[i++] = value;
      }
      break;
    }
    case 3: {
      std::vector<std::uint8_t> period(1 + rng() % 16);
      for (auto& b : period) b = static_cast<std::uint8_t>(rng());
      for (std::size_t i = 0; i < n; ++i) out[i] = period[i % period.size()];
      break;
    }
    case 4: {
      const std::size_t start = rng() % (text.size() - n);
      std::copy_n(text.begin() + static_cast<std::ptrdiff_t>(start), n, out.begin());
      break;
    }
    default:
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(i * (1 + rng() % 3));
  }
  return out;
}

// Criteria 1 and 2.
void round_trips(std::span<const std::uint8_t> text) {
  const auto start = Clock::now();
  const Architecture arch{3, 2, 4, 8};
  ModelSnapshot untrained;
  untrained.params = ModelParams::random(arch, 101);
  TrainConfig config;
  config.epochs = 1;
  config.batch = 4;
  config.seed = 102;
  config.arch = arch;
  const ModelSnapshot trained = train_audited(text.first(4096), config);
  const ModelSnapshot* snapshots[] = {&untrained, &trained};

  std::mt19937_64 rng(103);
  std::size_t ok = 0, total = 0, violations = 0;
  double worst_margin = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const std::vector<std::uint8_t> input = random_input(rng, text);
    for (const ModelSnapshot* m : snapshots) {
      ++total;
      const Coded c = compress_audited(input, *m);
      try {
        if (decompress_audited(c.container, *m) == input) ++ok;
      } catch (const Error&) {
      }
      const double payload_bits = 8.0 * static_cast<double>(inspect(c.container).payload_bytes);
      const double margin = payload_bits - c.shannon_bits;
      worst_margin = std::max(worst_margin, margin);
      if (payload_bits > c.shannon_bits + 64.0) ++violations;
    }
  }
  const double secs = seconds_since(start);
  report(1, "lossless round trip", ok == total && total == 2000 && secs < 120.0,
         fmt("%zu/%zu byte-exact, %.1fs (limit 120s)", ok, total, secs));
  report(2, "coder near-optimality", violations == 0,
         fmt("%zu violations of payload <= Shannon + 64 bits; worst excess %.2f bits",
             violations, worst_margin));
}

// Criterion 3.
void jensen() {
  std::mt19937_64 rng(301);
  std::size_t violations = 0;
  double worst_single = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const oracle::JensenGap g = oracle::jensen_gap(oracle::random_mixture(rng, 5));
    if (g.lhs < g.rhs - 1e-12) ++violations;
  }
  for (int t = 0; t < 1000; ++t) {
    const oracle::JensenGap g = oracle::jensen_gap(oracle::random_mixture(rng, 1));
    worst_single = std::max(worst_single, std::abs(g.lhs - g.rhs));
  }
  report(3, "sharpened Jensen", violations == 0 && worst_single <= 1e-12,
         fmt("%zu/1000 mixtures violate lhs >= rhs - 1e-12; k=1 max |lhs-rhs| = %.2g",
             violations, worst_single));
}

std::size_t argmax_abs(const std::vector<double>& xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs(xs[i]) > std::abs(xs[best])) best = i;
  }
  return best;
}

// Criterion 4.
void covariance_identity() {
  std::mt19937_64 rng(401);
  double worst = 0.0;
  bool gated = true;
  for (int t = 0; t < 100; ++t) {
    const oracle::TinyProblem p = oracle::random_problem(rng, 2, 4, 0.01);
    const std::size_t i = argmax_abs(oracle::loss_covariances(p));
    const oracle::DerivativeResult d = oracle::drho_derivative(p, i);
    gated = gated && d.converged;
    worst = std::max(worst, std::abs(d.exact_fd - d.covariance) / std::abs(d.covariance));
  }
  int agree = 0;
  for (int t = 0; t < 100; ++t) {
    const oracle::TinyProblem p = oracle::random_problem(rng, 2, 4, 0.1);
    const std::size_t i = rng() % 4;
    const oracle::DerivativeResult d = oracle::drho_derivative(p, i);
    gated = gated && d.converged;
    if ((d.exact_fd > 0) == (d.covariance > 0)) ++agree;
  }
  report(4, "derivative equals loss covariance", worst <= 0.05 && agree >= 95 && gated,
         fmt("scale 0.01: max rel. error %.4f (limit 0.05); scale 0.1: %d/100 signs agree; "
             "grid gate %s",
             worst, agree, gated ? "ok" : "FAILED"));
}

// Criterion 5.
void monotonicity() {
  std::mt19937_64 rng(501);
  int up = 0;
  bool gated = true;
  for (int t = 0; t < 100; ++t) {
    oracle::TinyProblem p = oracle::random_problem(rng, 2, 4, 0.01);
    const std::vector<double> cov = oracle::loss_covariances(p);
    const auto best = std::max_element(cov.begin(), cov.end());
    std::size_t i = static_cast<std::size_t>(best - cov.begin());
    if (*best <= 0.0) {
      p.test_loss = p.train_losses[0];
      i = 0;
    }
    const oracle::DerivativeResult d = oracle::drho_derivative(p, i);
    gated = gated && d.converged && d.covariance > 0.0;
    if (d.exact_fd > 0.0) ++up;
  }
  report(5, "attention monotonicity", up == 100 && gated,
         fmt("%d/100 positively correlated samples raise the predictive", up));
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Criterion 6.
void gradient_checks() {
  const Architecture arch{2, 2, 2, 3};
  std::mt19937_64 rng(601);
  const Predictor pr(arch);
  // Objectives here are O(10) while some gradients are O(1e-6); a smaller
  // step is dominated by cancellation.
  const double h = 1e-4;
  double worst_v = 0.0, worst_c = 0.0;
  for (int t = 0; t < 50; ++t) {
    ModelParams p = ModelParams::random(arch, 6000 + t);
    for (double& m : p.v.map.mean) m *= 10.0;
    for (double& m : p.v.encoder.mean) m *= 10.0;
    for (double& m : p.u.embed.mean) m *= 10.0;
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<Symbol> seq(7);
    for (Symbol& s : seq) s = static_cast<Symbol>(byte(rng));
    const std::vector<Sample> all = make_samples(seq, 2);
    const std::vector<Sample> batch(all.begin() + 3, all.end());
    const StepDraw draw = draw_step(arch, batch.size(), rng);
    const StepGradients g = step_gradients(p, batch, draw);

    auto probe = [&](std::vector<double>& means, const std::vector<double>& grad) {
      for (std::size_t j = 0; j < means.size(); ++j) {
        const double x = means[j];
        means[j] = x + h;
        const double up = step_objective(p, batch, draw);
        means[j] = x - h;
        const double down = step_objective(p, batch, draw);
        means[j] = x;
        worst_v = std::max(worst_v, rel_err((up - down) / (2 * h), grad[j]));
      }
    };
    probe(p.v.map.mean, g.map);
    probe(p.v.encoder.mean, g.encoder);

    // correlation scalar from finite-difference loss gradients
    std::vector<double> w = g.w;
    double c_fd = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double x = w[j];
      w[j] = x + h;
      const double ti = pr.loss(batch[draw.train_index], w), tt = pr.loss(batch.back(), w);
      w[j] = x - h;
      const double bi = pr.loss(batch[draw.train_index], w), bt = pr.loss(batch.back(), w);
      w[j] = x;
      const double var = 1.0 / p.v.map.precision[j * (1 + arch.latent_dim)];
      c_fd += var * ((ti - bi) / (2 * h)) * ((tt - bt) / (2 * h));
    }
    c_fd /= static_cast<double>(batch.size());
    worst_c = std::max(worst_c, rel_err(c_fd, g.correlation));
  }
  report(6, "gradient checks", worst_v <= 1e-4 && worst_c <= 1e-4,
         fmt("grad_v max rel. error %.2g, correlation scalar %.2g over 50 instances "
             "(limit 1e-4)",
             worst_v, worst_c));
}

struct PrecisionWatch {
  ModelParams last;
  std::size_t decreases = 0;
  std::size_t steps = 0;

  void step(const TrainState& s) {
    auto scan = [&](std::vector<double>& old, const std::vector<double>& now) {
      for (std::size_t j = 0; j < old.size(); ++j) {
        if (now[j] < old[j]) ++decreases;
        old[j] = now[j];
      }
    };
    scan(last.v.map.precision, s.params.v.map.precision);
    scan(last.v.encoder.precision, s.params.v.encoder.precision);
    scan(last.u.embed.precision, s.params.u.embed.precision);
    ++steps;
  }
};

// Criterion 7 on a short corpus; the "ab" run below adds its own
// precision scan.
void update_invariants(PrecisionWatch& ab_watch) {
  const std::vector<Symbol> corpus{'t', 'o', ' ', 'b', 'e', ' ', 'o', 'r', ' ', 'n', 'o', 't',
                                   ' ', 't', 'o', ' ', 'b', 'e'};
  TrainConfig config;
  config.epochs = 50;
  config.batch = 3;
  config.seed = 701;
  config.arch = {2, 3, 4, 6};

  PrecisionWatch watch{ModelParams::random(config.arch, config.seed)};
  TrainHooks hooks;
  hooks.on_step = [&](const StepReport&, const TrainState& s) { watch.step(s); };
  const ModelSnapshot a = train_audited(corpus, config, hooks);
  const ModelSnapshot b = train_audited(corpus, config);
  const bool identical = serialize(a) == serialize(b);

  // The applied rate: replay one step and compare the precision increments
  // with 1/T times the squared gradients.
  TrainState state{ModelParams::random(config.arch, 702), 0, 0};
  const std::vector<Sample> samples = make_samples(corpus, 2);
  const std::vector<Sample> batch(samples.begin(), samples.begin() + 3);
  std::mt19937_64 rng(703), replay(703);
  const StepGradients g =
      step_gradients(state.params, batch, draw_step(config.arch, 3, replay));
  const ModelParams before = state.params;
  train_step(state, batch, rng, config);
  const double eps = config.learning_rate();
  bool rate_ok = eps == 1.0 / 50.0;
  for (std::size_t j = 0; j < g.map.size(); ++j) {
    rate_ok = rate_ok && state.params.v.map.precision[j] ==
                             before.v.map.precision[j] + eps * g.map[j] * g.map[j];
  }

  const std::size_t decreases = watch.decreases + ab_watch.decreases;
  const std::size_t steps = watch.steps + ab_watch.steps;
  report(7, "update-rule invariants", decreases == 0 && identical && rate_ok &&
                                          ab_watch.steps > 0,
         fmt("%zu precision decreases over %zu steps of two 50-epoch runs; rate 1/T %s; "
             "identical seeds %s",
             decreases, steps, rate_ok ? "exact" : "WRONG",
             identical ? "bit-identical" : "DIFFER"));
}

// Criterion 8 (the per-step sums are collected by every training run).
void importance_checks() {
  std::mt19937_64 rng(801);
  std::uniform_real_distribution<double> log_score(-20.0, 20.0);
  std::uniform_real_distribution<double> log_scale(-30.0, 30.0);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> s(2 + rng() % 15);
    for (double& x : s) x = std::exp(log_score(rng));
    const std::vector<double> a = importance(s);
    const double c = std::exp(log_scale(rng));
    for (double& x : s) x *= c;
    const std::vector<double> b = importance(s);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], b[i]));
  }
  report(8, "importance normalization", rho_audit.worst <= 1e-9 && worst <= 1e-12,
         fmt("max |sum rho - B|/B = %.2g over %zu training steps; rescaling changes rho by "
             "%.2g (10^4 checks)",
             rho_audit.worst, rho_audit.steps, worst));
}

// Criterion 9; also runs the precision scan for criterion 7.
void learning(std::span<const std::uint8_t> text, PrecisionWatch& watch) {
  const auto start = Clock::now();
  std::vector<Symbol> ab;
  for (int i = 0; i < 500; ++i) {
    ab.push_back('a');
    ab.push_back('b');
  }
  TrainConfig c;
  c.epochs = 50;
  c.batch = 4;
  c.seed = 901;
  c.arch = {2, 8, 8, 64};
  watch.last = ModelParams::random(c.arch, c.seed);
  TrainHooks hooks;
  hooks.on_step = [&](const StepReport&, const TrainState& s) { watch.step(s); };
  const ModelSnapshot ab_model = train_audited(ab, c, hooks);
  const Coded ab_coded = compress_audited(ab, ab_model);
  const bool ab_round = decompress_audited(ab_coded.container, ab_model) == ab;
  const double ab_bpb = inspect(ab_coded.container).bits_per_byte;
  PredictionPath path(ab_model);
  const double p_a = path.predict(Context({'a', 'b'}))['a'];

  TrainConfig e;
  e.epochs = 1;
  e.batch = 4;
  e.seed = 902;
  e.arch = {3, 4, 8, 32};
  const ModelSnapshot en_model = train_audited(text, e);
  const Coded en_coded = compress_audited(text, en_model);
  const bool en_round = decompress_audited(en_coded.container, en_model) == std::vector(text.begin(), text.end());
  const double en_bpb = inspect(en_coded.container).bits_per_byte;
  const double secs = seconds_since(start);

  report(9, "learning end to end",
         ab_bpb < 2.0 && p_a > 0.9 && en_bpb < 6.0 && ab_round && en_round && secs < 300.0,
         fmt("\"ab\"x500: %.3f bits/byte, P(a|ab) = %.3f; %zu bytes English: %.3f bits/byte; "
             "%.1fs (limit 300s)",
             ab_bpb, p_a, text.size(), en_bpb, secs));
}

}  // namespace

// With arguments, only the named groups run: round_trips jensen covariance
// monotonicity gradients learning invariants importance.
int main(int argc, char** argv) {
  const auto start = Clock::now();
  const std::vector<std::string> only(argv + 1, argv + argc);
  auto want = [&](const char* group) {
    return only.empty() || std::find(only.begin(), only.end(), group) != only.end();
  };
  const std::vector<std::uint8_t> text = english_corpus();
  PrecisionWatch ab_watch;
  try {
    if (want("round_trips")) round_trips(text);
    if (want("jensen")) jensen();
    if (want("covariance")) covariance_identity();
    if (want("monotonicity")) monotonicity();
    if (want("gradients")) gradient_checks();
    if (want("learning")) learning(text, ab_watch);
    if (want("invariants")) update_invariants(ab_watch);
    if (want("importance")) importance_checks();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  report(10, "PMF validity", audit.bad_sum == 0 && audit.bad_quantized == 0 && audit.pmfs > 0,
         fmt("%zu PMFs: max |sum - 1| = %.2g, %zu bad quantized tables", audit.pmfs,
             audit.worst_sum, audit.bad_quantized));

  std::sort(verdicts.begin(), verdicts.end(),
            [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  const bool all = std::all_of(verdicts.begin(), verdicts.end(),
                               [](const Verdict& v) { return v.passed; });
  std::printf("\nsummary (%.0fs):\n", seconds_since(start));
  for (const Verdict& v : verdicts) {
    std::printf("[%s] %2d %s\n", v.passed ? "PASS" : "FAIL", v.id, v.title.c_str());
  }
  return all ? 0 : 1;
}
