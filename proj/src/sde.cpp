#include "chi3opo/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace chi3opo {
namespace rng {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s) word = splitmix64_next(sm);
}

std::uint64_t Xoshiro256pp::next() {
  const std::uint64_t result = rotl64(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl64(s[3], 45);
  return result;
}

namespace {

// 128-layer ziggurat for exp(-x^2/2): equal-area strips with tail start kR.
constexpr double kR = 3.442619855899;
constexpr double kV = 9.91256303526217e-3;

struct ZigguratTables {
  double x[129];
  double y[129];
  ZigguratTables() {
    x[0] = kV / std::exp(-0.5 * kR * kR);  // virtual width of the base strip
    x[1] = kR;
    for (int i = 2; i <= 127; ++i) {
      const double arg = kV / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1]);
      x[i] = arg >= 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(arg));
    }
    x[128] = 0.0;
    for (int i = 0; i <= 128; ++i) y[i] = std::exp(-0.5 * x[i] * x[i]);
  }
};

const ZigguratTables kZig;

inline double to_unit(std::uint64_t bits) {  // [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double to_unit_open(std::uint64_t bits) {  // (0, 1]
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline double sample_normal(Xoshiro256pp& gen) {
  for (;;) {
    const std::uint64_t bits = gen.next();
    const int idx = static_cast<int>(bits & 127);
    const bool neg = (bits & 256) != 0;
    const double u = to_unit(bits);
    const double cand = u * kZig.x[idx];
    if (cand < kZig.x[idx + 1]) return neg ? -cand : cand;
    if (idx == 0) {
      // Tail beyond kR: exponential rejection.
      double e1, e2;
      do {
        e1 = -std::log(to_unit_open(gen.next())) / kR;
        e2 = -std::log(to_unit_open(gen.next()));
      } while (e2 + e2 < e1 * e1);
      const double tail = kR + e1;
      return neg ? -tail : tail;
    }
    const double h = kZig.y[idx] + to_unit(gen.next()) * (kZig.y[idx + 1] - kZig.y[idx]);
    if (h < std::exp(-0.5 * cand * cand)) return neg ? -cand : cand;
  }
}

}  // namespace

double NormalSampler::operator()() { return sample_normal(gen); }

}  // namespace rng

void SdeConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.01 * (1.0 + 1e-12)) {
    throw std::invalid_argument("sde: dt must lie in (0, 0.01]");
  }
  if (!(duration > 0.0)) throw std::invalid_argument("sde: duration must be positive");
  if (!(transient >= 0.0)) throw std::invalid_argument("sde: transient must be non-negative");
  if (n_trajectories < 1) throw std::invalid_argument("sde: need at least one trajectory");
  if (frequencies.empty()) throw std::invalid_argument("sde: need at least one frequency");
  for (double w : frequencies) {
    if (!std::isfinite(w)) throw std::invalid_argument("sde: frequency must be finite");
  }
}

namespace {

std::vector<double> hann_window(long n) {
  std::vector<double> w(static_cast<size_t>(n));
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  const double step = 2.0 * M_PI / static_cast<double>(n - 1);
  for (long k = 0; k < n; ++k) w[static_cast<size_t>(k)] = 0.5 * (1.0 - std::cos(step * k));
  return w;
}

struct FreqTables {
  // Window * cos/sin(omega tau_k) over the full span and over one half span.
  std::vector<double> c_full, s_full, c_half, s_half;
};

// Windowed-periodogram accumulator over one span and its ensemble statistics.
struct Accumulator {
  Matrix6d sum = Matrix6d::Zero();
  Matrix6d sumsq = Matrix6d::Zero();
  void add_periodogram(const Vector6d& fr, const Vector6d& fi, double norm) {
    const Matrix6d s = (fr * fr.transpose() + fi * fi.transpose()) * norm;
    sum += s;
    sumsq += s.cwiseProduct(s);
  }
  void finish(int n, Eigen::MatrixXd& mean, Eigen::MatrixXd& err) const {
    mean = sum / n;
    if (n > 1) {
      const Matrix6d var =
          (sumsq / n - Matrix6d(mean.cwiseProduct(mean))) * (static_cast<double>(n) / (n - 1));
      err = (var.cwiseMax(0.0) / n).cwiseSqrt();
    } else {
      err = Matrix6d::Zero();
    }
  }
};

}  // namespace

std::vector<SdeSpectrum> simulate_linear(const FluctuationSystem& fs, const SdeConfig& cfg) {
  cfg.validate();
  const StabilityReport rep = stability(fs);
  if (!rep.stable) throw std::domain_error("simulate_linear: drift matrix is not stable");

  const double dt = cfg.dt;
  const long k_steps = std::lround(cfg.duration / dt);
  const long k_trans = std::lround(cfg.transient / dt);
  if (k_steps < 8) throw std::invalid_argument("sde: duration must cover at least 8 steps");
  const long k_half = k_steps / 2;
  const long k_second = k_steps - k_half;  // start index of the second half

  const double sqrt2g = fs.input_coupling(0, 0);
  const double sqrt2m = fs.loss_coupling(0, 0);
  const double sqrt2g_dt = sqrt2g * dt;
  const double sig = std::sqrt(0.5 * dt);  // Wiener increment sd per component
  const Matrix6d amat = Matrix6d::Identity() + dt * fs.drift;

  const std::vector<double> w_full = hann_window(k_steps);
  const std::vector<double> w_half = hann_window(k_half);
  double sumw2_full = 0.0, sumw2_half = 0.0;
  for (double w : w_full) sumw2_full += w * w;
  for (double w : w_half) sumw2_half += w * w;
  const double norm_full = 1.0 / (dt * sumw2_full);
  const double norm_half = 1.0 / (dt * sumw2_half);

  const size_t n_freq = cfg.frequencies.size();
  std::vector<FreqTables> tab(n_freq);
  for (size_t f = 0; f < n_freq; ++f) {
    const double omega = cfg.frequencies[f];
    tab[f].c_full.resize(static_cast<size_t>(k_steps));
    tab[f].s_full.resize(static_cast<size_t>(k_steps));
    for (long k = 0; k < k_steps; ++k) {
      const double ph = omega * dt * static_cast<double>(k);
      tab[f].c_full[static_cast<size_t>(k)] = w_full[static_cast<size_t>(k)] * std::cos(ph);
      tab[f].s_full[static_cast<size_t>(k)] = w_full[static_cast<size_t>(k)] * std::sin(ph);
    }
    tab[f].c_half.resize(static_cast<size_t>(k_half));
    tab[f].s_half.resize(static_cast<size_t>(k_half));
    for (long k = 0; k < k_half; ++k) {
      const double ph = omega * dt * static_cast<double>(k);
      tab[f].c_half[static_cast<size_t>(k)] = w_half[static_cast<size_t>(k)] * std::cos(ph);
      tab[f].s_half[static_cast<size_t>(k)] = w_half[static_cast<size_t>(k)] * std::sin(ph);
    }
  }

  std::vector<Accumulator> acc_full(n_freq), acc_h1(n_freq), acc_h2(n_freq);

  std::vector<Vector6d> fr_full(n_freq), fi_full(n_freq), fr_h(n_freq), fi_h(n_freq);
  Vector6d x, y, win, wloss;
  for (int traj = 0; traj < cfg.n_trajectories; ++traj) {
    const std::uint64_t seed =
        cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(traj + 1);
    rng::Xoshiro256pp gen(seed);

    x.setZero();
    for (long k = 0; k < k_trans; ++k) {
      for (int c = 0; c < 6; ++c) win[c] = sig * rng::sample_normal(gen);
      for (int c = 0; c < 6; ++c) wloss[c] = sig * rng::sample_normal(gen);
      x = amat * x + sqrt2g * win + sqrt2m * wloss;
    }

    for (size_t f = 0; f < n_freq; ++f) {
      fr_full[f].setZero();
      fi_full[f].setZero();
    }
    for (long k = 0; k < k_steps; ++k) {
      if (k == 0 || k == k_second) {
        if (k == k_second) {  // close out the first half
          for (size_t f = 0; f < n_freq; ++f) {
            acc_h1[f].add_periodogram(fr_h[f], fi_h[f], norm_half);
          }
        }
        for (size_t f = 0; f < n_freq; ++f) {
          fr_h[f].setZero();
          fi_h[f].setZero();
        }
      }
      for (int c = 0; c < 6; ++c) win[c] = sig * rng::sample_normal(gen);
      // Output record from the pre-update state and this step's input noise.
      y = sqrt2g_dt * x - win;
      for (size_t f = 0; f < n_freq; ++f) {
        const size_t kk = static_cast<size_t>(k);
        fr_full[f] += tab[f].c_full[kk] * y;
        fi_full[f] += tab[f].s_full[kk] * y;
        const long kh = k < k_half ? k : k - k_second;
        if (kh >= 0 && kh < k_half) {
          const size_t kks = static_cast<size_t>(kh);
          fr_h[f] += tab[f].c_half[kks] * y;
          fi_h[f] += tab[f].s_half[kks] * y;
        }
      }
      for (int c = 0; c < 6; ++c) wloss[c] = sig * rng::sample_normal(gen);
      x = amat * x + sqrt2g * win + sqrt2m * wloss;
    }
    for (size_t f = 0; f < n_freq; ++f) {
      acc_full[f].add_periodogram(fr_full[f], fi_full[f], norm_full);
      acc_h2[f].add_periodogram(fr_h[f], fi_h[f], norm_half);
    }
  }

  std::vector<SdeSpectrum> out(n_freq);
  for (size_t f = 0; f < n_freq; ++f) {
    out[f].omega = cfg.frequencies[f];
    out[f].n_trajectories = cfg.n_trajectories;
    acc_full[f].finish(cfg.n_trajectories, out[f].mean, out[f].std_error);
    acc_h1[f].finish(cfg.n_trajectories, out[f].first_half, out[f].first_half_error);
    acc_h2[f].finish(cfg.n_trajectories, out[f].second_half, out[f].second_half_error);
  }
  return out;
}

}  // namespace chi3opo
