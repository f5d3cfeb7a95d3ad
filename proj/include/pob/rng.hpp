#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pob/types.hpp"

namespace pob {

/// Deterministic random source. All sampling routines are hand-rolled on top
/// of mt19937_64 so streams are reproducible across standard libraries; a
/// given seed always yields the same (x, z, eta) sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

  /// Derives an independent stream, e.g. one per (run, worker).
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform on {0, ..., n-1}.
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(gen_()) *
                             static_cast<unsigned __int128>(n)) >> 64);
  }

  /// Standard normal via Marsaglia's polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  Vec normal_vec(int dim, double sd = 1.0) {
    Vec out(dim);
    for (int i = 0; i < dim; ++i) out[i] = sd * normal();
    return out;
  }

  /// Uniform on the sphere of the given radius.
  Vec sphere(int dim, double radius) {
    Vec g = normal_vec(dim);
    double n = g.norm();
    while (n == 0.0) {
      g = normal_vec(dim);
      n = g.norm();
    }
    return (radius / n) * g;
  }

  Vec uniform_box(int dim, double half_width) {
    Vec out(dim);
    for (int i = 0; i < dim; ++i) out[i] = uniform(-half_width, half_width);
    return out;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pob
