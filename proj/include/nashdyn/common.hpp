// Copyright 2026 The nashdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NASHDYN_COMMON_HPP_
#define NASHDYN_COMMON_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace nashdyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Tables indexed [player] -> (state x own-action) matrix. Policies, scores,
// advantages and weighted advantages all share this shape.
using TableSet = std::vector<Matrix>;

inline double logsumexp(const Eigen::Ref<const Vector>& x) {
  const double m = x.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::exp(x[i] - m);
  return m + std::log(acc);
}

// Row-wise softmax of y/epsilon with per-row max subtraction.
inline Matrix softmax_rows(const Matrix& y, double epsilon) {
  Matrix out(y.rows(), y.cols());
  for (Eigen::Index s = 0; s < y.rows(); ++s) {
    const double m = y.row(s).maxCoeff();
    double z = 0.0;
    for (Eigen::Index a = 0; a < y.cols(); ++a) {
      out(s, a) = std::exp((y(s, a) - m) / epsilon);
      z += out(s, a);
    }
    out.row(s) /= z;
  }
  return out;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline bool all_finite(const TableSet& tables) {
  for (const auto& m : tables) {
    if (!m.allFinite()) return false;
  }
  return true;
}

inline double max_abs(const TableSet& tables) {
  double v = 0.0;
  for (const auto& m : tables) {
    if (m.size() > 0) v = std::max(v, m.cwiseAbs().maxCoeff());
  }
  return v;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable per-item seed derivation; used to split one run seed across
// episodes/samples so parallel workers reproduce the serial stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x51ed270b7a2ee9ddULL));
}

// Deterministic RNG. Draws are produced by explicit bit manipulation rather
// than std::*_distribution so streams are identical across standard-library
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) {  // [0, n)
    return std::min<int>(static_cast<int>(uniform() * n), n - 1);
  }

  // Index drawn from a probability row (assumed to sum to ~1).
  int sample_index(const Eigen::Ref<const Eigen::RowVectorXd>& probs) {
    const double u = uniform();
    double cum = 0.0;
    for (Eigen::Index a = 0; a < probs.size(); ++a) {
      cum += probs[a];
      if (u < cum) return static_cast<int>(a);
    }
    return static_cast<int>(probs.size() - 1);
  }

  // Flat Dirichlet draw over the k-simplex (normalized unit exponentials).
  Vector dirichlet(int k) {
    Vector v(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      v[i] = -std::log(1.0 - uniform());
      sum += v[i];
    }
    return v / sum;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n).
// Chunk boundaries depend only on chunk_size, so per-chunk results combined
// in chunk order are identical for any worker count.
template <typename Fn>
void for_each_chunk(long n, long chunk_size, int workers, Fn fn) {
  if (n <= 0) return;
  const long n_chunks = (n + chunk_size - 1) / chunk_size;
  auto run_chunk = [&](long c) {
    const long begin = c * chunk_size;
    const long end = std::min(n, begin + chunk_size);
    fn(c, begin, end);
  };
  if (workers <= 1 || n_chunks <= 1) {
    for (long c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (long c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
      run_chunk(c);
    }
  };
  const int n_threads = static_cast<int>(
      std::min<long>(n_chunks, std::max(1, workers)));
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

inline int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace nashdyn

#endif  // NASHDYN_COMMON_HPP_
