#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cspgap/csp_core.hpp"
#include "cspgap/errors.hpp"
#include "cspgap/rng.hpp"
#include "cspgap/uniformize.hpp"

namespace cspgap {

// m x k matrix over [n] whose columns have distinct entries.
class Hypermatching {
 public:
  Hypermatching(int n, int m, int k, std::vector<int> entries);

  int n() const { return n_; }
  int m() const { return m_; }
  int k() const { return k_; }
  int operator()(int j, int l) const { return entries_[static_cast<std::size_t>(j) * k_ + l]; }
  const std::vector<int>& entries() const { return entries_; }
  std::vector<int> row(int j) const;
  bool operator==(const Hypermatching& o) const = default;

 private:
  int n_, m_, k_;
  std::vector<int> entries_;
};

Hypermatching sample_hypermatching(int n, int m, int k, Rng& rng);
// Visits every element of PHM(m, k, n) in lexicographic order of columns.
void for_each_hypermatching(int n, int m, int k, const std::function<void(const Hypermatching&)>& fn);
// (n)_m ^ k
std::uint64_t hypermatching_count(int n, int m, int k);

// Dense matrix over Z_q; Tag keeps signals and hidden assignments apart.
template <class Tag>
class ZqMatrix {
 public:
  ZqMatrix() = default;
  ZqMatrix(int rows, int cols, int q) : rows_(rows), cols_(cols), q_(q), data_(static_cast<std::size_t>(rows) * cols, 0) {}
  ZqMatrix(int rows, int cols, int q, std::vector<int> data) : rows_(rows), cols_(cols), q_(q), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(rows) * cols) throw InvalidInput("ZqMatrix shape mismatch");
    for (auto& v : data_) v = ((v % q) + q) % q;
  }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int q() const { return q_; }
  int operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  void set(int r, int c, int v) { data_[static_cast<std::size_t>(r) * cols_ + c] = ((v % q_) + q_) % q_; }
  const std::vector<int>& data() const { return data_; }
  bool row_is_zero(int r) const {
    for (int c = 0; c < cols_; ++c)
      if ((*this)(r, c) != 0) return false;
    return true;
  }
  bool operator==(const ZqMatrix& o) const = default;

 private:
  int rows_ = 0, cols_ = 0, q_ = 2;
  std::vector<int> data_;
};

struct SignalTag {};
struct HiddenTag {};
using SignalMatrix = ZqMatrix<SignalTag>;      // m x k
using HiddenAssignment = ZqMatrix<HiddenTag>;  // n x k'

SignalMatrix project(const Hypermatching& M, const std::vector<int>& phi, const HiddenAssignment& X);
SignalMatrix subtract(const SignalMatrix& a, const SignalMatrix& b);

enum class DihpCase { Yes, No };
std::string to_string(DihpCase c);
DihpCase parse_case(const std::string& s);

struct DihpSample {
  DihpCase kind = DihpCase::No;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  std::vector<Hypermatching> matchings;
  std::vector<SignalMatrix> signals;
  std::optional<HiddenAssignment> hidden;
  std::optional<std::vector<SignalMatrix>> noise;

  double alpha() const { return static_cast<double>(m) / n; }
};

// Exact sampler for a rational distribution over [q]^k.
class LocalSampler {
 public:
  explicit LocalSampler(const LocalDistribution& dist);
  std::uint64_t sample(Rng& rng) const;

 private:
  std::vector<std::uint64_t> cumulative_;  // integer weights over a common denominator
};

// Shared randomness of one coupling run: X*, matchings, noise. Substreams are fixed
// per (block, purpose), so the YES and NO samples of a seed share their matchings.
DihpSample sample_yes(const GadgetSpec& spec, int n, int m, std::uint64_t seed);
DihpSample sample_no(const GadgetSpec& spec, int n, int m, std::uint64_t seed);
DihpSample sample_dihp(const GadgetSpec& spec, int n, int m, DihpCase kind, std::uint64_t seed);

bool verify_yes_consistency(const DihpSample& sample, const GadgetSpec& spec);

// Variable (i, v) becomes i * k' + v; constraints in (t, j) order.
Instance emit_instance(const DihpSample& sample, const GadgetSpec& spec);
// Same constraints as emit_instance, for block t only.
std::vector<Constraint> emit_block(const GadgetSpec& spec, int t, const Hypermatching& M,
                                   const SignalMatrix& Z);
// kappa(X*) as an assignment over the n * k' flattened variables.
Assignment planted_assignment(const HiddenAssignment& X, const GadgetSpec& spec);

}  // namespace cspgap
