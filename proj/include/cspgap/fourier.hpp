#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "cspgap/basic_lp.hpp"
#include "cspgap/rational.hpp"

namespace cspgap {

using cplx = std::complex<double>;

inline constexpr std::uint64_t kDefaultDenseCap = std::uint64_t{1} << 24;

// Function on Z_q^N, indexed by base-q digit tuples (coordinate 0 most significant).
// For m x k matrices coordinate (j, l) is j*k + l.
struct DensityTable {
  int q = 2;
  int N = 0;
  std::vector<cplx> values;
  bool mean1 = false;

  DensityTable() = default;
  DensityTable(int q_, int N_, std::vector<cplx> v, bool is_density = false);
  static DensityTable constant(int q, int N, cplx c, std::uint64_t cap = kDefaultDenseCap);
  static DensityTable character(int q, int N, std::uint64_t v);

  std::uint64_t size() const { return values.size(); }
  // Average of values is 1 and values are real and nonnegative, within tolerance.
  bool looks_like_density(double tol = 1e-12) const;
};

// Fourier coefficients, expectation-normalized.
struct Spectrum {
  int q = 2;
  int N = 0;
  std::vector<cplx> coeffs;

  std::uint64_t size() const { return coeffs.size(); }
};

Spectrum dft(const DensityTable& g, std::uint64_t cap = kDefaultDenseCap);
DensityTable idft(const Spectrum& s, bool mean1 = false);

// (f*g)(z) = E_x f(x) g(z - x), via the coefficient product.
DensityTable convolve(const DensityTable& f, const DensityTable& g);

// Density q^N * P(x) of a probability vector over Z_q^N.
DensityTable density_from_dist(int q, int N, const std::vector<double>& probs);
DensityTable density_from_dist(const LocalDistribution& dist);

// Coefficients of the density of Y^{(x)m} on Z_q^{m x k}, stored as one row spectrum.
class ProductSpectrum {
 public:
  ProductSpectrum(Spectrum row, int m);
  cplx coefficient(std::uint64_t U) const;
  cplx coefficient_of_rows(const std::vector<std::uint64_t>& rows) const;
  Spectrum materialize(std::uint64_t cap = kDefaultDenseCap) const;
  int q() const { return row_.q; }
  int k() const { return row_.N; }
  int m() const { return m_; }
  const Spectrum& row() const { return row_; }

 private:
  Spectrum row_;
  int m_;
};
ProductSpectrum product_density(const LocalDistribution& dist, int m);
// Pointwise product of row densities, built without any transform.
DensityTable product_density_table(const LocalDistribution& dist, int m, std::uint64_t cap = kDefaultDenseCap);

// Per-frequency statistics of Z_q^{m x k} in base-q lexicographic order.
class FrequencyStats {
 public:
  FrequencyStats(int q, int m, int k, std::uint64_t cap = kDefaultDenseCap);
  int q() const { return q_; }
  int m() const { return m_; }
  int k() const { return k_; }
  std::uint64_t size() const { return wt_.size(); }
  int wt(std::uint64_t U) const { return wt_[U]; }
  int rwt(std::uint64_t U) const { return rwt_[U]; }
  int singleton_rows(std::uint64_t U) const { return singles_[U]; }
  bool singleton_free(std::uint64_t U) const { return singles_[U] == 0; }

 private:
  int q_, m_, k_;
  std::vector<std::uint8_t> wt_, rwt_, singles_;
};

enum class MultiplierKind { RowNoise, Modified, Custom };

struct Multiplier {
  MultiplierKind kind = MultiplierKind::RowNoise;
  double rho = 1.0;
  int m = 1;
  int k = 1;
  std::function<cplx(std::uint64_t)> custom;

  static Multiplier row_noise(double rho, int m, int k);
  static Multiplier modified(double rho, int m, int k);
  cplx eigenvalue(const FrequencyStats& stats, std::uint64_t U) const;
};

DensityTable apply_multiplier(const DensityTable& g, const Multiplier& mult);
// T*_rho by resampling each row with probability 1 - rho, no transform involved.
DensityTable row_noise_direct(const DensityTable& g, double rho, int m, int k);

// Exact eigenvalues for rational rho.
Rational row_noise_eigenvalue_exact(const FrequencyStats& stats, std::uint64_t U, const Rational& rho);
Rational modified_eigenvalue_exact(const FrequencyStats& stats, std::uint64_t U, const Rational& rho);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();
double norm_p(const DensityTable& g, double p);
double parseval(const DensityTable& g);

// g(x_S): a function of |S| coordinates viewed on Z_q^N.
DensityTable lift_coordinates(const DensityTable& g, const std::vector<int>& coords, int N);
// Coordinate i of the output is coordinate sel[i] of the input; averages over the fibres.
DensityTable average_pushforward(const DensityTable& g, const std::vector<int>& sel);
// Places u (over sel.size() coordinates) at positions sel of a length-N frequency.
std::uint64_t embed_frequency(std::uint64_t u, int q, const std::vector<int>& sel, int N);

// Exact cyclotomic arithmetic over Z[x]/(Phi_q).
std::vector<long long> cyclotomic_polynomial(int q);
// Reduces sum_{b<q} x^b modulo Phi_q and reports whether it is zero.
bool root_of_unity_sum_vanishes(int q);

}  // namespace cspgap
