#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cspgap/dihp.hpp"
#include "cspgap/fourier.hpp"

namespace cspgap {

// ---- boundedness ----------------------------------------------------------

// U_{C,s}(h,N); q enters through the (e q^2 N / h) branch.
double u_bound(double C, double s, int h, double N, int q);

struct BoundProfile {
  double C = 0;
  double s = 0;
  std::vector<double> observed;  // index h: sum over wt(u)=h of |coef|
  std::vector<double> bound;
  std::vector<bool> pass;
  bool all_pass = true;
  double fitted_C = 0;  // smallest C that passes; +inf if none does
};

// Hamming weight of every frequency of Z_q^N.
std::vector<int> frequency_weights(int q, int N);
std::vector<double> weight_profile(const Spectrum& s);
BoundProfile boundedness_profile(const DensityTable& density, double C, double s, double tol = 1e-9);
BoundProfile boundedness_profile(const Spectrum& spectrum, double C, double s, double tol = 1e-9);

// ---- posterior -------------------------------------------------------------

struct PosteriorInputs {
  DensityTable prior;  // density on Z_q^{n x k'}
  int n = 0;
  int k_prime = 0;
  Hypermatching matching;
  std::vector<int> phi;
  LocalDistribution noise;                  // over Z_q^k
  std::vector<std::uint64_t> conditioning;  // indices into Z_q^{m x k}
};

struct PosteriorResult {
  DensityTable formula;      // prior * (noise^m * B)(Pi X0) * nu
  DensityTable oracle;       // Bayes' rule by enumeration
  double nu = 0;
  double event_probability = 0;  // Pr[Pi X - Y in B]
  double residual = 0;           // max pointwise |formula - oracle|
};

// Coordinate (j, l) of the signal matrix reads coordinate M(j,l)*k' + phi(l).
std::vector<int> projection_selector(const Hypermatching& M, const std::vector<int>& phi, int k_prime);

inline constexpr std::uint64_t kPosteriorCap = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kMatrixCap = std::uint64_t{1} << 20;

PosteriorResult posterior_density(const PosteriorInputs& in);
DensityTable bayes_posterior(const PosteriorInputs& in);

// ---- input uniformity ------------------------------------------------------

// Sparse frequency over Z_q^N: sorted (coordinate, nonzero value) pairs.
using SparseFrequency = std::vector<std::pair<int, int>>;

// Fourier coefficients of a prior on Z_q^{n x k'}, queried one frequency at a time.
class PriorSpectrum {
 public:
  virtual ~PriorSpectrum() = default;
  virtual int q() const = 0;
  virtual int dims() const = 0;
  virtual cplx coefficient(const SparseFrequency& u) const = 0;
};

class DensePriorSpectrum : public PriorSpectrum {
 public:
  explicit DensePriorSpectrum(Spectrum s) : s_(std::move(s)) {}
  int q() const override { return s_.q; }
  int dims() const override { return s_.N; }
  cplx coefficient(const SparseFrequency& u) const override;

 private:
  Spectrum s_;
};

// Listed coefficients; everything else is zero.
class SparsePriorSpectrum : public PriorSpectrum {
 public:
  SparsePriorSpectrum(int q, int N, std::map<SparseFrequency, cplx> coeffs);
  int q() const override { return q_; }
  int dims() const override { return N_; }
  cplx coefficient(const SparseFrequency& u) const override;
  const std::map<SparseFrequency, cplx>& coefficients() const { return coeffs_; }
  // Sum of |coef| over frequencies of each weight.
  std::vector<double> weight_profile() const;
  DensityTable materialize(std::uint64_t cap = kDefaultDenseCap) const;

 private:
  int q_, N_;
  std::map<SparseFrequency, cplx> coeffs_;
};

// Uniform distribution on {x in Z_2^N : sum_{i in S_r} x_i = c_r for every r}.
// The check sets must be linearly independent over GF(2).
SparsePriorSpectrum parity_check_prior(int N, const std::vector<std::vector<int>>& checks,
                                       const std::vector<int>& parities);

struct InputUniformityResult {
  double lhs = 0;  // || mu_Input - 1 ||_inf
  double rhs = 0;  // sum of |prior coef| over supports in phi(iota_M(SF)), U != 0
  bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
};
InputUniformityResult input_uniformity(const PriorSpectrum& prior, int k_prime, const std::vector<int>& phi,
                                       const LocalDistribution& noise, const Hypermatching& M);

// ---- singleton-free mass --------------------------------------------------

// Singleton-free frequencies of Z_q^{m x k} with weight h (and rwt l if l >= 0), built row by row.
std::vector<std::uint64_t> singleton_free_frequencies(int q, int m, int k, int h, int ell = -1);
Integer count_singleton_free(int q, int m, int k, int h, int ell);
double singleton_free_count_bound(int q, int k, int m, int ell);  // (zeta m / l)^l, zeta = e(q^k - 1)

double sf_mass(const Spectrum& ghat, int m, int k, int h);
double sf_mass_by_rows(const Spectrum& ghat, int m, int k, int h, int ell);
// Smallest zeta with mass <= (zeta sqrt(b m) / h)^{h/2}.
double fit_sf_zeta(double mass, int h, double b, int m);

struct CoveredCenterResult {
  double lhs = 0;
  int kappa = 0;  // singleton rows of V
  int rwt_v = 0;
  double fitted_zeta = 0;  // +inf when no zeta works
};
CoveredCenterResult covered_center_mass(const Spectrum& ghat, int m, int k, std::uint64_t V, int h, double b);
double covered_center_bound(double zeta, double b, int m, int k, int q, int rwt_v, int kappa, int h);

struct SquaredMassResult {
  double lhs = 0;
  double bound = 0;
  double zeta = 0;
  bool pass = false;
};
// sum over U(h,l) of |g^(U)|^2 <= (zeta b / (h-l))^{h-l} with zeta = theta q^{k + 2/theta}.
// Needs ||g||_1 = 1, log_q ||g||_inf <= b and 0 < h - l < theta b.
SquaredMassResult squared_mass_check(const DensityTable& g, int m, int k, int h, int ell, double b, double theta);

// ---- combinatorics over random hypermatchings ----------------------------

struct Vertex {
  int i;  // in [n]
  int l;  // column in [k]
  auto operator<=>(const Vertex&) const = default;
};
using MarkSet = std::vector<Vertex>;

// U is in iota_M(SF): every mark is covered by M and no edge meets U exactly once.
bool in_singleton_free_image(const Hypermatching& M, const MarkSet& U);
// Cases where the probability is 0 for structural reasons.
bool structurally_zero(const MarkSet& U, int m, int k);

struct WilsonInterval {
  double estimate = 0;
  double lower = 0;
  double upper = 0;
};
WilsonInterval wilson(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054);

struct McEstimate {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  WilsonInterval ci;
  double bound = 0;
  bool pass = false;  // lower CI end <= bound, and exactly zero where structurally required
};

double combinatorial_bound(int h, int n, int m, int k);  // (32 k^3 (m/n) h / n)^{h/2}
McEstimate combinatorial_mc(const MarkSet& U, int n, int m, int k, std::uint64_t trials, std::uint64_t seed);
Rational combinatorial_exact(const MarkSet& U, int n, int m, int k);

struct EtaKappa {
  int kappa = 0;
  int d = 0;
  int eta = 0;
  auto operator<=>(const EtaKappa&) const = default;
};
EtaKappa eta_kappa(const Hypermatching& M, const MarkSet& U);

double p_bound(double C, double alpha, int n, int u, int kappa, int eta);
double stated_eta_kappa_constant(int k);  // e^{3 + 1/e + 1/2} k / sqrt 2

struct EtaKappaCell {
  std::uint64_t hits = 0;
  WilsonInterval ci;
  double bound = 0;
  bool pass = false;
};
struct EtaKappaReport {
  std::map<std::pair<int, int>, EtaKappaCell> cells;  // keyed by (kappa, eta)
  std::uint64_t trials = 0;
  double constant = 0;
  double fitted_C = 0;  // smallest C matching every observed frequency
  bool all_pass = true;
  bool zero_region_ok = true;  // no mass where kappa + eta > u
};
EtaKappaReport eta_kappa_mc(const MarkSet& U, int n, int m, int k, std::uint64_t trials, std::uint64_t seed);
std::map<std::pair<int, int>, Rational> eta_kappa_exact(const MarkSet& U, int n, int m, int k);

// ---- analytic sums ----------------------------------------------------------

struct LevelSum {
  double sum = 0;
  bool below_delta_sq = false;
};
LevelSum level_bound_sum(double C1, double C2, double s, int n, int k, int m, double delta, int q);

struct TrivialMassResult {
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};
TrivialMassResult trivial_mass_check(const DensityTable& g, int h, double tol = 1e-9);

struct CaseworkGrid {
  std::vector<int> n;
  std::vector<int> h;
  std::vector<int> s;
  double C1 = 1;
  double C_lhs = 1;
  double alpha = 0.1;
  double eps0 = 1;  // s <= eps0 n
  int q = 2;
};
struct CaseworkCase {
  std::size_t points = 0;
  double max_log_ratio = -std::numeric_limits<double>::infinity();  // max log(Q)/h
  double fitted_C_rhs = 0;
};
struct CaseworkReport {
  std::map<std::string, CaseworkCase> cases;  // "1a", "1b", "2a", "2b", "3"
  double fitted_C_rhs = 0;
};
double casework_log_q(double C1, double C_lhs, double alpha, int n, int s, int h, int u, int eta, int q);
std::string casework_case(int n, int s, int h, int u);
CaseworkReport casework_sweep(const CaseworkGrid& grid);

// Lower bound on the in-expectation quantity: the max over g is replaced by a max
// over a finite dictionary of random g with ||g||_1 = 1 and ||g||_inf <= q^s.
struct ExpectationStepResult {
  double lhs_lower_bound = 0;
  double fitted_C_prime = 0;  // h * lhs^{2/h} / sqrt(s n k')
};
ExpectationStepResult expectation_step_lower_bound(const DensityTable& prior, int n, int k_prime,
                                                   const std::vector<int>& phi, int m, int k, int s, int h,
                                                   int dictionary_size, int matchings, std::uint64_t seed);

// ---- suites ------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = true;
  double residual = 0;
  std::map<std::string, double> values;  // fitted constants, CIs, observed quantities
  std::string note;
};
struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};
// Suites: posterior, levels, combinatorics, noise, sums.
SuiteReport run_lemma_suite(const std::string& suite, std::uint64_t seed);

}  // namespace cspgap
