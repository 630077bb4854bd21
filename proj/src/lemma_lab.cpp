#include "cspgap/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "cspgap/errors.hpp"
#include "cspgap/uniformize.hpp"

namespace cspgap {

namespace {

constexpr double kE = std::numbers::e;

std::vector<int> digits_of(std::uint64_t idx, int q, int len) { return tuple_of(idx, q, len); }

int weight_of(const std::vector<int>& d) {
  int w = 0;
  for (int v : d) w += v != 0;
  return w;
}

double noise_row_prob(const LocalDistribution& y, std::uint64_t row) { return y.probs[row].get_d(); }

// Y^{(x)m}(w) for w in Z_q^{m x k}.
double product_prob(const LocalDistribution& y, std::uint64_t w, int m) {
  const std::uint64_t R = y.probs.size();
  double p = 1;
  for (int j = 0; j < m && p != 0; ++j) {
    p *= noise_row_prob(y, w % R);
    w /= R;
  }
  return p;
}

std::uint64_t sub_index(std::uint64_t a, std::uint64_t b, int q, int len) {
  auto da = digits_of(a, q, len), db = digits_of(b, q, len);
  for (int i = 0; i < len; ++i) da[i] = ((da[i] - db[i]) % q + q) % q;
  return index_of(da, q);
}

void check_posterior_inputs(const PosteriorInputs& in) {
  const auto& M = in.matching;
  require(in.n == M.n(), "posterior: n differs from the matching");
  require(in.prior.N == in.n * in.k_prime, "posterior: prior dimension != n*k'");
  require(in.prior.size() <= kPosteriorCap, "posterior: q^{nk'} above the posterior cap");
  require(in.noise.q == in.prior.q && in.noise.k == M.k(), "posterior: noise shape mismatch");
  require(static_cast<int>(in.phi.size()) == M.k(), "posterior: phi length != k");
  std::set<int> seen;
  for (int p : in.phi) {
    require(p >= 0 && p < in.k_prime, "posterior: phi entry out of range");
    require(seen.insert(p).second, "posterior: phi must be injective");
  }
  require(!in.conditioning.empty(), "posterior: conditioning set must be nonempty");
  std::uint64_t space = checked_pow(in.prior.q, M.m() * M.k());
  if (space > kMatrixCap) throw ResourceError("posterior: q^{mk} above the matrix cap");
  std::set<std::uint64_t> uniq;
  for (auto b : in.conditioning) {
    require(b < space, "posterior: conditioning element out of range");
    require(uniq.insert(b).second, "posterior: conditioning set has duplicates");
  }
  require(in.noise.defect().empty(), "posterior: invalid noise distribution");
}

// Pr_Y[z - Y in B] for every z.
std::vector<double> hit_probabilities(const PosteriorInputs& in) {
  const int q = in.prior.q, m = in.matching.m(), k = in.matching.k();
  std::uint64_t space = checked_pow(q, m * k);
  std::vector<double> out(space, 0);
  for (std::uint64_t z = 0; z < space; ++z)
    for (auto b : in.conditioning) out[z] += product_prob(in.noise, sub_index(z, b, q, m * k), m);
  return out;
}

std::vector<std::uint64_t> projected_indices(const DensityTable& prior, const std::vector<int>& sel) {
  std::vector<std::uint64_t> out(prior.size());
  std::vector<int> sub(sel.size());
  for (std::uint64_t x = 0; x < prior.size(); ++x) {
    auto d = digits_of(x, prior.q, prior.N);
    for (std::size_t i = 0; i < sel.size(); ++i) sub[i] = d[sel[i]];
    out[x] = index_of(sub, prior.q);
  }
  return out;
}

}  // namespace

namespace {

// log U_{C,s}(h,N); stays finite where the power itself overflows.
double log_u_bound(double C, double s, int h, double N, int q) {
  require(h >= 0, "u_bound needs h >= 0");
  if (h == 0) return 0.0;
  const double hd = h;
  if (hd <= s) return hd / 2 * std::log(C * std::sqrt(s * N) / hd);
  double a = std::log(C * std::sqrt(N) / std::sqrt(hd));
  double b = std::log(kE * q * q * N / hd);
  return hd / 2 * std::min(a, b);
}

}  // namespace

double u_bound(double C, double s, int h, double N, int q) { return std::exp(log_u_bound(C, s, h, N, q)); }

std::vector<int> frequency_weights(int q, int N) {
  std::uint64_t size = checked_pow(q, N);
  std::vector<int> w(size, 0);
  for (std::uint64_t i = 1; i < size; ++i) w[i] = w[i / q] + (i % q != 0);
  return w;
}

std::vector<double> weight_profile(const Spectrum& s) {
  auto w = frequency_weights(s.q, s.N);
  std::vector<double> out(s.N + 1, 0.0);
  for (std::uint64_t u = 0; u < s.size(); ++u) out[w[u]] += std::abs(s.coeffs[u]);
  return out;
}

BoundProfile boundedness_profile(const DensityTable& density, double C, double s, double tol) {
  return boundedness_profile(dft(density), C, s, tol);
}

BoundProfile boundedness_profile(const Spectrum& spectrum, double C, double s, double tol) {
  BoundProfile p;
  p.C = C;
  p.s = s;
  p.observed = weight_profile(spectrum);
  const int N = spectrum.N;
  const int q = spectrum.q;
  for (int h = 0; h <= N; ++h) {
    double b = u_bound(C, s, h, N, q);
    p.bound.push_back(b);
    bool ok = p.observed[h] <= b * (1 + 1e-12) + tol;
    p.pass.push_back(ok);
    p.all_pass = p.all_pass && ok;

    double need = 0;
    double obs = p.observed[h];
    if (h == 0) {
      need = obs <= 1 + tol ? 0 : std::numeric_limits<double>::infinity();
    } else if (obs > tol) {
      if (h <= s) {
        need = h * std::pow(obs, 2.0 / h) / std::sqrt(s * N);
      } else {
        double cap = std::pow(kE * q * q * N / h, h / 2.0);
        need = obs > cap * (1 + 1e-12) + tol ? std::numeric_limits<double>::infinity()
                                             : std::sqrt(static_cast<double>(h)) * std::pow(obs, 2.0 / h) / std::sqrt(N);
      }
    }
    p.fitted_C = std::max(p.fitted_C, need);
  }
  return p;
}

std::vector<int> projection_selector(const Hypermatching& M, const std::vector<int>& phi, int k_prime) {
  require(static_cast<int>(phi.size()) == M.k(), "phi length != k");
  std::vector<int> sel(static_cast<std::size_t>(M.m()) * M.k());
  for (int j = 0; j < M.m(); ++j)
    for (int l = 0; l < M.k(); ++l) sel[static_cast<std::size_t>(j) * M.k() + l] = M(j, l) * k_prime + phi[l];
  return sel;
}

DensityTable bayes_posterior(const PosteriorInputs& in) {
  check_posterior_inputs(in);
  auto sel = projection_selector(in.matching, in.phi, in.k_prime);
  auto proj = projected_indices(in.prior, sel);
  auto hit = hit_probabilities(in);
  const double size = static_cast<double>(in.prior.size());
  std::vector<double> w(in.prior.size());
  double total = 0;
  for (std::uint64_t x = 0; x < in.prior.size(); ++x) {
    double px = in.prior.values[x].real() / size;
    w[x] = px * hit[proj[x]];
    total += w[x];
  }
  if (!(total > 0)) throw NullEvent("posterior: conditioning event has probability zero");
  std::vector<cplx> vals(in.prior.size());
  for (std::uint64_t x = 0; x < in.prior.size(); ++x) vals[x] = size * w[x] / total;
  return DensityTable(in.prior.q, in.prior.N, std::move(vals), true);
}

PosteriorResult posterior_density(const PosteriorInputs& in) {
  check_posterior_inputs(in);
  const int q = in.prior.q, m = in.matching.m(), k = in.matching.k();
  const std::uint64_t space = checked_pow(q, m * k);
  auto sel = projection_selector(in.matching, in.phi, in.k_prime);

  // Denominator of nu, straight from its definition.
  DensityTable pushed = average_pushforward(in.prior, sel);
  auto hit = hit_probabilities(in);
  double event = 0;
  for (std::uint64_t z = 0; z < space; ++z) event += pushed.values[z].real() / static_cast<double>(space) * hit[z];
  if (!(event > 0)) throw NullEvent("posterior: conditioning event has probability zero");

  PosteriorResult res;
  res.event_probability = event;
  res.nu = (static_cast<double>(in.conditioning.size()) / static_cast<double>(space)) / event;

  std::vector<cplx> indicator(space, 0.0);
  for (auto b : in.conditioning)
    indicator[b] = static_cast<double>(space) / static_cast<double>(in.conditioning.size());
  Spectrum bhat = dft(DensityTable(q, m * k, std::move(indicator), true));
  ProductSpectrum yhat = product_density(in.noise, m);
  for (std::uint64_t u = 0; u < space; ++u) bhat.coeffs[u] *= yhat.coefficient(u);
  DensityTable conv = idft(bhat, true);

  auto proj = projected_indices(in.prior, sel);
  std::vector<cplx> vals(in.prior.size());
  for (std::uint64_t x = 0; x < in.prior.size(); ++x) vals[x] = in.prior.values[x] * conv.values[proj[x]] * res.nu;
  res.formula = DensityTable(q, in.prior.N, std::move(vals), true);
  res.oracle = bayes_posterior(in);
  for (std::uint64_t x = 0; x < in.prior.size(); ++x)
    res.residual = std::max(res.residual, std::abs(res.formula.values[x] - res.oracle.values[x]));
  return res;
}

cplx DensePriorSpectrum::coefficient(const SparseFrequency& u) const {
  std::vector<int> full(s_.N, 0);
  for (auto [c, v] : u) full.at(c) = v;
  return s_.coeffs[index_of(full, s_.q)];
}

SparsePriorSpectrum::SparsePriorSpectrum(int q, int N, std::map<SparseFrequency, cplx> coeffs)
    : q_(q), N_(N), coeffs_(std::move(coeffs)) {
  for (const auto& [u, c] : coeffs_)
    for (auto [coord, v] : u) require(coord >= 0 && coord < N && v > 0 && v < q, "sparse frequency out of range");
}

cplx SparsePriorSpectrum::coefficient(const SparseFrequency& u) const {
  auto it = coeffs_.find(u);
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

std::vector<double> SparsePriorSpectrum::weight_profile() const {
  std::vector<double> out(N_ + 1, 0.0);
  for (const auto& [u, c] : coeffs_) out[u.size()] += std::abs(c);
  return out;
}

DensityTable SparsePriorSpectrum::materialize(std::uint64_t cap) const {
  std::uint64_t size = checked_pow(q_, N_);
  if (size > cap) throw ResourceError("sparse prior too large to materialize");
  Spectrum s{q_, N_, std::vector<cplx>(size, 0.0)};
  for (const auto& [u, c] : coeffs_) {
    std::vector<int> full(N_, 0);
    for (auto [coord, v] : u) full[coord] = v;
    s.coeffs[index_of(full, q_)] = c;
  }
  return idft(s, true);
}

SparsePriorSpectrum parity_check_prior(int N, const std::vector<std::vector<int>>& checks,
                                       const std::vector<int>& parities) {
  require(checks.size() == parities.size(), "one parity per check");
  require(checks.size() < 24, "too many parity checks");
  const std::size_t r = checks.size();
  std::vector<std::vector<char>> vecs(r, std::vector<char>(N, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (int c : checks[i]) {
      require(c >= 0 && c < N, "check coordinate out of range");
      vecs[i][c] ^= 1;
    }
  std::map<SparseFrequency, cplx> coeffs;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    std::vector<char> u(N, 0);
    int sign = 0;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1) {
        for (int c = 0; c < N; ++c) u[c] ^= vecs[i][c];
        sign ^= parities[i] & 1;
      }
    SparseFrequency f;
    for (int c = 0; c < N; ++c)
      if (u[c]) f.emplace_back(c, 1);
    require(mask == 0 || !f.empty(), "parity checks must be linearly independent");
    auto [it, fresh] = coeffs.emplace(std::move(f), sign ? -1.0 : 1.0);
    require(fresh, "parity checks must be linearly independent");
  }
  return SparsePriorSpectrum(2, N, std::move(coeffs));
}

InputUniformityResult input_uniformity(const PriorSpectrum& prior, int k_prime, const std::vector<int>& phi,
                                       const LocalDistribution& noise, const Hypermatching& M) {
  const int q = prior.q(), m = M.m(), k = M.k();
  require(prior.dims() == M.n() * k_prime, "prior dimension != n*k'");
  require(noise.q == q && noise.k == k, "noise shape mismatch");
  require(is_one_wise_uniform(noise), "input uniformity bound needs one-wise uniform noise");
  const std::uint64_t space = checked_pow(q, m * k);
  if (space > kMatrixCap) throw ResourceError("q^{mk} above the matrix cap");
  auto sel = projection_selector(M, phi, k_prime);
  FrequencyStats stats(q, m, k, kMatrixCap);
  ProductSpectrum yhat = product_density(noise, m);

  InputUniformityResult res;
  Spectrum in{q, m * k, std::vector<cplx>(space)};
  for (std::uint64_t u = 0; u < space; ++u) {
    auto d = digits_of(u, q, m * k);
    SparseFrequency f;
    std::vector<int> neg(m * k);
    for (int p = 0; p < m * k; ++p) {
      if (d[p]) f.emplace_back(sel[p], d[p]);
      neg[p] = (q - d[p]) % q;
    }
    std::sort(f.begin(), f.end());
    cplx c = prior.coefficient(f);
    // Density of -Y at U is the density of Y at -U.
    in.coeffs[u] = c * yhat.coefficient(index_of(neg, q));
    if (u != 0 && stats.singleton_free(u)) res.rhs += std::abs(c);
  }
  DensityTable dens = idft(in, true);
  for (const auto& v : dens.values) res.lhs = std::max(res.lhs, std::abs(v - cplx(1.0)));
  return res;
}

std::vector<std::uint64_t> singleton_free_frequencies(int q, int m, int k, int h, int ell) {
  const std::uint64_t R = checked_pow(q, k);
  std::vector<std::pair<std::uint64_t, int>> rows;  // (row index, weight) with weight != 1
  for (std::uint64_t r = 0; r < R; ++r) {
    int w = weight_of(digits_of(r, q, k));
    if (w != 1) rows.emplace_back(r, w);
  }
  std::vector<std::uint64_t> out;
  std::function<void(int, std::uint64_t, int, int)> rec = [&](int j, std::uint64_t acc, int w, int nz) {
    if (w > h || (ell >= 0 && nz > ell)) return;
    if (j == m) {
      if (w == h && (ell < 0 || nz == ell)) out.push_back(acc);
      return;
    }
    for (auto [r, rw] : rows) rec(j + 1, acc * R + r, w + rw, nz + (rw > 0));
  };
  rec(0, 0, 0, 0);
  return out;
}

Integer count_singleton_free(int q, int m, int k, int h, int ell) {
  require(ell >= 0 && ell <= m, "row count out of range");
  // [x^h] (sum_{w>=2} C(k,w)(q-1)^w x^w)^ell, times C(m, ell).
  std::vector<Integer> row(k + 1, 0);
  for (int w = 2; w <= k; ++w) {
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), Integer(q - 1).get_mpz_t(), w);
    row[w] = binomial(k, w) * p;
  }
  std::vector<Integer> poly{1};
  for (int i = 0; i < ell; ++i) {
    std::vector<Integer> next(poly.size() + k, 0);
    for (std::size_t a = 0; a < poly.size(); ++a)
      for (int w = 0; w <= k; ++w) next[a + w] += poly[a] * row[w];
    poly = std::move(next);
  }
  Integer c = h < static_cast<int>(poly.size()) && h >= 0 ? poly[h] : Integer(0);
  return binomial(m, ell) * c;
}

double singleton_free_count_bound(int q, int k, int m, int ell) {
  if (ell == 0) return 1.0;
  double zeta = kE * (std::pow(q, k) - 1);
  return std::pow(zeta * m / ell, ell);
}

double sf_mass(const Spectrum& ghat, int m, int k, int h) {
  require(ghat.N == m * k, "spectrum dimension != m*k");
  double s = 0;
  for (auto u : singleton_free_frequencies(ghat.q, m, k, h)) s += std::abs(ghat.coeffs[u]);
  return s;
}

double sf_mass_by_rows(const Spectrum& ghat, int m, int k, int h, int ell) {
  require(ghat.N == m * k, "spectrum dimension != m*k");
  double s = 0;
  for (auto u : singleton_free_frequencies(ghat.q, m, k, h, ell)) s += std::norm(ghat.coeffs[u]);
  return s;
}

double fit_sf_zeta(double mass, int h, double b, int m) {
  if (mass <= 0 || h <= 0) return 0;
  return h * std::pow(mass, 2.0 / h) / std::sqrt(b * m);
}

double covered_center_bound(double zeta, double b, int m, int k, int q, int rwt_v, int kappa, int h) {
  double pre = std::pow(static_cast<double>(q), static_cast<double>(k) * rwt_v);
  int e = h - kappa;
  if (e <= 0) return pre;
  return pre * std::pow(zeta * std::sqrt(b * m) / e, e / 2.0);
}

CoveredCenterResult covered_center_mass(const Spectrum& ghat, int m, int k, std::uint64_t V, int h, double b) {
  require(ghat.N == m * k, "spectrum dimension != m*k");
  const int q = ghat.q;
  require(V < ghat.size(), "center out of range");
  CoveredCenterResult res;
  auto vd = digits_of(V, q, m * k);
  for (int j = 0; j < m; ++j) {
    int w = 0;
    for (int l = 0; l < k; ++l) w += vd[static_cast<std::size_t>(j) * k + l] != 0;
    res.rwt_v += w > 0;
    res.kappa += w == 1;
  }
  for (int hw = 0; hw <= m * k; ++hw)
    for (auto u : singleton_free_frequencies(q, m, k, hw)) {
      auto ud = digits_of(u, q, m * k);
      int w = 0;
      for (int p = 0; p < m * k; ++p) w += ud[p] != vd[p];
      if (w == h) res.lhs += std::abs(ghat.coeffs[u]);
    }
  double pre = std::pow(static_cast<double>(q), static_cast<double>(k) * res.rwt_v);
  int e = h - res.kappa;
  if (e <= 0) {
    res.fitted_zeta = res.lhs <= pre * (1 + 1e-12) ? 0 : std::numeric_limits<double>::infinity();
  } else if (res.lhs > 0) {
    res.fitted_zeta = e * std::pow(res.lhs / pre, 2.0 / e) / std::sqrt(b * m);
  }
  return res;
}

SquaredMassResult squared_mass_check(const DensityTable& g, int m, int k, int h, int ell, double b, double theta) {
  require(g.N == m * k, "table dimension != m*k");
  require(h > ell && ell >= 0, "need h > l >= 0");
  require(theta > 0 && b > 0, "need theta, b > 0");
  require(h - ell < theta * b, "need h - l < theta*b");
  require(std::abs(norm_p(g, 1) - 1) <= 1e-9, "need ||g||_1 = 1");
  require(std::log(norm_p(g, kInfNorm)) / std::log(g.q) <= b + 1e-12, "need log_q ||g||_inf <= b");
  SquaredMassResult r;
  r.lhs = sf_mass_by_rows(dft(g), m, k, h, ell);
  r.zeta = theta * std::pow(static_cast<double>(g.q), k + 2.0 / theta);
  r.bound = std::pow(r.zeta * b / (h - ell), h - ell);
  r.pass = r.lhs <= r.bound * (1 + 1e-12) + 1e-12;
  return r;
}

bool in_singleton_free_image(const Hypermatching& M, const MarkSet& U) {
  std::vector<int> per_row(M.m(), 0);
  for (const auto& v : U) {
    int row = -1;
    for (int j = 0; j < M.m(); ++j)
      if (M(j, v.l) == v.i) {
        row = j;
        break;
      }
    if (row < 0) return false;
    ++per_row[row];
  }
  for (int c : per_row)
    if (c == 1) return false;
  return true;
}

bool structurally_zero(const MarkSet& U, int m, int k) {
  const int h = static_cast<int>(U.size());
  if (h == 0) return false;
  if (h == 1 || h > k * m) return true;
  std::vector<int> per_col(k, 0);
  for (const auto& v : U) ++per_col[v.l];
  int used = 0;
  for (int c : per_col) {
    if (c > m) return true;
    used += c > 0;
  }
  return used == 1;
}

WilsonInterval wilson(std::uint64_t hits, std::uint64_t trials, double z) {
  require(trials > 0, "Wilson interval needs trials > 0");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(hits) / n;
  double denom = 1 + z * z / n;
  double center = (p + z * z / (2 * n)) / denom;
  double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

double combinatorial_bound(int h, int n, int m, int k) {
  if (h == 0) return 1.0;
  double alpha = static_cast<double>(m) / n;
  return std::pow(32.0 * k * k * k * alpha * h / n, h / 2.0);
}

namespace {

void check_marks(const MarkSet& U, int n, int m, int k) {
  require(n >= 1 && m >= 1 && k >= 1 && m <= n, "need 1 <= m <= n and k >= 1");
  std::set<Vertex> seen;
  for (const auto& v : U) {
    require(v.i >= 0 && v.i < n && v.l >= 0 && v.l < k, "marked vertex out of range");
    require(seen.insert(v).second, "marked vertices must be distinct");
  }
}

}  // namespace

McEstimate combinatorial_mc(const MarkSet& U, int n, int m, int k, std::uint64_t trials, std::uint64_t seed) {
  check_marks(U, n, m, k);
  require(trials >= 100, "combinatorial_mc needs at least 100 trials");
  Rng rng = Rng::substream(seed, Purpose::Trial);
  McEstimate est;
  est.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t)
    est.hits += in_singleton_free_image(sample_hypermatching(n, m, k, rng), U);
  est.ci = wilson(est.hits, trials);
  est.bound = combinatorial_bound(static_cast<int>(U.size()), n, m, k);
  est.pass = structurally_zero(U, m, k) ? est.hits == 0 : est.ci.lower <= est.bound;
  return est;
}

Rational combinatorial_exact(const MarkSet& U, int n, int m, int k) {
  check_marks(U, n, m, k);
  std::uint64_t hits = 0, total = 0;
  for_each_hypermatching(n, m, k, [&](const Hypermatching& M) {
    hits += in_singleton_free_image(M, U);
    ++total;
  });
  Rational r(Integer(std::to_string(hits)), Integer(std::to_string(total)));
  r.canonicalize();
  return r;
}

EtaKappa eta_kappa(const Hypermatching& M, const MarkSet& U) {
  std::set<Vertex> marks(U.begin(), U.end());
  EtaKappa r;
  for (int j = 0; j < M.m(); ++j) {
    int c = 0;
    for (int l = 0; l < M.k(); ++l) c += marks.count(Vertex{M(j, l), l}) > 0;
    if (c == 1) ++r.kappa;
    if (c >= 2) {
      ++r.d;
      r.eta += c;
    }
  }
  return r;
}

double p_bound(double C, double alpha, int n, int u, int kappa, int eta) {
  if (kappa + eta > u) return 0.0;
  return std::pow(alpha, kappa) * std::pow(C, u) * std::pow(static_cast<double>(u) / n, eta / 2.0);
}

double stated_eta_kappa_constant(int k) { return std::exp(3 + 1 / kE + 0.5) * k / std::sqrt(2.0); }

EtaKappaReport eta_kappa_mc(const MarkSet& U, int n, int m, int k, std::uint64_t trials, std::uint64_t seed) {
  check_marks(U, n, m, k);
  require(trials >= 100, "eta_kappa_mc needs at least 100 trials");
  Rng rng = Rng::substream(seed, Purpose::Trial, 1);
  EtaKappaReport rep;
  rep.trials = trials;
  rep.constant = stated_eta_kappa_constant(k);
  std::map<std::pair<int, int>, std::uint64_t> counts;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto ek = eta_kappa(sample_hypermatching(n, m, k, rng), U);
    ++counts[{ek.kappa, ek.eta}];
  }
  const int u = static_cast<int>(U.size());
  const double alpha = static_cast<double>(m) / n;
  for (auto [key, hits] : counts) {
    auto [kap, eta] = key;
    EtaKappaCell cell;
    cell.hits = hits;
    cell.ci = wilson(hits, trials);
    cell.bound = p_bound(rep.constant, alpha, n, u, kap, eta);
    cell.pass = cell.ci.lower <= cell.bound;
    if (kap + eta > u) rep.zero_region_ok = false;
    rep.all_pass = rep.all_pass && cell.pass;
    if (u > 0) {
      double base = std::pow(alpha, kap) * std::pow(static_cast<double>(u) / n, eta / 2.0);
      rep.fitted_C = std::max(rep.fitted_C, std::pow(cell.ci.estimate / base, 1.0 / u));
    }
    rep.cells.emplace(key, cell);
  }
  rep.all_pass = rep.all_pass && rep.zero_region_ok;
  return rep;
}

std::map<std::pair<int, int>, Rational> eta_kappa_exact(const MarkSet& U, int n, int m, int k) {
  check_marks(U, n, m, k);
  std::map<std::pair<int, int>, std::uint64_t> counts;
  std::uint64_t total = 0;
  for_each_hypermatching(n, m, k, [&](const Hypermatching& M) {
    auto ek = eta_kappa(M, U);
    ++counts[{ek.kappa, ek.eta}];
    ++total;
  });
  std::map<std::pair<int, int>, Rational> out;
  for (auto [key, c] : counts) {
    Rational r(Integer(std::to_string(c)), Integer(std::to_string(total)));
    r.canonicalize();
    out.emplace(key, r);
  }
  return out;
}

LevelSum level_bound_sum(double C1, double C2, double s, int n, int k, int m, double delta, int q) {
  require(C1 > 0 && C2 > 0 && s > 0 && n > 0 && k > 0 && m > 0 && delta > 0, "level sum parameters must be positive");
  LevelSum r;
  for (int h = 2; h <= k * m; ++h) r.sum += u_bound(C1, s, h, n, q) * std::pow(C2 * h / n, h / 2.0);
  r.below_delta_sq = r.sum <= delta * delta;
  return r;
}

TrivialMassResult trivial_mass_check(const DensityTable& g, int h, double tol) {
  require(h >= 0, "h must be nonnegative");
  require(std::abs(norm_p(g, 1) - 1) <= tol, "trivial mass check needs ||g||_1 = 1");
  double linf = norm_p(g, kInfNorm);
  require(std::log(linf) / std::log(g.q) <= h + tol, "trivial mass check needs log_q ||g||_inf <= h");
  TrivialMassResult r;
  auto prof = weight_profile(dft(g));
  r.lhs = h <= g.N ? prof[h] : 0.0;
  r.rhs = h == 0 ? 1.0 : std::pow(g.q * g.q * kE * g.N / h, h / 2.0);
  r.pass = r.lhs <= r.rhs + tol;
  return r;
}

double casework_log_q(double C1, double C_lhs, double alpha, int n, int s, int h, int u, int eta, int q) {
  double lu = log_u_bound(C1, s, u, n, q);
  double out = lu + u * std::log(C_lhs);
  if (eta > 0) out += eta / 2.0 * (std::log(alpha) + std::log(static_cast<double>(u)));
  out += (u / 2.0 - eta / 2.0) * std::log(static_cast<double>(h));
  out -= (u / 4.0 + eta / 4.0) * std::log(static_cast<double>(n));
  out -= (u / 4.0 - eta / 4.0) * std::log(static_cast<double>(s));
  return out;
}

std::string casework_case(int n, int s, int h, int u) {
  if (u <= h) return "1a";
  if (u <= s) return "1b";
  if (u <= 16 * s) return "2a";
  if (u <= std::sqrt(static_cast<double>(s) * n)) return "2b";
  return "3";
}

CaseworkReport casework_sweep(const CaseworkGrid& grid) {
  CaseworkReport rep;
  for (const char* c : {"1a", "1b", "2a", "2b", "3"}) rep.cases[c] = {};
  for (int n : grid.n)
    for (int h : grid.h) {
      if (h < 1) continue;
      for (int s : grid.s) {
        if (s < h || s > grid.eps0 * n) continue;
        for (int u = 0; u <= n; ++u)
          for (int eta = std::max(0, u - h); eta <= u; ++eta) {
            double lq = casework_log_q(grid.C1, grid.C_lhs, grid.alpha, n, s, h, u, eta, grid.q);
            auto& cs = rep.cases[casework_case(n, s, h, u)];
            ++cs.points;
            cs.max_log_ratio = std::max(cs.max_log_ratio, lq / h);
          }
      }
    }
  for (auto& [name, cs] : rep.cases) {
    cs.fitted_C_rhs = cs.points ? std::exp(cs.max_log_ratio) : 0.0;
    rep.fitted_C_rhs = std::max(rep.fitted_C_rhs, cs.fitted_C_rhs);
  }
  return rep;
}

ExpectationStepResult expectation_step_lower_bound(const DensityTable& prior, int n, int k_prime,
                                                   const std::vector<int>& phi, int m, int k, int s, int h,
                                                   int dictionary_size, int matchings, std::uint64_t seed) {
  require(prior.N == n * k_prime, "prior dimension != n*k'");
  require(dictionary_size >= 1 && matchings >= 1, "need a nonempty dictionary and at least one matching");
  require(h >= 1 && s >= h, "need 1 <= h <= s");
  const int q = prior.q;
  const std::uint64_t space = checked_pow(q, m * k);
  if (space > kMatrixCap) throw ResourceError("q^{mk} above the matrix cap");
  Rng rng = Rng::substream(seed, Purpose::Aux, 7);

  // best[c][w] = max over the dictionary of sum_{U in SF, wt(U + c) = w} |g^(U)|.
  std::vector<std::vector<double>> best(space, std::vector<double>(m * k + 1, 0.0));
  std::vector<std::uint64_t> sf;
  for (int w = 0; w <= m * k; ++w)
    for (auto u : singleton_free_frequencies(q, m, k, w)) sf.push_back(u);
  const double limit = std::pow(static_cast<double>(q), s);
  for (int g_i = 0; g_i < dictionary_size; ++g_i) {
    // Scaled indicator of a random set of measure >= q^{-s}, with random phases.
    std::uint64_t min_size = static_cast<std::uint64_t>(std::ceil(static_cast<double>(space) / limit));
    std::uint64_t size = std::max<std::uint64_t>(1, min_size + rng.below(space - std::min(space, min_size) + 1));
    size = std::min(size, space);
    std::vector<std::uint64_t> perm(space);
    for (std::uint64_t i = 0; i < space; ++i) perm[i] = i;
    for (std::uint64_t i = 0; i < size; ++i) std::swap(perm[i], perm[i + rng.below(space - i)]);
    std::vector<cplx> vals(space, 0.0);
    double height = static_cast<double>(space) / static_cast<double>(size);
    for (std::uint64_t i = 0; i < size; ++i)
      vals[perm[i]] = std::polar(height, 2 * std::numbers::pi * rng.uniform01());
    Spectrum gh = dft(DensityTable(q, m * k, std::move(vals)));
    for (std::uint64_t c = 0; c < space; ++c) {
      std::vector<double> acc(m * k + 1, 0.0);
      auto cd = digits_of(c, q, m * k);
      for (auto u : sf) {
        auto ud = digits_of(u, q, m * k);
        int w = 0;
        for (int p = 0; p < m * k; ++p) w += (ud[p] + cd[p]) % q != 0;
        acc[w] += std::abs(gh.coeffs[u]);
      }
      for (int w = 0; w <= m * k; ++w) best[c][w] = std::max(best[c][w], acc[w]);
    }
  }

  Spectrum dh = dft(prior);
  auto weights = frequency_weights(q, prior.N);
  double total = 0;
  for (int t = 0; t < matchings; ++t) {
    Hypermatching M = sample_hypermatching(n, m, k, rng);
    auto sel = projection_selector(M, phi, k_prime);
    double acc = 0;
    for (std::uint64_t v = 0; v < dh.size(); ++v) {
      double a = std::abs(dh.coeffs[v]);
      if (a < 1e-15) continue;
      auto vd = digits_of(v, q, prior.N);
      std::vector<int> pv(sel.size());
      for (std::size_t p = 0; p < sel.size(); ++p) pv[p] = vd[sel[p]];
      int target = h - (weights[v] - weight_of(pv));
      if (target < 0 || target > m * k) continue;
      acc += a * best[index_of(pv, q)][target];
    }
    total += acc;
  }
  ExpectationStepResult r;
  r.lhs_lower_bound = total / matchings;
  r.fitted_C_prime = r.lhs_lower_bound > 0
                         ? h * std::pow(r.lhs_lower_bound, 2.0 / h) / std::sqrt(static_cast<double>(s) * n * k_prime)
                         : 0.0;
  return r;
}

}  // namespace cspgap
