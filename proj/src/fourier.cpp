#include "cspgap/fourier.hpp"

#include <cmath>
#include <numbers>

#include "cspgap/errors.hpp"

namespace cspgap {

namespace {

std::uint64_t table_size(int q, int N, std::uint64_t cap) {
  require(q >= 1 && N >= 0, "table needs q >= 1 and N >= 0");
  std::uint64_t size;
  try {
    size = checked_pow(static_cast<std::uint64_t>(q), static_cast<unsigned>(N));
  } catch (const ResourceError&) {
    throw ResourceError("q^N exceeds the dense table cap " + std::to_string(cap));
  }
  if (size > cap) throw ResourceError("q^N = " + std::to_string(size) + " exceeds the dense table cap " + std::to_string(cap));
  return size;
}

std::vector<cplx> twiddles(int q, int sign) {
  std::vector<cplx> w(q);
  for (int j = 0; j < q; ++j) w[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi * j / q);
  return w;
}

// In-place length-q transform along every axis; scale applied per axis.
void transform(std::vector<cplx>& v, int q, int N, int sign, double scale) {
  auto w = twiddles(q, sign);
  std::vector<cplx> tmp(q), out(q);
  std::uint64_t stride = 1;
  for (int axis = N - 1; axis >= 0; --axis) {
    std::uint64_t block = stride * static_cast<std::uint64_t>(q);
    for (std::uint64_t hi = 0; hi < v.size(); hi += block)
      for (std::uint64_t lo = 0; lo < stride; ++lo) {
        std::uint64_t base = hi + lo;
        for (int x = 0; x < q; ++x) tmp[x] = v[base + x * stride];
        for (int u = 0; u < q; ++u) {
          cplx acc = 0;
          for (int x = 0; x < q; ++x) acc += tmp[x] * w[(u * x) % q];
          out[u] = acc * scale;
        }
        for (int u = 0; u < q; ++u) v[base + u * stride] = out[u];
      }
    stride = block;
  }
}

}  // namespace

DensityTable::DensityTable(int q_, int N_, std::vector<cplx> v, bool is_density)
    : q(q_), N(N_), values(std::move(v)), mean1(is_density) {
  require(values.size() == table_size(q, N, UINT64_MAX), "table length != q^N");
}

DensityTable DensityTable::constant(int q, int N, cplx c, std::uint64_t cap) {
  return DensityTable(q, N, std::vector<cplx>(table_size(q, N, cap), c), c == cplx(1.0));
}

DensityTable DensityTable::character(int q, int N, std::uint64_t v) {
  std::uint64_t size = table_size(q, N, kDefaultDenseCap);
  require(v < size, "character index out of range");
  auto vd = tuple_of(v, q, N);
  auto w = twiddles(q, +1);
  std::vector<cplx> vals(size);
  for (std::uint64_t x = 0; x < size; ++x) {
    auto xd = tuple_of(x, q, N);
    long long ip = 0;
    for (int i = 0; i < N; ++i) ip += static_cast<long long>(vd[i]) * xd[i];
    vals[x] = w[ip % q];
  }
  return DensityTable(q, N, std::move(vals));
}

bool DensityTable::looks_like_density(double tol) const {
  cplx sum = 0;
  for (const auto& v : values) {
    if (std::abs(v.imag()) > tol || v.real() < -tol) return false;
    sum += v;
  }
  return std::abs(sum / static_cast<double>(values.size()) - cplx(1.0)) <= tol;
}

Spectrum dft(const DensityTable& g, std::uint64_t cap) {
  table_size(g.q, g.N, cap);
  Spectrum s{g.q, g.N, g.values};
  transform(s.coeffs, g.q, g.N, -1, 1.0 / g.q);
  return s;
}

DensityTable idft(const Spectrum& s, bool mean1) {
  std::vector<cplx> v = s.coeffs;
  transform(v, s.q, s.N, +1, 1.0);
  return DensityTable(s.q, s.N, std::move(v), mean1);
}

DensityTable convolve(const DensityTable& f, const DensityTable& g) {
  require(f.q == g.q && f.N == g.N, "convolve: shapes differ");
  Spectrum a = dft(f), b = dft(g);
  for (std::uint64_t u = 0; u < a.size(); ++u) a.coeffs[u] *= b.coeffs[u];
  return idft(a, f.mean1 && g.mean1);
}

DensityTable density_from_dist(int q, int N, const std::vector<double>& probs) {
  std::uint64_t size = table_size(q, N, kDefaultDenseCap);
  require(probs.size() == size, "probability vector length != q^N");
  double sum = 0;
  std::vector<cplx> vals(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    require(probs[i] >= 0, "negative probability at index " + std::to_string(i));
    sum += probs[i];
    vals[i] = probs[i] * static_cast<double>(size);
  }
  require(std::abs(sum - 1.0) <= 1e-9, "probabilities do not sum to 1");
  return DensityTable(q, N, std::move(vals), true);
}

DensityTable density_from_dist(const LocalDistribution& dist) {
  std::string d = dist.defect();
  require(d.empty(), "invalid distribution: " + d);
  std::vector<double> p;
  p.reserve(dist.probs.size());
  for (const auto& r : dist.probs) p.push_back(r.get_d());
  return density_from_dist(dist.q, dist.k, p);
}

ProductSpectrum::ProductSpectrum(Spectrum row, int m) : row_(std::move(row)), m_(m) {
  require(m >= 1, "product needs m >= 1");
}

cplx ProductSpectrum::coefficient(std::uint64_t U) const {
  const std::uint64_t R = row_.size();
  cplx c = 1;
  // Last row is least significant.
  for (int j = m_ - 1; j >= 0; --j) {
    c *= row_.coeffs[U % R];
    U /= R;
  }
  return c;
}

cplx ProductSpectrum::coefficient_of_rows(const std::vector<std::uint64_t>& rows) const {
  require(static_cast<int>(rows.size()) == m_, "row count differs from m");
  cplx c = 1;
  for (auto r : rows) c *= row_.coeffs.at(r);
  return c;
}

Spectrum ProductSpectrum::materialize(std::uint64_t cap) const {
  std::uint64_t size = table_size(row_.q, row_.N * m_, cap);
  Spectrum s{row_.q, row_.N * m_, std::vector<cplx>(size)};
  for (std::uint64_t U = 0; U < size; ++U) s.coeffs[U] = coefficient(U);
  return s;
}

ProductSpectrum product_density(const LocalDistribution& dist, int m) {
  return ProductSpectrum(dft(density_from_dist(dist)), m);
}

DensityTable product_density_table(const LocalDistribution& dist, int m, std::uint64_t cap) {
  DensityTable row = density_from_dist(dist);
  std::uint64_t size = table_size(dist.q, dist.k * m, cap);
  const std::uint64_t R = row.size();
  std::vector<cplx> vals(size);
  for (std::uint64_t x = 0; x < size; ++x) {
    cplx v = 1;
    std::uint64_t rest = x;
    for (int j = 0; j < m; ++j) {
      v *= row.values[rest % R];
      rest /= R;
    }
    vals[x] = v;
  }
  return DensityTable(dist.q, dist.k * m, std::move(vals), true);
}

FrequencyStats::FrequencyStats(int q, int m, int k, std::uint64_t cap) : q_(q), m_(m), k_(k) {
  require(m >= 1 && k >= 1, "frequency stats need m, k >= 1");
  std::uint64_t size = table_size(q, m * k, cap);
  wt_.resize(size);
  rwt_.resize(size);
  singles_.resize(size);
  std::vector<int> digits(static_cast<std::size_t>(m) * k, 0);
  for (std::uint64_t U = 0; U < size; ++U) {
    if (U > 0)
      for (int i = m * k - 1; i >= 0; --i) {
        if (++digits[i] < q) break;
        digits[i] = 0;
      }
    int w = 0, r = 0, s = 0;
    for (int j = 0; j < m; ++j) {
      int rw = 0;
      for (int l = 0; l < k; ++l) rw += digits[static_cast<std::size_t>(j) * k + l] != 0;
      w += rw;
      r += rw > 0;
      s += rw == 1;
    }
    wt_[U] = static_cast<std::uint8_t>(w);
    rwt_[U] = static_cast<std::uint8_t>(r);
    singles_[U] = static_cast<std::uint8_t>(s);
  }
}

Multiplier Multiplier::row_noise(double rho, int m, int k) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0,1]");
  return Multiplier{MultiplierKind::RowNoise, rho, m, k, {}};
}

Multiplier Multiplier::modified(double rho, int m, int k) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0,1]");
  return Multiplier{MultiplierKind::Modified, rho, m, k, {}};
}

cplx Multiplier::eigenvalue(const FrequencyStats& stats, std::uint64_t U) const {
  switch (kind) {
    case MultiplierKind::RowNoise:
      return std::pow(rho, stats.rwt(U));
    case MultiplierKind::Modified:
      if (!stats.singleton_free(U)) return 0.0;
      return std::pow(rho, stats.wt(U) - stats.rwt(U));
    case MultiplierKind::Custom:
      return custom(U);
  }
  return 0.0;
}

DensityTable apply_multiplier(const DensityTable& g, const Multiplier& mult) {
  require(mult.kind == MultiplierKind::Custom || (mult.rho >= 0.0 && mult.rho <= 1.0), "rho must lie in [0,1]");
  require(mult.m * mult.k == g.N, "multiplier shape m*k differs from table dimension");
  require(mult.kind != MultiplierKind::Custom || static_cast<bool>(mult.custom), "custom multiplier without eigenvalues");
  FrequencyStats stats(g.q, mult.m, mult.k);
  Spectrum s = dft(g);
  for (std::uint64_t U = 0; U < s.size(); ++U) s.coeffs[U] *= mult.eigenvalue(stats, U);
  return idft(s);
}

DensityTable row_noise_direct(const DensityTable& g, double rho, int m, int k) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0,1]");
  require(m * k == g.N, "row noise shape m*k differs from table dimension");
  std::vector<cplx> v = g.values;
  const std::uint64_t R = checked_pow(g.q, k);
  std::uint64_t stride = 1;
  for (int j = m - 1; j >= 0; --j) {
    std::uint64_t block = stride * R;
    for (std::uint64_t hi = 0; hi < v.size(); hi += block)
      for (std::uint64_t lo = 0; lo < stride; ++lo) {
        cplx avg = 0;
        for (std::uint64_t r = 0; r < R; ++r) avg += v[hi + r * stride + lo];
        avg /= static_cast<double>(R);
        for (std::uint64_t r = 0; r < R; ++r) {
          cplx& x = v[hi + r * stride + lo];
          x = rho * x + (1.0 - rho) * avg;
        }
      }
    stride = block;
  }
  return DensityTable(g.q, g.N, std::move(v));
}

Rational row_noise_eigenvalue_exact(const FrequencyStats& stats, std::uint64_t U, const Rational& rho) {
  require(rho >= 0 && rho <= 1, "rho must lie in [0,1]");
  return pow(rho, static_cast<unsigned>(stats.rwt(U)));
}

Rational modified_eigenvalue_exact(const FrequencyStats& stats, std::uint64_t U, const Rational& rho) {
  require(rho >= 0 && rho <= 1, "rho must lie in [0,1]");
  // Row by row: 1 for a zero row, 0 for a singleton, rho^{|supp|-1} otherwise.
  std::uint64_t rest = U;
  const std::uint64_t R = checked_pow(stats.q(), stats.k());
  Rational out = 1;
  for (int j = 0; j < stats.m(); ++j) {
    std::uint64_t row = rest % R;
    rest /= R;
    int supp = 0;
    for (int d : tuple_of(row, stats.q(), stats.k())) supp += d != 0;
    if (supp == 1) return 0;
    if (supp > 1) out *= pow(rho, static_cast<unsigned>(supp - 1));
  }
  return out;
}

double norm_p(const DensityTable& g, double p) {
  require(p >= 1.0, "norm order must be at least 1");
  if (std::isinf(p)) {
    double mx = 0;
    for (const auto& v : g.values) mx = std::max(mx, std::abs(v));
    return mx;
  }
  double acc = 0;
  for (const auto& v : g.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc / static_cast<double>(g.size()), 1.0 / p);
}

double parseval(const DensityTable& g) {
  Spectrum s = dft(g);
  double lhs = 0, rhs = 0;
  for (const auto& v : g.values) lhs += std::norm(v);
  lhs /= static_cast<double>(g.size());
  for (const auto& c : s.coeffs) rhs += std::norm(c);
  return std::abs(lhs - rhs);
}

DensityTable lift_coordinates(const DensityTable& g, const std::vector<int>& coords, int N) {
  require(static_cast<int>(coords.size()) == g.N, "coordinate list length differs from table dimension");
  for (int c : coords) require(c >= 0 && c < N, "coordinate out of range");
  std::uint64_t size = table_size(g.q, N, kDefaultDenseCap);
  std::vector<cplx> vals(size);
  std::vector<int> sub(g.N);
  for (std::uint64_t x = 0; x < size; ++x) {
    auto d = tuple_of(x, g.q, N);
    for (int i = 0; i < g.N; ++i) sub[i] = d[coords[i]];
    vals[x] = g.values[index_of(sub, g.q)];
  }
  return DensityTable(g.q, N, std::move(vals));
}

DensityTable average_pushforward(const DensityTable& g, const std::vector<int>& sel) {
  const int N = static_cast<int>(sel.size());
  std::vector<char> used(g.N, 0);
  for (int c : sel) {
    require(c >= 0 && c < g.N, "selector coordinate out of range");
    require(!used[c], "selector must be injective");
    used[c] = 1;
  }
  std::uint64_t size = table_size(g.q, N, kDefaultDenseCap);
  std::vector<cplx> vals(size, 0);
  std::vector<int> out(N);
  for (std::uint64_t x = 0; x < g.size(); ++x) {
    auto d = tuple_of(x, g.q, g.N);
    for (int i = 0; i < N; ++i) out[i] = d[sel[i]];
    vals[index_of(out, g.q)] += g.values[x];
  }
  double fibre = static_cast<double>(g.size()) / static_cast<double>(size);
  for (auto& v : vals) v /= fibre;
  return DensityTable(g.q, N, std::move(vals), g.mean1);
}

std::uint64_t embed_frequency(std::uint64_t u, int q, const std::vector<int>& sel, int N) {
  auto d = tuple_of(u, q, static_cast<int>(sel.size()));
  std::vector<int> full(N, 0);
  for (std::size_t i = 0; i < sel.size(); ++i) full[sel[i]] = d[i];
  return index_of(full, q);
}

namespace {

using Poly = std::vector<long long>;  // low degree first

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Division by a monic polynomial; returns {quotient, remainder}.
std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& monic) {
  trim(a);
  const std::size_t db = monic.size() - 1;
  if (a.size() - 1 < db) return {Poly{0}, a};
  Poly quo(a.size() - db, 0);
  for (std::size_t i = a.size(); i-- > db;) {
    long long c = a[i];
    quo[i - db] = c;
    for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * monic[j];
  }
  a.resize(db == 0 ? 1 : db);
  trim(a);
  return {quo, a};
}

}  // namespace

std::vector<long long> cyclotomic_polynomial(int q) {
  require(q >= 1 && q <= 64, "cyclotomic polynomial supported for 1 <= q <= 64");
  Poly num(q + 1, 0);
  num[0] = -1;
  num[q] = 1;
  Poly den{1};
  for (int d = 1; d < q; ++d)
    if (q % d == 0) den = poly_mul(den, cyclotomic_polynomial(d));
  auto [quo, rem] = poly_divmod(num, den);
  trim(quo);
  return quo;
}

bool root_of_unity_sum_vanishes(int q) {
  require(q >= 2, "root-of-unity sum needs q >= 2");
  Poly sum(q, 1);
  auto [quo, rem] = poly_divmod(sum, cyclotomic_polynomial(q));
  return rem.size() == 1 && rem[0] == 0;
}

}  // namespace cspgap
