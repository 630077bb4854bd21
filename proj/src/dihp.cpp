#include "cspgap/dihp.hpp"

#include <algorithm>
#include <numeric>

namespace cspgap {

Hypermatching::Hypermatching(int n, int m, int k, std::vector<int> entries)
    : n_(n), m_(m), k_(k), entries_(std::move(entries)) {
  require(n >= 1 && m >= 1 && k >= 1, "hypermatching needs n, m, k >= 1");
  require(m <= n, "hypermatching needs m <= n (got m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  require(entries_.size() == static_cast<std::size_t>(m) * k, "hypermatching entry count != m*k");
  std::vector<char> seen(n);
  for (int l = 0; l < k; ++l) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int j = 0; j < m; ++j) {
      int v = (*this)(j, l);
      require(v >= 0 && v < n, "hypermatching entry out of range");
      require(!seen[v], "hypermatching column " + std::to_string(l) + " repeats vertex " + std::to_string(v));
      seen[v] = 1;
    }
  }
}

std::vector<int> Hypermatching::row(int j) const {
  return std::vector<int>(entries_.begin() + static_cast<std::ptrdiff_t>(j) * k_,
                          entries_.begin() + static_cast<std::ptrdiff_t>(j + 1) * k_);
}

Hypermatching sample_hypermatching(int n, int m, int k, Rng& rng) {
  require(m <= n, "m > n: cannot sample a hypermatching (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  require(n >= 1 && m >= 1 && k >= 1, "hypermatching needs n, m, k >= 1");
  std::vector<int> entries(static_cast<std::size_t>(m) * k);
  std::vector<int> perm(n);
  for (int l = 0; l < k; ++l) {
    std::iota(perm.begin(), perm.end(), 0);
    // Partial Fisher-Yates: the first m slots form a uniform ordered m-subset.
    for (int j = 0; j < m; ++j) {
      int r = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
      std::swap(perm[j], perm[r]);
      entries[static_cast<std::size_t>(j) * k + l] = perm[j];
    }
  }
  return Hypermatching(n, m, k, std::move(entries));
}

std::uint64_t hypermatching_count(int n, int m, int k) {
  require(m <= n && m >= 1 && k >= 1, "hypermatching_count needs 1 <= m <= n, k >= 1");
  std::uint64_t falling = 1;
  for (int i = 0; i < m; ++i) {
    std::uint64_t f = static_cast<std::uint64_t>(n - i);
    if (falling > UINT64_MAX / f) throw ResourceError("hypermatching count overflows 64 bits");
    falling *= f;
  }
  return checked_pow(falling, k);
}

void for_each_hypermatching(int n, int m, int k, const std::function<void(const Hypermatching&)>& fn) {
  require(m <= n && m >= 1 && k >= 1, "for_each_hypermatching needs 1 <= m <= n, k >= 1");
  std::vector<std::vector<int>> columns;
  std::vector<int> cur;
  std::vector<char> used(n, 0);
  std::function<void()> rec = [&]() {
    if (static_cast<int>(cur.size()) == m) {
      columns.push_back(cur);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      cur.push_back(v);
      rec();
      cur.pop_back();
      used[v] = 0;
    }
  };
  rec();
  std::vector<std::size_t> pick(k, 0);
  std::vector<int> entries(static_cast<std::size_t>(m) * k);
  for (;;) {
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < m; ++j) entries[static_cast<std::size_t>(j) * k + l] = columns[pick[l]][j];
    fn(Hypermatching(n, m, k, entries));
    int l = k - 1;
    while (l >= 0 && ++pick[l] == columns.size()) pick[l--] = 0;
    if (l < 0) break;
  }
}

SignalMatrix project(const Hypermatching& M, const std::vector<int>& phi, const HiddenAssignment& X) {
  require(static_cast<int>(phi.size()) == M.k(), "phi length differs from matching arity");
  require(X.rows() == M.n(), "hidden assignment rows differ from matching n");
  for (int p : phi) require(p >= 0 && p < X.cols(), "phi entry outside [k']");
  SignalMatrix out(M.m(), M.k(), X.q());
  for (int j = 0; j < M.m(); ++j)
    for (int l = 0; l < M.k(); ++l) out.set(j, l, X(M(j, l), phi[l]));
  return out;
}

SignalMatrix subtract(const SignalMatrix& a, const SignalMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && a.q() == b.q(), "signal shapes differ");
  SignalMatrix out(a.rows(), a.cols(), a.q());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out.set(r, c, a(r, c) - b(r, c));
  return out;
}

std::string to_string(DihpCase c) { return c == DihpCase::Yes ? "yes" : "no"; }

DihpCase parse_case(const std::string& s) {
  if (s == "yes" || s == "YES") return DihpCase::Yes;
  if (s == "no" || s == "NO") return DihpCase::No;
  throw InvalidInput("case must be yes or no, got '" + s + "'");
}

LocalSampler::LocalSampler(const LocalDistribution& dist) {
  require(dist.defect().empty(), "cannot sample from an invalid distribution: " + dist.defect());
  Integer d = dist.common_denominator();
  to_u64(d, "sampling denominator");
  std::uint64_t acc = 0;
  for (const auto& p : dist.probs) {
    Rational w = p * d;
    acc += to_u64(w.get_num(), "sampling weight");
    cumulative_.push_back(acc);
  }
}

std::uint64_t LocalSampler::sample(Rng& rng) const {
  std::uint64_t r = rng.below(cumulative_.back());
  return static_cast<std::uint64_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), r) -
                                    cumulative_.begin());
}

namespace {

void check_sizes(const GadgetSpec& spec, int n, int m) {
  require(n >= 1 && m >= 1, "n and m must be positive");
  require(m <= n, "m > n is not allowed (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  require(spec.T() >= 1, "gadget has no edges");
}

DihpSample sample_common(const GadgetSpec& spec, int n, int m, std::uint64_t seed) {
  check_sizes(spec, n, m);
  DihpSample s;
  s.n = n;
  s.m = m;
  s.seed = seed;
  for (int t = 0; t < spec.T(); ++t) {
    Rng rng = Rng::substream(seed, Purpose::Matching, static_cast<std::uint64_t>(t));
    s.matchings.push_back(sample_hypermatching(n, m, spec.k, rng));
  }
  return s;
}

}  // namespace

DihpSample sample_yes(const GadgetSpec& spec, int n, int m, std::uint64_t seed) {
  DihpSample s = sample_common(spec, n, m, seed);
  s.kind = DihpCase::Yes;
  HiddenAssignment X(n, spec.k_prime, spec.q);
  Rng hrng = Rng::substream(seed, Purpose::Hidden);
  for (int i = 0; i < n; ++i)
    for (int v = 0; v < spec.k_prime; ++v) X.set(i, v, static_cast<int>(hrng.below(spec.q)));
  std::vector<SignalMatrix> noise;
  for (int t = 0; t < spec.T(); ++t) {
    const auto& edge = spec.edges[t];
    LocalSampler sampler(edge.dist);
    Rng nrng = Rng::substream(seed, Purpose::Noise, static_cast<std::uint64_t>(t));
    SignalMatrix Y(m, spec.k, spec.q);
    for (int j = 0; j < m; ++j) {
      auto row = tuple_of(sampler.sample(nrng), spec.q, spec.k);
      for (int l = 0; l < spec.k; ++l) Y.set(j, l, row[l]);
    }
    s.signals.push_back(subtract(project(s.matchings[t], edge.phi, X), Y));
    noise.push_back(std::move(Y));
  }
  s.hidden = std::move(X);
  s.noise = std::move(noise);
  return s;
}

DihpSample sample_no(const GadgetSpec& spec, int n, int m, std::uint64_t seed) {
  DihpSample s = sample_common(spec, n, m, seed);
  s.kind = DihpCase::No;
  for (int t = 0; t < spec.T(); ++t) {
    Rng zrng = Rng::substream(seed, Purpose::Signal, static_cast<std::uint64_t>(t));
    SignalMatrix Z(m, spec.k, spec.q);
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < spec.k; ++l) Z.set(j, l, static_cast<int>(zrng.below(spec.q)));
    s.signals.push_back(std::move(Z));
  }
  return s;
}

DihpSample sample_dihp(const GadgetSpec& spec, int n, int m, DihpCase kind, std::uint64_t seed) {
  return kind == DihpCase::Yes ? sample_yes(spec, n, m, seed) : sample_no(spec, n, m, seed);
}

bool verify_yes_consistency(const DihpSample& sample, const GadgetSpec& spec) {
  if (sample.kind != DihpCase::Yes || !sample.hidden || !sample.noise) return false;
  if (static_cast<int>(sample.signals.size()) != spec.T()) return false;
  for (int t = 0; t < spec.T(); ++t) {
    SignalMatrix lhs = sample.signals[t];
    const auto& Y = (*sample.noise)[t];
    for (int j = 0; j < lhs.rows(); ++j)
      for (int l = 0; l < lhs.cols(); ++l) lhs.set(j, l, lhs(j, l) + Y(j, l));
    if (!(lhs == project(sample.matchings[t], spec.edges[t].phi, *sample.hidden))) return false;
  }
  return true;
}

std::vector<Constraint> emit_block(const GadgetSpec& spec, int t, const Hypermatching& M,
                                   const SignalMatrix& Z) {
  const auto& edge = spec.edges.at(t);
  std::vector<Constraint> out;
  for (int j = 0; j < M.m(); ++j) {
    if (!Z.row_is_zero(j)) continue;
    std::vector<int> vars(spec.k);
    for (int l = 0; l < spec.k; ++l) vars[l] = M(j, l) * spec.k_prime + edge.phi[l];
    out.emplace_back(edge.predicate, std::move(vars));
  }
  return out;
}

Instance emit_instance(const DihpSample& sample, const GadgetSpec& spec) {
  require(static_cast<int>(sample.signals.size()) == spec.T() &&
              static_cast<int>(sample.matchings.size()) == spec.T(),
          "sample block count differs from gadget T");
  Instance inst(sample.n * spec.k_prime, spec.q0, {});
  for (int t = 0; t < spec.T(); ++t)
    for (auto& c : emit_block(spec, t, sample.matchings[t], sample.signals[t])) inst.add(std::move(c));
  return inst;
}

Assignment planted_assignment(const HiddenAssignment& X, const GadgetSpec& spec) {
  require(X.cols() == spec.k_prime && X.q() == spec.q, "hidden assignment shape differs from gadget");
  Assignment a(static_cast<std::size_t>(X.rows()) * spec.k_prime);
  for (int i = 0; i < X.rows(); ++i)
    for (int v = 0; v < spec.k_prime; ++v) a[static_cast<std::size_t>(i) * spec.k_prime + v] = spec.lift.kappa[v][X(i, v)];
  return a;
}

}  // namespace cspgap
