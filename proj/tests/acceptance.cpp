#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "cspgap/protocol.hpp"

using namespace cspgap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, double limit_s, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_s) {
    r.pass = false;
    r.detail += " (over time limit " + std::to_string(limit_s) + " s)";
  }
  if (!r.pass) ++failures;
  std::printf("criterion %2d: %s  %.2fs  %s\n", id, r.pass ? "PASS" : "FAIL", secs, r.detail.c_str());
  std::fflush(stdout);
}

Instance triangle() {
  return Instance(3, 2, {{cut_predicate(), {0, 1}}, {cut_predicate(), {1, 2}}, {cut_predicate(), {2, 0}}});
}

bool lifted_exactly(const Instance& inst, const LpSolution& sol, int copies) {
  auto spec = build_gadget_spec(inst, sol, copies);
  Rational inv_q(1, spec.q);
  for (const auto& e : spec.edges) {
    for (int slot = 0; slot < spec.k; ++slot)
      for (const auto& p : e.dist.marginal(slot))
        if (p != inv_q) return false;
    const auto& vars = inst.constraints()[e.source_constraint].vars;
    if (pushforward(e.dist, spec.lift, vars).probs != sol.local_for(e.source_constraint).probs) return false;
  }
  return true;
}

const CheckResult& find_check(const SuiteReport& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

int main() {
  criterion(1, 60, [] {
    std::mt19937 g(2024);
    for (int t = 0; t < 50; ++t) {
      int n = 2 + static_cast<int>(g() % 5);
      int count = 1 + static_cast<int>(g() % 8);
      std::vector<Constraint> cs;
      for (int c = 0; c < count; ++c) {
        std::vector<std::uint8_t> table(4);
        for (auto& b : table) b = g() % 2;
        int a = static_cast<int>(g() % n), b = static_cast<int>((a + 1 + g() % (n - 1)) % n);
        cs.emplace_back(Predicate(2, 2, table), std::vector<int>{a, b});
      }
      Instance inst(n, 2, cs);
      auto sol = solve_basic_lp(inst);
      if (!check_feasible(inst, sol).feasible) return Outcome{false, "infeasible LP output"};
      Rational opt = opt_brute(inst).value;
      if (!(opt <= sol.objective && sol.objective <= 1))
        return Outcome{false, "sandwich broken on instance " + std::to_string(t)};
    }
    return Outcome{true, "50 instances"};
  });

  criterion(2, 60, [] {
    auto cert = find_gap_certificate(triangle());
    bool ok = cert.gamma == 1 && cert.beta == Rational(2, 3) && check_feasible(triangle(), cert.lp_solution).feasible;
    return Outcome{ok, "gamma=" + to_string(cert.gamma) + " beta=" + to_string(cert.beta)};
  });

  criterion(3, 1, [] {
    Rational gamma(3, 4), beta(5, 8);
    bool ok = width(dicut_predicate()) == Rational(1, 2) && width(kxor_family(3).members()[0]) == Rational(1, 2) &&
              rho_exactly(2, 3) == Rational(4, 9) && beta == (3 * gamma - 1) / 2;
    return Outcome{ok, "width(DiCut)=" + to_string(width(dicut_predicate())) +
                           " width(3XOR)=" + to_string(width(kxor_family(3))) +
                           " rho(2,3)=" + to_string(rho_exactly(2, 3))};
  });

  criterion(4, 5, [] {
    std::size_t gadgets = 0;
    for (int K = 1; K <= 3; ++K) {
      if (!lifted_exactly(triangle(), solve_basic_lp(triangle()), K)) return Outcome{false, "triangle K=" + std::to_string(K)};
      ++gadgets;
    }
    // Star 0->1, 0->2 sharing one local with a 1/3 marginal on the tail.
    Instance star(3, 2, {{dicut_predicate(), {0, 1}}, {dicut_predicate(), {0, 2}}});
    LocalDistribution y(2, 2, {Rational(1, 6), Rational(1, 6), Rational(1, 2), Rational(1, 6)});
    LpSolution ss;
    ss.locals = {y, y};
    ss.local_of = {0, 1};
    if (!check_feasible(star, ss).feasible || !lifted_exactly(star, ss, 2)) return Outcome{false, "DiCut star"};
    ++gadgets;
    // Every local on a single DiCut edge with denominator d <= 6.
    Instance edge(2, 2, {{dicut_predicate(), {0, 1}}});
    for (int d = 1; d <= 6; ++d)
      for (int a = 0; a <= d; ++a)
        for (int b = 0; a + b <= d; ++b)
          for (int c = 0; a + b + c <= d; ++c) {
            LpSolution s;
            s.locals = {LocalDistribution(2, 2, {Rational(a, d), Rational(b, d), Rational(c, d), Rational(d - a - b - c, d)})};
            s.local_of = {0};
            if (!lifted_exactly(edge, s, 1)) return Outcome{false, "DiCut edge local failed"};
            ++gadgets;
          }
    return Outcome{true, std::to_string(gadgets) + " gadgets"};
  });

  criterion(5, 60, [] {
    std::mt19937_64 g(5);
    std::normal_distribution<double> nd;
    auto table = [&](int q, int N) {
      std::vector<cplx> v(checked_pow(q, N));
      for (auto& x : v) x = cplx(nd(g), nd(g));
      return DensityTable(q, N, v);
    };
    const std::pair<int, int> shapes[] = {{2, 8}, {3, 6}, {3, 8}, {2, 5}, {3, 4}};
    double inv = 0, pars = 0, conv = 0, proj = 0, marg = 0;
    for (int t = 0; t < 20; ++t) {
      auto [q, N] = shapes[t % 5];
      auto f = table(q, N), h = table(q, N);
      auto fh = dft(f), hh = dft(h);
      inv = std::max(inv, max_diff(idft(fh).values, f.values));
      pars = std::max(pars, parseval(f));
      auto ch = dft(convolve(f, h));
      for (std::size_t u = 0; u < ch.size(); ++u) conv = std::max(conv, std::abs(ch.coeffs[u] - fh.coeffs[u] * hh.coeffs[u]));
      std::vector<int> S;
      for (int i = 0; i < N; ++i)
        if (g() % 2) S.push_back(i);
      if (S.empty()) S.push_back(0);
      auto small = table(q, static_cast<int>(S.size()));
      auto sh = dft(small);
      auto lifted = dft(lift_coordinates(small, S, N));
      std::vector<bool> on_support(lifted.size(), false);
      for (std::uint64_t u = 0; u < sh.size(); ++u) {
        auto pos = embed_frequency(u, q, S, N);
        on_support[pos] = true;
        proj = std::max(proj, std::abs(lifted.coeffs[pos] - sh.coeffs[u]));
      }
      for (std::uint64_t u = 0; u < lifted.size(); ++u)
        if (!on_support[u]) proj = std::max(proj, std::abs(lifted.coeffs[u]));
      auto mh = dft(average_pushforward(f, S));
      for (std::uint64_t u = 0; u < mh.size(); ++u)
        marg = std::max(marg, std::abs(mh.coeffs[u] - fh.coeffs[embed_frequency(u, q, S, N)]));
    }
    double singleton = 0;
    Instance star(3, 2, {{dicut_predicate(), {0, 1}}, {dicut_predicate(), {0, 2}}});
    LocalDistribution y(2, 2, {Rational(1, 6), Rational(1, 6), Rational(1, 2), Rational(1, 6)});
    LpSolution ss;
    ss.locals = {y, y};
    ss.local_of = {0, 1};
    for (const auto& spec : {build_gadget_spec(triangle(), solve_basic_lp(triangle()), 2), build_gadget_spec(star, ss, 2)})
      for (const auto& e : spec.edges) {
        auto c = dft(density_from_dist(e.dist));
        for (int l = 0; l < spec.k; ++l)
          for (int a = 1; a < spec.q; ++a) {
            std::vector<int> u(spec.k, 0);
            u[l] = a;
            singleton = std::max(singleton, std::abs(c.coeffs[index_of(u, spec.q)]));
          }
      }
    bool ok = inv < 1e-10 && pars < 1e-10 && conv < 1e-10 && proj < 1e-10 && marg < 1e-10 && singleton < 1e-12;
    char buf[256];
    std::snprintf(buf, sizeof buf, "inv=%.1e parseval=%.1e conv=%.1e proj=%.1e marg=%.1e singleton=%.1e", inv, pars,
                  conv, proj, marg, singleton);
    return Outcome{ok, buf};
  });

  criterion(6, 120, [] {
    auto rep = run_lemma_suite("noise", 6);
    const auto& ev = find_check(rep, "modified_eigenvalue_exact");
    const auto& dom = find_check(rep, "domination");
    const auto& hyp = find_check(rep, "row_hypercontractivity");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.0f frequencies exact, domination residual %.1e, hypercontractivity residual %.1e",
                  ev.values.at("frequencies_checked"), dom.residual, hyp.residual);
    return Outcome{ev.pass && dom.pass && hyp.pass, buf};
  });

  criterion(7, 120, [] {
    auto rep = run_lemma_suite("posterior", 7);
    const auto& c = find_check(rep, "bayes_formula_random_configs");
    char buf[96];
    std::snprintf(buf, sizeof buf, "50 configs, max residual %.1e", c.residual);
    return Outcome{c.pass && c.residual < 1e-9, buf};
  });

  criterion(8, 300, [] {
    auto rep = run_lemma_suite("combinatorics", 8);
    std::string failed;
    for (const auto& c : rep.checks)
      if (!c.pass) failed += " " + c.name;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu checks, eta_kappa fitted C %.2f (constant %.2f)", rep.checks.size(),
                  find_check(rep, "eta_kappa_n40").values.at("fitted_C"),
                  find_check(rep, "eta_kappa_n40").values.at("stated_C"));
    return Outcome{failed.empty(), failed.empty() ? buf : "failed:" + failed};
  });

  criterion(9, 300, [] {
    Instance tri = triangle();
    auto spec = build_gadget_spec(tri, solve_basic_lp(tri), 2);
    if (spec.q != 2 || spec.k != 2 || spec.k_prime != 3 || spec.T() != 6) return Outcome{false, "unexpected gadget shape"};
    const int n = 200, m = 10, samples = 10000;
    long zero_rows = 0, rows = 0, valued = 0;
    Rational value_sum = 0;
    for (int s = 0; s < samples; ++s) {
      auto smp = sample_yes(spec, n, m, 900000 + static_cast<std::uint64_t>(s));
      if (!verify_yes_consistency(smp, spec)) return Outcome{false, "YES reconstruction failed"};
      for (const auto& Z : smp.signals) {
        for (int j = 0; j < Z.rows(); ++j) zero_rows += Z.row_is_zero(j);
        rows += Z.rows();
      }
      auto inst = emit_instance(smp, spec);
      if (inst.empty()) continue;
      value_sum += value(inst, planted_assignment(*smp.hidden, spec));
      ++valued;
    }
    double p = 0.25, frac = static_cast<double>(zero_rows) / rows;
    double sigma = std::sqrt(p * (1 - p) / rows);
    double mean_value = Rational(value_sum / valued).get_d();
    bool ok = std::abs(frac - p) <= 3 * sigma && std::abs(mean_value - spec.gamma.get_d()) <= 0.05;
    char buf[160];
    std::snprintf(buf, sizeof buf, "zero-row fraction %.5f (3 sigma %.5f), mean planted value %.4f vs gamma %s", frac,
                  3 * sigma, mean_value, to_string(spec.gamma).c_str());
    return Outcome{ok, buf};
  });

  criterion(10, 300, [] {
    auto tri = triangle();
    auto spec = build_gadget_spec(tri, solve_basic_lp(tri), 2);
    auto zero = estimate_advantage(zero_protocol(spec.T()), spec, 30, 5, 2000, 10);
    if (!zero.zero_within_ci()) return Outcome{false, "zero protocol advantage outside CI"};

    Instance edge(2, 2, {{cut_predicate(), {0, 1}}});
    LpSolution half;
    half.locals = {LocalDistribution::uniform_on(2, 2, {1, 2})};
    half.local_of = {0};
    auto one = build_gadget_spec(edge, half, 1);
    std::vector<Player> full{{one.k * 2, [](const PlayerView& v) {
                                Message msg;
                                for (int x : v.Z.data()) msg.push_back(x != 0);
                                return msg;
                              }}};
    if (exact_transcript_tvd(full, one, 4, 1).tvd != 0) return Outcome{false, "T=1 exact TVD nonzero"};

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      int bits = 8;
      StreamFn f = random_table_stream(bits, seed);
      StreamState init = int_to_state(seed, bits);
      auto smp = seed % 2 ? sample_yes(spec, 25, 6, seed) : sample_no(spec, 25, 6, seed);
      auto tr = run_protocol(streaming_adapter(f, bits, init, spec), smp.matchings, smp.signals);
      if (tr.messages.back() != run_stream(f, init, emit_instance(smp, spec).constraints()))
        return Outcome{false, "chained stream differs from monolithic run"};
    }

    std::mt19937 g(10);
    auto dist = [&](int size) {
      std::vector<long> w(size);
      long total = 0;
      for (auto& x : w) total += (x = static_cast<long>(g() % 5));
      if (total == 0) w[0] = total = 1;
      std::vector<Rational> p;
      for (long x : w) p.emplace_back(x, total);
      return p;
    };
    for (int t = 0; t < 100; ++t) {
      int nx = 2 + static_cast<int>(g() % 7), nw = 2 + static_cast<int>(g() % 7), ny = 2 + static_cast<int>(g() % 7);
      auto x1 = dist(nx), x2 = dist(nx), w1 = dist(nw), w2 = dist(nw);
      std::vector<std::vector<int>> f(nx, std::vector<int>(nw));
      for (auto& row : f)
        for (auto& v : row) v = static_cast<int>(g() % ny);
      if (exact_tvd(push_through(x1, w1, f, ny), push_through(x2, w1, f, ny)) > exact_tvd(x1, x2))
        return Outcome{false, "data processing violated"};
      if (exact_tvd(joint_with(x1, w1, f, ny), joint_with(x2, w2, f, ny)) >
          exact_tvd(joint_with(x1, w1, f, ny), joint_with(x1, w2, f, ny)) + exact_tvd(x1, x2))
        return Outcome{false, "substitution bound violated"};
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "zero advantage %.3f +- %.3f; exact T=1 TVD 0; 20 stream chains; 100 TVD triples",
                  zero.advantage, zero.ci_radius);
    return Outcome{true, buf};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
