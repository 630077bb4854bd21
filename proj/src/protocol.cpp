#include "cspgap/protocol.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "cspgap/errors.hpp"

namespace cspgap {

std::size_t Transcript::comm_bits() const {
  std::size_t s = 0;
  for (const auto& msg : messages) s += msg.size();
  return s;
}

namespace {

Message speak(const Player& p, const PlayerView& view) {
  Message msg = p.fn(view);
  if (static_cast<int>(msg.size()) > p.s_bits)
    throw ProtocolViolation("player " + std::to_string(view.t) + " sent " + std::to_string(msg.size()) +
                            " bits, budget is " + std::to_string(p.s_bits));
  return msg;
}

int bits_for(std::uint64_t max_value) {
  int b = 0;
  while (b < 64 && (max_value >> b) != 0) ++b;
  return b;
}

int symbol_bits(int q) { return bits_for(static_cast<std::uint64_t>(q - 1)); }

int zero_rows(const SignalMatrix& Z) {
  int c = 0;
  for (int j = 0; j < Z.rows(); ++j) c += Z.row_is_zero(j);
  return c;
}

std::uint64_t constraint_hash(const Constraint& c) {
  std::uint64_t h = mix64(0x51ed27u);
  for (auto b : c.predicate.table()) h = mix64(h ^ b);
  h = mix64(h ^ 0xabcdefu);
  for (int v : c.vars) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

}  // namespace

Transcript run_protocol(const std::vector<Player>& players, const std::vector<Hypermatching>& matchings,
                        const std::vector<SignalMatrix>& signals) {
  require(!players.empty(), "protocol needs at least one player");
  require(players.size() == matchings.size() && players.size() == signals.size(),
          "players, matchings and signals must have the same length T");
  Transcript tr;
  for (std::size_t t = 0; t < players.size(); ++t) {
    require(signals[t].rows() == matchings[t].m() && signals[t].cols() == matchings[t].k(),
            "signal shape differs from matching at block " + std::to_string(t));
    tr.matchings.push_back(matchings[t]);
    PlayerView view{static_cast<int>(t), tr.matchings, tr.messages, signals[t]};
    tr.messages.push_back(speak(players[t], view));
  }
  const auto& last = tr.messages.back();
  tr.output = last.empty() ? 0 : static_cast<int>(last.front());
  return tr;
}

AdvantageEstimate estimate_advantage(const std::vector<Player>& players, const GadgetSpec& spec, int n, int m,
                                     std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 100, "estimate_advantage needs at least 100 trials");
  require(static_cast<int>(players.size()) == spec.T(), "need one player per gadget edge");
  AdvantageEstimate est;
  est.trials = trials;
  std::uint64_t ones_yes = 0, ones_no = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    std::uint64_t s = mix64(seed ^ mix64(i + 1));
    auto y = sample_yes(spec, n, m, s);
    auto no = sample_no(spec, n, m, s);
    auto ty = run_protocol(players, y.matchings, y.signals);
    auto tn = run_protocol(players, no.matchings, no.signals);
    ones_yes += ty.output;
    ones_no += tn.output;
    est.comm_bits = std::max({est.comm_bits, ty.comm_bits(), tn.comm_bits()});
  }
  est.yes = wilson(ones_yes, trials);
  est.no = wilson(ones_no, trials);
  est.advantage = std::abs(est.yes.estimate - est.no.estimate);
  est.ci_radius = std::max(est.yes.upper - est.yes.estimate, est.yes.estimate - est.yes.lower) +
                  std::max(est.no.upper - est.no.estimate, est.no.estimate - est.no.lower);
  return est;
}

namespace {

std::uint64_t mul_capped(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  if (a != 0 && b > cap / a) throw ResourceError("exact transcript enumeration exceeds the cap; use estimate_advantage");
  return a * b;
}

std::string key_of(const std::vector<std::size_t>& midx, const std::vector<Message>& msgs) {
  std::string k;
  for (std::size_t t = 0; t < midx.size(); ++t) {
    k += std::to_string(midx[t]);
    k += ':';
    for (bool b : msgs[t]) k += b ? '1' : '0';
    k += '|';
  }
  return k;
}

}  // namespace

ExactTvd exact_transcript_tvd(const std::vector<Player>& players, const GadgetSpec& spec, int n, int m,
                              std::uint64_t cap) {
  const int T = spec.T();
  require(static_cast<int>(players.size()) == T, "need one player per gadget edge");
  require(m >= 1 && m <= n, "need 1 <= m <= n");
  const int q = spec.q, k = spec.k;
  std::uint64_t phm = hypermatching_count(n, m, k);
  std::uint64_t hidden = checked_pow(q, n * spec.k_prime);
  std::uint64_t sig = checked_pow(q, m * k);
  std::uint64_t work = hidden;
  for (int t = 0; t < T; ++t) work = mul_capped(mul_capped(work, phm, cap), sig, cap);
  if (work > cap) throw ResourceError("exact transcript enumeration exceeds the cap; use estimate_advantage");

  std::vector<Hypermatching> all;
  for_each_hypermatching(n, m, k, [&](const Hypermatching& M) { all.push_back(M); });

  // Integer weights of each edge distribution over a common denominator.
  std::vector<std::vector<std::pair<std::uint64_t, Integer>>> support(T);
  std::vector<Integer> denom(T);
  for (int t = 0; t < T; ++t) {
    denom[t] = spec.edges[t].dist.common_denominator();
    const auto& probs = spec.edges[t].dist.probs;
    for (std::uint64_t r = 0; r < probs.size(); ++r)
      if (probs[r] != 0) support[t].emplace_back(r, Rational(probs[r] * denom[t]).get_num());
  }

  std::map<std::string, Integer> yes_w, no_w;
  ExactTvd res;
  std::vector<Hypermatching> ms;
  std::vector<std::size_t> midx;
  std::vector<Message> msgs;

  // YES: X* uniform, M_t uniform, Y_t ~ dist^m.
  HiddenAssignment X(n, spec.k_prime, q);
  std::function<void(int, const Integer&)> rec_yes = [&](int t, const Integer& w) {
    if (t == T) {
      yes_w[key_of(midx, msgs)] += w;
      ++res.yes_outcomes;
      return;
    }
    for (std::size_t mi = 0; mi < all.size(); ++mi) {
      SignalMatrix px = project(all[mi], spec.edges[t].phi, X);
      std::vector<std::size_t> pick(m, 0);
      for (;;) {
        SignalMatrix Z = px;
        Integer wy = w;
        for (int j = 0; j < m; ++j) {
          auto [r, rw] = support[t][pick[j]];
          auto row = tuple_of(r, q, k);
          for (int l = 0; l < k; ++l) Z.set(j, l, Z(j, l) - row[l]);
          wy *= rw;
        }
        ms.push_back(all[mi]);
        midx.push_back(mi);
        PlayerView view{t, ms, msgs, Z};
        msgs.push_back(speak(players[t], view));
        rec_yes(t + 1, wy);
        msgs.pop_back();
        midx.pop_back();
        ms.pop_back();
        int j = m - 1;
        while (j >= 0 && ++pick[j] == support[t].size()) pick[j--] = 0;
        if (j < 0) break;
      }
    }
  };
  for (std::uint64_t x = 0; x < hidden; ++x) {
    auto d = tuple_of(x, q, n * spec.k_prime);
    for (int i = 0; i < n; ++i)
      for (int v = 0; v < spec.k_prime; ++v) X.set(i, v, d[static_cast<std::size_t>(i) * spec.k_prime + v]);
    rec_yes(0, Integer(1));
  }

  // NO: M_t uniform, Z_t uniform.
  std::function<void(int)> rec_no = [&](int t) {
    if (t == T) {
      no_w[key_of(midx, msgs)] += 1;
      ++res.no_outcomes;
      return;
    }
    for (std::size_t mi = 0; mi < all.size(); ++mi)
      for (std::uint64_t z = 0; z < sig; ++z) {
        SignalMatrix Z(m, k, q, tuple_of(z, q, m * k));
        ms.push_back(all[mi]);
        midx.push_back(mi);
        PlayerView view{t, ms, msgs, Z};
        msgs.push_back(speak(players[t], view));
        rec_no(t + 1);
        msgs.pop_back();
        midx.pop_back();
        ms.pop_back();
      }
  };
  rec_no(0);

  Integer yes_total = Integer(std::to_string(hidden));
  Integer no_total = 1;
  for (int t = 0; t < T; ++t) {
    Integer dm;
    mpz_pow_ui(dm.get_mpz_t(), denom[t].get_mpz_t(), m);
    yes_total *= Integer(std::to_string(phm)) * dm;
    no_total *= Integer(std::to_string(phm)) * Integer(std::to_string(sig));
  }
  std::set<std::string> keys;
  for (const auto& [key, w] : yes_w) keys.insert(key);
  for (const auto& [key, w] : no_w) keys.insert(key);
  Rational sum = 0;
  for (const auto& key : keys) {
    Rational a = yes_w.count(key) ? Rational(yes_w[key], yes_total) : Rational(0);
    Rational b = no_w.count(key) ? Rational(no_w[key], no_total) : Rational(0);
    a.canonicalize();
    b.canonicalize();
    sum += abs(a - b);
  }
  res.tvd = sum / 2;
  res.transcripts = keys.size();
  return res;
}

// ---- streaming ---------------------------------------------------------------

std::uint64_t state_to_int(const StreamState& s) {
  require(s.size() <= 64, "state wider than 64 bits");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) v |= std::uint64_t{1} << i;
  return v;
}

StreamState int_to_state(std::uint64_t v, int bits) {
  StreamState s(bits);
  for (int i = 0; i < bits; ++i) s[i] = (v >> i) & 1;
  return s;
}

StreamState run_stream(const StreamFn& fn, const StreamState& initial, const std::vector<Constraint>& stream) {
  StreamState s = initial;
  for (const auto& c : stream) s = fn(c, s);
  return s;
}

std::vector<Player> streaming_adapter(const StreamFn& fn, int s_bits, const StreamState& initial,
                                      const GadgetSpec& spec) {
  require(static_cast<int>(initial.size()) <= s_bits, "initial state wider than the message budget");
  auto sp = std::make_shared<const GadgetSpec>(spec);
  std::vector<Player> players;
  for (int t = 0; t < spec.T(); ++t)
    players.push_back({s_bits, [fn, s_bits, initial, sp](const PlayerView& v) {
                         StreamState s = v.t == 0 ? initial : v.previous.back();
                         for (const auto& c : emit_block(*sp, v.t, v.matchings.back(), v.Z)) {
                           s = fn(c, s);
                           if (static_cast<int>(s.size()) > s_bits)
                             throw ProtocolViolation("stream state grew past " + std::to_string(s_bits) + " bits");
                         }
                         return s;
                       }});
  return players;
}

StreamFn constant_stream() {
  return [](const Constraint&, const StreamState& s) { return s; };
}

StreamFn zero_sat_counter(int bits) {
  require(bits >= 1 && bits <= 63, "counter width must be in [1, 63]");
  return [bits](const Constraint& c, const StreamState& s) {
    std::uint64_t v = state_to_int(s);
    if (c.predicate.at(0)) v = (v + 1) & ((std::uint64_t{1} << bits) - 1);
    return int_to_state(v, bits);
  };
}

StreamFn random_table_stream(int bits, std::uint64_t seed) {
  require(bits >= 1 && bits <= 63, "table width must be in [1, 63]");
  return [bits, seed](const Constraint& c, const StreamState& s) {
    std::uint64_t h = mix64(seed ^ mix64(state_to_int(s) ^ constraint_hash(c)));
    return int_to_state(h & ((std::uint64_t{1} << bits) - 1), bits);
  };
}

// ---- stock protocols ---------------------------------------------------------

std::vector<Player> zero_protocol(int T) {
  require(T >= 1, "need T >= 1");
  return std::vector<Player>(T, Player{0, [](const PlayerView&) { return Message{}; }});
}

std::vector<Player> fullinfo_protocol(const GadgetSpec& spec, int n, int m) {
  const int q = spec.q, k = spec.k, T = spec.T();
  if (checked_pow(q, n * spec.k_prime) > kPosteriorCap)
    throw ResourceError("fullinfo protocol: q^{nk'} exceeds the posterior cap");
  const int sb = symbol_bits(q);
  const int width = m * k * sb;
  auto encode = [sb](const SignalMatrix& Z) {
    Message msg;
    for (int v : Z.data())
      for (int b = 0; b < sb; ++b) msg.push_back((v >> b) & 1);
    return msg;
  };
  auto decode = [sb, m, k, q](const Message& msg) {
    std::vector<int> d(static_cast<std::size_t>(m) * k);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (int b = 0; b < sb; ++b) d[i] |= static_cast<int>(msg[i * sb + b]) << b;
    return SignalMatrix(m, k, q, std::move(d));
  };
  std::vector<Player> players;
  for (int t = 0; t + 1 < T; ++t) players.push_back({width, [encode](const PlayerView& v) { return encode(v.Z); }});
  auto sp = std::make_shared<const GadgetSpec>(spec);
  players.push_back({1, [sp, n, m, q, k, T, decode](const PlayerView& v) {
                       const GadgetSpec& spec = *sp;
                       std::vector<SignalMatrix> zs;
                       for (const auto& msg : v.previous) zs.push_back(decode(msg));
                       zs.push_back(v.Z);
                       // YES likelihood numerator over integer weights, against the NO likelihood.
                       std::vector<Integer> denom(T);
                       Integer rhs = Integer(std::to_string(checked_pow(q, n * spec.k_prime)));
                       for (int t = 0; t < T; ++t) {
                         denom[t] = spec.edges[t].dist.common_denominator();
                         Integer dm;
                         mpz_pow_ui(dm.get_mpz_t(), denom[t].get_mpz_t(), m);
                         rhs *= dm;
                       }
                       Integer lhs = 0;
                       const std::uint64_t hidden = checked_pow(q, n * spec.k_prime);
                       for (std::uint64_t x = 0; x < hidden; ++x) {
                         HiddenAssignment X(n, spec.k_prime, q, tuple_of(x, q, n * spec.k_prime));
                         Integer w = 1;
                         for (int t = 0; t < T && w != 0; ++t) {
                           SignalMatrix y = subtract(project(v.matchings[t], spec.edges[t].phi, X), zs[t]);
                           for (int j = 0; j < m && w != 0; ++j) {
                             std::vector<int> row(k);
                             for (int l = 0; l < k; ++l) row[l] = y(j, l);
                             w *= Rational(spec.edges[t].dist.probs[index_of(row, q)] * denom[t]).get_num();
                           }
                         }
                         lhs += w;
                       }
                       Integer qs;
                       mpz_pow_ui(qs.get_mpz_t(), Integer(q).get_mpz_t(), static_cast<unsigned long>(m) * k * T);
                       return Message{lhs * qs > rhs};
                     }});
  return players;
}

std::vector<Player> counter_protocol(const GadgetSpec& spec, int m, int threshold) {
  const int T = spec.T();
  const int width = bits_for(static_cast<std::uint64_t>(m) * T);
  std::vector<Player> players;
  for (int t = 0; t < T; ++t) {
    bool last = t + 1 == T;
    players.push_back({last ? 1 : width, [width, last, threshold](const PlayerView& v) {
                         std::uint64_t count = v.t == 0 ? 0 : state_to_int(v.previous.back());
                         count += zero_rows(v.Z);
                         if (last) return Message{count >= static_cast<std::uint64_t>(threshold)};
                         return int_to_state(count, width);
                       }});
  }
  return players;
}

std::vector<Player> parity_protocol(int T) {
  require(T >= 1, "need T >= 1");
  return std::vector<Player>(T, Player{1, [](const PlayerView& v) {
                                         bool p = v.t > 0 && !v.previous.back().empty() && v.previous.back()[0];
                                         for (int x : v.Z.data()) p ^= (x & 1) != 0;
                                         return Message{p};
                                       }});
}

// ---- finite distributions ----------------------------------------------------

Rational exact_tvd(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  require(a.size() == b.size(), "tvd: supports differ in size");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += abs(a[i] - b[i]);
  return s / 2;
}

double tvd(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), "tvd: supports differ in size");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / 2;
}

std::vector<Rational> push_through(const std::vector<Rational>& px, const std::vector<Rational>& pw,
                                   const std::vector<std::vector<int>>& f, int out_size) {
  require(f.size() == px.size(), "channel rows != |X|");
  std::vector<Rational> out(out_size, 0);
  for (std::size_t x = 0; x < px.size(); ++x) {
    require(f[x].size() == pw.size(), "channel columns != |W|");
    for (std::size_t w = 0; w < pw.size(); ++w) {
      require(f[x][w] >= 0 && f[x][w] < out_size, "channel output out of range");
      out[f[x][w]] += px[x] * pw[w];
    }
  }
  return out;
}

std::vector<Rational> joint_with(const std::vector<Rational>& px, const std::vector<Rational>& pw,
                                 const std::vector<std::vector<int>>& f, int out_size) {
  require(f.size() == px.size(), "channel rows != |X|");
  std::vector<Rational> out(px.size() * out_size, 0);
  for (std::size_t x = 0; x < px.size(); ++x) {
    require(f[x].size() == pw.size(), "channel columns != |W|");
    for (std::size_t w = 0; w < pw.size(); ++w) {
      require(f[x][w] >= 0 && f[x][w] < out_size, "channel output out of range");
      out[x * out_size + f[x][w]] += px[x] * pw[w];
    }
  }
  return out;
}

}  // namespace cspgap
