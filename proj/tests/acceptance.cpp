// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line each. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "tpc/catalog.hpp"
#include "tpc/commitment.hpp"
#include "tpc/derived.hpp"
#include "tpc/errors.hpp"
#include "tpc/oblivious.hpp"
#include "tpc/statistics.hpp"
#include "tpc/transcript_log.hpp"
#include "tpc/zkproof.hpp"

using namespace tpc;
using session::Role;
using session::Transport;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

stats::Proportion count(std::size_t trials, const std::function<bool(std::size_t)>& hit) {
  std::vector<char> out(trials);
  stats::parallel_for(trials, [&](std::size_t i) { out[i] = hit(i) ? 1 : 0; });
  stats::Proportion p{0, trials};
  for (char c : out) p.successes += static_cast<std::size_t>(c);
  return p;
}

bool is_prime_l(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

long gcd_l(long a, long b) { return b == 0 ? a : gcd_l(b, a % b); }

std::vector<long> units(long n) {
  std::vector<long> u;
  for (long r = 1; r < n; ++r)
    if (gcd_l(r, n) == 1) u.push_back(r);
  return u;
}

Bytes qrp_randomness(long r, long p, long q) {
  ByteWriter w;
  write_int(w, r);
  write_int(w, p);
  write_int(w, q);
  return std::move(w).take();
}

bool flip_rejected(const commitment::Commitment& c, const commitment::Opening& o, RandomStream& rng) {
  commitment::Commitment t = c;
  const std::size_t bit = rng.below(t.witness.size() * 8);
  t.witness[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
  return !commitment::verify(t, o);
}

// 1 ---------------------------------------------------------------------------

void rabin_meaningful(Verdict& v) {
  oblivious::RabinOtConfig c;
  c.bits = 64;
  const auto start = std::chrono::steady_clock::now();
  const auto p = count(10000, [&](std::size_t i) {
    const auto [sa, sb] = session::trial_seeds(1, i);
    return oblivious::rabin_ot(c, sa, sb).party<oblivious::RabinOtReceiver>(Role::B).factors().has_value();
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.detail << "factored " << fmt(p.rate()) << " of 10000 at 64 bits in " << fmt(secs, 1) << " s";
  v.require(std::abs(p.rate() - 0.5) <= 0.02, "rate within 0.50 +- 0.02");
  v.require(secs < 60, "under 60 s");
}

// 2 ---------------------------------------------------------------------------

void rabin_oblivious(Verdict& v) {
  std::map<std::string, std::size_t> success, failure;
  const numtheory::BlumModulus n21(3, 7);
  for (long x : units(21)) {
    for (std::uint64_t s = 0; s < 400; ++s) {
      oblivious::RabinOtConfig c;
      c.modulus = n21;
      c.receiver_x = BigInt(x);
      const auto r = oblivious::rabin_ot(c, s * 7919 + static_cast<std::uint64_t>(x), s);
      v.require(r.ok(), "honest session completes");
      const std::string y = to_hex(r.transcript[1].message.payload);
      ++(r.party<oblivious::RabinOtReceiver>(Role::B).factors() ? success : failure)[y];
    }
  }
  const auto chi = stats::chi_square_homogeneity(success, failure);
  v.detail << "chi2=" << fmt(chi.statistic) << " dof=" << chi.dof << " p=" << fmt(chi.p_value);
  v.require(chi.p_value > 0.01, "p > 0.01");
}

// 3 ---------------------------------------------------------------------------

void numtheory_oracles(Verdict& v) {
  std::size_t checked = 0, mismatches = 0;
  auto expect = [&](bool ok) {
    ++checked;
    if (!ok) ++mismatches;
  };
  for (auto [p, q] : {std::pair{3L, 7L}, std::pair{3L, 11L}, std::pair{7L, 11L}}) {
    const long n = p * q;
    const numtheory::BlumModulus m(p, q);
    std::set<long> squares;
    for (long x : units(n)) squares.insert(x * x % n);
    auto legendre = [](long a, long pr) {
      a %= pr;
      if (a == 0) return 0;
      for (long x = 1; x < pr; ++x)
        if (x * x % pr == a) return 1;
      return -1;
    };
    for (long a = 0; a < n; ++a) expect(numtheory::jacobi(a, n) == legendre(a, p) * legendre(a, q));
    for (long y : units(n)) {
      expect(numtheory::is_qr(y, m) == (squares.count(y) == 1));
      if (!squares.count(y)) continue;
      std::vector<long> roots;
      for (long x = 1; x < n; ++x)
        if (x * x % n == y) roots.push_back(x);
      const auto got = numtheory::four_square_roots(y, m);
      expect(roots.size() == 4 && std::equal(roots.begin(), roots.end(), got.begin(),
                                             [](long a, const BigInt& b) { return b == a; }));
      for (long a : roots)
        for (long b : roots) {
          if (a == b || a + b == n) {
            bool threw = false;
            try {
              (void)numtheory::factor_from_roots(a, b, n);
            } catch (const TriviallyRelatedRoots&) {
              threw = true;
            }
            expect(threw);
            continue;
          }
          const auto f = numtheory::factor_from_roots(a, b, n);
          expect(f.first * f.second == n && ((f.first == p && f.second == q) || (f.first == q && f.second == p)));
        }
    }
  }
  v.detail << checked << " cases at N in {21, 33, 77}, " << mismatches << " mismatches";
  v.require(mismatches == 0, "zero mismatches");
}

// 4 ---------------------------------------------------------------------------

void dlp_ot(Verdict& v) {
  oblivious::DlpOtConfig c;
  c.bits = 32;
  c.k = 24;
  std::size_t exact = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto r = oblivious::dlp_1of2_ot(c, s, s + 5000);
    if (!r.ok()) continue;
    const auto& a = r.party<oblivious::DlpOtSender>(Role::A);
    const auto& b = r.party<oblivious::DlpOtReceiver>(Role::B);
    if (b.recovered() && *b.recovered() == (b.choice() ? a.secrets().second : a.secrets().first)) ++exact;
  }
  c.cheat_structure = true;
  std::size_t rejected = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto r = oblivious::dlp_1of2_ot(c, s, s + 1);
    if (r.abort && r.abort->detected_by == Role::A && r.abort->kind == session::AbortKind::Verification) ++rejected;
  }
  v.detail << exact << "/1000 bit-exact, structure cheat rejected " << rejected << "/1000";
  v.require(exact == 1000, "every chosen secret recovered");
  v.require(rejected == 1000, "every structure cheat rejected");
}

// 5 ---------------------------------------------------------------------------

void coin_flip(Verdict& v) {
  derived::CoinFlipQrpConfig c;
  c.bits = 64;
  const auto p = count(10000, [&](std::size_t i) {
    const auto [sa, sb] = session::trial_seeds(3, i);
    const auto r = derived::coin_flip_qrp(c, sa, sb);
    return r.ok() && r.party<derived::CoinQrpB>(Role::B).result()->winner == derived::Winner::B;
  });
  c.cheat_non_blum = true;
  std::size_t rejected = 0;
  const std::size_t cheats = 1000;
  for (std::uint64_t s = 0; s < cheats; ++s) {
    const auto r = derived::coin_flip_qrp(c, s, s + 1);
    if (r.abort && r.abort->detected_by == Role::B) ++rejected;
  }
  v.detail << "B won " << fmt(p.rate()) << " of 10000, non-Blum rejected " << rejected << "/" << cheats;
  v.require(std::abs(p.rate() - 0.5) <= 0.02, "B-win within 0.50 +- 0.02");
  v.require(rejected == cheats, "every non-Blum modulus rejected");
}

// 6 ---------------------------------------------------------------------------

void tscp_family(Verdict& v) {
  RandomStream frng(6);
  derived::TscpConfig shared;
  shared.field = numtheory::gen_field(48, frng);

  RandomStream rng(60);
  std::size_t equal_ok = 0;
  const std::size_t equal_runs = 10000;
  for (std::size_t i = 0; i < equal_runs; ++i) {
    const BitString x = BitString::random(1 + rng.below(16), rng);
    derived::TscpConfig c = shared;
    c.k = 1 + rng.below(32);
    c.secret_a = {x};
    c.secret_b = {x};
    const auto [sa, sb] = session::trial_seeds(61, i);
    const auto r = derived::run_tscp(derived::tscp_protocol(), c, sa, sb);
    if (r.ok() && derived::tscp_verdicts(r) == std::pair<int, int>{0, 0}) ++equal_ok;
  }
  v.detail << "equal inputs " << equal_ok << "/" << equal_runs;
  v.require(equal_ok == equal_runs, "equal inputs always equal");

  const BitString a = BitString::parse("10101010"), b = BitString::parse("10101011");
  for (std::size_t k : {1, 2, 4}) {
    derived::TscpConfig c = shared;
    c.k = k;
    c.secret_a = {a};
    c.secret_b = {b};
    const auto p = count(10000, [&](std::size_t i) {
      const auto [sa, sb] = session::trial_seeds(62 + k, i);
      return derived::tscp_verdicts(derived::run_tscp(derived::tscp_protocol(), c, sa, sb)).first == 0;
    });
    const double expected = std::ldexp(1.0, -static_cast<int>(k));
    v.detail << "; k=" << k << " false-equal " << fmt(p.rate());
    v.require(std::abs(p.rate() - expected) <= 0.02, "k=" + std::to_string(k) + " rate");
  }

  std::vector<char> wrong(10000);
  stats::parallel_for(wrong.size(), [&](std::size_t i) {
    const auto [sa, sb] = session::trial_seeds(70, i);
    RandomStream pick(sa ^ 0x5555);
    const std::uint64_t wa = pick.below(1u << 16), wb = pick.below(1u << 16);
    const auto r = derived::millionaires(wa, wb, 16, 32, sa, sb, Transport::InProcess, 64);
    const int expected = wa > wb ? 0 : 1;
    const auto verdicts = derived::tscp_verdicts(r);
    wrong[i] = !r.ok() || verdicts.first != expected || verdicts.second != expected;
  });
  const auto errors = std::count(wrong.begin(), wrong.end(), 1);
  v.detail << "; millionaires k=32 errors " << errors << "/10000";
  v.require(errors == 0, "millionaires matches direct comparison");
}

// 7 ---------------------------------------------------------------------------

void commitments(Verdict& v) {
  using namespace commitment;
  RandomStream rng(7);
  std::size_t complete = 0, fuzz_rejected = 0;

  for (int i = 0; i < 1000; ++i) {
    QrpCommitter c = QrpCommitter::generate(32, rng);
    const Commitment com = c.commit(rng.bit(), rng);
    const Opening o = c.open();
    complete += static_cast<bool>(verify(com, o));
    fuzz_rejected += flip_rejected(com, o, rng);
  }
  const FieldContext f = numtheory::gen_field(32, rng);
  for (int i = 0; i < 1000; ++i) {
    const BigInt x = rng.between(2, f.p() - 2);
    const Commitment com = dlp_commit(x, f);
    complete += static_cast<bool>(verify(com, dlp_open(x)));
    fuzz_rejected += flip_rejected(com, dlp_open(x), rng);
  }
  for (int i = 0; i < 1000; ++i) {
    const auto [g, h] = graphs::gen_noniso_pair(4 + rng.below(7), rng);
    const auto gc = graph_commit(rng.bit(), g, h, rng);
    complete += static_cast<bool>(verify(gc.commitment, gc.opening));
    fuzz_rejected += flip_rejected(gc.commitment, gc.opening, rng);
  }

  // QRP binding at N = 21: no opening of the other bit exists.
  bool qrp_binding = true;
  for (int b : {0, 1})
    for (long r : units(21)) {
      const Commitment com = qrp_commitment(21, 5, qrp_witness(b == 1, r, 5, 21));
      for (long r2 : units(21))
        if (verify(com, Opening{b == 0 ? 1 : 0, qrp_randomness(r2, 3, 7)})) qrp_binding = false;
    }

  // DLP binding for every prime up to 1000: x -> g^x is injective on (1, p-1).
  bool dlp_binding = true;
  for (long p = 5; p <= 1000; ++p) {
    if (!is_prime_l(p)) continue;
    const auto factors = numtheory::small_prime_factors(p - 1);
    long g = 2;
    while (!numtheory::is_generator(g, p, factors)) ++g;
    std::set<long> images;
    long y = g * g % p;
    for (long x = 2; x < p - 1; ++x, y = y * g % p) dlp_binding &= images.insert(y).second;
  }

  // Graph binding for n up to 10: the witness is isomorphic to exactly one graph.
  bool graph_binding = true;
  for (std::size_t n = 3; n <= 10; ++n)
    for (int t = 0; t < 10; ++t) {
      const auto [g, h] = graphs::gen_noniso_pair(n, rng);
      const bool b = rng.bit();
      const auto gc = graph_commit(b, g, h, rng);
      ByteReader r(gc.commitment.witness);
      const graphs::Graph w = graphs::read_graph(r);
      graph_binding &= !graphs::find_isomorphism(b ? g : h, w).has_value();
    }

  v.detail << "complete " << complete << "/3000, fuzz rejected " << fuzz_rejected << "/3000, binding qrp="
           << qrp_binding << " dlp=" << dlp_binding << " graph=" << graph_binding;
  v.require(complete == 3000, "completeness");
  v.require(fuzz_rejected == 3000, "fuzzed witnesses rejected");
  v.require(qrp_binding && dlp_binding && graph_binding, "binding");
}

// 8 ---------------------------------------------------------------------------

session::SessionResult zk_session(bool graph, bool cheat, std::size_t m, std::uint64_t sa, std::uint64_t sb) {
  if (graph) {
    zkproof::GraphZkConfig c;
    c.m = m;
    c.cheat = cheat;
    return zkproof::graph_zkp(c, sa, sb);
  }
  zkproof::QrpZkConfig c;
  c.bits = 32;
  c.m = m;
  c.cheat = cheat;
  return zkproof::qrp_zkp(c, sa, sb);
}

void zkp_soundness(Verdict& v) {
  for (bool graph : {false, true}) {
    const char* name = graph ? "graph" : "qrp";
    const auto honest = count(1000, [&](std::size_t i) {
      const auto [sa, sb] = session::trial_seeds(80 + graph, i);
      const auto verdict = zkproof::zk_verdict(zk_session(graph, false, zkproof::kDefaultRounds, sa, sb));
      return verdict && verdict->accepted;
    });
    const auto per_round = count(10000, [&](std::size_t i) {
      const auto [sa, sb] = session::trial_seeds(82 + graph, i);
      const auto verdict = zkproof::zk_verdict(zk_session(graph, true, 1, sa, sb));
      return verdict && verdict->accepted;
    });
    const auto m6 = count(10000, [&](std::size_t i) {
      const auto [sa, sb] = session::trial_seeds(84 + graph, i);
      const auto verdict = zkproof::zk_verdict(zk_session(graph, true, 6, sa, sb));
      return verdict && verdict->accepted;
    });
    const double target = 1.0 / 64;
    v.detail << name << ": honest " << fmt(honest.rate()) << ", cheat per-round " << fmt(per_round.rate())
             << ", m=6 " << fmt(m6.rate()) << " (3 sigma " << fmt(3 * m6.sigma_at(target)) << ")";
    if (!graph) v.detail << "; ";
    v.require(honest.successes == honest.trials, std::string(name) + " honest acceptance 1.0");
    v.require(std::abs(per_round.rate() - 0.5) <= 0.02, std::string(name) + " per-round 0.5");
    v.require(std::abs(m6.rate() - target) <= 3 * m6.sigma_at(target), std::string(name) + " m=6 within 3 sigma");
  }
}

// 9 ---------------------------------------------------------------------------

void zero_knowledge(Verdict& v) {
  const zkproof::QrpIdentity id = zkproof::make_qrp_identity(21, 2);
  zkproof::QrpZkConfig c;
  c.identity = id;
  c.m = 1;
  std::map<std::string, std::size_t> honest, simulated;
  double tries = 0;
  const std::size_t trials = 100000;
  bool all_verify = true;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto [sa, sb] = session::trial_seeds(90, i);
    ++honest[to_hex(zkproof::qrp_zkp(c, sa, sb).transcript.serialize())];
    const auto [va, vb] = session::trial_seeds(91, i);
    const auto sim = zkproof::qrp_zkp_simulate(id.n, id.v, 1, va, vb);
    all_verify &= sim.verdict.accepted;
    ++simulated[to_hex(sim.transcript.serialize())];
    tries += static_cast<double>(sim.tries.at(0));
  }
  const auto chi = stats::chi_square_homogeneity(honest, simulated);
  const double mean_tries = tries / static_cast<double>(trials);
  v.detail << "chi2=" << fmt(chi.statistic) << " dof=" << chi.dof << " p=" << fmt(chi.p_value)
           << ", rewinds mean " << fmt(mean_tries);
  v.require(all_verify, "simulated transcripts accepted");
  v.require(chi.p_value > 0.01, "p > 0.01");
  v.require(std::abs(mean_tries - 2.0) <= 0.1, "rewinds 2.0 +- 0.1");
}

// 10 --------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TWOPARTY_EXE) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void framework(Verdict& v) {
  std::size_t identical = 0, compared = 0;
  std::vector<std::string> logs;
  for (const auto& e : catalog::entries()) {
    for (std::uint64_t s : {1, 2, 3}) {
      const auto first = catalog::run(e, {}, s, s + 100, Transport::InProcess);
      const auto again = catalog::run(e, {}, s, s + 100, Transport::InProcess);
      const auto loop = catalog::run(e, {}, s, s + 100, Transport::Loopback);
      const std::string text = session::format_log(catalog::make_log(e, first));
      ++compared;
      if (text == session::format_log(catalog::make_log(e, again)) &&
          text == session::format_log(catalog::make_log(e, loop)) &&
          first.result.transcript.serialize() == loop.result.transcript.serialize())
        ++identical;
      logs.push_back(text);
    }
  }
  v.detail << identical << "/" << compared << " byte-identical across transports";
  v.require(identical == compared, "transcripts byte-identical");

  bool honest_ok = true;
  for (const auto& text : logs) {
    try {
      catalog::verify_log(session::parse_log(text));
    } catch (const Error&) {
      honest_ok = false;
    }
  }
  v.require(honest_ok, "honest logs verify");

  RandomStream rng(10);
  std::size_t detected = 0;
  const std::size_t cases = 1000;
  const std::string path = "acceptance-tamper.log";
  std::size_t cli_detected = 0, cli_cases = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    std::string text = logs[rng.below(logs.size())];
    const std::size_t bit = rng.below(text.size() * 8);
    text[bit / 8] = static_cast<char>(text[bit / 8] ^ (0x80 >> (bit % 8)));
    bool caught = false;
    try {
      catalog::verify_log(session::parse_log(text));
    } catch (const Error&) {
      caught = true;
    }
    detected += caught;
    if (i % 10 == 0) {
      std::FILE* f = std::fopen(path.c_str(), "wb");
      std::fwrite(text.data(), 1, text.size(), f);
      std::fclose(f);
      ++cli_cases;
      const int status = run_cli("verify-transcript " + path);
      cli_detected += status != 0 && status != 2 ? 1 : 0;
    }
  }
  std::remove(path.c_str());
  v.detail << ", tamper detected " << detected << "/" << cases << " (command line " << cli_detected << "/"
           << cli_cases << ")";
  v.require(detected == cases, "every single-bit tamper detected");
  v.require(cli_detected == cli_cases, "verify-transcript exits nonzero");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)(Verdict&)>> criteria{
      {"Rabin OT meaningfulness", rabin_meaningful},
      {"Rabin OT obliviousness", rabin_oblivious},
      {"number theory oracle equivalence", numtheory_oracles},
      {"DLP 1-out-of-2 OT", dlp_ot},
      {"coin flipping", coin_flip},
      {"TSCP family", tscp_family},
      {"commitments", commitments},
      {"ZKP completeness and soundness", zkp_soundness},
      {"zero knowledge", zero_knowledge},
      {"framework determinism and tamper detection", framework},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << ": "
              << v.detail.str() << " (" << fmt(secs, 1) << " s)" << std::endl;
  }
  return failures;
}
