#include "tpc/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <mutex>

#include "tpc/commitment.hpp"
#include "tpc/derived.hpp"
#include "tpc/digest.hpp"
#include "tpc/errors.hpp"
#include "tpc/oblivious.hpp"
#include "tpc/statistics.hpp"
#include "tpc/zkproof.hpp"

namespace tpc::catalog {

using session::Role;

namespace {

// Option parsing ----------------------------------------------------------------

const std::string& get(const Options& o, const std::string& key) {
  auto it = o.find(key);
  if (it == o.end()) throw InvalidArgument("missing option --" + key);
  return it->second;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidArgument("--" + key + " expects a nonnegative integer, got '" + v + "'");
  return out;
}

std::size_t size_opt(const Options& o, const std::string& key, std::size_t lo, std::size_t hi) {
  const std::uint64_t v = parse_u64(key, get(o, key));
  if (v < lo || v > hi)
    throw InvalidArgument("--" + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<std::size_t>(v);
}

std::string choice_opt(const Options& o, const std::string& key, std::initializer_list<std::string_view> allowed) {
  const std::string& v = get(o, key);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw InvalidArgument("--" + key + " must be one of: " + list);
  }
  return v;
}

/// "random" leaves the choice to the party's own stream.
std::optional<bool> bit_opt(const Options& o, const std::string& key, std::string_view zero = "0",
                            std::string_view one = "1") {
  const std::string v = choice_opt(o, key, {"random", zero, one});
  if (v == "random") return std::nullopt;
  return v == one;
}

BitString bits_opt(const Options& o, const std::string& key) {
  const std::string& v = get(o, key);
  if (v.empty() || v.size() > 4096) throw InvalidArgument("--" + key + " expects 1 to 4096 binary digits");
  return BitString::parse(v);
}

void check_length(const Options& o, const BitString& s) {
  if (get(o, "n") == "auto") return;
  if (size_opt(o, "n", 1, 4096) != s.size())
    throw InvalidArgument("--n " + get(o, "n") + " differs from the secret length " + std::to_string(s.size()));
}

bool cheat_is(const Options& o, std::string_view which) { return get(o, "cheat") == which; }

ParamSpec bits_param(std::size_t def = 64) { return {"bits", std::to_string(def), "modulus or prime size in bits"}; }
ParamSpec cheat_param(std::vector<std::string> scripts) {
  std::string help = "scripted misbehaviour: none";
  for (const auto& s : scripts) help += ", " + s;
  return {"cheat", "none", help};
}

std::size_t field_bits(const Options& o) { return size_opt(o, "bits", 16, 2048); }

// Outputs -----------------------------------------------------------------------

double flag(const Bytes& out, std::size_t i = 0) { return out.size() > i && out[i] == 1 ? 1.0 : 0.0; }
double indicator(bool b) { return b ? 1.0 : 0.0; }

RunOutput plain(SessionResult r) { return {std::move(r), {}}; }

void check_cheat(const Options& o, std::initializer_list<std::string_view> scripts) {
  std::vector<std::string_view> all{"none"};
  all.insert(all.end(), scripts.begin(), scripts.end());
  const std::string& v = get(o, "cheat");
  if (std::find(all.begin(), all.end(), v) == all.end()) {
    std::string list;
    for (auto a : all) list += (list.empty() ? "" : ", ") + std::string(a);
    throw InvalidArgument("--cheat must be one of: " + list);
  }
}

const std::string* param_value(const protocol::PublicParams& p, std::string_view key) {
  return protocol::find_param(p, key);
}

// Entries -----------------------------------------------------------------------

std::vector<Entry> build() {
  using namespace oblivious;
  using namespace derived;
  std::vector<Entry> v;

  v.push_back(Entry{
      "rabin-ot", &rabin_ot_protocol(), "oblivious transfer", {bits_param(), cheat_param({"non-root"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"non-root"});
        RabinOtConfig c;
        c.bits = field_bits(o);
        if (cheat_is(o, "non-root")) c.forced_root = BigInt(2);
        return plain(rabin_ot(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_rabin_ot(t); }, rabin_ot_definition(),
      [](const SessionResult& r) { return Metrics{{"success_rate", flag(r.b.private_output)}}; }});

  v.push_back(Entry{
      "graph-ot", &graph_ot_protocol(), "oblivious transfer",
      {{"n", "6", "vertices of the secret graphs (6..12)"}, cheat_param({"wrong-isomorphism"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"wrong-isomorphism"});
        GraphOtConfig c;
        c.n = size_opt(o, "n", 6, 12);
        c.cheat_wrong_isomorphism = cheat_is(o, "wrong-isomorphism");
        return plain(graph_ot(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_graph_ot(t); }, graph_ot_definition(),
      [](const SessionResult& r) { return Metrics{{"success_rate", flag(r.b.private_output)}}; }});

  v.push_back(Entry{
      "dlp-1of2-ot", &dlp_ot_protocol(), "oblivious transfer",
      {bits_param(), {"k", "16", "secret length in bits"}, {"choice", "random", "receiver's choice: random, 0 or 1"},
       cheat_param({"structure", "length"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"structure", "length"});
        DlpOtConfig c;
        c.bits = field_bits(o);
        c.k = size_opt(o, "k", 1, c.bits - 1);
        c.choice = bit_opt(o, "choice");
        c.cheat_structure = cheat_is(o, "structure");
        c.cheat_length = cheat_is(o, "length");
        return plain(dlp_1of2_ot(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_dlp_ot(t); }, dlp_ot_definition(),
      [](const SessionResult& r) {
        return Metrics{{"choice_rate", flag(r.b.private_output)},
                       {"recovered_rate", indicator(r.b.private_output.size() > 1)}};
      }});

  auto sale_params = [](std::size_t items) {
    std::vector<ParamSpec> p;
    if (items != 2) p.push_back({"items", std::to_string(items), "number of solutions on sale"});
    p.push_back({"n", "8", "vertices per graph"});
    p.push_back({"noise", "6", "extra edges per graph"});
    p.push_back({"choice", "random", "receiver's choice: random or an index"});
    p.push_back(cheat_param({"invalid-solution"}));
    return p;
  };
  auto sale_config = [](const Options& o, std::size_t items) {
    check_cheat(o, {"invalid-solution"});
    SecretSaleConfig c;
    c.items = items;
    c.n = size_opt(o, "n", 3, 64);
    c.noise_edges = size_opt(o, "noise", 0, 1000);
    if (get(o, "choice") != "random") c.choice = size_opt(o, "choice", 0, items - 1);
    c.cheat_invalid_solution = cheat_is(o, "invalid-solution");
    return c;
  };
  auto sale_metrics = [](const SessionResult& r) {
    return Metrics{{"recovered_rate", indicator(r.b.private_output.size() > 2)}};
  };

  v.push_back(Entry{
      "graph-1of2-ot", &graph_1of2_ot_protocol(), "oblivious transfer", sale_params(2),
      [sale_config](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        return plain(graph_1of2_ot(sale_config(o, 2), sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) {
        verify_secret_sale(t, graph_1of2_ot_protocol());
      },
      secret_sale_definition(), sale_metrics});

  v.push_back(Entry{
      "secret-sale", &secret_sale_protocol(), "oblivious transfer", sale_params(4),
      [sale_config](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        return plain(secret_sale(sale_config(o, size_opt(o, "items", 2, 64)), sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_secret_sale(t, secret_sale_protocol()); },
      secret_sale_definition(), sale_metrics});

  v.push_back(Entry{
      "ot-from-two-1of2", &ot_from_two_1of2_protocol(), "oblivious transfer",
      {{"n", "6", "vertices of the receiver's graphs (6..12)"}, bits_param()},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        ComposedOtConfig c;
        c.n = size_opt(o, "n", 6, 12);
        c.bits = field_bits(o);
        return plain(ot_from_two_1of2(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_ot_from_two_1of2(t); },
      ot_from_two_1of2_definition(),
      [](const SessionResult& r) { return Metrics{{"success_rate", flag(r.b.private_output)}}; }});

  auto coin_metrics = [](const SessionResult& r) {
    return Metrics{{"b_win_rate", flag(r.b.private_output, 1)}, {"odd_rate", flag(r.b.private_output, 0)}};
  };

  v.push_back(Entry{
      "coin-flip-qrp", &coin_flip_qrp_protocol(), "coin flipping",
      {bits_param(), {"bet", "random", "B's bet: random, even or odd"}, cheat_param({"non-blum", "wrong-y"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"non-blum", "wrong-y"});
        CoinFlipQrpConfig c;
        c.bits = field_bits(o);
        c.bet = bit_opt(o, "bet", "even", "odd");
        c.cheat_non_blum = cheat_is(o, "non-blum");
        c.cheat_wrong_y = cheat_is(o, "wrong-y");
        return plain(coin_flip_qrp(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_coin_flip_qrp(t); },
      coin_flip_qrp_definition(), coin_metrics});

  v.push_back(Entry{
      "coin-flip-general", &coin_flip_general_protocol(), "coin flipping",
      {bits_param(), {"bet", "random", "B's bet: random, even or odd"}, cheat_param({"wrong-opening"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"wrong-opening"});
        CoinFlipGeneralConfig c;
        c.bits = field_bits(o);
        c.bet = bit_opt(o, "bet", "even", "odd");
        c.cheat_wrong_opening = cheat_is(o, "wrong-opening");
        return plain(coin_flip_general(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_coin_flip_general(t); },
      coin_flip_general_definition(), coin_metrics});

  v.push_back(Entry{
      "secret-exchange-graph", &secret_exchange_protocol(), "secret exchange",
      {{"n", "6", "vertices of each party's graphs (6..12)"}, {"rounds", "10", "exchange rounds m"},
       cheat_param({"wrong-isomorphism"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"wrong-isomorphism"});
        SecretExchangeConfig c;
        c.n = size_opt(o, "n", 6, 12);
        c.rounds = size_opt(o, "rounds", 0, 1000);
        c.cheat_a_wrong_isomorphism = cheat_is(o, "wrong-isomorphism");
        return plain(secret_exchange_graph(c, sa, sb, t));
      },
      [](const session::Transcript& t, const protocol::PublicParams&) { verify_secret_exchange(t); },
      secret_exchange_definition(),
      [](const SessionResult& r) {
        const double a = flag(r.a.private_output), b = flag(r.b.private_output);
        return Metrics{{"a_obtained_rate", a}, {"b_obtained_rate", b}, {"neither_rate", indicator(a == 0 && b == 0)}};
      }});

  v.push_back(Entry{
      "contract-sign", &contract_sign_protocol(), "contract signing",
      {{"contract", "contract", "contract text"}, bits_param(), {"max-rounds", "32", "round limit"},
       cheat_param({"non-root", "other-contract"})},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        check_cheat(o, {"non-root", "other-contract"});
        ContractSignConfig c;
        c.contract = get(o, "contract");
        c.bits = field_bits(o);
        c.max_rounds = size_opt(o, "max-rounds", 0, 65535);
        c.cheat_a_non_root = cheat_is(o, "non-root");
        if (cheat_is(o, "other-contract")) c.b_contract = c.contract + " (amended)";
        const auto h = sha256(std::string_view(c.contract));
        return RunOutput{contract_sign(c, sa, sb, t), {{"contract-hash", to_hex(ByteView(h.data(), h.size()))}}};
      },
      [](const session::Transcript& t, const protocol::PublicParams& p) {
        const std::string* h = param_value(p, "contract-hash");
        if (!h) throw FramingError("transcript log lacks the contract-hash parameter");
        verify_contract_sign(t, *h);
      },
      contract_sign_definition(),
      [](const SessionResult& r) {
        const auto& b = r.party<ContractParty>(Role::B);
        return Metrics{{"signed_rate", indicator(b.signed_contract())}, {"rounds", static_cast<double>(b.rounds())}};
      }});

  auto tscp_verify = [](const session::ProtocolInfo& info) {
    return [&info](const session::Transcript& t, const protocol::PublicParams&) { verify_tscp(t, info); };
  };
  auto verdict_metrics = [](const char* name, int value) {
    return [name, value](const SessionResult& r) {
      const auto [a, b] = tscp_verdicts(r);
      return Metrics{{name, indicator(a == value)}, {"agree_rate", indicator(a == b)}};
    };
  };

  v.push_back(Entry{
      "tscp", &tscp_protocol(), "comparison",
      {{"n", "auto", "secret length; checked against both secrets"}, {"secret-a", "10101010", "A's bit string"},
       {"secret-b", "10101011", "B's bit string"}, {"k", "4", "mask length in bits"}, bits_param()},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        const BitString a = bits_opt(o, "secret-a"), b = bits_opt(o, "secret-b");
        check_length(o, a);
        check_length(o, b);
        return plain(tscp_general(a, b, size_opt(o, "k", 1, 512), sa, sb, t, field_bits(o)));
      },
      tscp_verify(tscp_protocol()), tscp_definition(), verdict_metrics("different_rate", 1)});

  v.push_back(Entry{
      "byzantine-agreement", &byzantine_agreement_protocol(), "comparison",
      {{"secret-a", "0", "A's bit"}, {"secret-b", "1", "B's bit"}, bits_param()},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        return plain(byzantine_agreement(choice_opt(o, "secret-a", {"0", "1"}) == "1",
                                         choice_opt(o, "secret-b", {"0", "1"}) == "1", sa, sb, t, field_bits(o)));
      },
      tscp_verify(byzantine_agreement_protocol()), tscp_definition(), verdict_metrics("different_rate", 1)});

  v.push_back(Entry{
      "sv", &string_verification_protocol(), "comparison",
      {{"n", "auto", "string length; checked against A's string"}, {"secret-a", "10101010", "A's bit string"},
       {"secret-b", "10101011", "B's bit string"}, {"k", "32", "mask length in bits"}, bits_param()},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        const BitString a = bits_opt(o, "secret-a");
        check_length(o, a);
        return plain(string_verification(a, bits_opt(o, "secret-b"), size_opt(o, "k", 1, 512), sa, sb, t, field_bits(o)));
      },
      tscp_verify(string_verification_protocol()), tscp_definition(), verdict_metrics("equal_rate", 0)});

  v.push_back(Entry{
      "millionaires", &millionaires_protocol(), "comparison",
      {{"secret-a", "5", "A's wealth"}, {"secret-b", "3", "B's wealth"}, {"bit-width", "4", "bits per wealth value"},
       {"k", "32", "mask length in bits"}, bits_param()},
      [](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
        const std::size_t width = size_opt(o, "bit-width", 1, 64);
        const std::uint64_t wa = parse_u64("secret-a", get(o, "secret-a"));
        const std::uint64_t wb = parse_u64("secret-b", get(o, "secret-b"));
        if (width < 64 && (wa >> width || wb >> width))
          throw InvalidArgument("wealth values must be below 2^bit-width");
        return plain(millionaires(wa, wb, width, size_opt(o, "k", 1, 512), sa, sb, t, field_bits(o)));
      },
      tscp_verify(millionaires_protocol()), millionaires_definition(), verdict_metrics("a_richer_rate", 0)});

  // Commitments
  using commitment::BcConfig;
  using commitment::Scheme;
  auto bc_entry = [](std::string id, const session::ProtocolInfo& info, Scheme scheme, bool qnr) {
    std::vector<ParamSpec> params;
    if (scheme == Scheme::Graph)
      params.push_back({"n", "6", "vertices of the public graph pair"});
    else
      params.push_back(bits_param());
    if (qnr) params.push_back({"rounds", "20", "non-residuosity proof rounds"});
    params.push_back({"value", "random", scheme == Scheme::Dlp ? "committed exponent or random" : "committed bit: random, 0 or 1"});
    params.push_back(qnr ? cheat_param({"flip", "residue-y"}) : cheat_param({"flip"}));
    return Entry{
        std::move(id), &info, "bit commitment", params,
        [scheme, qnr](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
          if (qnr)
            check_cheat(o, {"flip", "residue-y"});
          else
            check_cheat(o, {"flip"});
          BcConfig c;
          c.scheme = scheme;
          c.qnr_proof = qnr;
          if (scheme == Scheme::Graph)
            c.n = size_opt(o, "n", 3, 64);
          else
            c.bits = field_bits(o);
          if (qnr) c.qnr_rounds = size_opt(o, "rounds", 1, 1000);
          if (get(o, "value") != "random") {
            if (scheme == Scheme::Dlp) {
              BigInt x;
              if (x.set_str(get(o, "value"), 10) != 0 || x < 0) throw InvalidArgument("--value expects an integer");
              c.value = x;
            }
            else
              c.value = bit_opt(o, "value").value() ? 1 : 0;
          }
          c.cheat_flip_opening = cheat_is(o, "flip");
          c.cheat_residue_y = cheat_is(o, "residue-y");
          return plain(commitment::bit_commitment(c, sa, sb, t));
        },
        [&info](const session::Transcript& t, const protocol::PublicParams&) {
          commitment::verify_bit_commitment(t, info);
        },
        commitment::bit_commitment_definition(),
        [scheme](const SessionResult& r) {
          Metrics m{{"opened_rate", indicator(!r.b.private_output.empty())}};
          if (scheme != Scheme::Dlp) m.push_back({"one_rate", flag(r.b.private_output)});
          return m;
        }};
  };
  v.push_back(bc_entry("bc-qrp", commitment::bc_qrp_protocol(), Scheme::Qrp, false));
  v.push_back(bc_entry("bc-qrp-qnr", commitment::bc_qrp_qnr_protocol(), Scheme::Qrp, true));
  v.push_back(bc_entry("bc-dlp", commitment::bc_dlp_protocol(), Scheme::Dlp, false));
  v.push_back(bc_entry("bc-graph", commitment::bc_graph_protocol(), Scheme::Graph, false));

  // Zero-knowledge proofs
  auto zk_metrics = [](const SessionResult& r) {
    const auto verdict = zkproof::zk_verdict(r);
    Metrics m{{"accept_rate", indicator(verdict && verdict->accepted)}};
    if (verdict) {
      const std::size_t passed = verdict->failure_round ? *verdict->failure_round : verdict->rounds;
      m.push_back({"rounds_passed", static_cast<double>(passed)});
    }
    return m;
  };
  for (bool cheat : {false, true}) {
    const zkproof::ZkScheme qs = zkproof::qrp_scheme(cheat);
    v.push_back(Entry{
        qs.info->id, qs.info, "zero-knowledge proof",
        {bits_param(), {"m", std::to_string(zkproof::kDefaultRounds), "rounds (1..255)"}},
        [cheat](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
          zkproof::QrpZkConfig c;
          c.bits = field_bits(o);
          c.m = size_opt(o, "m", 1, zkproof::kMaxRounds);
          c.cheat = cheat;
          return plain(zkproof::qrp_zkp(c, sa, sb, t));
        },
        [qs](const session::Transcript& t, const protocol::PublicParams&) { zkproof::verify_zkp(t, qs); },
        zkproof::zkp_definition(), zk_metrics});
  }
  for (bool cheat : {false, true}) {
    const zkproof::ZkScheme gs = zkproof::graph_scheme(cheat);
    v.push_back(Entry{
        gs.info->id, gs.info, "zero-knowledge proof",
        {{"n", "8", "vertices of the public graph"}, {"noise", "4", "extra edges besides the cycle"},
         {"m", std::to_string(zkproof::kDefaultRounds), "rounds (1..255)"}},
        [cheat](const Options& o, std::uint64_t sa, std::uint64_t sb, Transport t) {
          zkproof::GraphZkConfig c;
          c.n = size_opt(o, "n", 3, 256);
          c.noise_edges = size_opt(o, "noise", 0, 100000);
          c.m = size_opt(o, "m", 1, zkproof::kMaxRounds);
          c.cheat = cheat;
          return plain(zkproof::graph_zkp(c, sa, sb, t));
        },
        [gs](const session::Transcript& t, const protocol::PublicParams&) { zkproof::verify_zkp(t, gs); },
        zkproof::zkp_definition(), zk_metrics});
  }
  return v;
}

}  // namespace

const std::vector<Entry>& entries() {
  static const std::vector<Entry> all = build();
  return all;
}

const Entry* find(std::string_view id) {
  for (const auto& e : entries())
    if (e.id == id) return &e;
  return nullptr;
}

Options resolve(const Entry& e, const Options& given) {
  Options out;
  for (const auto& p : e.params) out[p.name] = p.default_value;
  for (const auto& [k, v] : given) {
    if (!out.count(k)) throw InvalidArgument("protocol " + e.id + " does not take --" + k);
    out[k] = v;
  }
  return out;
}

RunOutput run(const Entry& e, const Options& given, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  const Options o = resolve(e, given);
  RunOutput out = e.run(o, seed_a, seed_b, transport);
  protocol::PublicParams params{{"seed-a", std::to_string(seed_a)}, {"seed-b", std::to_string(seed_b)}};
  for (const auto& p : e.params) {
    const std::string& value = o.at(p.name);
    const bool token = !value.empty() && std::all_of(value.begin(), value.end(), [](char c) {
      return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c == '-' || c == '_' || c == '.';
    });
    if (token) params.emplace_back(p.name, value);
  }
  params.insert(params.end(), out.params.begin(), out.params.end());
  out.params = std::move(params);
  return out;
}

session::TranscriptLog make_log(const Entry& e, const RunOutput& out) {
  session::TranscriptLog log;
  log.protocol = e.id;
  log.params = out.params;
  log.transcript = out.result.transcript;
  log.session_id = session::compute_session_id(log);
  return log;
}

void verify_log(const session::TranscriptLog& log) {
  const Entry* e = find(log.protocol);
  if (!e) throw FramingError("unknown protocol '" + log.protocol + "'");
  e->verify(log.transcript, log.params);
  if (session::compute_session_id(log) != log.session_id)
    throw VerificationError("content does not match session id " + log.session_id);
}

const RateSummary* StatsReport::rate(std::string_view name) const {
  for (const auto& r : rates)
    if (r.name == name) return &r;
  return nullptr;
}

const MeanSummary* StatsReport::mean(std::string_view name) const {
  for (const auto& m : means)
    if (m.name == name) return &m;
  return nullptr;
}

StatsReport run_stats(const Entry& e, const Options& given, std::size_t trials, std::uint64_t first_seed,
                      Transport transport) {
  if (trials < kMinStatsTrials) throw InvalidArgument("stats needs at least " + std::to_string(kMinStatsTrials) + " trials");
  const Options o = resolve(e, given);
  struct Trial {
    bool aborted = false;
    bool correct = false;
    Metrics metrics;
  };
  std::vector<Trial> results(trials);
  std::mutex error_mutex;
  std::optional<std::string> error;
  stats::parallel_for(trials, [&](std::size_t i) {
    try {
      const auto [sa, sb] = session::trial_seeds(first_seed, i);
      const SessionResult r = e.run(o, sa, sb, transport).result;
      Trial& t = results[i];
      t.aborted = !r.ok();
      t.correct = session::check_correctness(r, e.definition).ok;
      if (r.ok()) t.metrics = e.metrics(r);
    } catch (const std::exception& ex) {
      std::lock_guard lock(error_mutex);
      if (!error) error = ex.what();
    }
  });
  if (error) throw InvalidArgument(*error);

  StatsReport report;
  report.protocol = e.id;
  report.trials = trials;
  report.first_seed = first_seed;
  auto add_rate = [&](const std::string& name, std::size_t k, std::size_t n) {
    stats::Proportion p{k, n};
    const auto [lo, hi] = p.wilson95();
    report.rates.push_back({name, k, n, p.rate(), lo, hi});
  };
  std::size_t aborted = 0, correct = 0;
  for (const auto& t : results) {
    aborted += t.aborted;
    correct += t.correct;
  }
  add_rate("abort_rate", aborted, trials);
  add_rate("correct_rate", correct, trials);

  std::vector<std::string> order;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const auto& t : results)
    for (const auto& [name, value] : t.metrics) {
      if (!sums.count(name)) order.push_back(name);
      auto& [sum, n] = sums[name];
      sum += value;
      ++n;
    }
  for (const auto& name : order) {
    const auto& [sum, n] = sums[name];
    if (name.size() > 5 && name.ends_with("_rate"))
      add_rate(name, static_cast<std::size_t>(sum + 0.5), n);
    else
      report.means.push_back({name, n, sum / static_cast<double>(n)});
  }
  return report;
}

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_stats(const StatsReport& r) {
  std::string out = "protocol=" + r.protocol + "\ntrials=" + std::to_string(r.trials) +
                    "\nfirst_seed=" + std::to_string(r.first_seed) + "\n";
  for (const auto& x : r.rates) {
    out += x.name + "=" + fixed(x.rate) + "\n";
    out += x.name + "_n=" + std::to_string(x.trials) + "\n";
    out += x.name + "_ci95_low=" + fixed(x.ci_low) + "\n";
    out += x.name + "_ci95_high=" + fixed(x.ci_high) + "\n";
  }
  for (const auto& m : r.means) out += "mean_" + m.name + "=" + fixed(m.mean) + "\n";
  return out;
}

std::string format_stats_table(const StatsReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %10s %10s %21s\n", "metric", "value", "n", "95% CI");
  out += line;
  for (const auto& x : r.rates) {
    std::snprintf(line, sizeof line, "%-18s %10.4f %10zu   [%.4f, %.4f]\n", x.name.c_str(), x.rate, x.trials, x.ci_low,
                  x.ci_high);
    out += line;
  }
  for (const auto& m : r.means) {
    std::snprintf(line, sizeof line, "%-18s %10.4f %10zu\n", ("mean " + m.name).c_str(), m.mean, m.samples);
    out += line;
  }
  return out;
}

}  // namespace tpc::catalog
