#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "tpc/catalog.hpp"
#include "tpc/errors.hpp"
#include "tpc/transcript_log.hpp"

namespace {

using namespace tpc;

enum Exit : int { kOk = 0, kVerification = 1, kUsage = 2, kFraming = 3 };

struct ProtocolArgs {
  std::string protocol;
  std::map<std::string, std::string> values;
  std::string transport = "inproc";
};

/// Registers every protocol parameter name once; each protocol rejects the ones it does not take.
void add_protocol_options(CLI::App* cmd, ProtocolArgs& args) {
  std::set<std::string> seen;
  for (const auto& e : catalog::entries())
    for (const auto& p : e.params) {
      if (!seen.insert(p.name).second) continue;
      cmd->add_option_function<std::string>(
          "--" + p.name, [&args, name = p.name](const std::string& v) { args.values[name] = v; },
          "protocol parameter (see `catalog`)");
    }
  cmd->add_option("--transport", args.transport, "inproc or loopback")->check(CLI::IsMember({"inproc", "loopback"}));
}

const catalog::Entry& entry_or_throw(const std::string& id) {
  const catalog::Entry* e = catalog::find(id);
  if (!e) throw InvalidArgument("unknown protocol '" + id + "'; run `twoparty catalog` for the list");
  return *e;
}

session::Transport transport_of(const std::string& s) {
  return s == "loopback" ? session::Transport::Loopback : session::Transport::InProcess;
}

int cmd_catalog() {
  for (const auto& e : catalog::entries()) {
    std::cout << e.id << "  [" << e.family << "]\n  " << e.info->title << "\n  " << e.info->reference << "\n";
    std::cout << "  outputs: A " << e.info->output_domain_a << "; B " << e.info->output_domain_b << "\n";
    for (const auto& p : e.params)
      std::cout << "    --" << p.name << " (default " << p.default_value << ")  " << p.help << "\n";
    std::cout << "\n";
  }
  return kOk;
}

int cmd_run(const ProtocolArgs& args, std::optional<std::uint64_t> seed_a, std::optional<std::uint64_t> seed_b,
            bool from_entropy, const std::string& out_path) {
  const catalog::Entry& e = entry_or_throw(args.protocol);
  if (from_entropy) {
    if (seed_a || seed_b) throw InvalidArgument("--seed-from-entropy excludes --seed-a and --seed-b");
    std::random_device rd;
    seed_a = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    seed_b = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
  if (!seed_a || !seed_b) throw InvalidArgument("--seed-a and --seed-b are required (or --seed-from-entropy)");

  const catalog::RunOutput out = catalog::run(e, args.values, *seed_a, *seed_b, transport_of(args.transport));
  const auto& r = out.result;
  std::cout << "protocol=" << e.id << "\nseed_a=" << *seed_a << "\nseed_b=" << *seed_b
            << "\nmessages=" << r.transcript.size() << "\n";
  std::cout << "a: " << r.a.summary << "\nb: " << r.b.summary << "\n";

  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + out_path);
    f << session::format_log(catalog::make_log(e, out));
    std::cout << "transcript=" << out_path << "\n";
  }
  if (!r.abort) {
    std::cout << "status=completed\n";
    return kOk;
  }
  const auto& a = *r.abort;
  std::cout << "status=aborted\nabort_kind=" << session::to_string(a.kind) << "\n";
  std::cerr << "aborted by " << (a.detected_by == session::Role::A ? "A" : "B") << " at step " << a.step_index << " ("
            << a.step_label << "): " << a.reason << "\n";
  return a.kind == session::AbortKind::Verification ? kVerification : kFraming;
}

int cmd_stats(const ProtocolArgs& args, std::size_t trials, std::uint64_t first_seed, bool table) {
  const catalog::Entry& e = entry_or_throw(args.protocol);
  const auto report = catalog::run_stats(e, args.values, trials, first_seed, transport_of(args.transport));
  std::cout << catalog::format_stats(report);
  if (table) std::cerr << catalog::format_stats_table(report);
  return kOk;
}

int cmd_verify(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const session::TranscriptLog log = session::parse_log(ss.str());
  catalog::verify_log(log);
  std::cout << "ok " << log.protocol << " session " << log.session_id << ", " << log.transcript.size()
            << " messages verified\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run, measure and verify two-party cryptographic protocol sessions."};
  app.require_subcommand(1);

  app.add_subcommand("catalog", "List every protocol with its parameters");

  ProtocolArgs run_args;
  std::optional<std::uint64_t> seed_a, seed_b;
  bool from_entropy = false;
  std::string out_path;
  CLI::App* run = app.add_subcommand("run", "Run one session and optionally write its transcript log");
  run->add_option("protocol", run_args.protocol, "protocol identifier")->required();
  run->add_option("--seed-a", seed_a, "A's 64-bit seed");
  run->add_option("--seed-b", seed_b, "B's 64-bit seed");
  run->add_flag("--seed-from-entropy", from_entropy, "draw both seeds from the OS and print them");
  run->add_option("--out,-o", out_path, "transcript log path");
  add_protocol_options(run, run_args);

  ProtocolArgs stats_args;
  std::size_t trials = 0;
  std::uint64_t first_seed = 0;
  bool table = false;
  CLI::App* stats = app.add_subcommand("stats", "Run many seeded sessions and report rates with 95% intervals");
  stats->add_option("protocol", stats_args.protocol, "protocol identifier")->required();
  stats->add_option("--trials", trials, "number of sessions (at least 100)")->required();
  stats->add_option("--first-seed", first_seed, "seed of the first trial pair");
  stats->add_flag("--table", table, "also print a table on stderr");
  add_protocol_options(stats, stats_args);

  std::string verify_path;
  CLI::App* verify = app.add_subcommand("verify-transcript", "Replay every check of a transcript log offline");
  verify->add_option("path", verify_path, "transcript log")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (app.got_subcommand("catalog")) return cmd_catalog();
    if (app.got_subcommand("run")) return cmd_run(run_args, seed_a, seed_b, from_entropy, out_path);
    if (app.got_subcommand("stats")) return cmd_stats(stats_args, trials, first_seed, table);
    return cmd_verify(verify_path);
  } catch (const FramingError& e) {
    std::cerr << "framing error: " << e.what() << "\n";
    return kFraming;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
