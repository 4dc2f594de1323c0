#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/protocol.hpp"
#include "tpc/session.hpp"
#include "tpc/transcript_log.hpp"

/// Every shipped protocol by identifier: how to run it from string options,
/// how to verify its transcript log offline, and what to measure over many runs.
namespace tpc::catalog {

using session::SessionResult;
using session::Transport;

/// Option name -> value, as given on a command line.
using Options = std::map<std::string, std::string>;

struct ParamSpec {
  std::string name;
  std::string default_value;
  std::string help;
};

struct RunOutput {
  SessionResult result;
  /// Public context needed by offline verification; recorded in the log.
  protocol::PublicParams params;
};

/// Per-session observations. Names ending in "_rate" are 0/1 indicators;
/// anything else is averaged.
using Metrics = std::vector<std::pair<std::string, double>>;

struct Entry {
  std::string id;
  const session::ProtocolInfo* info = nullptr;
  std::string family;
  std::vector<ParamSpec> params;
  /// Options are already resolved against `params`.
  std::function<RunOutput(const Options&, std::uint64_t seed_a, std::uint64_t seed_b, Transport)> run;
  /// Throws VerificationError or FramingError.
  std::function<void(const session::Transcript&, const protocol::PublicParams&)> verify;
  session::FunctionalDefinition definition;
  /// Only called on sessions that completed without an abort.
  std::function<Metrics(const SessionResult&)> metrics;
};

const std::vector<Entry>& entries();
/// nullptr when unknown.
const Entry* find(std::string_view id);

/// Defaults overlaid with `given`. Throws InvalidArgument on unknown names.
Options resolve(const Entry& e, const Options& given);

RunOutput run(const Entry& e, const Options& given, std::uint64_t seed_a, std::uint64_t seed_b,
              Transport transport = Transport::InProcess);

session::TranscriptLog make_log(const Entry& e, const RunOutput& out);

/// Protocol checks first, so a failure names the step; then the session id
/// is recomputed from the content. Throws FramingError for unknown protocols
/// and structural problems, VerificationError for failed checks.
void verify_log(const session::TranscriptLog& log);

struct RateSummary {
  std::string name;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct MeanSummary {
  std::string name;
  std::size_t samples = 0;
  double mean = 0.0;
};

struct StatsReport {
  std::string protocol;
  std::size_t trials = 0;
  std::uint64_t first_seed = 0;
  /// abort_rate and correct_rate over all trials, then the protocol's own
  /// rates over completed sessions.
  std::vector<RateSummary> rates;
  std::vector<MeanSummary> means;

  const RateSummary* rate(std::string_view name) const;
  const MeanSummary* mean(std::string_view name) const;
};

inline constexpr std::size_t kMinStatsTrials = 100;

/// Runs `trials` sessions on seed pairs from session::trial_seeds in
/// parallel. Throws InvalidArgument when trials < kMinStatsTrials.
StatsReport run_stats(const Entry& e, const Options& given, std::size_t trials, std::uint64_t first_seed = 0,
                      Transport transport = Transport::InProcess);

/// key=value lines.
std::string format_stats(const StatsReport& r);
/// Aligned table for people.
std::string format_stats_table(const StatsReport& r);

}  // namespace tpc::catalog
