#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/session.hpp"

namespace tpc::session {

/// A transcript with the public context needed to re-check it offline.
///
/// Text form, one line per item, every line newline-terminated:
///
///     # tpc-transcript 1
///     # protocol <id>
///     # session <16 hex>
///     # param <key> <value>          (zero or more)
///     <16 hex> <A->B|B->A> <step label> <2 hex tag> <payload hex or ->
///     # end <record count>
///
/// The session id is the first 8 bytes of SHA-256 over the protocol id,
/// the parameters and the serialized transcript, so any edit to the content
/// changes it. Hex is lowercase only.
struct TranscriptLog {
  std::string protocol;
  std::vector<std::pair<std::string, std::string>> params;
  Transcript transcript;
  /// Session id as written in the file (filled by parse_log).
  std::string session_id;

  const std::string* param(std::string_view key) const;
};

/// Content-derived id, 16 lowercase hex characters.
std::string compute_session_id(const TranscriptLog& log);

std::string format_log(const TranscriptLog& log);

/// Strict parser. Throws FramingError on any syntax deviation, including a
/// missing final newline, uppercase hex or inconsistent session ids. Does
/// not check tags against a catalog or the session id against the content.
TranscriptLog parse_log(std::string_view text);

}  // namespace tpc::session
