#include "tpc/transcript_log.hpp"

#include <algorithm>

#include "tpc/digest.hpp"
#include "tpc/errors.hpp"

namespace tpc::session {

namespace {

constexpr std::string_view kVersionLine = "# tpc-transcript 1";

bool is_token_char(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c == '_' || c == '-' || c == '.';
}

bool is_token(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_token_char); }

bool is_label(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '-';
  });
}

bool is_lower_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t sp = line.find(' ', start);
    out.push_back(line.substr(start, sp == std::string_view::npos ? std::string_view::npos : sp - start));
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  return out;
}

void expect(bool cond, const std::string& what, std::size_t line_no) {
  if (!cond) throw FramingError("transcript log line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

const std::string* TranscriptLog::param(std::string_view key) const {
  for (const auto& [k, v] : params)
    if (k == key) return &v;
  return nullptr;
}

std::string compute_session_id(const TranscriptLog& log) {
  ByteWriter w;
  auto text = [&](std::string_view s) {
    w.u16(static_cast<std::uint16_t>(s.size()));
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  text(kVersionLine);
  text(log.protocol);
  w.u16(static_cast<std::uint16_t>(log.params.size()));
  for (const auto& [k, v] : log.params) {
    text(k);
    text(v);
  }
  w.raw(log.transcript.serialize());
  const auto digest = sha256(w.bytes());
  return to_hex(ByteView(digest.data(), 8));
}

std::string format_log(const TranscriptLog& log) {
  if (!is_token(log.protocol)) throw InvalidArgument("protocol id is not a valid token");
  const std::string sid = compute_session_id(log);
  std::string out;
  out += kVersionLine;
  out += "\n# protocol " + log.protocol + "\n# session " + sid + "\n";
  for (const auto& [k, v] : log.params) {
    if (!is_token(k) || !is_token(v)) throw InvalidArgument("transcript parameter '" + k + "' is not a valid token");
    out += "# param " + k + " " + v + "\n";
  }
  for (const auto& e : log.transcript.entries()) {
    if (!is_label(e.step_label)) throw InvalidArgument("step label is not loggable");
    out += sid;
    out += ' ';
    out += to_string(e.direction);
    out += ' ';
    out += e.step_label;
    out += ' ';
    out += to_hex(ByteView(&e.message.tag, 1));
    out += ' ';
    out += e.message.payload.empty() ? std::string("-") : to_hex(e.message.payload);
    out += '\n';
  }
  out += "# end " + std::to_string(log.transcript.size()) + "\n";
  return out;
}

TranscriptLog parse_log(std::string_view text) {
  if (text.empty() || text.back() != '\n') throw FramingError("transcript log is empty or truncated");
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }

  TranscriptLog log;
  std::size_t i = 0;
  expect(lines.size() >= 3, "missing header", 1);
  expect(lines[0] == kVersionLine, "unsupported header", 1);

  auto header = split_spaces(lines[1]);
  expect(header.size() == 3 && header[0] == "#" && header[1] == "protocol" && is_token(header[2]), "bad protocol line", 2);
  log.protocol = std::string(header[2]);

  header = split_spaces(lines[2]);
  expect(header.size() == 3 && header[0] == "#" && header[1] == "session" && header[2].size() == 16 &&
             is_lower_hex(header[2]),
         "bad session line", 3);
  log.session_id = std::string(header[2]);

  expect(lines.size() >= 4, "missing end marker (truncated log?)", lines.size());
  const std::size_t last = lines.size() - 1;
  for (i = 3; i < last && !lines[i].empty() && lines[i][0] == '#'; ++i) {
    auto f = split_spaces(lines[i]);
    expect(f.size() == 4 && f[0] == "#" && f[1] == "param" && is_token(f[2]) && is_token(f[3]), "bad param line", i + 1);
    log.params.emplace_back(std::string(f[2]), std::string(f[3]));
  }

  {
    auto f = split_spaces(lines[last]);
    expect(f.size() == 3 && f[0] == "#" && f[1] == "end" && !f[2].empty() && f[2].size() <= 9 &&
               std::all_of(f[2].begin(), f[2].end(), [](char c) { return c >= '0' && c <= '9'; }) &&
               (f[2] == "0" || f[2][0] != '0'),
           "missing end marker (truncated log?)", last + 1);
    expect(std::stoul(std::string(f[2])) == last - i, "record count differs from end marker", last + 1);
  }

  for (; i < last; ++i) {
    auto f = split_spaces(lines[i]);
    expect(f.size() == 5, "record must have five fields", i + 1);
    expect(f[0] == log.session_id, "session id differs from header", i + 1);
    Direction dir;
    if (f[1] == "A->B") {
      dir = Direction::AtoB;
    } else {
      expect(f[1] == "B->A", "bad direction", i + 1);
      dir = Direction::BtoA;
    }
    expect(is_label(f[2]), "bad step label", i + 1);
    expect(f[3].size() == 2 && is_lower_hex(f[3]), "bad tag", i + 1);
    Message m;
    m.tag = from_hex(f[3])[0];
    if (f[4] != "-") {
      expect(!f[4].empty() && is_lower_hex(f[4]) && f[4].size() % 2 == 0, "bad payload hex", i + 1);
      m.payload = from_hex(f[4]);
    }
    log.transcript.append({dir, std::string(f[2]), std::move(m)});
  }
  return log;
}

}  // namespace tpc::session
