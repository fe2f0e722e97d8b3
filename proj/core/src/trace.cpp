#include "rowsim/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace rowsim::dram {

std::string_view keyword(CommandKind kind) {
  switch (kind) {
    case CommandKind::Activate: return "ACT";
    case CommandKind::Precharge: return "PRE";
    case CommandKind::Read: return "RD";
    case CommandKind::Write: return "WR";
    case CommandKind::AutoRefresh: return "REF";
    case CommandKind::NeighborRefresh: return "NREF";
  }
  return "?";
}

CommandKind parse_keyword(std::string_view w) {
  if (w == "ACT") return CommandKind::Activate;
  if (w == "PRE") return CommandKind::Precharge;
  if (w == "RD") return CommandKind::Read;
  if (w == "WR") return CommandKind::Write;
  if (w == "REF") return CommandKind::AutoRefresh;
  if (w == "NREF") return CommandKind::NeighborRefresh;
  throw ConfigError("unknown trace command '" + std::string(w) + "'");
}

namespace {

std::string_view next_token(std::string_view& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    s = {};
    return {};
  }
  s.remove_prefix(b);
  const auto e = s.find_first_of(" \t\r");
  auto tok = s.substr(0, e);
  s.remove_prefix(e == std::string_view::npos ? s.size() : e);
  return tok;
}

template <typename T>
T parse_int(std::string_view tok, std::size_t line_no, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ConfigError("trace line " + std::to_string(line_no) + ": bad " + what + " '" +
                      std::string(tok) + "'");
  }
  return v;
}

}  // namespace

Trace read_trace(std::istream& in) {
  Trace out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    const auto ts = next_token(s);
    if (ts.empty()) continue;
    const auto kind_tok = next_token(s);
    if (kind_tok.empty()) throw ConfigError("trace line " + std::to_string(line_no) + ": missing command");
    Command c;
    c.time = Nanos{parse_int<Nanos::rep>(ts, line_no, "timestamp")};
    c.kind = parse_keyword(kind_tok);
    const auto row_tok = next_token(s);
    if (!row_tok.empty()) c.row = parse_int<RowIndex>(row_tok, line_no, "row");
    if (needs_row(c.kind) && c.row == kNoRow) {
      throw ConfigError("trace line " + std::to_string(line_no) + ": " + std::string(kind_tok) +
                        " needs a row");
    }
    if (!next_token(s).empty()) throw ConfigError("trace line " + std::to_string(line_no) + ": trailing fields");
    out.push_back(c);
  }
  return out;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  return read_trace(in);
}

void write_trace(std::ostream& out, const Trace& trace) {
  char buf[32];
  for (const auto& c : trace) {
    auto end = std::to_chars(buf, buf + sizeof buf, c.time.count()).ptr;
    out.write(buf, end - buf);
    out << ' ' << keyword(c.kind);
    if (c.row != kNoRow) {
      end = std::to_chars(buf, buf + sizeof buf, c.row).ptr;
      out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace '" + path + "'");
  write_trace(out, trace);
}

void check_monotone(const Trace& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].time < trace[i - 1].time) {
      throw StateError("trace timestamp regresses at command " + std::to_string(i));
    }
  }
}

Nanos duration(const Trace& trace) {
  if (trace.empty()) return Nanos{0};
  return trace.back().time - trace.front().time;
}

}  // namespace rowsim::dram
