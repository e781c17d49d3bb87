#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ppir/scheme_common.hpp"

namespace ppir::net {

inline constexpr std::size_t kMaxFrameBytes = 16ull << 20;  // 16 MiB per line

// One newline-delimited JSON frame. Field names are fixed: kind, session, s,
// scheme, lambda, queries, answers, code, text. A query serializes as a list
// of [candidate, symbol_index, coeff] integer triples.
struct WireMessage {
  enum class Kind { hello, query_batch, answer_batch, error };

  Kind kind = Kind::hello;
  std::string session;

  // hello
  std::uint64_t s = 0;
  std::string scheme;        // "ppir" | "mppir" | "single_server"
  std::uint64_t lambda = 1;  // messages per desired class; 1 for ppir

  // query_batch
  std::vector<Query> queries;

  // answer_batch
  std::vector<std::vector<std::uint64_t>> answers;

  // error
  std::string code;
  std::string text;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

std::string kind_name(WireMessage::Kind k);

// Encodes to one JSON object terminated by '\n'. decode(encode(m)) == m.
std::string encode(const WireMessage& msg);

// Accepts a single line with or without the trailing newline. Throws
// MalformedFrame / UnknownKind / OversizeFrame.
WireMessage decode(std::string_view line);

WireMessage make_hello(std::string session, std::uint64_t s, std::string scheme,
                       std::uint64_t lambda = 1);
WireMessage make_query_batch(std::string session, std::vector<Query> queries);
WireMessage make_answer_batch(std::string session,
                              std::vector<std::vector<std::uint64_t>> answers);
WireMessage make_error(std::string session, std::string code, std::string text);

}  // namespace ppir::net
