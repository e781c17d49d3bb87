#include "ppir/wire.hpp"

#include <json.hpp>

namespace ppir::net {

namespace {

using json = nlohmann::ordered_json;
using u64 = std::uint64_t;

json queries_to_json(const std::vector<Query>& queries) {
  json out = json::array();
  for (const Query& q : queries) {
    json qj = json::array();
    for (const QueryTerm& t : q.terms) qj.push_back({t.candidate, t.symbol_index, t.coeff});
    out.push_back(std::move(qj));
  }
  return out;
}

std::vector<Query> queries_from_json(const json& j) {
  if (!j.is_array()) throw MalformedFrame("queries must be an array");
  std::vector<Query> out;
  out.reserve(j.size());
  for (const auto& qj : j) {
    if (!qj.is_array()) throw MalformedFrame("query must be an array of term triples");
    std::vector<QueryTerm> terms;
    terms.reserve(qj.size());
    for (const auto& tj : qj) {
      if (!tj.is_array() || tj.size() != 3 || !tj[0].is_number_unsigned() ||
          !tj[1].is_number_unsigned() || !tj[2].is_number_unsigned())
        throw MalformedFrame("query term must be [candidate, symbol_index, coeff]");
      terms.push_back({tj[0].get<u64>(), tj[1].get<u64>(), tj[2].get<u64>()});
    }
    try {
      out.push_back(make_query(std::move(terms)));
    } catch (const Error& e) {
      throw MalformedFrame(std::string("invalid query: ") + e.what());
    }
  }
  return out;
}

}  // namespace

std::string kind_name(WireMessage::Kind k) {
  switch (k) {
    case WireMessage::Kind::hello:
      return "hello";
    case WireMessage::Kind::query_batch:
      return "query_batch";
    case WireMessage::Kind::answer_batch:
      return "answer_batch";
    case WireMessage::Kind::error:
      return "error";
  }
  return "?";
}

std::string encode(const WireMessage& msg) {
  json j;
  j["kind"] = kind_name(msg.kind);
  j["session"] = msg.session;
  switch (msg.kind) {
    case WireMessage::Kind::hello:
      j["s"] = msg.s;
      j["scheme"] = msg.scheme;
      if (msg.scheme != "ppir") j["lambda"] = msg.lambda;
      break;
    case WireMessage::Kind::query_batch:
      j["queries"] = queries_to_json(msg.queries);
      break;
    case WireMessage::Kind::answer_batch:
      j["answers"] = msg.answers;
      break;
    case WireMessage::Kind::error:
      j["code"] = msg.code;
      j["text"] = msg.text;
      break;
  }
  std::string line = j.dump();
  line.push_back('\n');
  if (line.size() > kMaxFrameBytes) throw OversizeFrame("encoded frame exceeds 16 MiB");
  return line;
}

WireMessage decode(std::string_view line) {
  if (line.size() > kMaxFrameBytes) throw OversizeFrame("frame exceeds 16 MiB");
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw MalformedFrame(std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw MalformedFrame("frame must be an object with a string 'kind'");

  WireMessage msg;
  if (j.contains("session")) {
    if (!j["session"].is_string()) throw MalformedFrame("session must be a string");
    msg.session = j["session"].get<std::string>();
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "hello") {
      msg.kind = WireMessage::Kind::hello;
      msg.s = j.at("s").get<u64>();
      msg.scheme = j.at("scheme").get<std::string>();
      msg.lambda = j.contains("lambda") ? j["lambda"].get<u64>() : 1;
    } else if (kind == "query_batch") {
      msg.kind = WireMessage::Kind::query_batch;
      msg.queries = queries_from_json(j.at("queries"));
    } else if (kind == "answer_batch") {
      msg.kind = WireMessage::Kind::answer_batch;
      if (!j.at("answers").is_array()) throw MalformedFrame("answers must be an array");
      msg.answers = j["answers"].get<std::vector<std::vector<u64>>>();
    } else if (kind == "error") {
      msg.kind = WireMessage::Kind::error;
      msg.code = j.at("code").get<std::string>();
      msg.text = j.contains("text") ? j["text"].get<std::string>() : "";
    } else {
      throw UnknownKind("unknown frame kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw MalformedFrame(std::string("missing or mistyped field: ") + e.what());
  }
  return msg;
}

WireMessage make_hello(std::string session, u64 s, std::string scheme, u64 lambda) {
  WireMessage m;
  m.kind = WireMessage::Kind::hello;
  m.session = std::move(session);
  m.s = s;
  m.scheme = std::move(scheme);
  m.lambda = lambda;
  return m;
}

WireMessage make_query_batch(std::string session, std::vector<Query> queries) {
  WireMessage m;
  m.kind = WireMessage::Kind::query_batch;
  m.session = std::move(session);
  m.queries = std::move(queries);
  return m;
}

WireMessage make_answer_batch(std::string session, std::vector<std::vector<u64>> answers) {
  WireMessage m;
  m.kind = WireMessage::Kind::answer_batch;
  m.session = std::move(session);
  m.answers = std::move(answers);
  return m;
}

WireMessage make_error(std::string session, std::string code, std::string text) {
  WireMessage m;
  m.kind = WireMessage::Kind::error;
  m.session = std::move(session);
  m.code = std::move(code);
  m.text = std::move(text);
  return m;
}

}  // namespace ppir::net
