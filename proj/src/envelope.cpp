#include "sact/envelope.hpp"

#include <nlohmann/json.hpp>

namespace sact {

std::vector<sort> sorts_of(const payload_list& payload) {
  std::vector<sort> out;
  out.reserve(payload.size());
  for (const auto& v : payload)
    out.push_back(sort_of(v));
  return out;
}

const char* to_string(envelope_kind k) {
  switch (k) {
    case envelope_kind::join: return "join";
    case envelope_kind::app: return "app";
    case envelope_kind::control: return "control";
  }
  return "?";
}

nlohmann::ordered_json to_json(const envelope& e) {
  nlohmann::ordered_json doc;
  doc["protocol"] = e.protocol;
  doc["session"] = e.session;
  doc["from"] = e.from_role;
  doc["to"] = e.to_role;
  doc["label"] = e.label;
  auto payload = nlohmann::ordered_json::array();
  for (const auto& v : e.payload) {
    if (const auto* s = std::get_if<std::string>(&v))
      payload.push_back(*s);
    else
      payload.push_back(std::get<std::int64_t>(v));
  }
  doc["payload"] = std::move(payload);
  doc["kind"] = to_string(e.kind);
  doc["seq"] = e.seq;
  return doc;
}

envelope envelope_from_json(const nlohmann::json& doc) {
  envelope e;
  e.protocol = doc.at("protocol").get<std::string>();
  e.session = doc.at("session").get<std::string>();
  e.from_role = doc.at("from").get<std::string>();
  e.to_role = doc.at("to").get<std::string>();
  e.label = doc.at("label").get<std::string>();
  for (const auto& v : doc.at("payload")) {
    if (v.is_string())
      e.payload.emplace_back(v.get<std::string>());
    else if (v.is_number_integer())
      e.payload.emplace_back(v.get<std::int64_t>());
    else
      throw std::invalid_argument("envelope json: payload values must be string or int");
  }
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "join")
    e.kind = envelope_kind::join;
  else if (kind == "app")
    e.kind = envelope_kind::app;
  else if (kind == "control")
    e.kind = envelope_kind::control;
  else
    throw std::invalid_argument("envelope json: bad kind '" + kind + "'");
  e.seq = doc.at("seq").get<std::uint64_t>();
  return e;
}

}  // namespace sact
