#include <openssl/evp.h>

#include <memory>

#include "wgc/engine.hpp"

namespace wgc {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string state_digest(const GameState& s) {
  nlohmann::ordered_json j;
  j["tick"] = s.tick;
  j["seed"] = s.seed;
  j["outcome"] = s.outcome ? to_string(*s.outcome) : "none";
  auto& ops = j["operators"] = nlohmann::ordered_json::array();
  for (const auto& o : s.operators) {
    ops.push_back({o.id,
                   to_string(o.side),
                   o.pos.q,
                   o.pos.r,
                   o.blood,
                   o.alive,
                   o.retired,
                   o.move_remaining,
                   o.move_target ? nlohmann::ordered_json::array({o.move_target->q, o.move_target->r})
                                 : nlohmann::ordered_json(nullptr),
                   o.prep_remaining,
                   o.cooldown_remaining,
                   o.stop_remaining,
                   o.lineage ? *o.lineage : kNoOperator,
                   o.slot,
                   o.tmpl.dmg_vs_vehicle,
                   o.tmpl.dmg_vs_infantry});
  }
  j["slots"] = s.slots;
  j["rng"] = s.rng.state();
  j["events"] = s.events.size();
  return sha256_hex(j.dump());
}

std::string event_log_digest(std::span<const Event> events) {
  std::string buffer;
  for (const auto& e : events) {
    buffer += to_json(e).dump();
    buffer += '\n';
  }
  return sha256_hex(buffer);
}

}  // namespace wgc
