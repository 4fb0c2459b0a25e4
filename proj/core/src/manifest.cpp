#include "rdecusum/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rdecusum/errors.hpp"

namespace rdecusum {

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return fnv1a64_hex(bytes);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::compute_config_hash() const {
  std::string canonical = command + '\n';
  for (const auto& [k, v] : arguments) canonical += k + '=' + v + '\n';
  canonical += config_text;
  for (const auto& in : inputs) canonical += '\n' + in.path + '=' + in.digest;
  return fnv1a64_hex(canonical);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["arguments"] = nlohmann::ordered_json::array();
  for (const auto& [k, v] : m.arguments) j["arguments"].push_back({k, v});
  j["config_text"] = m.config_text;
  j["base_seed"] = m.base_seed;
  j["config_hash"] = m.config_hash;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& i : m.inputs) j["inputs"].push_back({{"path", i.path}, {"digest", i.digest}});
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& o : m.outputs) j["outputs"].push_back({{"path", o.path}, {"digest", o.digest}});
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open manifest");
  nlohmann::json j;
  try {
    in >> j;
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    for (const auto& kv : j.at("arguments")) {
      m.arguments.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    }
    m.config_text = j.value("config_text", std::string{});
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.started_at = j.value("started_at", std::string{});
    m.finished_at = j.value("finished_at", std::string{});
    for (const auto& i : j.value("inputs", nlohmann::json::array())) {
      m.inputs.push_back({i.at("path").get<std::string>(), i.at("digest").get<std::string>()});
    }
    for (const auto& o : j.at("outputs")) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("digest").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace rdecusum
