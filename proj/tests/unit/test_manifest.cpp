#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "rdecusum/errors.hpp"
#include "rdecusum/manifest.hpp"

using namespace rdecusum;
namespace fs = std::filesystem;

TEST(Manifest, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a64_hex("foobar"), "85944171f73967e8");
}

TEST(Manifest, RoundTripsThroughJson) {
  RunManifest m;
  m.version = "1.2.3";
  m.command = "detect";
  m.arguments = {{"f", "pois:1"}, {"threshold", "6.9000000000000004"}};
  m.config_text = "a: 1\n";
  m.base_seed = 18446744073709551615ULL;
  m.started_at = "2020-01-01T00:00:00Z";
  m.finished_at = "2020-01-01T00:00:01Z";
  m.inputs = {{"/in.csv", "0123456789abcdef"}};
  m.outputs = {{"/out.csv", "fedcba9876543210"}};
  m.config_hash = m.compute_config_hash();

  const auto path = fs::temp_directory_path() / "rdecusum_manifest_test.json";
  write_manifest(path, m);
  const auto r = read_manifest(path);
  EXPECT_EQ(r.version, m.version);
  EXPECT_EQ(r.command, m.command);
  EXPECT_EQ(r.arguments, m.arguments);
  EXPECT_EQ(r.config_text, m.config_text);
  EXPECT_EQ(r.base_seed, m.base_seed);
  EXPECT_EQ(r.config_hash, m.config_hash);
  EXPECT_EQ(r.compute_config_hash(), m.config_hash);
  ASSERT_EQ(r.inputs.size(), 1u);
  EXPECT_EQ(r.inputs[0].digest, "0123456789abcdef");
  ASSERT_EQ(r.outputs.size(), 1u);
  EXPECT_EQ(r.outputs[0].path, "/out.csv");
  fs::remove(path);
}

TEST(Manifest, HashCoversEveryOutputAffectingField) {
  RunManifest m;
  m.command = "detect";
  m.arguments = {{"seed", "1"}};
  const auto base = m.compute_config_hash();
  auto changed = m;
  changed.arguments[0].second = "2";
  EXPECT_NE(changed.compute_config_hash(), base);
  changed = m;
  changed.config_text = "x";
  EXPECT_NE(changed.compute_config_hash(), base);
  changed = m;
  changed.inputs = {{"/a", "00"}};
  EXPECT_NE(changed.compute_config_hash(), base);
  changed = m;
  changed.started_at = "later";
  EXPECT_EQ(changed.compute_config_hash(), base);
}

TEST(Manifest, FileDigestAndErrors) {
  const auto path = fs::temp_directory_path() / "rdecusum_digest_test.txt";
  std::ofstream(path) << "foobar";
  EXPECT_EQ(file_digest(path), "85944171f73967e8");
  fs::remove(path);
  EXPECT_THROW(file_digest(path), ParseError);
  EXPECT_THROW(read_manifest(path), ParseError);
  std::ofstream(path) << "{\"tool\": 1}";
  EXPECT_THROW(read_manifest(path), ParseError);
  fs::remove(path);
}

TEST(Manifest, TimestampFormat) {
  const auto t = utc_timestamp();
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}
