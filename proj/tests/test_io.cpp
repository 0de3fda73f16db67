// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "offlinelab/instance_io.hpp"
#include "offlinelab/verify.hpp"

using namespace olab;
namespace fs = std::filesystem;

namespace {

Json t1_doc(std::uint64_t seed) {
  const auto spec = make_t1_spec(45, 0.9);
  Rng rng = make_stream(seed, 1);
  return instance_json(spec, sample_t1_instance(spec, 2, rng), seed);
}

}  // namespace

TEST(InstanceJson, HashIsStableAndIgnoresMdpBlock) {
  const Json a = t1_doc(7), b = t1_doc(7), c = t1_doc(8);
  EXPECT_EQ(instance_hash(a), instance_hash(b));
  EXPECT_NE(instance_hash(a), instance_hash(c));
  Json with = a;
  const auto li = load_instance(a);
  with["mdp"] = mdp_json(build_t1(*li.t1, *li.t1_instance));
  EXPECT_EQ(instance_hash(with), instance_hash(a));
  EXPECT_EQ(instance_hash(a).size(), 16u);
}

TEST(InstanceJson, RoundTripsBothConstructions) {
  const auto li = load_instance(Json::parse(t1_doc(3).dump()));
  EXPECT_EQ(li.construction, "theorem1");
  EXPECT_EQ(li.t1_instance->family, 2);
  EXPECT_EQ(li.t1->S, 45);

  const auto p = make_t2_params(2, 23, 0.8);
  Rng rng(4);
  const auto inst = sample_t2_instance(p, 1, rng);
  const auto li2 = load_instance(Json::parse(instance_json(p, inst, 4).dump()));
  EXPECT_EQ(li2.construction, "theorem2");
  EXPECT_EQ(li2.t2_instance->planted, inst.planted);
  EXPECT_EQ(li2.t2->L, 2);
}

TEST(InstanceJson, MalformedInputIsAValidationError) {
  Json d = t1_doc(1);
  d["planted_sets"][0].erase(d["planted_sets"][0].begin());
  EXPECT_THROW(load_instance(d), ValidationError);
  Json e = t1_doc(1);
  e.erase("params");
  EXPECT_THROW(load_instance(e), ValidationError);
  Json f = t1_doc(1);
  f["construction"] = "theorem9";
  EXPECT_THROW(load_instance(f), ValidationError);
}

TEST(InstanceJson, CorruptedRowIsReportedByName) {
  Json d = t1_doc(2);
  const auto li = load_instance(d);
  d["mdp"] = mdp_json(build_t1(*li.t1, *li.t1_instance));
  d["mdp"]["rows"][0]["next"][0][1] = 0.5;
  const auto rep = verify_instance(load_instance(d), VerifyOptions{});
  EXPECT_FALSE(rep.all_passed());
  bool named = false;
  for (const auto& c : rep.checks) named = named || c.name == "mdp_invariants.row_sums";
  EXPECT_TRUE(named);
}

TEST(InstanceJson, MdpBlockRoundTrips) {
  const auto li = load_instance(t1_doc(5));
  const auto m = build_t1(*li.t1, *li.t1_instance);
  const auto back = mdp_from_json(Json::parse(mdp_json(m).dump()));
  ASSERT_EQ(back.num_states(), m.num_states());
  for (std::int64_t s = 0; s < m.num_states(); ++s) {
    for (int a = 0; a < 2; ++a) {
      ASSERT_EQ(back.row(s, a).size(), m.row(s, a).size());
      EXPECT_EQ(back.reward(s, a), m.reward(s, a));
      EXPECT_EQ(back.reward_tag(s, a), m.reward_tag(s, a));
    }
  }
}

TEST(DatasetCsv, RoundTrips) {
  const auto li = load_instance(t1_doc(6));
  const auto m = build_t1(*li.t1, *li.t1_instance);
  auto d = sample_dataset(m, mu_theorem1(*li.t1), 50, 11);
  d.instance_hash = li.hash;
  const std::string text = dataset_csv(d);
  EXPECT_EQ(text.rfind("# instance_hash " + li.hash, 0), 0u);
  const auto back = parse_dataset_csv(text);
  EXPECT_EQ(back.instance_hash, d.instance_hash);
  EXPECT_EQ(back.seed, 11u);
  ASSERT_EQ(back.records.size(), d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    EXPECT_EQ(back.records[i].s, d.records[i].s);
    EXPECT_EQ(back.records[i].next, d.records[i].next);
    EXPECT_EQ(back.records[i].r, d.records[i].r);
    EXPECT_EQ(back.records[i].tag, d.records[i].tag);
  }
  EXPECT_EQ(dataset_csv(back).substr(text.find('\n')), text.substr(text.find('\n')));
}

TEST(AtomicWrite, LeavesNoTemporaryBehind) {
  const fs::path dir = fs::temp_directory_path() / "olab_io_test";
  fs::remove_all(dir);
  const std::string path = (dir / "sub" / "out.txt").string();
  write_file_atomic(path, "one\n");
  write_file_atomic(path, "two\n");
  EXPECT_EQ(read_file(path), "two\n");
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  EXPECT_THROW(read_file((dir / "missing").string()), IoError);
  fs::remove_all(dir);
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}
