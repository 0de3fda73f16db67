// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/instance_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace olab {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json instance_json(const T1FamilySpec& spec, const PlantedInstance& inst, std::uint64_t seed) {
  validate_instance(spec, inst);
  const auto& a = spec.params[0];
  const auto& b = spec.params[1];
  Json j;
  j["construction"] = "theorem1";
  j["S"] = spec.S;
  j["gamma"] = spec.gamma;
  j["params"] = {{"family", inst.family}, {"requested_S", spec.requested_S}, {"seed", seed},
                 {"theta1", a.theta}, {"alpha1", a.alpha}, {"beta1", a.beta},
                 {"theta2", b.theta}, {"alpha2", b.alpha}, {"beta2", b.beta}, {"w", spec.w}};
  j["planted_sets"] = Json::array({inst.planted});
  j["schema_version"] = kSchemaVersion;
  return j;
}

Json instance_json(const T2Params& p, const T2Instance& inst, std::uint64_t seed) {
  validate_instance(p, inst);
  Json j;
  j["construction"] = "theorem2";
  j["S"] = p.S;
  j["gamma"] = p.gamma;
  j["params"] = {{"family", inst.family}, {"requested_S", p.requested_S}, {"seed", seed}, {"L", p.L},
                 {"L_div", p.L_div}, {"alpha1", p.alpha[0]}, {"alpha2", p.alpha[1]}, {"w", p.w},
                 {"layer_sizes", p.layer_size}};
  j["planted_sets"] = inst.planted;
  j["schema_version"] = kSchemaVersion;
  return j;
}

std::string instance_hash(const Json& doc) {
  Json copy = doc;
  copy.erase("mdp");
  return hex64(fnv1a64(copy.dump()));
}

Json mdp_json(const TabularMdp& mdp) {
  Json rows = Json::array();
  for (std::int64_t s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      Json next = Json::array();
      for (const auto& t : mdp.row(s, a)) next.push_back({t.next, t.prob});
      rows.push_back({{"s", s}, {"a", a}, {"reward", mdp.reward(s, a)},
                      {"tag", reward_tag_name(mdp.reward_tag(s, a))}, {"next", next}});
    }
  }
  Json roles = Json::array();
  Json layers = Json::array();
  for (std::int64_t s = 0; s < mdp.num_states(); ++s) {
    roles.push_back(role_name(mdp.role(s)));
    layers.push_back(mdp.layer(s));
  }
  return {{"num_states", mdp.num_states()}, {"gamma", mdp.discount()}, {"rows", rows},
          {"roles", roles}, {"layers", layers}, {"initial_dist", mdp.initial_dist()}};
}

namespace {

StateRole role_from_name(const std::string& n) {
  for (StateRole r : {StateRole::kInitial, StateRole::kIntermediate, StateRole::kTerminalW, StateRole::kTerminalX,
                      StateRole::kTerminalY, StateRole::kTerminalZ, StateRole::kDummy, StateRole::kGeneric}) {
    if (role_name(r) == n) return r;
  }
  throw ValidationError("unknown state role '" + n + "'");
}

}  // namespace

TabularMdp mdp_from_json(const Json& j) {
  const std::int64_t S = j.at("num_states").get<std::int64_t>();
  MdpBuilder b(S, j.at("gamma").get<double>());
  const auto& roles = j.at("roles");
  const auto& layers = j.at("layers");
  for (std::int64_t s = 0; s < S; ++s) b.set_state(s, role_from_name(roles.at(s)), layers.at(s).get<int>());
  const auto& rows = j.at("rows");
  if (rows.size() != static_cast<std::size_t>(2 * S)) throw ValidationError("mdp block has wrong row count");
  std::vector<Transition> buf;
  for (const auto& r : rows) {
    buf.clear();
    for (const auto& t : r.at("next")) buf.push_back({t.at(0).get<std::int32_t>(), t.at(1).get<double>()});
    b.add_row(buf, r.at("reward").get<double>(), reward_tag_from_name(r.at("tag")));
  }
  b.set_initial(j.at("initial_dist").get<std::vector<double>>());
  return b.build_unchecked();
}

LoadedInstance load_instance(const Json& doc) {
  LoadedInstance out;
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion) throw ValidationError("unsupported schema_version");
    out.construction = doc.at("construction").get<std::string>();
    const auto& prm = doc.at("params");
    const int family = prm.at("family").get<int>();
    const double gamma = doc.at("gamma").get<double>();
    const std::int64_t S = doc.at("S").get<std::int64_t>();
    if (out.construction == "theorem1") {
      SchemeTuple t{prm.at("theta1"), prm.at("alpha1"), prm.at("beta1"), prm.at("theta2"),
                    prm.at("alpha2"), prm.at("beta2"), prm.at("w")};
      auto spec = make_t1_spec(S, gamma, t);
      if (spec.S != S) throw ValidationError("S must satisfy the divisibility rule");
      spec.requested_S = prm.value("requested_S", S);
      PlantedInstance inst;
      inst.family = family;
      const auto& sets = doc.at("planted_sets");
      if (sets.size() != 1) throw ValidationError("theorem1 instances carry exactly one planted set");
      inst.planted = sets.at(0).get<std::vector<std::int64_t>>();
      validate_instance(spec, inst);
      out.t1 = spec;
      out.t1_instance = inst;
    } else if (out.construction == "theorem2") {
      auto p = make_t2_params(prm.at("L").get<int>(), S, gamma);
      if (p.S != S) throw ValidationError("S must satisfy the divisibility rule");
      p.requested_S = prm.value("requested_S", S);
      T2Instance inst;
      inst.family = family;
      inst.planted = doc.at("planted_sets").get<std::vector<std::vector<std::int64_t>>>();
      validate_instance(p, inst);
      out.t2 = p;
      out.t2_instance = inst;
    } else {
      throw ValidationError("unknown construction '" + out.construction + "'");
    }
    if (doc.contains("mdp")) out.stored_mdp = mdp_from_json(doc.at("mdp"));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed instance file: ") + e.what());
  }
  out.hash = instance_hash(doc);
  return out;
}

std::string dataset_csv(const OfflineDataset& d) {
  std::ostringstream os;
  os.precision(17);
  os << "# instance_hash " << d.instance_hash << "\n";
  os << "# seed " << d.seed << "\n";
  os << "# n " << d.records.size() << "\n";
  os << "idx,s,a,r,s_next,reward_tag\n";
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    os << i << ',' << r.s << ',' << static_cast<int>(r.a) << ',' << r.r << ',' << r.next << ','
       << reward_tag_name(r.tag) << '\n';
  }
  return os.str();
}

OfflineDataset parse_dataset_csv(const std::string& text) {
  OfflineDataset d;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "instance_hash") ls >> d.instance_hash;
      if (key == "seed") ls >> d.seed;
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string f[6];
    for (auto& x : f) {
      if (!std::getline(ls, x, ',')) throw ValidationError("dataset row has too few fields");
    }
    Record r;
    r.s = std::stoi(f[1]);
    r.a = static_cast<std::int8_t>(std::stoi(f[2]));
    r.r = std::stod(f[3]);
    r.next = std::stoi(f[4]);
    r.tag = reward_tag_from_name(f[5]);
    d.records.push_back(r);
  }
  return d;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace olab
