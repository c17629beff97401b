#include <gtest/gtest.h>

#include <sstream>

#include "botwatch/policy.hpp"
#include "botwatch/rng.hpp"

using namespace botwatch;

namespace {

const PolicyAction kBlock{ActionKind::BLOCK_ALL, {}};
const PolicyAction kMonitor{ActionKind::MONITOR_ONLY, {}};

std::string position_of(const std::string& line) {
  try {
    parse_policy_command(line);
  } catch (const UsageError&) {
    return "usage";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    const auto p = msg.find("position ");
    return p == std::string::npos ? msg : msg.substr(p + 9, msg.find(':', p) - p - 9);
  }
  return "ok";
}

PolicyStore roundtrip(const PolicyStore& s) {
  std::stringstream io;
  save_policy_store(io, s);
  return load_policy_store(io);
}

}  // namespace

TEST(PolicyParse, FourShapes) {
  EXPECT_EQ(std::get<CreatePolicy>(parse_policy_command("policy-engine --create-policy home")).policy, "home");
  EXPECT_EQ(std::get<DeletePolicy>(parse_policy_command("--delete-policy home")).policy, "home");
  const auto add = std::get<AddAction>(parse_policy_command("policy-engine --add-action home --dev cam1 --action BLOCK_ALL"));
  EXPECT_EQ(add, (AddAction{"home", "cam1", kBlock}));
  const auto del =
      std::get<DeleteAction>(parse_policy_command("--delete-action home --action monitor_only --dev 192.168.1.12"));
  EXPECT_EQ(del, (DeleteAction{"home", "192.168.1.12", kMonitor}));
  const auto r = std::get<AddAction>(
      parse_policy_command("--add-action p --dev * --action RESTRICT_TO_SECURE_DOMAINS:a.com,b.org"));
  EXPECT_EQ(r.action.kind, ActionKind::RESTRICT_TO_SECURE_DOMAINS);
  EXPECT_EQ(r.action.allowlist, (std::vector<std::string>{"a.com", "b.org"}));
  EXPECT_EQ(PolicyAction::parse(r.action.to_string()), r.action);
}

TEST(PolicyParse, ErrorsCarryPosition) {
  EXPECT_EQ(position_of("--frobnicate x"), "0");
  EXPECT_EQ(position_of("policy-engine --frobnicate x"), "14");
  EXPECT_EQ(position_of("--create-policy home --dev cam"), "21");
  EXPECT_EQ(position_of("--add-action home --dev cam --action NUKE"), "37");
  EXPECT_EQ(position_of("--add-action home --dev a --dev b --action BLOCK_ALL"), "26");
}

TEST(PolicyParse, MissingPiecesAreUsageErrors) {
  EXPECT_EQ(position_of(""), "usage");
  EXPECT_EQ(position_of("--create-policy"), "usage");
  EXPECT_EQ(position_of("--add-action home --dev cam"), "usage");
  EXPECT_EQ(position_of("--add-action home --action BLOCK_ALL"), "usage");
  EXPECT_EQ(position_of("--add-action home --dev --action BLOCK_ALL"), "usage");
  EXPECT_THROW(parse_policy_command("--add-action home"), ParseError);  // UsageError is a ParseError
}

TEST(PolicyStore, Operations) {
  PolicyStore s;
  s.create("home");
  EXPECT_THROW(s.create("home"), DataError);
  s.add("home", "cam", kBlock);
  EXPECT_THROW(s.add("home", "cam", kBlock), DataError);
  s.add("home", "cam", kMonitor);
  EXPECT_EQ(s.find("home")->bindings.size(), 2u);
  EXPECT_THROW(s.add("away", "cam", kBlock), DataError);
  s.remove("home", "cam", kBlock);
  ASSERT_EQ(s.find("home")->bindings.size(), 1u);
  EXPECT_EQ(s.find("home")->bindings[0].action, kMonitor);
  EXPECT_THROW(s.remove("home", "cam", kBlock), DataError);
  s.drop("home");
  EXPECT_EQ(s.find("home"), nullptr);
  EXPECT_THROW(s.drop("home"), DataError);
}

TEST(PolicyStore, ExecuteCommands) {
  PolicyStore s;
  for (const char* line : {"--create-policy p", "--add-action p --dev * --action BLOCK_ALL",
                           "--add-action p --dev cam --action MONITOR_ONLY", "--delete-action p --dev * --action BLOCK_ALL"}) {
    s.execute(parse_policy_command(line));
  }
  ASSERT_EQ(s.policies().size(), 1u);
  EXPECT_EQ(s.find("p")->bindings, (std::vector<Binding>{{"cam", kMonitor}}));
  s.execute(parse_policy_command("--delete-policy p"));
  EXPECT_TRUE(s.policies().empty());
}

TEST(PolicyStoreFile, RoundTrips) {
  EXPECT_EQ(roundtrip(PolicyStore{}), PolicyStore{});
  Rng rng(3);
  const std::vector<PolicyAction> actions{kBlock, kMonitor, {ActionKind::RESTRICT_TO_SECURE_DOMAINS, {"x.io"}},
                                          {ActionKind::RESTRICT_TO_SECURE_DOMAINS, {"a.com", "b.com"}}};
  for (int trial = 0; trial < 50; ++trial) {
    PolicyStore s;
    const auto n = rng.between(0, 5);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto name = "p" + std::to_string(i);
      s.create(name);
      const auto m = rng.between(0, 6);
      for (std::int64_t j = 0; j < m; ++j) {
        const std::string dev = rng.bernoulli(0.2) ? "*" : "192.168.1." + std::to_string(rng.between(10, 20));
        const auto& a = actions[rng.index(actions.size())];
        try {
          s.add(name, dev, a);
        } catch (const DataError&) {
        }
      }
    }
    EXPECT_EQ(roundtrip(s), s);
  }
}

TEST(PolicyStoreFile, CorruptInputs) {
  for (const char* text : {"garbage\n", "#policy-store v2\n", "#policy-store v1\nbind p cam BLOCK_ALL\n",
                           "#policy-store v1\npolicy p\nbind p cam EXPLODE\n", "#policy-store v1\npolicy p\npolicy p\n",
                           "#policy-store v1\npolicy\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(load_policy_store(in), CorruptFileError) << text;
  }
  EXPECT_TRUE(load_policy_store(std::string("/nonexistent/policies.txt")).policies().empty());
}

TEST(ApplyPolicies, Rules) {
  const auto a = Ipv4::from_octets(192, 168, 1, 10);
  const auto b = Ipv4::from_octets(192, 168, 1, 11);
  const auto c = Ipv4::from_octets(192, 168, 1, 12);
  PolicyStore s;
  EXPECT_TRUE(apply_policies(s, {}).empty());
  EXPECT_EQ(apply_policies(s, {a})[0].action, kMonitor);

  s.create("wild");
  s.add("wild", "*", kBlock);
  s.create("named");
  s.add("named", "thermostat", kMonitor);
  s.add("named", "192.168.1.12", PolicyAction{ActionKind::RESTRICT_TO_SECURE_DOMAINS, {"vendor.com"}});

  const std::map<Ipv4, std::string> names{{b, "thermostat"}};
  const auto plan = apply_policies(s, {a, b, c}, names);
  ASSERT_EQ(plan.size(), 3u);
  EXPECT_EQ(plan[0].action, kBlock);
  EXPECT_EQ(plan[0].policy, "wild");
  EXPECT_EQ(plan[1].action, kMonitor);
  EXPECT_EQ(plan[1].device_name, "thermostat");
  EXPECT_EQ(plan[2].action.kind, ActionKind::RESTRICT_TO_SECURE_DOMAINS);
  EXPECT_EQ(plan[2].policy, "named");
}

TEST(DeviceNames, Parse) {
  std::istringstream in("# name ip\ncam 192.168.1.10\n\nlamp 192.168.1.11\n");
  const auto names = parse_device_names(in);
  EXPECT_EQ(names.size(), 2u);
  EXPECT_EQ(names.at(Ipv4::from_octets(192, 168, 1, 11)), "lamp");
  std::istringstream bad("cam not-an-ip\n");
  EXPECT_THROW(parse_device_names(bad), Error);
}
