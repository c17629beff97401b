#pragma once

// Policy engine: administrator commands, a persistent policy store, and the
// mapping from detected bots to declarative actions.
//
//   policy-engine --create-policy <policy-name>
//   policy-engine --add-action <policy-name> --dev <device-name> --action <action-name>
//   policy-engine --delete-action <policy-name> --dev <device-name> --action <action-name>
//   policy-engine --delete-policy <policy-name>
//
// <action-name> is BLOCK_ALL, MONITOR_ONLY or RESTRICT_TO_SECURE_DOMAINS:<d1>,<d2>,...
// A <device-name> of "*" matches any device.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "botwatch/errors.hpp"
#include "botwatch/ipv4.hpp"

namespace botwatch {

enum class ActionKind { BLOCK_ALL, RESTRICT_TO_SECURE_DOMAINS, MONITOR_ONLY };

struct PolicyAction {
  ActionKind kind = ActionKind::MONITOR_ONLY;
  std::vector<std::string> allowlist;  // only for RESTRICT_TO_SECURE_DOMAINS

  bool operator==(const PolicyAction&) const = default;

  std::string to_string() const {
    switch (kind) {
      case ActionKind::BLOCK_ALL: return "BLOCK_ALL";
      case ActionKind::MONITOR_ONLY: return "MONITOR_ONLY";
      case ActionKind::RESTRICT_TO_SECURE_DOMAINS: {
        std::string s = "RESTRICT_TO_SECURE_DOMAINS:";
        for (std::size_t i = 0; i < allowlist.size(); ++i) s += (i ? "," : "") + allowlist[i];
        return s;
      }
    }
    return "MONITOR_ONLY";
  }

  /// Throws ParseError (without position) on an unknown action.
  static PolicyAction parse(std::string_view text) {
    auto upper = [](std::string_view s) {
      std::string out(s);
      for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return out;
    };
    const auto colon = text.find(':');
    const auto name = upper(text.substr(0, colon));
    if (name == "BLOCK_ALL" && colon == std::string_view::npos) return {ActionKind::BLOCK_ALL, {}};
    if (name == "MONITOR_ONLY" && colon == std::string_view::npos) return {ActionKind::MONITOR_ONLY, {}};
    if (name == "RESTRICT_TO_SECURE_DOMAINS") {
      if (colon == std::string_view::npos) throw ParseError("RESTRICT_TO_SECURE_DOMAINS needs ':<domain>,...'");
      PolicyAction a{ActionKind::RESTRICT_TO_SECURE_DOMAINS, {}};
      auto rest = text.substr(colon + 1);
      while (true) {
        const auto comma = rest.find(',');
        const auto domain = rest.substr(0, comma);
        if (domain.empty()) throw ParseError("empty domain in allowlist");
        a.allowlist.emplace_back(domain);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      return a;
    }
    throw ParseError("unknown action '" + std::string(text) + "'");
  }
};

struct Binding {
  std::string device;  // IP, symbolic name, or "*"
  PolicyAction action;

  bool operator==(const Binding&) const = default;
};

struct Policy {
  std::string name;
  std::vector<Binding> bindings;

  bool operator==(const Policy&) const = default;
};

struct CreatePolicy {
  std::string policy;
  bool operator==(const CreatePolicy&) const = default;
};
struct AddAction {
  std::string policy;
  std::string device;
  PolicyAction action;
  bool operator==(const AddAction&) const = default;
};
struct DeleteAction {
  std::string policy;
  std::string device;
  PolicyAction action;
  bool operator==(const DeleteAction&) const = default;
};
struct DeletePolicy {
  std::string policy;
  bool operator==(const DeletePolicy&) const = default;
};

using PolicyCommand = std::variant<CreatePolicy, AddAction, DeleteAction, DeletePolicy>;

namespace policy_detail {

struct Token {
  std::string_view text;
  std::size_t pos;  // character offset in the command line
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start});
  }
  return out;
}

inline bool valid_name(std::string_view s) { return !s.empty() && s.front() != '-' && s.front() != '#'; }

}  // namespace policy_detail

inline PolicyCommand parse_policy_command(std::string_view line) {
  using policy_detail::Token;
  auto tokens = policy_detail::tokenize(line);
  if (!tokens.empty() && tokens.front().text == "policy-engine") tokens.erase(tokens.begin());
  if (tokens.empty()) throw UsageError("usage: policy-engine --<verb> <policy-name> [--dev <device> --action <action>]");

  auto at = [](const Token& t, const std::string& why) {
    return ParseError("position " + std::to_string(t.pos) + ": " + why);
  };
  const auto verb = tokens.front();
  static constexpr std::string_view verbs[] = {"--create-policy", "--add-action", "--delete-action", "--delete-policy"};
  if (std::find(std::begin(verbs), std::end(verbs), verb.text) == std::end(verbs)) {
    throw at(verb, "unknown verb '" + std::string(verb.text) + "'");
  }
  if (tokens.size() < 2 || !policy_detail::valid_name(tokens[1].text)) {
    throw UsageError(std::string(verb.text) + " requires <policy-name>");
  }
  const std::string policy(tokens[1].text);
  const bool takes_binding = verb.text == "--add-action" || verb.text == "--delete-action";

  std::optional<Token> dev;
  std::optional<Token> action;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (!takes_binding || (t.text != "--dev" && t.text != "--action")) {
      throw at(t, t.text.starts_with("--") ? "unknown flag '" + std::string(t.text) + "' for " + std::string(verb.text)
                                           : "unexpected argument '" + std::string(t.text) + "'");
    }
    auto& slot = t.text == "--dev" ? dev : action;
    if (slot) throw at(t, "duplicate flag '" + std::string(t.text) + "'");
    if (i + 1 >= tokens.size() || tokens[i + 1].text.starts_with("--")) {
      throw UsageError(std::string(t.text) + " requires a value");
    }
    slot = tokens[++i];
  }

  if (verb.text == "--create-policy") return CreatePolicy{policy};
  if (verb.text == "--delete-policy") return DeletePolicy{policy};
  if (!dev) throw UsageError(std::string(verb.text) + " requires --dev <device-name>");
  if (!action) throw UsageError(std::string(verb.text) + " requires --action <action-name>");
  PolicyAction parsed;
  try {
    parsed = PolicyAction::parse(action->text);
  } catch (const ParseError& e) {
    throw at(*action, e.what());
  }
  if (verb.text == "--add-action") return AddAction{policy, std::string(dev->text), parsed};
  return DeleteAction{policy, std::string(dev->text), parsed};
}

class PolicyStore {
 public:
  const std::vector<Policy>& policies() const { return policies_; }
  bool operator==(const PolicyStore&) const = default;

  const Policy* find(std::string_view name) const {
    auto it = std::find_if(policies_.begin(), policies_.end(), [&](const Policy& p) { return p.name == name; });
    return it == policies_.end() ? nullptr : &*it;
  }

  void create(const std::string& name) {
    if (!policy_detail::valid_name(name)) throw DataError("invalid policy name '" + name + "'");
    if (find(name)) throw DataError("policy '" + name + "' already exists");
    policies_.push_back({name, {}});
  }

  void add(const std::string& name, const std::string& device, const PolicyAction& action) {
    auto& p = mutable_policy(name);
    if (!policy_detail::valid_name(device)) throw DataError("invalid device name '" + device + "'");
    const bool dup = std::any_of(p.bindings.begin(), p.bindings.end(), [&](const Binding& b) {
      return b.device == device && b.action.kind == action.kind;
    });
    if (dup) throw DataError("policy '" + name + "' already binds " + device + " to " + action.to_string());
    p.bindings.push_back({device, action});
  }

  /// Removes the binding with the same device and action kind.
  void remove(const std::string& name, const std::string& device, const PolicyAction& action) {
    auto& p = mutable_policy(name);
    auto it = std::find_if(p.bindings.begin(), p.bindings.end(), [&](const Binding& b) {
      return b.device == device && b.action.kind == action.kind;
    });
    if (it == p.bindings.end()) throw DataError("policy '" + name + "' has no such binding for " + device);
    p.bindings.erase(it);
  }

  void drop(const std::string& name) {
    auto it = std::find_if(policies_.begin(), policies_.end(), [&](const Policy& p) { return p.name == name; });
    if (it == policies_.end()) throw DataError("no policy named '" + name + "'");
    policies_.erase(it);
  }

  void execute(const PolicyCommand& cmd) {
    std::visit(
        [this](const auto& c) {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, CreatePolicy>) create(c.policy);
          else if constexpr (std::is_same_v<C, AddAction>) add(c.policy, c.device, c.action);
          else if constexpr (std::is_same_v<C, DeleteAction>) remove(c.policy, c.device, c.action);
          else drop(c.policy);
        },
        cmd);
  }

 private:
  Policy& mutable_policy(const std::string& name) {
    auto it = std::find_if(policies_.begin(), policies_.end(), [&](const Policy& p) { return p.name == name; });
    if (it == policies_.end()) throw DataError("no policy named '" + name + "'");
    return *it;
  }

  std::vector<Policy> policies_;
};

// Store file ----------------------------------------------------------------

inline constexpr std::string_view kPolicyStoreHeader = "#policy-store v1";

inline void save_policy_store(std::ostream& out, const PolicyStore& store) {
  out << kPolicyStoreHeader << '\n';
  for (const auto& p : store.policies()) {
    out << "policy " << p.name << '\n';
    for (const auto& b : p.bindings) out << "bind " << p.name << ' ' << b.device << ' ' << b.action.to_string() << '\n';
  }
}

inline PolicyStore load_policy_store(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kPolicyStoreHeader) throw CorruptFileError("policy store: missing header");
  PolicyStore store;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = policy_detail::tokenize(line);
    auto fail = [&](const std::string& why) {
      return CorruptFileError("policy store line " + std::to_string(line_no) + ": " + why);
    };
    try {
      if (fields.size() == 2 && fields[0].text == "policy") {
        store.create(std::string(fields[1].text));
      } else if (fields.size() == 4 && fields[0].text == "bind") {
        store.add(std::string(fields[1].text), std::string(fields[2].text), PolicyAction::parse(fields[3].text));
      } else {
        throw fail("unrecognized record");
      }
    } catch (const CorruptFileError&) {
      throw;
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  return store;
}

inline void save_policy_store(const std::string& path, const PolicyStore& store) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_policy_store(out, store);
}

/// A missing file is an empty store.
inline PolicyStore load_policy_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  return load_policy_store(in);
}

// Device names --------------------------------------------------------------

/// "<name> <ip>" per line; '#' starts a comment.
inline std::map<Ipv4, std::string> parse_device_names(std::istream& in) {
  std::map<Ipv4, std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = policy_detail::tokenize(line);
    if (f.empty() || f[0].text.starts_with("#")) continue;
    const auto ip = f.size() == 2 ? Ipv4::parse(f[1].text) : std::nullopt;
    if (!ip) throw ParseError("device name map line " + std::to_string(line_no) + ": expected '<name> <ip>'");
    names[*ip] = std::string(f[0].text);
  }
  return names;
}

struct PlanEntry {
  Ipv4 device;
  std::string device_name;  // empty when unnamed
  std::string policy;       // empty for the default action
  PolicyAction action;

  bool operator==(const PlanEntry&) const = default;
};

/// One entry per infected device. Device-specific bindings (by IP or name)
/// win over "*" bindings; policies and bindings are searched in store order.
/// Unbound devices get `fallback`.
inline std::vector<PlanEntry> apply_policies(const PolicyStore& store, const std::vector<Ipv4>& infected,
                                             const std::map<Ipv4, std::string>& names = {},
                                             const PolicyAction& fallback = {ActionKind::MONITOR_ONLY, {}}) {
  std::vector<PlanEntry> plan;
  for (const auto& ip : infected) {
    PlanEntry e{ip, {}, {}, fallback};
    if (auto it = names.find(ip); it != names.end()) e.device_name = it->second;
    const auto ip_text = ip.to_string();
    auto search = [&](auto&& matches) {
      for (const auto& p : store.policies()) {
        for (const auto& b : p.bindings) {
          if (matches(b.device)) {
            e.policy = p.name;
            e.action = b.action;
            return true;
          }
        }
      }
      return false;
    };
    const bool specific =
        search([&](const std::string& d) { return d == ip_text || (!e.device_name.empty() && d == e.device_name); });
    if (!specific) search([](const std::string& d) { return d == "*"; });
    plan.push_back(std::move(e));
  }
  return plan;
}

}  // namespace botwatch
