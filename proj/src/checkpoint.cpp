#include "chronoskill/checkpoint.hpp"

#include <map>
#include <sstream>

#include "chronoskill/config.hpp"
#include "chronoskill/error.hpp"
#include "chronoskill/rng.hpp"
#include "chronoskill/text.hpp"

namespace chronoskill {

namespace {

constexpr const char* kHeader = "chronoskill-ckpt v1";

void emit_tensors(std::string& out, const std::vector<const Tensor*>& tensors,
                  const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Tensor& t = *tensors[i];
    out += names[i];
    out += ' ';
    out += std::to_string(t.rank());
    for (int d = 0; d < t.rank(); ++d) {
      out += ' ';
      out += std::to_string(t.dim(d));
    }
    for (std::int64_t k = 0; k < t.size(); ++k) {
      out += ' ';
      out += fmt_double(t[k]);
    }
    out += '\n';
  }
}

}  // namespace

std::string serialize_checkpoint(const Policy& policy, const ValueNet& value_net) {
  const PolicyConfig& cfg = policy.config();
  std::string out = kHeader;
  out += '\n';
  auto config_line = [&out](const std::string& key, const std::string& value) {
    out += "config ";
    out += key;
    out += ' ';
    out += value;
    out += '\n';
  };
  config_line("variant", to_string(cfg.variant));
  config_line("obs_dim", std::to_string(cfg.obs_dim));
  config_line("action_dim", std::to_string(cfg.action_dim));
  config_line("heads", std::to_string(cfg.heads));
  config_line("horizon", std::to_string(cfg.horizon));
  config_line("trunk_widths", join_ints(cfg.trunk_widths, ','));
  config_line("seed", std::to_string(cfg.seed));
  emit_tensors(out, policy.params(), policy.param_names());
  emit_tensors(out, value_net.params(), value_net.param_names());
  out += "end\n";
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("checkpoint: empty file");
  if (std::string_view(trim(line)) != kHeader) {
    throw FormatError("checkpoint: unsupported version header '" + line + "' (expected '" +
                      std::string(kHeader) + "')");
  }

  std::map<std::string, std::string> config_kv;
  std::vector<std::string> tensor_lines;
  bool saw_end = false;
  while (std::getline(in, line)) {
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    if (stripped == "end") {
      saw_end = true;
      break;
    }
    if (stripped.starts_with("config ")) {
      std::istringstream ls{std::string(stripped)};
      std::string tag, key, value;
      ls >> tag >> key >> value;
      if (key.empty() || value.empty()) {
        throw FormatError("checkpoint: malformed config record '" + std::string(stripped) + "'");
      }
      config_kv[key] = value;
    } else {
      tensor_lines.emplace_back(stripped);
    }
  }
  if (!saw_end) throw FormatError("checkpoint: truncated file (missing end marker)");

  auto need = [&config_kv](const std::string& key) -> const std::string& {
    auto it = config_kv.find(key);
    if (it == config_kv.end()) throw FormatError("checkpoint: missing config key '" + key + "'");
    return it->second;
  };
  PolicyConfig cfg;
  cfg.variant = variant_from_string(need("variant"));
  cfg.obs_dim = static_cast<int>(parse_int(need("obs_dim"), "checkpoint obs_dim"));
  cfg.action_dim = static_cast<int>(parse_int(need("action_dim"), "checkpoint action_dim"));
  cfg.heads = static_cast<int>(parse_int(need("heads"), "checkpoint heads"));
  cfg.horizon = static_cast<int>(parse_int(need("horizon"), "checkpoint horizon"));
  cfg.trunk_widths = parse_int_list(need("trunk_widths"), "checkpoint trunk_widths");
  cfg.seed = parse_u64(need("seed"), "checkpoint seed");
  cfg.validate();

  Checkpoint ckpt{Policy::build(cfg),
                  ValueNet::build(cfg.variant, cfg.obs_dim, cfg.horizon, cfg.trunk_widths, 0)};

  std::map<std::string, Tensor*> slots;
  {
    auto ptensors = ckpt.policy.params();
    auto pnames = ckpt.policy.param_names();
    auto vtensors = ckpt.value.params();
    auto vnames = ckpt.value.param_names();
    for (std::size_t i = 0; i < ptensors.size(); ++i) slots[pnames[i]] = ptensors[i];
    for (std::size_t i = 0; i < vtensors.size(); ++i) slots[vnames[i]] = vtensors[i];
  }

  std::map<std::string, bool> filled;
  for (const std::string& record : tensor_lines) {
    std::istringstream ls(record);
    std::string name;
    ls >> name;
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw FormatError("checkpoint: unexpected tensor record '" + name + "'");
    }
    int rank = -1;
    ls >> rank;
    Tensor& slot = *it->second;
    if (rank != slot.rank()) {
      throw DimensionError("checkpoint: tensor '" + name + "' has rank " + std::to_string(rank) +
                           ", expected " + std::to_string(slot.rank()));
    }
    for (int d = 0; d < rank; ++d) {
      int dim = -1;
      ls >> dim;
      if (dim != slot.dim(d)) {
        throw DimensionError("checkpoint: tensor '" + name + "' dim " + std::to_string(d) +
                             " is " + std::to_string(dim) + ", expected " +
                             std::to_string(slot.dim(d)));
      }
    }
    for (std::int64_t k = 0; k < slot.size(); ++k) {
      std::string tok;
      if (!(ls >> tok)) {
        throw FormatError("checkpoint: tensor '" + name + "' record is truncated at value " +
                          std::to_string(k) + " of " + std::to_string(slot.size()));
      }
      slot[k] = parse_double(tok, "checkpoint tensor '" + name + "'");
    }
    std::string extra;
    if (ls >> extra) {
      throw FormatError("checkpoint: tensor '" + name + "' has trailing data '" + extra + "'");
    }
    filled[name] = true;
  }
  for (const auto& [name, slot] : slots) {
    (void)slot;
    if (!filled.count(name)) {
      throw FormatError("checkpoint: missing tensor record '" + name + "'");
    }
  }
  return ckpt;
}

void save_checkpoint(const Policy& policy, const ValueNet& value_net, const std::string& path) {
  write_text_file(path, serialize_checkpoint(policy, value_net));
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_text_file(path));
}

}  // namespace chronoskill
