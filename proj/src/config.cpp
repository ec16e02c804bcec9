#include "chronoskill/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chronoskill/error.hpp"
#include "chronoskill/text.hpp"

namespace chronoskill {

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  line("env", to_string(cfg.env));
  line("seed", std::to_string(cfg.master_seed));
  line("out_dir", cfg.out_dir);
  line("eval_episodes", std::to_string(cfg.eval_episodes));
  line("eval_interval", std::to_string(cfg.eval_interval));
  line("policy.variant", to_string(cfg.policy.variant));
  line("policy.heads", std::to_string(cfg.policy.heads));
  line("policy.trunk_widths", join_ints(cfg.policy.trunk_widths, ','));
  line("policy.seed", std::to_string(cfg.policy.seed));
  line("ppo.gamma", fmt_double(cfg.ppo.gamma));
  line("ppo.lambda", fmt_double(cfg.ppo.lambda));
  line("ppo.clip_ratio", fmt_double(cfg.ppo.clip_ratio));
  line("ppo.lr", fmt_double(cfg.ppo.lr));
  line("ppo.update_epochs", std::to_string(cfg.ppo.update_epochs));
  line("ppo.minibatch_size", std::to_string(cfg.ppo.minibatch_size));
  line("ppo.entropy_coef", fmt_double(cfg.ppo.entropy_coef));
  line("ppo.value_coef", fmt_double(cfg.ppo.value_coef));
  line("ppo.grad_clip", fmt_double(cfg.ppo.grad_clip));
  line("ppo.steps_per_iter", std::to_string(cfg.ppo.steps_per_iter));
  line("ppo.total_iters", std::to_string(cfg.ppo.total_iters));
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view stripped = trim(raw);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    const std::string ctx = "config line " + std::to_string(lineno);
    if (eq == std::string_view::npos) {
      throw FormatError(ctx + ": expected 'key = value', got '" + std::string(stripped) + "'");
    }
    const std::string key(trim(stripped.substr(0, eq)));
    const std::string value(trim(stripped.substr(eq + 1)));

    if (key == "env") {
      cfg.env = env_from_string(value);
    } else if (key == "seed") {
      cfg.master_seed = parse_u64(value, ctx);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "eval_episodes") {
      cfg.eval_episodes = static_cast<int>(parse_int(value, ctx));
    } else if (key == "eval_interval") {
      cfg.eval_interval = static_cast<int>(parse_int(value, ctx));
    } else if (key == "policy.variant") {
      cfg.policy.variant = variant_from_string(value);
    } else if (key == "policy.heads") {
      cfg.policy.heads = static_cast<int>(parse_int(value, ctx));
    } else if (key == "policy.trunk_widths") {
      cfg.policy.trunk_widths = parse_int_list(value, ctx);
    } else if (key == "policy.seed") {
      cfg.policy.seed = parse_u64(value, ctx);
    } else if (key == "ppo.gamma") {
      cfg.ppo.gamma = parse_double(value, ctx);
    } else if (key == "ppo.lambda") {
      cfg.ppo.lambda = parse_double(value, ctx);
    } else if (key == "ppo.clip_ratio") {
      cfg.ppo.clip_ratio = parse_double(value, ctx);
    } else if (key == "ppo.lr") {
      cfg.ppo.lr = parse_double(value, ctx);
    } else if (key == "ppo.update_epochs") {
      cfg.ppo.update_epochs = static_cast<int>(parse_int(value, ctx));
    } else if (key == "ppo.minibatch_size") {
      cfg.ppo.minibatch_size = static_cast<int>(parse_int(value, ctx));
    } else if (key == "ppo.entropy_coef") {
      cfg.ppo.entropy_coef = parse_double(value, ctx);
    } else if (key == "ppo.value_coef") {
      cfg.ppo.value_coef = parse_double(value, ctx);
    } else if (key == "ppo.grad_clip") {
      cfg.ppo.grad_clip = parse_double(value, ctx);
    } else if (key == "ppo.steps_per_iter") {
      cfg.ppo.steps_per_iter = static_cast<int>(parse_int(value, ctx));
    } else if (key == "ppo.total_iters") {
      cfg.ppo.total_iters = static_cast<int>(parse_int(value, ctx));
    } else {
      throw FormatError(ctx + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

RunConfig default_run_config(EnvName env, Variant variant, std::uint64_t master_seed) {
  RunConfig cfg;
  cfg.env = env;
  cfg.master_seed = master_seed;
  cfg.policy.variant = variant;
  if (env == EnvName::two_phase_probe) {
    cfg.policy.heads = 2;
    cfg.policy.trunk_widths = {32, 32};
    cfg.ppo.lr = 1e-3;
    cfg.ppo.steps_per_iter = 200;
    cfg.ppo.total_iters = 150;
  } else {
    cfg.policy.heads = 8;
    cfg.policy.trunk_widths = {64, 64};
    cfg.ppo.steps_per_iter = 2000;
    cfg.ppo.total_iters = 150;
  }
  if (variant != Variant::multihead) cfg.policy.heads = 1;
  return cfg;
}

PolicyConfig resolve_policy_config(const RunConfig& cfg) {
  const EnvSpec spec = make_env_spec(cfg.env);
  PolicyConfig p = cfg.policy;
  p.obs_dim = spec.obs_dim;
  p.action_dim = spec.action_dim;
  p.horizon = spec.horizon;
  if (p.variant != Variant::multihead) {
    p.heads = 1;
  } else {
    p.heads = std::clamp(p.heads, 1, p.horizon);
  }
  if (p.seed == 0) p.seed = derive_seed(cfg.master_seed, "policy");
  p.validate();
  return p;
}

}  // namespace chronoskill
