#pragma once

#include <string>

#include "chronoskill/policy.hpp"
#include "chronoskill/value_net.hpp"

namespace chronoskill {

struct Checkpoint {
  Policy policy;
  ValueNet value;
};

// Versioned text container: header `chronoskill-ckpt v1`, the PolicyConfig
// fields as `config <key> <value>` lines, then one record per tensor
// (`<name> <rank> <dims...> <values...>`, row-major shortest-round-trip
// decimals) and a closing `end` line.
std::string serialize_checkpoint(const Policy& policy, const ValueNet& value_net);
Checkpoint deserialize_checkpoint(const std::string& text);

void save_checkpoint(const Policy& policy, const ValueNet& value_net, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace chronoskill
