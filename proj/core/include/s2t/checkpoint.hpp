#pragma once

#include <string>

#include "s2t/global.hpp"
#include "s2t/optimizer.hpp"
#include "s2t/params.hpp"

namespace s2t {

// Versioned binary checkpoint: every tensor, optimizer state, the global
// representation, and a JSON config echo.
struct Checkpoint {
  ModelParams params;
  GlobalState global_state;
  AdamState adam;
  std::string config_json;
};

void save_checkpoint(const std::string& path, Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace s2t
