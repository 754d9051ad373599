#pragma once

#include <mutex>
#include <type_traits>

#include "nooks/service/workspace.hpp"

namespace nooks {

/// Serializes every command and scheduler tick for one workspace: the single
/// logical writer. Reads go through the same gate, so a session always sees
/// its own completed writes.
class Service {
 public:
  explicit Service(Workspace& workspace) : workspace_(workspace) {}

  template <typename F>
  auto run(F&& f) -> std::invoke_result_t<F, Workspace&> {
    std::lock_guard lock(mu_);
    return std::forward<F>(f)(workspace_);
  }

 private:
  std::mutex mu_;
  Workspace& workspace_;
};

}  // namespace nooks
