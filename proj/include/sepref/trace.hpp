#pragma once

#include <string>
#include <vector>

namespace sepref {

struct TraceEvent {
  std::string phase;  // unfold | exec | cancel
  std::string description;
  std::string before;
  std::string after;
};

using Trace = std::vector<TraceEvent>;

inline void emit(Trace* trace, std::string phase, std::string description,
                 std::string before = {}, std::string after = {}) {
  if (trace)
    trace->push_back({std::move(phase), std::move(description), std::move(before), std::move(after)});
}

}  // namespace sepref
