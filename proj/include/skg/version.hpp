#pragma once

#define SKG_VERSION "0.1.0"

namespace skg {

inline const char* version() { return SKG_VERSION; }

}  // namespace skg
