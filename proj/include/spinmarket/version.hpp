#pragma once

namespace spinmarket {

/// Stamped into every run record and analysis report. Numerical output is
/// only comparable between stores written by the same engine version.
inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace spinmarket
