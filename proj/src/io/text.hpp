#pragma once

#include <string>

namespace mlpnp::io {

// Round-trip decimal formatting (17 significant digits).
std::string format_full(double value);

// Strict double parse of a whole token.
bool parse_double(const std::string& token, double& out);

}  // namespace mlpnp::io
