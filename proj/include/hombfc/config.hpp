#pragma once

#include <istream>
#include <stdexcept>
#include <string>

#include "hombfc/comb_model.hpp"
#include "hombfc/numerics.hpp"

namespace hombfc {

/// Invalid or incomplete configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  CombParams params;
  Channel channel;
  QuadSpec quad;
};

/// Parses a flat key-value file:
///
///   # comment
///   m = 3
///   mu = 3
///
/// Required keys: m, mu, sigma, delta, phi, gamma, visibility. Optional:
/// abs_tol, rel_tol, max_subdivisions. Unknown or repeated keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// m = 3, mu = 3, sigma = 1, delta = 0, phi = pi, ideal channel.
RunConfig default_config();

}  // namespace hombfc
