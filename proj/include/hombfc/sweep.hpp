#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hombfc/config.hpp"
#include "hombfc/records_json.hpp"

namespace hombfc {

struct TauGrid {
  double min = 0.0;
  double max = 3.0;
  int points = 601;

  void validate() const;
  std::vector<double> values() const;
};

/// Missing entries are delays where the quantity is undefined
/// (uninformative delay, failed quadrature); they are written as empty
/// CSV cells or JSON nulls.
struct SweepColumn {
  std::string name;
  std::vector<std::optional<double>> values;
};

struct SweepResult {
  std::string abscissa_name;
  std::vector<double> abscissa;
  std::vector<SweepColumn> columns;
  Json metadata;

  /// Throws std::logic_error if a column length differs from the abscissa.
  void validate() const;
};

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

/// One '#'-prefixed metadata line (compact JSON), then the header row and
/// one row per abscissa value. LF line endings.
void write_csv(const SweepResult& result, std::ostream& out);
void write_json(const SweepResult& result, std::ostream& out);

enum class SchemeSelection { nonresolved, resolved, both };

/// Shared inputs of every sweep.
struct SweepContext {
  RunConfig config;
  std::uint64_t seed = 0;
  /// Physical angular frequency of the configured sigma. When set, delays
  /// are reported in seconds and Fisher information in s^-2.
  std::optional<double> sigma_hz;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// sqrt(F) against tau with the QCRB line sqrt(Q). Columns: tau,
/// sqrt_F_nonresolved, sqrt_F_resolved, sqrt_Q (scheme columns as selected).
SweepResult fi_sweep(const SweepContext& ctx, SchemeSelection scheme, const TauGrid& grid);

/// {1..20} and {50, 100, 200, 500, 1000}.
std::vector<int> default_m_grid();
/// sigma tau in {0.1, 0.5, 0.85}.
std::vector<double> default_ratio_taus();

/// The three (gamma, visibility) groups of the large-m plateau study:
/// (0.01, 0.99), (0.1, 0.99), (0.4, 0.9).
std::vector<Channel> reference_channels();

/// F / F_ideal against m, one column per (channel, tau). The configured
/// channel is always included; `reference_groups` adds reference_channels().
SweepResult ratio_sweep(const SweepContext& ctx, const std::vector<int>& m_grid,
                        const std::vector<double>& taus, bool reference_groups);

/// F', F and F'/F against tau.
SweepResult enhancement_sweep(const SweepContext& ctx, const TauGrid& grid);

/// Parameter echo shared by every emitted document.
Json run_metadata(const SweepContext& ctx, const std::string& command);

}  // namespace hombfc
