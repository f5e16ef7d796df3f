#include "hombfc/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>

#include "hombfc/fisher.hpp"

namespace hombfc {
namespace {

// Evaluates fn(i) for i in [0, n) on worker threads; results land in index
// order so the output never depends on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  const auto work = [&](unsigned id) {
    for (std::size_t i = id; i < n; i += threads) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

using Cell = std::optional<double>;

// Frequency unit in s^-1 per configured unit, or 1 without --sigma-hz.
double unit_scale(const SweepContext& ctx) {
  return ctx.sigma_hz ? *ctx.sigma_hz / ctx.config.params.sigma : 1.0;
}

std::vector<double> scaled_delays(const SweepContext& ctx, const std::vector<double>& taus) {
  std::vector<double> out = taus;
  const double scale = unit_scale(ctx);
  for (auto& t : out) t /= scale;
  return out;
}

std::string channel_label(const Channel& ch, double tau) {
  return "ratio_g" + format_number(ch.gamma) + "_v" + format_number(ch.visibility) + "_tau" +
         format_number(tau);
}

void write_cell(std::ostream& out, const Cell& cell) {
  if (cell) out << format_number(*cell);
}

}  // namespace

void TauGrid::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max)) {
    throw std::invalid_argument("tau grid bounds must be finite");
  }
  if (points < 1) throw std::invalid_argument("tau-points must be >= 1");
  if (points > 1 && !(max > min)) throw std::invalid_argument("tau-max must exceed tau-min");
  if (min < 0.0) throw std::invalid_argument("tau-min must be >= 0");
}

std::vector<double> TauGrid::values() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = min;
    return out;
  }
  const double step = (max - min) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = min + i * step;
  out.back() = max;
  return out;
}

void SweepResult::validate() const {
  for (const auto& c : columns) {
    if (c.values.size() != abscissa.size()) {
      throw std::logic_error("column '" + c.name + "' length differs from the abscissa");
    }
  }
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_csv(const SweepResult& result, std::ostream& out) {
  result.validate();
  out << "# " << result.metadata.dump() << '\n';
  out << result.abscissa_name;
  for (const auto& c : result.columns) out << ',' << c.name;
  out << '\n';
  for (std::size_t i = 0; i < result.abscissa.size(); ++i) {
    out << format_number(result.abscissa[i]);
    for (const auto& c : result.columns) {
      out << ',';
      write_cell(out, c.values[i]);
    }
    out << '\n';
  }
}

void write_json(const SweepResult& result, std::ostream& out) {
  result.validate();
  Json columns = Json::object();
  for (const auto& c : result.columns) {
    Json values = Json::array();
    for (const auto& v : c.values) values.push_back(v ? Json(*v) : Json(nullptr));
    columns[c.name] = std::move(values);
  }
  const Json doc{{"metadata", result.metadata},
                 {"abscissa_name", result.abscissa_name},
                 {"abscissa", result.abscissa},
                 {"columns", std::move(columns)}};
  out << doc.dump(2) << '\n';
}

Json run_metadata(const SweepContext& ctx, const std::string& command) {
  Json j{{"version", version()},
         {"command", command},
         {"seed", ctx.seed},
         {"params", to_json(ctx.config.params)},
         {"channel", to_json(ctx.config.channel)},
         {"quadrature", to_json(ctx.config.quad)}};
  if (ctx.sigma_hz) {
    j["sigma_hz"] = *ctx.sigma_hz;
    j["units"] = {{"tau", "s"}, {"frequency", "s^-1"}};
  } else {
    j["units"] = {{"tau", "1/sigma"}, {"frequency", "sigma"}};
  }
  return j;
}

SweepResult fi_sweep(const SweepContext& ctx, SchemeSelection scheme, const TauGrid& grid) {
  const auto& cfg = ctx.config;
  const auto taus = grid.values();
  const double scale = unit_scale(ctx);
  const bool want_nr = scheme != SchemeSelection::resolved;
  const bool want_r = scheme != SchemeSelection::nonresolved;

  struct Row {
    Cell nonresolved;
    Cell resolved;
  };
  const auto rows = parallel_map<Row>(taus.size(), ctx.threads, [&](std::size_t i) {
    Row row;
    if (want_nr) {
      row.nonresolved = scale * std::sqrt(fisher_nonresolved(cfg.params, cfg.channel, taus[i]));
    }
    if (want_r) {
      try {
        row.resolved =
            scale * std::sqrt(fisher_resolved(cfg.params, cfg.channel, taus[i], cfg.quad));
      } catch (const QuadratureError&) {
        row.resolved.reset();
      }
    }
    return row;
  });

  SweepResult r;
  r.abscissa_name = ctx.sigma_hz ? "tau_s" : "tau";
  r.abscissa = scaled_delays(ctx, taus);
  if (want_nr) {
    SweepColumn c{"sqrt_F_nonresolved", {}};
    for (const auto& row : rows) c.values.push_back(row.nonresolved);
    r.columns.push_back(std::move(c));
  }
  if (want_r) {
    SweepColumn c{"sqrt_F_resolved", {}};
    for (const auto& row : rows) c.values.push_back(row.resolved);
    r.columns.push_back(std::move(c));
  }
  const double sqrt_q = scale * std::sqrt(quantum_fisher_Q(cfg.params));
  r.columns.push_back({"sqrt_Q", std::vector<Cell>(taus.size(), sqrt_q)});

  r.metadata = run_metadata(ctx, "fi-sweep");
  r.metadata["scheme"] = want_nr && want_r ? "both" : (want_r ? "resolved" : "nonresolved");
  r.metadata["tau_grid"] = {{"min", grid.min}, {"max", grid.max}, {"points", grid.points}};
  return r;
}

std::vector<int> default_m_grid() {
  std::vector<int> grid;
  for (int m = 1; m <= 20; ++m) grid.push_back(m);
  for (const int m : {50, 100, 200, 500, 1000}) grid.push_back(m);
  return grid;
}

std::vector<double> default_ratio_taus() { return {0.1, 0.5, 0.85}; }

std::vector<Channel> reference_channels() {
  return {Channel{0.01, 0.99}, Channel{0.1, 0.99}, Channel{0.4, 0.9}};
}

SweepResult ratio_sweep(const SweepContext& ctx, const std::vector<int>& m_grid,
                        const std::vector<double>& taus, bool reference_groups) {
  if (m_grid.empty()) throw std::invalid_argument("m grid must not be empty");
  if (taus.empty()) throw std::invalid_argument("at least one fixed tau is required");
  for (const int m : m_grid) {
    if (m < 1) throw std::invalid_argument("m grid entries must be >= 1");
  }
  std::vector<Channel> channels{ctx.config.channel};
  if (reference_groups) {
    for (const auto& ch : reference_channels()) channels.push_back(ch);
  }

  SweepResult r;
  r.abscissa_name = "m";
  for (const int m : m_grid) r.abscissa.push_back(m);
  for (const auto& ch : channels) {
    for (const double tau : taus) {
      SweepColumn c{channel_label(ch, tau), {}};
      c.values = parallel_map<Cell>(m_grid.size(), ctx.threads, [&](std::size_t i) -> Cell {
        CombParams p = ctx.config.params;
        p.m = m_grid[i];
        try {
          return fi_ratio(p, ch, tau);
        } catch (const UninformativeDelay&) {
          return std::nullopt;
        }
      });
      r.columns.push_back(std::move(c));
    }
  }

  r.metadata = run_metadata(ctx, "ratio-sweep");
  r.metadata["m_grid"] = m_grid;
  r.metadata["tau_fixed"] = taus;
  Json groups = Json::array();
  for (const auto& ch : channels) groups.push_back(to_json(ch));
  r.metadata["channels"] = std::move(groups);
  return r;
}

SweepResult enhancement_sweep(const SweepContext& ctx, const TauGrid& grid) {
  const auto& cfg = ctx.config;
  const auto taus = grid.values();
  const double scale2 = unit_scale(ctx) * unit_scale(ctx);

  struct Row {
    Cell resolved;
    Cell nonresolved;
    Cell factor;
  };
  const auto rows = parallel_map<Row>(taus.size(), ctx.threads, [&](std::size_t i) {
    Row row;
    try {
      const auto e = enhancement_factor(cfg.params, cfg.channel, taus[i], cfg.quad);
      row.resolved = scale2 * e.resolved;
      row.nonresolved = scale2 * e.nonresolved;
      row.factor = e.factor;
    } catch (const QuadratureError&) {
      row.nonresolved = scale2 * fisher_nonresolved(cfg.params, cfg.channel, taus[i]);
    }
    return row;
  });

  SweepResult r;
  r.abscissa_name = ctx.sigma_hz ? "tau_s" : "tau";
  r.abscissa = scaled_delays(ctx, taus);
  SweepColumn resolved{"F_resolved", {}};
  SweepColumn nonresolved{"F_nonresolved", {}};
  SweepColumn factor{"enhancement", {}};
  for (const auto& row : rows) {
    resolved.values.push_back(row.resolved);
    nonresolved.values.push_back(row.nonresolved);
    factor.values.push_back(row.factor);
  }
  r.columns = {std::move(resolved), std::move(nonresolved), std::move(factor)};
  r.metadata = run_metadata(ctx, "enhancement-sweep");
  r.metadata["tau_grid"] = {{"min", grid.min}, {"max", grid.max}, {"points", grid.points}};
  return r;
}

}  // namespace hombfc
