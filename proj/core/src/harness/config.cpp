#include "tempis/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "../parse_util.hpp"
#include "tempis/functions.hpp"
#include "tempis/targets.hpp"

namespace tempis::harness {

namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names{
      {"Table1_IS", ExperimentKind::Table1_IS},         {"Table1_MCMC", ExperimentKind::Table1_MCMC},
      {"Fig1_KS", ExperimentKind::Fig1_KS},             {"Fig2_Variance", ExperimentKind::Fig2_Variance},
      {"RiskFinite", ExperimentKind::RiskFinite},       {"DriftVerify", ExperimentKind::DriftVerify},
      {"Custom", ExperimentKind::Custom},
  };
  return names;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("expected a non-negative integer, got '{}'", text));
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument(fmt::format("expected true or false, got '{}'", text));
}

std::vector<std::string> parse_names(const std::string& text) {
  std::vector<std::string> out;
  for (auto& item : detail::split_top_level(text)) {
    auto t = detail::trim(item);
    if (t.empty()) throw std::invalid_argument("empty list item");
    out.push_back(t);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"experiment", [](ExperimentConfig& c, const std::string& v) { c.experiment = parse_experiment_kind(v); }},
      {"target", [](ExperimentConfig& c, const std::string& v) { c.target = v; }},
      {"betas", [](ExperimentConfig& c, const std::string& v) { c.betas = detail::parse_reals(v); }},
      {"trial", [](ExperimentConfig& c, const std::string& v) { c.trial = v; }},
      {"functions", [](ExperimentConfig& c, const std::string& v) { c.functions = parse_names(v); }},
      {"n", [](ExperimentConfig& c, const std::string& v) { c.n = parse_u64(v); }},
      {"n_rep", [](ExperimentConfig& c, const std::string& v) { c.n_rep = parse_u64(v); }},
      {"inits", [](ExperimentConfig& c, const std::string& v) { c.inits = detail::parse_reals(v); }},
      {"master_seed", [](ExperimentConfig& c, const std::string& v) { c.master_seed = parse_u64(v); }},
      {"output_path", [](ExperimentConfig& c, const std::string& v) { c.output_path = v; }},
      {"workers",
       [](ExperimentConfig& c, const std::string& v) {
         auto w = parse_u64(v);
         if (w == 0 || w > 4096) throw std::invalid_argument("workers must be in [1, 4096]");
         c.workers = static_cast<unsigned>(w);
       }},
      {"proposal_sd", [](ExperimentConfig& c, const std::string& v) { c.proposal_sd = detail::parse_real(v); }},
      {"truncated", [](ExperimentConfig& c, const std::string& v) { c.truncated = parse_bool(v); }},
      {"time_grid", [](ExperimentConfig& c, const std::string& v) { c.time_grid = detail::parse_reals(v); }},
      {"degenerate_threshold",
       [](ExperimentConfig& c, const std::string& v) { c.degenerate_threshold = detail::parse_real(v); }},
      {"path_output", [](ExperimentConfig& c, const std::string& v) { c.path_output = v; }},
      {"jump_budget", [](ExperimentConfig& c, const std::string& v) { c.jump_budget = parse_u64(v); }},
  };
  return table;
}

std::string reals(const std::vector<double>& v) { return fmt::format("{:.17g}", fmt::join(v, ",")); }

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kind_names())
    if (k == kind) return name;
  return "Custom";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  auto it = kind_names().find(text);
  if (it == kind_names().end()) throw std::invalid_argument(fmt::format("unknown experiment '{}'", text));
  return it->second;
}

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}: {}", line, field, message)
                                  : fmt::format("{}: {}", field, message)),
      line_(line),
      field_(std::move(field)) {}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, line, "expected 'key = value'");
    auto key = detail::trim(std::string_view(line).substr(0, eq));
    auto value = detail::trim(std::string_view(line).substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line_no, key, "unknown key");
    if (!seen.emplace(key, line_no).second) throw ConfigError(line_no, key, "duplicate key");
    try {
      it->second(config, value);
    } catch (const std::exception& e) {
      throw ConfigError(line_no, key, e.what());
    }
  }
  try {
    validate(config);
  } catch (const ConfigError& e) {
    auto it = seen.find(e.field());
    if (e.line() == 0 && it != seen.end()) {
      std::string msg = e.what();
      throw ConfigError(it->second, e.field(), msg.substr(e.field().size() + 2));
    }
    throw;
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, path, "cannot open config file");
  return parse_config(in);
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& field, const std::string& msg) { throw ConfigError(0, field, msg); };
  std::optional<Target> target;
  try {
    target = Target::parse(c.target);
  } catch (const std::exception& e) {
    fail("target", e.what());
  }
  for (double beta : c.betas) {
    try {
      Trial(*target, Tempered{beta});
    } catch (const std::exception& e) {
      fail("betas", e.what());
    }
  }
  for (const auto& f : c.functions) {
    try {
      TestFunction::parse(f);
    } catch (const std::exception& e) {
      fail("functions", e.what());
    }
  }
  if (c.n_rep == 0) fail("n_rep", "must be at least 1");
  if (c.jump_budget == 0) fail("jump_budget", "must be at least 1");
  if (!(c.proposal_sd > 0.0) || !std::isfinite(c.proposal_sd)) fail("proposal_sd", "must be positive and finite");
  if (!(c.degenerate_threshold >= 0.0 && c.degenerate_threshold <= 1.0))
    fail("degenerate_threshold", "must lie in [0, 1]");
  for (double x : c.inits)
    if (!std::isfinite(x)) fail("inits", "initial states must be finite");
  if (!std::is_sorted(c.time_grid.begin(), c.time_grid.end()) ||
      std::any_of(c.time_grid.begin(), c.time_grid.end(), [](double t) { return !(t >= 0.0) || !std::isfinite(t); }))
    fail("time_grid", "must be finite, non-negative and sorted");
  if (c.output_path.empty()) fail("output_path", "must not be empty");

  const bool chain = c.experiment == ExperimentKind::Table1_MCMC || c.experiment == ExperimentKind::Fig2_Variance ||
                     c.experiment == ExperimentKind::Custom;
  if (c.experiment == ExperimentKind::Table1_IS || chain) {
    if (c.betas.empty()) fail("betas", "at least one beta is required");
    if (c.functions.empty()) fail("functions", "at least one function is required");
    if (target->is_discrete()) fail("target", "this experiment needs a continuous target");
  }
  if (chain) {
    if (c.n == 0) fail("n", "must be at least 1");
    if (c.inits.empty()) fail("inits", "at least one initial state is required");
  }
  if (c.experiment == ExperimentKind::Fig1_KS) {
    if (c.betas.empty()) fail("betas", "at least one beta is required");
    if (c.inits.size() < 2) fail("inits", "need at least two initial states to compare");
    if (target->is_discrete()) fail("target", "KS curves need a continuous target");
  }
  if (c.experiment == ExperimentKind::RiskFinite) {
    if (!target->is_discrete()) fail("target", "risk computation needs a finite target");
    if (c.trial) {
      try {
        auto q = Target::parse(*c.trial);
        if (!q.is_discrete() || q.atom_count() != target->atom_count())
          fail("trial", "must be finite with as many atoms as the target");
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        fail("trial", e.what());
      }
    }
  }
  if (c.path_output && c.experiment != ExperimentKind::Custom) fail("path_output", "only valid for Custom");
}

std::string format_config(const ExperimentConfig& c) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  line("experiment", to_string(c.experiment));
  line("target", c.target);
  if (!c.betas.empty()) line("betas", reals(c.betas));
  if (c.trial) line("trial", *c.trial);
  if (!c.functions.empty()) line("functions", fmt::format("{}", fmt::join(c.functions, ", ")));
  line("n", std::to_string(c.n));
  line("n_rep", std::to_string(c.n_rep));
  if (!c.inits.empty()) line("inits", reals(c.inits));
  line("master_seed", std::to_string(c.master_seed));
  line("output_path", c.output_path);
  line("workers", std::to_string(c.workers));
  line("proposal_sd", fmt::format("{:.17g}", c.proposal_sd));
  line("truncated", c.truncated ? "true" : "false");
  if (!c.time_grid.empty()) line("time_grid", reals(c.time_grid));
  line("degenerate_threshold", fmt::format("{:.17g}", c.degenerate_threshold));
  if (c.path_output) line("path_output", *c.path_output);
  line("jump_budget", std::to_string(c.jump_budget));
  return out;
}

std::size_t smoke_replicates(std::size_t n_rep) { return std::max<std::size_t>(1, n_rep / 20); }

ExperimentConfig preset(ExperimentKind kind, bool smoke) {
  ExperimentConfig c;
  c.experiment = kind;
  const std::vector<std::string> gaussian_functions{"indicator(-2,2)", "power(2)", "power(3)", "power(4)", "log_abs"};
  switch (kind) {
    case ExperimentKind::Table1_IS:
      c.betas = {0.4, 0.7};
      c.functions = gaussian_functions;
      c.output_path = "table1_is.csv";
      break;
    case ExperimentKind::Table1_MCMC:
      c.betas = {1.0, 0.7};
      c.functions = gaussian_functions;
      c.inits = {0.01, 10.0};
      c.output_path = "table1_mcmc.csv";
      break;
    case ExperimentKind::Fig1_KS:
      c.target = "student_t(4)";
      c.betas = {0.55, 0.65};
      c.inits = {0.0, 20.0, 100.0, 500.0};
      c.n_rep = 10000;
      c.proposal_sd = 3.0;
      c.output_path = "fig1_ks.csv";
      break;
    case ExperimentKind::Fig2_Variance:
      c.betas = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
      c.functions = gaussian_functions;
      c.inits = {0.01};
      c.output_path = "fig2_gaussian.csv";
      break;
    case ExperimentKind::RiskFinite:
      c.target = "finite(0.7,0.2,0.1)";
      c.betas = {0.25, 0.5, 0.75, 1.0};
      c.output_path = "risk_finite.csv";
      break;
    case ExperimentKind::DriftVerify:
      c.output_path = "drift.csv";
      break;
    case ExperimentKind::Custom:
      c.betas = {1.0};
      c.functions = {"identity"};
      c.inits = {0.0};
      break;
  }
  if (smoke) c.n_rep = smoke_replicates(c.n_rep);
  return c;
}

ExperimentConfig fig2_t4_preset(bool smoke) {
  ExperimentConfig c = preset(ExperimentKind::Fig2_Variance, smoke);
  c.target = "student_t(4)";
  c.n = 2000;
  c.functions = {"indicator(-2,2)", "indicator(-4,4)", "sqrt_abs", "identity"};
  c.output_path = "fig2_t4.csv";
  return c;
}

}  // namespace tempis::harness
