#include "gts/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "gts/conditions.hpp"
#include "gts/io.hpp"

namespace gts {

namespace {

using nlohmann::json;

constexpr std::uint64_t kMuGenSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kExpertGenSalt = 0xd1b54a32d192ed03ULL;

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::string_view text) {
  char buffer[17] = {};
  const std::uint64_t h = fnv1a64(text);
  for (int i = 0; i < 16; ++i) {
    buffer[15 - i] = "0123456789abcdef"[(h >> (4 * i)) & 0xf];
  }
  return std::string(buffer, 16);
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Collects schema issues instead of bailing at the first one.
struct Issues {
  std::vector<std::string> list;

  void add(std::string_view path, std::string_view what) {
    list.push_back(std::string(path) + ": " + std::string(what));
  }
  void raise_if_any() const {
    if (!list.empty()) throw ConfigError(list);
  }
};

bool want_number(const json& v) { return v.is_number(); }

double get_number(const json& obj, std::string_view key, double fallback, std::string_view path,
                  Issues& issues) {
  if (!obj.contains(key)) return fallback;
  if (!want_number(obj.at(std::string(key)))) {
    issues.add(std::string(path) + "." + std::string(key), "must be a number");
    return fallback;
  }
  return obj.at(std::string(key)).get<double>();
}

std::int64_t get_int(const json& obj, std::string_view key, std::int64_t fallback,
                     std::string_view path, Issues& issues) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(std::string(key)).is_number_integer()) {
    issues.add(std::string(path) + "." + std::string(key), "must be an integer");
    return fallback;
  }
  return obj.at(std::string(key)).get<std::int64_t>();
}

std::uint64_t get_seed(const json& obj, std::string_view key, std::uint64_t fallback,
                       std::string_view path, Issues& issues) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(std::string(key)).is_number_integer()) {
    issues.add(std::string(path) + "." + std::string(key), "must be an integer seed");
    return fallback;
  }
  return obj.at(std::string(key)).get<std::uint64_t>();
}

bool get_bool(const json& obj, std::string_view key, bool fallback, std::string_view path,
              Issues& issues) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(std::string(key)).is_boolean()) {
    issues.add(std::string(path) + "." + std::string(key), "must be a boolean");
    return fallback;
  }
  return obj.at(std::string(key)).get<bool>();
}

std::vector<std::vector<double>> get_matrix(const json& value, std::string_view path,
                                            Issues& issues) {
  std::vector<std::vector<double>> rows;
  if (!value.is_array() || value.empty()) {
    issues.add(path, "must be a non-empty array of rows");
    return rows;
  }
  for (std::size_t r = 0; r < value.size(); ++r) {
    const json& row = value[r];
    if (!row.is_array() || row.empty()) {
      issues.add(std::string(path) + "[" + std::to_string(r) + "]",
                 "must be a non-empty array of numbers");
      return {};
    }
    std::vector<double> out;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!want_number(row[c])) {
        issues.add(std::string(path) + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                   "must be a number");
        return {};
      }
      out.push_back(row[c].get<double>());
    }
    rows.push_back(std::move(out));
  }
  return rows;
}

std::vector<double> get_vector(const json& value, std::string_view path, Issues& issues) {
  std::vector<double> out;
  if (!value.is_array() || value.empty()) {
    issues.add(path, "must be a non-empty array of numbers");
    return out;
  }
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!want_number(value[i])) {
      issues.add(std::string(path) + "[" + std::to_string(i) + "]", "must be a number");
      return {};
    }
    out.push_back(value[i].get<double>());
  }
  return out;
}

// Validates a probability vector; returns false and records issues on error.
bool check_prior(const std::vector<double>& prior, int expected_size, std::string_view path,
                 Issues& issues, bool allow_zero) {
  if (static_cast<int>(prior.size()) != expected_size) {
    std::ostringstream msg;
    msg << "length " << prior.size() << " does not match " << expected_size << " experts";
    issues.add(path, msg.str());
    return false;
  }
  double sum = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double lo = allow_zero ? 0.0 : std::numeric_limits<double>::min();
    if (!(prior[i] >= lo) || !std::isfinite(prior[i])) {
      issues.add(std::string(path) + "[" + std::to_string(i) + "]",
                 allow_zero ? "must be finite and nonnegative" : "must be finite and positive");
      ok = false;
    }
    sum += prior[i];
  }
  if (ok && std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "entries must sum to 1 within 1e-12 (got " << sum << ")";
    issues.add(path, msg.str());
    ok = false;
  }
  return ok;
}

struct ParsedLoss {
  LossSpec spec;
  json echo;
};

ParsedLoss parse_loss(const json& run, Issues& issues) {
  ParsedLoss out;
  out.spec = LossSpec::square();
  if (!run.contains("loss")) {
    out.echo = {{"kind", "square"}};
    return out;
  }
  const json& loss = run.at("loss");
  if (!loss.is_object() || !loss.contains("kind") || !loss.at("kind").is_string()) {
    issues.add("run.loss", "must be an object with a string field 'kind'");
    out.echo = {{"kind", "square"}};
    return out;
  }
  const std::string kind = loss.at("kind").get<std::string>();
  if (kind == "square") {
    out.spec = LossSpec::square();
    out.echo = {{"kind", "square"}};
  } else if (kind == "normalized-log") {
    if (!loss.contains("beta") || !want_number(loss.at("beta"))) {
      issues.add("run.loss.beta", "normalized-log loss requires a numeric beta");
      return out;
    }
    const double beta = loss.at("beta").get<double>();
    if (!(beta > 0.0)) {
      issues.add("run.loss.beta", "must be positive");
      return out;
    }
    out.spec = LossSpec::normalized_log(beta);
    out.echo = {{"kind", "normalized-log"}, {"beta", beta}};
  } else if (kind == "raw-log") {
    out.spec = LossSpec::raw_log();
    out.echo = {{"kind", "raw-log"}};
  } else {
    issues.add("run.loss.kind", "must be one of square, normalized-log, raw-log");
    out.echo = {{"kind", "square"}};
  }
  return out;
}

struct ParsedSource {
  ContextSource source;
  json echo;
};

ParsedSource parse_context_source(const json& env, Issues& issues) {
  ParsedSource out;
  out.echo = "iid-uniform";
  if (!env.contains("context_source")) return out;
  const json& src = env.at("context_source");
  if (src.is_string()) {
    const std::string kind = src.get<std::string>();
    if (kind == "iid-uniform") {
      out.source.kind = ContextSource::Kind::kIidUniform;
    } else if (kind == "fixed-cycle") {
      out.source.kind = ContextSource::Kind::kFixedCycle;
    } else {
      issues.add("environment.context_source",
                 "must be iid-uniform, fixed-cycle, or an explicit-sequence object");
      return out;
    }
    out.echo = kind;
    return out;
  }
  if (src.is_object() && src.contains("kind") && src.at("kind").is_string() &&
      src.at("kind").get<std::string>() == "explicit-sequence") {
    if (!src.contains("sequence") || !src.at("sequence").is_array() ||
        src.at("sequence").empty()) {
      issues.add("environment.context_source.sequence", "must be a non-empty array of context ids");
      return out;
    }
    out.source.kind = ContextSource::Kind::kExplicitSequence;
    for (std::size_t i = 0; i < src.at("sequence").size(); ++i) {
      const json& v = src.at("sequence")[i];
      if (!v.is_number_integer()) {
        issues.add("environment.context_source.sequence[" + std::to_string(i) + "]",
                   "must be an integer context id");
        return out;
      }
      out.source.sequence.push_back(v.get<int>());
    }
    out.echo = {{"kind", "explicit-sequence"}, {"sequence", out.source.sequence}};
    return out;
  }
  issues.add("environment.context_source",
             "must be iid-uniform, fixed-cycle, or an explicit-sequence object");
  return out;
}

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
};

Summary summarize_samples(const std::vector<double>& samples) {
  Summary s;
  for (double v : samples) s.mean += v;
  s.mean /= static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double sq = 0.0;
    for (double v : samples) sq += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(sq / (static_cast<double>(samples.size()) - 1.0) /
                            static_cast<double>(samples.size()));
  }
  return s;
}

json bound_report_json(const BoundReport& report) {
  return {{"lemma1", report.lemma1},       {"corollary1", report.corollary1},
          {"corollary2", report.corollary2}, {"entropy", report.entropy},
          {"kl_prior", report.kl_prior},   {"kappa1", report.kappa1},
          {"kappa2", report.kappa2}};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&issues] {
        std::string msg = "invalid config:";
        for (const std::string& issue : issues) msg += "\n  - " + issue;
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentConfig parse_config(const std::string& json_text, const CliOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("document is not valid JSON: ") + e.what()});
  }
  Issues issues;
  if (!doc.is_object()) {
    issues.add("$", "top-level document must be a JSON object");
    issues.raise_if_any();
  }

  // --- environment -------------------------------------------------------
  if (!doc.contains("environment") || !doc.at("environment").is_object()) {
    issues.add("environment", "required object with either 'mu' or 'generate'");
    issues.raise_if_any();
  }
  const json& env_doc = doc.at("environment");
  const std::uint64_t env_seed = get_seed(env_doc, "seed", 0, "environment", issues);
  const ParsedSource source = parse_context_source(env_doc, issues);

  const json& experts_doc =
      doc.contains("experts") && doc.at("experts").is_object() ? doc.at("experts") : json::object();
  if (doc.contains("experts") && !doc.at("experts").is_object()) {
    issues.add("experts", "must be an object");
  }
  const double margin =
      get_number(experts_doc, "clamp_margin", kDefaultPredictionMargin, "experts", issues);
  if (!(margin > 0.0 && margin < 0.5)) issues.add("experts.clamp_margin", "must lie in (0, 0.5)");

  json env_echo = {{"seed", env_seed}, {"context_source", source.echo}};
  std::optional<Table> mu;
  if (env_doc.contains("mu")) {
    const std::vector<std::vector<double>> rows = get_matrix(env_doc.at("mu"), "environment.mu", issues);
    if (!rows.empty()) {
      bool rectangular = true;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) {
          issues.add("environment.mu[" + std::to_string(r) + "]",
                     "row length differs from row 0");
          rectangular = false;
        }
      }
      if (rectangular) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
          for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (!(rows[r][c] > 0.0 && rows[r][c] < 1.0)) {
              std::ostringstream msg;
              msg << "value " << rows[r][c] << " must lie strictly inside (0, 1)";
              issues.add(
                  "environment.mu[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                  msg.str());
            }
          }
        }
        if (issues.list.empty()) mu = Table::from_rows(rows);
        env_echo["mu"] = rows;
      }
    }
  } else if (env_doc.contains("generate") && env_doc.at("generate").is_object()) {
    const json& gen = env_doc.at("generate");
    const std::int64_t num_contexts =
        get_int(gen, "num_contexts", 1, "environment.generate", issues);
    const std::int64_t num_arms = get_int(gen, "num_arms", 2, "environment.generate", issues);
    const std::uint64_t gen_seed =
        get_seed(gen, "seed", env_seed, "environment.generate", issues);
    if (num_contexts < 1) issues.add("environment.generate.num_contexts", "must be at least 1");
    if (num_arms < 1) issues.add("environment.generate.num_arms", "must be at least 1");
    if (issues.list.empty()) {
      Table table(static_cast<int>(num_contexts), static_cast<int>(num_arms));
      Rng rng(mix_seeds(gen_seed, kMuGenSalt));
      for (int x = 0; x < table.num_contexts(); ++x) {
        for (int a = 0; a < table.num_arms(); ++a) {
          table(x, a) = margin + rng.uniform() * (1.0 - 2.0 * margin);
        }
      }
      mu = std::move(table);
      env_echo["generate"] = {{"num_contexts", num_contexts},
                              {"num_arms", num_arms},
                              {"seed", gen_seed}};
    }
  } else {
    issues.add("environment", "needs either an explicit 'mu' table or a 'generate' block");
  }
  issues.raise_if_any();
  env_echo["num_contexts"] = mu->num_contexts();
  env_echo["num_arms"] = mu->num_arms();

  // --- experts ------------------------------------------------------------
  std::vector<Expert> experts;
  json experts_echo = {{"clamp_margin", margin}};
  auto make_expert = [&](const std::vector<std::vector<double>>& rows, std::string_view path) {
    try {
      experts.emplace_back(Table::from_rows(rows), margin);
    } catch (const std::exception& e) {
      issues.add(path, e.what());
    }
  };
  if (experts_doc.contains("tables")) {
    const json& tables = experts_doc.at("tables");
    if (!tables.is_array() || tables.empty()) {
      issues.add("experts.tables", "must be a non-empty array of prediction tables");
    } else {
      for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::string path = "experts.tables[" + std::to_string(i) + "]";
        const std::vector<std::vector<double>> rows = get_matrix(tables[i], path, issues);
        if (!rows.empty()) make_expert(rows, path);
      }
      if (issues.list.empty()) {
        if (!(experts.front().predictions() == *mu)) {
          issues.add("experts.tables[0]",
                     "the first expert must equal environment.mu exactly (realizability)");
        }
        experts_echo["tables"] = tables;
      }
    }
  } else {
    // Default: the truth expert alone, optionally joined by generated
    // perturbations of the truth.
    try {
      experts.emplace_back(*mu, margin);
    } catch (const std::exception& e) {
      issues.add("environment.mu", std::string("truth expert rejects mu: ") + e.what());
    }
    std::int64_t count = 1;
    double magnitude = 0.1;
    std::uint64_t expert_seed = 0;
    if (experts_doc.contains("generate") && experts_doc.at("generate").is_object()) {
      const json& gen = experts_doc.at("generate");
      count = get_int(gen, "count", 1, "experts.generate", issues);
      magnitude = get_number(gen, "magnitude", 0.1, "experts.generate", issues);
      expert_seed = get_seed(gen, "seed", 0, "experts.generate", issues);
      if (count < 1) issues.add("experts.generate.count", "must be at least 1");
      if (!(magnitude >= 0.0)) issues.add("experts.generate.magnitude", "must be nonnegative");
      if (gen.contains("mode") &&
          (!gen.at("mode").is_string() ||
           gen.at("mode").get<std::string>() != "perturbation-of-truth")) {
        issues.add("experts.generate.mode", "only perturbation-of-truth is supported");
      }
      if (issues.list.empty()) {
        Rng rng(mix_seeds(expert_seed, kExpertGenSalt));
        for (std::int64_t i = 1; i < count; ++i) {
          Table table = *mu;
          for (int x = 0; x < table.num_contexts(); ++x) {
            for (int a = 0; a < table.num_arms(); ++a) {
              const double noisy = table(x, a) + magnitude * (2.0 * rng.uniform() - 1.0);
              table(x, a) = std::clamp(noisy, margin, 1.0 - margin);
            }
          }
          experts.emplace_back(std::move(table), margin);
        }
        experts_echo["generate"] = {{"count", count},
                                    {"mode", "perturbation-of-truth"},
                                    {"magnitude", magnitude},
                                    {"seed", expert_seed}};
      }
    }
  }
  issues.raise_if_any();
  const int num_experts = static_cast<int>(experts.size());
  experts_echo["count"] = num_experts;

  // --- run ----------------------------------------------------------------
  const json& run_doc = doc.contains("run") && doc.at("run").is_object() ? doc.at("run")
                                                                         : json::object();
  if (doc.contains("run") && !doc.at("run").is_object()) issues.add("run", "must be an object");

  ExperimentConfig cfg(Environment(std::move(*mu), source.source, env_seed),
                       ExpertSet(std::move(experts)));

  const ParsedLoss loss = parse_loss(run_doc, issues);
  cfg.run.loss = loss.spec;
  cfg.run.horizon = get_int(run_doc, "horizon", 1000, "run", issues);
  if (cfg.run.horizon < 1) issues.add("run.horizon", "must be at least 1");
  cfg.run.seed = get_seed(run_doc, "seed", 0, "run", issues);
  cfg.num_seeds = static_cast<int>(get_int(run_doc, "num_seeds", 1, "run", issues));
  if (cfg.num_seeds < 1) issues.add("run.num_seeds", "must be at least 1");
  if (overrides.num_seeds) {
    cfg.num_seeds = *overrides.num_seeds;
    if (cfg.num_seeds < 1) issues.add("--seeds", "must be at least 1");
  }
  cfg.run.snapshot_weights = get_bool(run_doc, "snapshot_weights", false, "run", issues);
  if (overrides.snapshot_weights) cfg.run.snapshot_weights = *overrides.snapshot_weights;
  cfg.run.snapshot_stride = get_int(run_doc, "snapshot_stride", 1, "run", issues);
  if (cfg.run.snapshot_stride < 1) issues.add("run.snapshot_stride", "must be at least 1");

  // check section first: the kappa2 grid resolution feeds auto eta.
  const json& check_doc = doc.contains("check") && doc.at("check").is_object() ? doc.at("check")
                                                                               : json::object();
  if (doc.contains("check") && !doc.at("check").is_object()) {
    issues.add("check", "must be an object");
  }
  cfg.grid_resolution =
      static_cast<int>(get_int(check_doc, "grid_resolution", 199, "check", issues));
  if (overrides.grid_resolution) cfg.grid_resolution = *overrides.grid_resolution;
  if (cfg.grid_resolution < 1) issues.add("check.grid_resolution", "must be at least 1");
  cfg.sweep_resolution =
      static_cast<int>(get_int(check_doc, "sweep_resolution", 1001, "check", issues));
  if (cfg.sweep_resolution < 2) issues.add("check.sweep_resolution", "must be at least 2");
  if (check_doc.contains("f_values")) {
    cfg.check_f_values = get_vector(check_doc.at("f_values"), "check.f_values", issues);
    for (std::size_t i = 0; i < cfg.check_f_values.size(); ++i) {
      if (!(cfg.check_f_values[i] > 0.0 && cfg.check_f_values[i] < 1.0)) {
        issues.add("check.f_values[" + std::to_string(i) + "]",
                   "must lie strictly inside (0, 1)");
      }
    }
  } else {
    cfg.check_f_values = {0.5};
  }
  issues.raise_if_any();

  // gamma
  std::string gamma_source = "explicit";
  if (!run_doc.contains("gamma") ||
      (run_doc.at("gamma").is_string() && run_doc.at("gamma").get<std::string>() == "auto")) {
    cfg.gamma_is_auto = true;
    gamma_source = "auto";
    cfg.run.gamma = recommended_gamma(cfg.environment.num_arms(), cfg.run.horizon);
  } else if (want_number(run_doc.at("gamma"))) {
    cfg.run.gamma = run_doc.at("gamma").get<double>();
    if (!(cfg.run.gamma >= 0.0 && cfg.run.gamma <= 1.0)) {
      issues.add("run.gamma", "must lie in [0, 1]");
    }
  } else {
    issues.add("run.gamma", "must be a number or \"auto\"");
  }

  // kappa2 for bounds and auto eta
  if (cfg.run.loss.kind == LossKind::kSquare) {
    cfg.kappa2 = 4.0;
  } else if (cfg.run.loss.kind == LossKind::kNormalizedLog) {
    try {
      cfg.kappa2 = estimate_kappa2(cfg.run.loss, cfg.grid_resolution);
    } catch (const std::exception& e) {
      issues.add("run.loss", std::string("kappa2 estimation failed: ") + e.what());
    }
  }

  // eta
  std::string eta_source = "explicit";
  if (!run_doc.contains("eta") ||
      (run_doc.at("eta").is_string() && run_doc.at("eta").get<std::string>() == "auto")) {
    cfg.eta_is_auto = true;
    eta_source = "auto";
    // raw-log realizes the Thompson Sampling special case, whose update uses
    // a unit learning rate.
    cfg.run.eta = cfg.run.loss.kind == LossKind::kRawLog || !std::isfinite(cfg.kappa2)
                      ? 1.0
                      : recommended_eta(cfg.kappa2);
  } else if (want_number(run_doc.at("eta"))) {
    cfg.run.eta = run_doc.at("eta").get<double>();
    if (!(cfg.run.eta >= 0.0) || !std::isfinite(cfg.run.eta)) {
      issues.add("run.eta", "must be finite and nonnegative");
    }
  } else {
    issues.add("run.eta", "must be a number or \"auto\"");
  }

  // prior
  if (!run_doc.contains("prior") ||
      (run_doc.at("prior").is_string() && run_doc.at("prior").get<std::string>() == "uniform")) {
    cfg.run.prior.assign(static_cast<std::size_t>(num_experts), 1.0 / num_experts);
  } else if (run_doc.at("prior").is_array()) {
    cfg.run.prior = get_vector(run_doc.at("prior"), "run.prior", issues);
    check_prior(cfg.run.prior, num_experts, "run.prior", issues, /*allow_zero=*/true);
  } else {
    issues.add("run.prior", "must be an array or \"uniform\"");
  }

  // --- sweep ---------------------------------------------------------------
  if (doc.contains("sweep")) {
    const json& sweep = doc.at("sweep");
    if (!sweep.is_object()) {
      issues.add("sweep", "must be an object");
    } else {
      if (sweep.contains("horizons")) {
        for (double v : get_vector(sweep.at("horizons"), "sweep.horizons", issues)) {
          if (v < 1 || v != std::floor(v)) {
            issues.add("sweep.horizons", "entries must be positive integers");
            break;
          }
          cfg.sweep_horizons.push_back(static_cast<std::int64_t>(v));
        }
      }
      if (sweep.contains("etas")) {
        cfg.sweep_etas = get_vector(sweep.at("etas"), "sweep.etas", issues);
        for (double v : cfg.sweep_etas) {
          if (!(v >= 0.0)) issues.add("sweep.etas", "entries must be nonnegative");
        }
      }
      if (sweep.contains("gammas")) {
        cfg.sweep_gammas = get_vector(sweep.at("gammas"), "sweep.gammas", issues);
        for (double v : cfg.sweep_gammas) {
          if (!(v >= 0.0 && v <= 1.0)) issues.add("sweep.gammas", "entries must lie in [0, 1]");
        }
      }
      if (sweep.contains("priors")) {
        const json& priors = sweep.at("priors");
        if (!priors.is_array() || priors.empty()) {
          issues.add("sweep.priors", "must be a non-empty array of probability vectors");
        } else {
          for (std::size_t i = 0; i < priors.size(); ++i) {
            const std::string path = "sweep.priors[" + std::to_string(i) + "]";
            std::vector<double> prior = get_vector(priors[i], path, issues);
            if (check_prior(prior, num_experts, path, issues, /*allow_zero=*/true)) {
              cfg.sweep_priors.push_back(std::move(prior));
            }
          }
        }
      }
    }
  }

  // --- bayes ---------------------------------------------------------------
  if (doc.contains("bayes")) {
    const json& bayes = doc.at("bayes");
    if (!bayes.is_object()) {
      issues.add("bayes", "must be an object");
    } else {
      cfg.bayes_num_draws = static_cast<int>(get_int(bayes, "num_draws", 8, "bayes", issues));
      if (cfg.bayes_num_draws < 1) issues.add("bayes.num_draws", "must be at least 1");
      if (bayes.contains("true_prior") && !(bayes.at("true_prior").is_string() &&
                                            bayes.at("true_prior").get<std::string>() ==
                                                "uniform")) {
        cfg.bayes_true_prior = get_vector(bayes.at("true_prior"), "bayes.true_prior", issues);
        check_prior(cfg.bayes_true_prior, num_experts, "bayes.true_prior", issues,
                    /*allow_zero=*/true);
      }
    }
  }
  if (cfg.bayes_true_prior.empty()) {
    cfg.bayes_true_prior.assign(static_cast<std::size_t>(num_experts), 1.0 / num_experts);
  }
  issues.raise_if_any();

  // --- warnings ------------------------------------------------------------
  if (cfg.run.loss.kind == LossKind::kRawLog &&
      (cfg.run.eta != 1.0 || cfg.run.gamma != 0.0)) {
    cfg.warnings.push_back(
        "raw-log loss with eta != 1 or gamma != 0 leaves the Thompson Sampling special case; "
        "its shifted loss is unbounded and no regret bound applies");
  }
  if (cfg.run.loss.kind == LossKind::kNormalizedLog) {
    const BetaCompatReport compat = validate_beta_compatibility(cfg.experts, cfg.run.loss.beta);
    if (!compat.pass) {
      std::ostringstream msg;
      msg << "expert set is not beta-compatible: max |log-ratio| = " << compat.max_abs_log_ratio
          << " at (expert " << compat.worst_expert << ", context " << compat.worst_context
          << ", arm " << compat.worst_arm
          << "); minimal admissible beta = " << compat.min_admissible_beta;
      cfg.warnings.push_back(msg.str());
    }
  }

  // --- resolved echo ---------------------------------------------------------
  json resolved;
  resolved["environment"] = env_echo;
  resolved["experts"] = experts_echo;
  resolved["run"] = {{"horizon", cfg.run.horizon},
                     {"loss", loss.echo},
                     {"eta", cfg.run.eta},
                     {"eta_source", eta_source},
                     {"gamma", cfg.run.gamma},
                     {"gamma_source", gamma_source},
                     {"prior", cfg.run.prior},
                     {"seed", cfg.run.seed},
                     {"num_seeds", cfg.num_seeds},
                     {"snapshot_weights", cfg.run.snapshot_weights},
                     {"snapshot_stride", cfg.run.snapshot_stride}};
  if (std::isfinite(cfg.kappa2)) resolved["run"]["kappa2"] = cfg.kappa2;
  if (!cfg.sweep_horizons.empty()) resolved["sweep"]["horizons"] = cfg.sweep_horizons;
  if (!cfg.sweep_etas.empty()) resolved["sweep"]["etas"] = cfg.sweep_etas;
  if (!cfg.sweep_gammas.empty()) resolved["sweep"]["gammas"] = cfg.sweep_gammas;
  if (!cfg.sweep_priors.empty()) resolved["sweep"]["priors"] = cfg.sweep_priors;
  resolved["bayes"] = {{"true_prior", cfg.bayes_true_prior}, {"num_draws", cfg.bayes_num_draws}};
  resolved["check"] = {{"grid_resolution", cfg.grid_resolution},
                       {"sweep_resolution", cfg.sweep_resolution},
                       {"f_values", cfg.check_f_values}};
  resolved["warnings"] = cfg.warnings;
  resolved["config_hash"] = hash_hex(resolved.dump());
  cfg.resolved_json = resolved.dump();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const CliOverrides& overrides) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_config(buffer.str(), overrides);
}

namespace {

json resolved_object(const ExperimentConfig& cfg) { return json::parse(cfg.resolved_json); }

double try_bound(const std::function<double()>& fn) {
  try {
    return fn();
  } catch (const std::exception&) {
    return nan_value();
  }
}

int command_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::vector<double> finals;
  std::vector<double> totals;
  for (int k = 0; k < cfg.num_seeds; ++k) {
    RunConfig rc = cfg.run;
    rc.seed = cfg.run.seed + static_cast<std::uint64_t>(k);
    const RunTrace trace = run_episode(cfg.environment, cfg.experts, rc);
    finals.push_back(cumulative_regret(trace).back());
    totals.push_back(average_shifted_loss_total(trace));
    std::ostringstream name;
    name << "trace_seed" << rc.seed << ".csv";
    write_text_file(out_dir / name.str(), trace_csv(trace, cfg.resolved_json));
  }
  const Summary regret = summarize_samples(finals);
  const Summary shifted = summarize_samples(totals);

  json summary;
  summary["command"] = "run";
  summary["config"] = resolved_object(cfg);
  summary["results"] = {{"num_seeds", cfg.num_seeds},
                        {"mean_regret", regret.mean},
                        {"std_error", regret.std_error},
                        {"ci_low", regret.mean - 1.96 * regret.std_error},
                        {"ci_high", regret.mean + 1.96 * regret.std_error},
                        {"per_seed_final_regret", finals},
                        {"mean_average_shifted_loss_total", shifted.mean},
                        {"per_seed_average_shifted_loss_total", totals}};
  if (cfg.run.loss.kind != LossKind::kRawLog && cfg.run.gamma > 0.0) {
    summary["bounds"] = bound_report_json(
        make_bound_report(cfg.run.loss, cfg.environment.num_arms(), cfg.run.gamma,
                          cfg.run.horizon, cfg.run.prior, cfg.experts.truth_index(), cfg.kappa2));
  } else {
    summary["bounds"] = nullptr;
  }
  write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int command_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                  int parallelism) {
  const std::vector<std::int64_t> horizons =
      cfg.sweep_horizons.empty() ? std::vector<std::int64_t>{cfg.run.horizon}
                                 : cfg.sweep_horizons;
  const std::vector<double> etas =
      cfg.sweep_etas.empty() ? std::vector<double>{cfg.run.eta} : cfg.sweep_etas;
  const std::vector<std::vector<double>> priors =
      cfg.sweep_priors.empty() ? std::vector<std::vector<double>>{cfg.run.prior}
                               : cfg.sweep_priors;

  std::string csv = "# config: " + cfg.resolved_json + "\n";
  csv +=
      "config_hash,T,K,N,loss,eta,gamma,p1,mean_regret,ci_low,ci_high,lemma1_bound,"
      "corollary1_bound\n";

  const int num_arms = cfg.environment.num_arms();
  for (const std::int64_t horizon : horizons) {
    std::vector<double> gammas = cfg.sweep_gammas;
    if (gammas.empty()) {
      gammas.push_back(cfg.gamma_is_auto ? recommended_gamma(num_arms, horizon) : cfg.run.gamma);
    }
    for (const double eta : etas) {
      for (const double gamma : gammas) {
        for (const std::vector<double>& prior : priors) {
          RunConfig rc = cfg.run;
          rc.horizon = horizon;
          rc.eta = eta;
          rc.gamma = gamma;
          rc.prior = prior;
          rc.snapshot_weights = false;

          json cell = resolved_object(cfg);
          cell["run"]["horizon"] = horizon;
          cell["run"]["eta"] = eta;
          cell["run"]["gamma"] = gamma;
          cell["run"]["prior"] = prior;
          cell.erase("config_hash");
          const std::string cell_hash = hash_hex(cell.dump());

          const RegretEstimate est =
              mean_regret(cfg.environment, cfg.experts, rc, cfg.num_seeds, parallelism);
          const double p1 = prior[static_cast<std::size_t>(cfg.experts.truth_index())];
          double lemma1 = nan_value();
          double corollary1 = nan_value();
          if (cfg.run.loss.kind != LossKind::kRawLog) {
            lemma1 = try_bound([&] { return lemma1_bound(cfg.kappa2, p1); });
            corollary1 = try_bound([&] {
              const double kappa1 = cfg.run.loss.kind == LossKind::kSquare
                                        ? square_loss_kappa1(num_arms, gamma)
                                        : log_loss_kappa1(num_arms, cfg.run.loss.beta, gamma);
              return corollary1_bound(kappa1, cfg.kappa2, gamma, horizon, p1);
            });
          }

          csv += cell_hash;
          csv += ',';
          csv += std::to_string(horizon);
          csv += ',';
          csv += std::to_string(num_arms);
          csv += ',';
          csv += std::to_string(cfg.experts.size());
          csv += ',';
          csv += loss_kind_name(cfg.run.loss.kind);
          csv += ',';
          csv += format_double(eta);
          csv += ',';
          csv += format_double(gamma);
          csv += ',';
          csv += format_double(p1);
          csv += ',';
          csv += format_double(est.mean);
          csv += ',';
          csv += format_double(est.ci_low);
          csv += ',';
          csv += format_double(est.ci_high);
          csv += ',';
          csv += format_double(lemma1);
          csv += ',';
          csv += format_double(corollary1);
          csv += '\n';
        }
      }
    }
  }
  write_text_file(out_dir / "summary.csv", csv);
  return 0;
}

int command_bayes(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                  int parallelism) {
  double kappa1 = nan_value();
  if (cfg.run.loss.kind != LossKind::kRawLog && cfg.run.gamma > 0.0) {
    kappa1 = cfg.run.loss.kind == LossKind::kSquare
                 ? square_loss_kappa1(cfg.environment.num_arms(), cfg.run.gamma)
                 : log_loss_kappa1(cfg.environment.num_arms(), cfg.run.loss.beta, cfg.run.gamma);
  }
  BayesConfig bayes{cfg.bayes_true_prior, cfg.bayes_num_draws, std::max(2, cfg.num_seeds)};
  const BayesResult result = bayes_regret_experiment(cfg.environment, cfg.experts, cfg.run, bayes,
                                                     kappa1, cfg.kappa2, parallelism);

  json out;
  out["command"] = "bayes";
  out["config"] = resolved_object(cfg);
  out["bayes"] = {{"true_prior", bayes.true_prior},
                  {"num_draws", bayes.num_draws},
                  {"num_seeds_per_draw", bayes.num_seeds_per_draw},
                  {"common_random_numbers", true}};
  out["results"] = {{"mean_regret", result.regret.mean},
                    {"std_error", result.regret.std_error},
                    {"ci_low", result.regret.ci_low},
                    {"ci_high", result.regret.ci_high},
                    {"per_draw_mean_regret", result.per_draw_mean_regret},
                    {"drawn_truth_indices", result.drawn_truth_indices},
                    {"entropy_true_prior", result.entropy_true_prior},
                    {"kl_true_vs_algorithm", result.kl_true_vs_algorithm},
                    {"corollary2_bound", result.corollary2}};
  write_text_file(out_dir / "bayes.json", out.dump(2) + "\n");
  return 0;
}

int command_check(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const WeightState state(cfg.run.prior, cfg.run.eta, cfg.run.gamma);
  const ConditionReport report = check_conditions(cfg.experts, cfg.environment, cfg.run.loss,
                                                  cfg.run.gamma, cfg.grid_resolution, &state);

  json out;
  out["command"] = "check";
  out["config"] = resolved_object(cfg);
  out["conditions"] = {{"c1_min_expected", report.c1_min_expected},
                       {"c2_max_ratio_floor", report.c2_max_ratio_floor},
                       {"c2_max_ratio_realized", report.c2_max_ratio_realized},
                       {"c2_kappa1_required", report.c2_kappa1_required},
                       {"c2_kappa1_analytic", report.c2_kappa1_analytic},
                       {"c3_max_abs", report.c3_max_abs},
                       {"c4_kappa2_estimate", report.c4_kappa2_estimate},
                       {"pass_c1", report.pass_c1},
                       {"pass_c2", report.pass_c2},
                       {"pass_c3", report.pass_c3},
                       {"pass_c4", report.pass_c4},
                       {"bounds_checked", report.bounds_checked},
                       {"pass", report.all_pass()}};
  if (cfg.run.loss.kind == LossKind::kNormalizedLog) {
    const BetaCompatReport compat = validate_beta_compatibility(cfg.experts, cfg.run.loss.beta);
    out["beta_compatibility"] = {{"pass", compat.pass},
                                 {"max_abs_log_ratio", compat.max_abs_log_ratio},
                                 {"min_admissible_beta", compat.min_admissible_beta},
                                 {"worst_expert", compat.worst_expert},
                                 {"worst_context", compat.worst_context},
                                 {"worst_arm", compat.worst_arm}};
  } else {
    out["beta_compatibility"] = nullptr;
  }

  if (cfg.run.loss.kind != LossKind::kSquare) {
    const double beta = cfg.run.loss.kind == LossKind::kNormalizedLog ? cfg.run.loss.beta : 1.0;
    for (const double f : cfg.check_f_values) {
      const FSweep sweep = sweep_F(f, beta, cfg.sweep_resolution);
      std::ostringstream name;
      name << "f_sweep_f" << format_double(f) << ".csv";
      write_text_file(out_dir / name.str(), f_sweep_csv(sweep, cfg.resolved_json));
    }
  }

  write_text_file(out_dir / "conditions.json", out.dump(2) + "\n");
  return report.all_pass() ? 0 : 2;
}

}  // namespace

int run_command(const ExperimentConfig& cfg, Subcommand subcommand,
                const std::filesystem::path& out_dir, int parallelism) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");
  std::filesystem::create_directories(out_dir);
  switch (subcommand) {
    case Subcommand::kRun:
      return command_run(cfg, out_dir);
    case Subcommand::kSweep:
      return command_sweep(cfg, out_dir, parallelism);
    case Subcommand::kBayes:
      return command_bayes(cfg, out_dir, parallelism);
    case Subcommand::kCheck:
      return command_check(cfg, out_dir);
  }
  throw std::logic_error("unknown subcommand");
}

}  // namespace gts
