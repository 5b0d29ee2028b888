#include <cmath>

#include "valtree/dataset.hpp"
#include "valtree/error.hpp"
#include "valtree/rng.hpp"

namespace valtree::data {
namespace {

enum Stream : std::uint64_t { kEffects = 1, kRows = 2 };

std::string level_name(const std::string& var, int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%02d", k + 1);
  return var + buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (n < 1) throw Error(ErrorCode::config, "synth: n must be at least 1");
  if (!(noise_sd >= 0.0)) throw Error(ErrorCode::config, "synth: noise standard deviation must be >= 0");
  if (!(revenue_missing_rate >= 0.0 && revenue_missing_rate < 1.0))
    throw Error(ErrorCode::config, "synth: revenue_missing_rate must lie in [0, 1)");
  for (const auto& c : categoricals) {
    if (c.name.empty()) throw Error(ErrorCode::config, "synth: categorical with empty name");
    if (c.levels < 1) throw Error(ErrorCode::config, "synth: categorical '" + c.name + "' needs >= 1 level");
    if (!(c.effect_sd >= 0.0))
      throw Error(ErrorCode::config, "synth: categorical '" + c.name + "' has negative effect_sd");
    if (!c.effects.empty() && c.effects.size() != static_cast<std::size_t>(c.levels))
      throw Error(ErrorCode::config, "synth: categorical '" + c.name + "' effects must list one value per level");
  }
}

SynthConfig SynthConfig::from_json(const nlohmann::json& doc) {
  SynthConfig cfg;
  if (!doc.is_object()) throw Error(ErrorCode::config, "synth settings must be a JSON object");
  try {
    if (doc.contains("n")) {
      const auto n = doc.at("n").get<long long>();
      if (n < 1) throw Error(ErrorCode::config, "synth: n must be at least 1");
      cfg.n = static_cast<std::size_t>(n);
    }
    cfg.intercept = doc.value("intercept", cfg.intercept);
    cfg.beta_revenue = doc.value("beta_revenue", cfg.beta_revenue);
    cfg.beta_beta = doc.value("beta_beta", cfg.beta_beta);
    cfg.beta_crp = doc.value("beta_crp", cfg.beta_crp);
    cfg.noise_sd = doc.value("noise_sd", cfg.noise_sd);
    cfg.revenue_missing_rate = doc.value("revenue_missing_rate", cfg.revenue_missing_rate);
    if (doc.contains("categoricals")) {
      for (const auto& c : doc.at("categoricals")) {
        PlantedCategorical pc;
        pc.name = c.at("name").get<std::string>();
        pc.levels = c.at("levels").get<int>();
        pc.effect_sd = c.value("effect_sd", pc.effect_sd);
        if (c.contains("effects")) pc.effects = c.at("effects").get<std::vector<double>>();
        cfg.categoricals.push_back(std::move(pc));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config, std::string("synth settings: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json SynthConfig::to_json() const {
  nlohmann::json doc = {{"n", n},
                        {"intercept", intercept},
                        {"beta_revenue", beta_revenue},
                        {"beta_beta", beta_beta},
                        {"beta_crp", beta_crp},
                        {"noise_sd", noise_sd},
                        {"revenue_missing_rate", revenue_missing_rate}};
  auto cats = nlohmann::json::array();
  for (const auto& c : categoricals) {
    nlohmann::json e = {{"name", c.name}, {"levels", c.levels}, {"effect_sd", c.effect_sd}};
    if (!c.effects.empty()) e["effects"] = c.effects;
    cats.push_back(std::move(e));
  }
  doc["categoricals"] = std::move(cats);
  return doc;
}

std::vector<std::vector<double>> planted_effects(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  Engine engine = make_engine(seed, kEffects);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> out;
  for (const auto& c : config.categoricals) {
    std::vector<double> effects(static_cast<std::size_t>(c.levels));
    for (auto& e : effects) e = c.effect_sd * normal(engine);
    if (!c.effects.empty()) effects = c.effects;
    out.push_back(std::move(effects));
  }
  return out;
}

DataTable synth_deals(const SynthConfig& config, std::uint64_t seed) {
  const auto effects = planted_effects(config, seed);
  Engine engine = make_engine(seed, kRows);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t n = config.n;
  std::vector<double> valuation(n), revenue(n), beta(n), crp(n);
  std::vector<std::uint8_t> revenue_missing(n, 0);
  std::vector<std::vector<std::int32_t>> codes(config.categoricals.size(), std::vector<std::int32_t>(n));

  for (std::size_t i = 0; i < n; ++i) {
    const double ln_revenue = 12.0 + 1.5 * normal(engine);
    const double b = 0.5 + 1.5 * unit(engine);
    const double premium = 0.08 * unit(engine);
    double ln_val = config.intercept + config.beta_revenue * ln_revenue +
                    config.beta_beta * std::log(b) + config.beta_crp * premium;
    for (std::size_t c = 0; c < config.categoricals.size(); ++c) {
      const auto level = static_cast<std::int32_t>(
          uniform_index(engine, static_cast<std::uint64_t>(config.categoricals[c].levels)));
      codes[c][i] = level;
      ln_val += effects[c][static_cast<std::size_t>(level)];
    }
    const double noise = normal(engine);
    const double hide = unit(engine);
    ln_val += config.noise_sd * noise;

    valuation[i] = std::exp(ln_val);
    revenue[i] = std::exp(ln_revenue);
    beta[i] = b;
    crp[i] = premium;
    if (hide < config.revenue_missing_rate) revenue_missing[i] = 1;
  }

  std::vector<Column> columns;
  columns.push_back(Column::numeric("valuation", VariableKind::response, std::move(valuation), {}, "EUR"));
  columns.push_back(Column::numeric("revenue", VariableKind::continuous, std::move(revenue),
                                    std::move(revenue_missing), "EUR"));
  columns.push_back(Column::numeric("beta", VariableKind::continuous, std::move(beta), {}, "unlevered sectoral beta"));
  columns.push_back(Column::numeric("crp", VariableKind::continuous, std::move(crp), {}, "fraction"));

  // Levels are recorded in first-appearance order, as load_table would.
  for (std::size_t c = 0; c < config.categoricals.size(); ++c) {
    const auto& spec = config.categoricals[c];
    std::vector<std::int32_t> remap(static_cast<std::size_t>(spec.levels), -1);
    std::vector<std::string> levels;
    std::vector<std::int32_t> recoded(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& slot = remap[static_cast<std::size_t>(codes[c][i])];
      if (slot < 0) {
        slot = static_cast<std::int32_t>(levels.size());
        levels.push_back(level_name(spec.name, codes[c][i]));
      }
      recoded[i] = slot;
    }
    columns.push_back(Column::categorical(spec.name, std::move(levels), std::move(recoded)));
  }
  return DataTable(std::move(columns), "synth_deals(seed=" + std::to_string(seed) + ")");
}

Schema synth_schema(const SynthConfig& config) {
  std::vector<VariableSpec> vars = {
      {"valuation", VariableKind::response, Transform::natural_log, "EUR"},
      {"revenue", VariableKind::continuous, Transform::natural_log, "EUR"},
      {"beta", VariableKind::continuous, Transform::natural_log, "unlevered sectoral beta"},
      {"crp", VariableKind::continuous, Transform::none, "fraction"},
  };
  for (const auto& c : config.categoricals)
    vars.push_back({c.name, VariableKind::categorical, Transform::none, ""});
  return Schema(std::move(vars));
}

}  // namespace valtree::data
