#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "valtree/cart.hpp"
#include "valtree/dataset.hpp"
#include "valtree/error.hpp"
#include "valtree/forest.hpp"
#include "valtree/linmod.hpp"
#include "valtree/report.hpp"
#include "valtree/scorecard.hpp"

namespace valtree::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::string data;
  std::string schema;
  std::string out;
  std::string model;
  std::string record;
  std::optional<std::uint64_t> seed;
  bool no_log = false;
};

struct ModelSpec {
  std::string name;
  report::Family family = report::Family::ols;
  std::string response;
  std::vector<std::string> predictors;
  std::vector<std::string> categoricals;
  std::string group;
  std::vector<std::string> joint;
  cart::GrowthControls controls;
  json raw;
};

struct RunConfig {
  fs::path base;
  std::string schema;
  std::string data;
  std::optional<data::SynthConfig> synth;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 1;
  std::vector<ModelSpec> models;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "'" + path.string() + "': " + e.what());
  }
}

ModelSpec parse_model(const json& doc) {
  ModelSpec m;
  m.raw = doc;
  m.name = doc.at("name").get<std::string>();
  m.family = report::parse_family(doc.at("family").get<std::string>());
  m.response = doc.value("response", std::string());
  m.predictors = doc.value("predictors", std::vector<std::string>{});
  m.categoricals = doc.value("categoricals", std::vector<std::string>{});
  m.group = doc.value("group", std::string());
  m.joint = doc.value("joint", std::vector<std::string>{});
  if (doc.contains("controls")) m.controls = cart::GrowthControls::from_json(doc.at("controls"));
  if (m.family == report::Family::fixed_effects && m.group.empty() && m.joint.empty())
    throw Error(ErrorCode::config, "fixed-effects model '" + m.name + "' needs \"group\" or \"joint\"");
  return m;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  const json doc = read_json(path);
  cfg.base = fs::path(path).parent_path();
  try {
    if (!doc.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
    cfg.schema = doc.value("schema", std::string());
    cfg.data = doc.value("data", std::string());
    if (doc.contains("synth")) cfg.synth = data::SynthConfig::from_json(doc.at("synth"));
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.out = doc.value("out", std::string());
    cfg.threads = doc.value("threads", std::size_t{1});
    for (const auto& m : doc.value("models", json::array())) {
      ModelSpec spec = parse_model(m);
      for (const auto& other : cfg.models)
        if (other.name == spec.name) throw Error(ErrorCode::config, "duplicate model name '" + spec.name + "'");
      cfg.models.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, std::string("invalid config: ") + e.what());
  }
  return cfg;
}

class Session {
 public:
  Session(Options opts, std::ostream& out) : opts_(std::move(opts)), out_(out), cfg_(load_config(opts_.config)) {
    if (!opts_.out.empty()) out_dir_ = opts_.out;
    else if (!cfg_.out.empty()) out_dir_ = cfg_.base / cfg_.out;
  }

  int ingest();
  int synth();
  int fit_ols();
  int fit_fe();
  int fit_tree(bool save_tree, bool print_importance);
  int fit_forest();
  int fit_scorecard();
  int importance();
  int predict();
  int compare();
  int export_dot();

 private:
  fs::path config_path(const std::string& p) const { return fs::path(p).is_absolute() ? fs::path(p) : cfg_.base / p; }

  std::uint64_t seed(std::string_view why) const {
    if (opts_.seed) return *opts_.seed;
    if (cfg_.seed) return *cfg_.seed;
    throw Error(ErrorCode::config, "a seed is required for " + std::string(why) + " (--seed or config \"seed\")");
  }

  data::Schema schema_for(const data::Schema& schema) const {
    if (!opts_.no_log) return schema;
    std::vector<data::VariableSpec> vars = schema.variables();
    for (auto& v : vars) v.transform = data::Transform::none;
    return data::Schema(std::move(vars));
  }

  const data::DataTable& table() {
    if (table_) return *table_;
    data::Schema schema;
    data::DataTable raw;
    std::string data_path = opts_.data;
    if (data_path.empty() && !cfg_.data.empty()) data_path = config_path(cfg_.data).string();
    if (!data_path.empty()) {
      std::string schema_path = opts_.schema;
      if (schema_path.empty() && !cfg_.schema.empty()) schema_path = config_path(cfg_.schema).string();
      if (schema_path.empty()) throw Error(ErrorCode::config, "--data needs a schema (--schema or config \"schema\")");
      try {
        schema = data::Schema::from_json(nlohmann::ordered_json::parse(read_file(schema_path)));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, "'" + schema_path + "': " + e.what());
      }
      raw = data::load_table(data_path, schema);
    } else if (cfg_.synth) {
      schema = data::synth_schema(*cfg_.synth);
      raw = data::synth_deals(*cfg_.synth, seed("synthetic data"));
    } else {
      throw Error(ErrorCode::config, "no data: pass --data or give \"data\" or \"synth\" in the config");
    }
    schema_ = schema_for(schema);
    table_ = data::apply_transforms(raw, *schema_);
    return *table_;
  }

  std::string response(const ModelSpec& m) {
    const data::DataTable& t = table();
    return t.resolve(m.response.empty() ? schema_->response().name : m.response);
  }

  std::vector<const ModelSpec*> models(report::Family family) const {
    std::vector<const ModelSpec*> out;
    for (const auto& m : cfg_.models)
      if (m.family == family) out.push_back(&m);
    if (out.empty())
      throw Error(ErrorCode::config, "config has no \"" + std::string(report::to_string(family)) + "\" models");
    return out;
  }

  void write(const std::string& name, const std::string& content) const {
    if (out_dir_.empty()) return;
    fs::create_directories(out_dir_);
    std::ofstream f(out_dir_ / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::io, "cannot write '" + (out_dir_ / name).string() + "'");
    f << content;
  }
  void write_json(const std::string& name, const json& doc) const { write(name, doc.dump(2) + "\n"); }

  cart::RegressionTree grow_tree(const ModelSpec& m) {
    std::vector<std::string> vars = m.predictors;
    vars.insert(vars.end(), m.categoricals.begin(), m.categoricals.end());
    const std::string y = response(m);
    const data::DataTable rows = data::complete_cases(table(), std::vector<std::string>{y});
    cart::GrowthControls controls = m.controls;
    controls.seed = seed("tree growth and cross-validation");
    return cart::grow(rows, y, vars, controls);
  }

  const cart::RegressionTree& final_tree(const ModelSpec& m, const cart::RegressionTree& full) {
    if (!m.raw.contains("prune_cp")) return full;
    pruned_ = cart::prune(full, m.raw.at("prune_cp").get<double>());
    return pruned_;
  }

  bool categorical_only(const ModelSpec& m) {
    std::vector<std::string> vars = m.predictors;
    vars.insert(vars.end(), m.categoricals.begin(), m.categoricals.end());
    if (vars.empty()) return false;
    return std::all_of(vars.begin(), vars.end(),
                       [&](const std::string& v) { return table().column(table().resolve(v)).is_categorical(); });
  }

  linmod::LinearFit ols(const ModelSpec& m) {
    const std::string y = response(m);
    std::vector<std::string> numeric;
    std::vector<std::string> dummies;
    std::vector<std::string> used{y};
    for (const auto& p : m.predictors) numeric.push_back(table().resolve(p));
    for (const auto& c : m.categoricals) dummies.push_back(table().resolve(c));
    used.insert(used.end(), numeric.begin(), numeric.end());
    used.insert(used.end(), dummies.begin(), dummies.end());
    const data::DataTable rows = data::complete_cases(table(), used);
    return linmod::fit_ols(linmod::encode_design(rows, y, numeric, dummies));
  }

  linmod::FixedEffectsFit fe(const ModelSpec& m) {
    const std::string y = response(m);
    std::vector<std::string> slopes;
    for (const auto& p : m.predictors) slopes.push_back(table().resolve(p));
    if (m.joint.empty()) return linmod::fit_fixed_effects(table(), y, slopes, table().resolve(m.group));
    data::Column joint = linmod::joint_category(table(), m.joint);
    const std::string name = joint.name();
    const data::DataTable t = table().with_column(std::move(joint));
    return linmod::fit_fixed_effects(t, y, slopes, name);
  }

  forest::ForestModel forest_fit(const ModelSpec& m) {
    forest::ForestOptions o;
    o.n_trees = m.raw.value("n_trees", o.n_trees);
    if (!m.raw.contains("mtry")) throw Error(ErrorCode::config, "forest model '" + m.name + "' needs \"mtry\"");
    o.mtry = m.raw.at("mtry").get<std::size_t>();
    o.max_categories = m.raw.value("max_categories", o.max_categories);
    o.controls = m.controls;
    o.seed = seed("forest growth");
    o.threads = cfg_.threads;
    std::vector<std::string> vars = m.predictors;
    vars.insert(vars.end(), m.categoricals.begin(), m.categoricals.end());
    const std::string y = response(m);
    const data::DataTable rows = data::complete_cases(table(), std::vector<std::string>{y});
    return forest::fit_forest(rows, y, vars, o);
  }

  scorecard::BlockAssignment blocks(const json& doc) {
    scorecard::BlockAssignment out;
    for (auto block : {scorecard::Block::non_financial, scorecard::Block::financial,
                       scorecard::Block::deal_characteristics}) {
      const std::string key(scorecard::to_string(block));
      for (const auto& v : doc.value(key, std::vector<std::string>{})) out.emplace_back(v, block);
    }
    for (const auto& [key, _] : doc.items()) scorecard::parse_block(key);
    return out;
  }

  const ModelSpec& model_named(const std::string& name) const {
    for (const auto& m : cfg_.models)
      if (m.name == name) return m;
    throw Error(ErrorCode::config, "no model named '" + name + "'");
  }

  json load_model() const {
    if (opts_.model.empty()) throw Error(ErrorCode::config, "--model is required");
    return read_json(opts_.model);
  }

  Options opts_;
  std::ostream& out_;
  RunConfig cfg_;
  fs::path out_dir_;
  std::optional<data::Schema> schema_;
  std::optional<data::DataTable> table_;
  cart::RegressionTree pruned_;
};

int Session::ingest() {
  const data::DataTable& t = table();
  json cols = json::array();
  std::vector<std::string> lines;
  out_ << "rows: " << t.rows() << "\n";
  for (std::size_t i = 0; i < t.cols(); ++i) {
    const data::Column& c = t.column(i);
    json e = {{"name", c.name()},
              {"kind", data::to_string(c.kind())},
              {"transform", data::to_string(c.transform())},
              {"source", c.source()},
              {"units", c.units()},
              {"missing", c.missing_count()}};
    out_ << c.name() << "  " << data::to_string(c.kind()) << "  missing=" << c.missing_count();
    if (c.is_categorical()) {
      e["levels"] = c.levels();
      out_ << "  levels=" << c.levels().size();
    }
    out_ << "\n";
    cols.push_back(std::move(e));
  }
  write_json("ingest.json", {{"provenance", t.provenance()}, {"rows", t.rows()}, {"columns", std::move(cols)}});
  if (!out_dir_.empty()) data::write_csv(t, out_dir_ / "table.csv");
  return kExitOk;
}

int Session::synth() {
  const data::SynthConfig config = cfg_.synth.value_or(data::SynthConfig{});
  config.validate();
  const std::uint64_t s = seed("synthetic data");
  const data::DataTable t = data::synth_deals(config, s);
  if (out_dir_.empty()) {
    data::write_csv(t, out_);
    return kExitOk;
  }
  fs::create_directories(out_dir_);
  data::write_csv(t, out_dir_ / "deals.csv");
  write("schema.json", data::synth_schema(config).to_json().dump(2) + "\n");
  json effects = json::object();
  const auto planted = data::planted_effects(config, s);
  for (std::size_t i = 0; i < config.categoricals.size(); ++i) effects[config.categoricals[i].name] = planted[i];
  write_json("synth.json", {{"seed", s}, {"config", config.to_json()}, {"planted_effects", effects}});
  out_ << "wrote " << t.rows() << " rows to " << (out_dir_ / "deals.csv").string() << "\n";
  return kExitOk;
}

int Session::fit_ols() {
  std::vector<report::RegressionColumn> columns;
  for (const auto* m : models(report::Family::ols)) columns.push_back(report::ols_column(m->name, ols(*m)));
  const std::string text = report::render_regression_table(columns);
  out_ << text;
  write("ols.txt", text);
  write_json("ols.json", report::regression_table_json(columns));
  return kExitOk;
}

int Session::fit_fe() {
  std::vector<report::RegressionColumn> columns;
  for (const auto* m : models(report::Family::fixed_effects)) columns.push_back(report::fe_column(m->name, fe(*m)));
  const std::string text = report::render_regression_table(columns);
  out_ << text;
  write("fixed_effects.txt", text);
  write_json("fixed_effects.json", report::regression_table_json(columns));
  return kExitOk;
}

int Session::fit_tree(bool save_tree, bool print_importance) {
  bool first = true;
  for (const auto* m : models(report::Family::cart)) {
    const cart::RegressionTree full = grow_tree(*m);
    cart::GrowthControls controls = full.controls;
    const std::string y = response(*m);
    const data::DataTable rows = data::complete_cases(table(), std::vector<std::string>{y});
    const cart::CpTable cp = cart::cp_table(full, rows, controls, cfg_.threads);
    const cart::RegressionTree& tree = final_tree(*m, full);
    const auto imp = cart::variable_importance(tree);
    if (!first) out_ << "\n";
    first = false;
    if (print_importance) {
      out_ << m->name << "\n";
      for (const auto& i : imp) out_ << i.variable << "  " << i.score << "\n";
      write_json(m->name + ".importance.json", cart::importance_to_json(imp));
      continue;
    }
    const std::string text = report::render_cp_table(cp, imp, m->name);
    out_ << text;
    write(m->name + ".cp.txt", text);
    write_json(m->name + ".cp.json", report::cp_report_json(cp, imp, m->name));
    if (save_tree) {
      write_json(m->name + ".tree.json", cart::tree_to_json(tree));
      write(m->name + ".dot", report::export_tree_dot(tree));
    }
  }
  return kExitOk;
}

int Session::fit_forest() {
  bool first = true;
  for (const auto* m : models(report::Family::forest)) {
    const forest::ForestModel model = forest_fit(*m);
    if (!first) out_ << "\n";
    first = false;
    const std::string text = report::render_forest_summary(model);
    out_ << m->name << "\n" << text;
    write(m->name + ".forest.txt", text);
    write_json(m->name + ".forest.json", forest::forest_summary_json(model));
    if (m->raw.value("save_model", false)) write_json(m->name + ".forest_model.json", forest::forest_to_json(model));
  }
  return kExitOk;
}

int Session::fit_scorecard() {
  if (!opts_.model.empty()) {
    const cart::RegressionTree tree = cart::tree_from_json(load_model());
    const auto card = scorecard::tree_to_scorecard(tree, tree.response_transform);
    const std::string text = report::render_segment_scorecard(card);
    out_ << text;
    write("segments.txt", text);
    write_json("segments.json", scorecard::segment_scorecard_to_json(card));
    return kExitOk;
  }
  bool first = true;
  for (const auto* m : models(report::Family::scorecard)) {
    if (!first) out_ << "\n";
    first = false;
    if (m->raw.contains("tree")) {
      const cart::RegressionTree full = grow_tree(model_named(m->raw.at("tree").get<std::string>()));
      const auto& tree = final_tree(model_named(m->raw.at("tree").get<std::string>()), full);
      const auto card = scorecard::tree_to_scorecard(tree, tree.response_transform);
      const std::string text = report::render_segment_scorecard(card);
      out_ << m->name << "\n" << text;
      write(m->name + ".segments.txt", text);
      write_json(m->name + ".segments.json", scorecard::segment_scorecard_to_json(card));
      continue;
    }
    const std::string y = response(*m);
    const auto stage1 = scorecard::fit_block_scorecard(table(), y, blocks(m->raw.value("blocks", json::object())));
    std::string text = report::render_block_scorecard(stage1);
    json doc = {{"name", m->name}, {"stage1", scorecard::block_scorecard_to_json(stage1)}};
    if (m->raw.contains("stage2")) {
      const json& s2 = m->raw.at("stage2");
      const auto stage2 = scorecard::fit_meta_stage2(table(), y, stage1, blocks(s2.value("blocks", json::object())));
      text += "\nStage 2 (adjustment fitted on stage-1 residuals)\n" + report::render_block_scorecard(stage2);
      doc["stage2"] = scorecard::block_scorecard_to_json(stage2);
    }
    out_ << m->name << "\n" << text;
    write(m->name + ".scorecard.txt", text);
    write_json(m->name + ".scorecard.json", doc);
  }
  return kExitOk;
}

int Session::importance() {
  if (opts_.model.empty()) return fit_tree(false, true);
  const cart::RegressionTree tree = cart::tree_from_json(load_model());
  const auto imp = cart::variable_importance(tree);
  for (const auto& i : imp) out_ << i.variable << "  " << i.score << "\n";
  write_json("importance.json", cart::importance_to_json(imp));
  return kExitOk;
}

int Session::predict() {
  const json model = load_model();
  if (opts_.record.empty()) throw Error(ErrorCode::config, "--record is required");
  const data::Record record = data::record_from_json(read_json(opts_.record));
  const std::string kind = model.value("kind", std::string());
  json result;
  if (kind == "regression_tree") {
    const cart::RegressionTree tree = cart::tree_from_json(model);
    const cart::Prediction p = cart::predict_tree(tree, record);
    result = {{"model", "regression_tree"},
              {"response", tree.response},
              {"response_transform", data::to_string(tree.response_transform)},
              {"value", p.value},
              {"valuation", p.valuation},
              {"leaf", p.leaf},
              {"flags", p.flags}};
  } else if (kind == "random_forest") {
    const forest::ForestModel f = forest::forest_from_json(model);
    const forest::ForestPrediction p = forest::predict_forest(f, record);
    std::vector<std::string> flags;
    if (p.routed_missing) flags.emplace_back("missing values routed to majority branch");
    if (p.unseen_level) flags.emplace_back("unseen category level routed to majority branch");
    result = {{"model", "random_forest"},
              {"response", f.response},
              {"response_transform", data::to_string(f.response_transform)},
              {"value", p.value},
              {"valuation", p.valuation},
              {"flags", flags}};
  } else {
    throw Error(ErrorCode::model_format, "cannot predict with a model of kind '" + kind + "'");
  }
  out_ << result.dump(2) << "\n";
  write_json("prediction.json", result);
  return kExitOk;
}

int Session::compare() {
  std::vector<report::ComparisonRow> rows;
  for (const auto& m : cfg_.models) {
    switch (m.family) {
      case report::Family::ols:
        rows.push_back(report::row_from_ols(m.name, ols(m), m.categoricals));
        break;
      case report::Family::fixed_effects:
        rows.push_back(report::row_from_fe(m.name, fe(m), m.joint.empty() ? std::vector<std::string>{m.group} : m.joint,
                                           !m.joint.empty()));
        break;
      case report::Family::cart: {
        const cart::RegressionTree full = grow_tree(m);
        std::vector<std::string> cats;
        for (const auto& v : m.predictors)
          if (table().column(table().resolve(v)).is_categorical()) cats.push_back(v);
        cats.insert(cats.end(), m.categoricals.begin(), m.categoricals.end());
        rows.push_back(report::row_from_tree(m.name, final_tree(m, full), cats, categorical_only(m)));
        break;
      }
      case report::Family::forest:
        rows.push_back(report::row_from_forest(m.name, forest_fit(m), m.categoricals));
        break;
      case report::Family::scorecard: {
        if (m.raw.contains("tree")) continue;
        const auto card =
            scorecard::fit_block_scorecard(table(), response(m), blocks(m.raw.value("blocks", json::object())));
        report::ComparisonRow r;
        r.name = m.name;
        r.family = report::Family::scorecard;
        r.fit = card.fit.r2;
        r.n = card.fit.n;
        rows.push_back(std::move(r));
        break;
      }
    }
  }
  const report::Comparison c = report::compare_models(std::move(rows));
  out_ << c.text;
  write("comparison.txt", c.text);
  write_json("comparison.json", c.json);
  return kExitOk;
}

int Session::export_dot() {
  const cart::RegressionTree tree = cart::tree_from_json(load_model());
  const std::string dot = report::export_tree_dot(tree);
  out_ << dot;
  write(fs::path(opts_.model).stem().string() + ".dot", dot);
  return kExitOk;
}

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--config", o.config, "JSON run configuration");
  sub.add_option("--data", o.data, "CSV data file");
  sub.add_option("--schema", o.schema, "JSON schema for --data");
  sub.add_option("--seed", o.seed, "Seed for synthetic data, trees, cross-validation and forests");
  sub.add_option("--out", o.out, "Output directory for artifacts");
  sub.add_option("--model", o.model, "Model JSON file");
  sub.add_option("--record", o.record, "Record JSON file for predict");
  sub.add_flag("--no-log", o.no_log, "Ignore log transforms; fit on raw EUR values");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Startup valuation models: OLS, fixed effects, CART, random forests, scorecards", "valtree"};
  app.require_subcommand(1, 1);
  Options opts;
  using Handler = std::function<int(Session&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"ingest", "Load and transform a data table", [](Session& s) { return s.ingest(); }},
      {"synth", "Generate synthetic deal data", [](Session& s) { return s.synth(); }},
      {"fit-ols", "Fit the config's OLS models", [](Session& s) { return s.fit_ols(); }},
      {"fit-fe", "Fit the config's fixed-effects models", [](Session& s) { return s.fit_fe(); }},
      {"fit-tree", "Grow CART trees with cross-validated CP tables", [](Session& s) { return s.fit_tree(true, false); }},
      {"fit-forest", "Fit random forests", [](Session& s) { return s.fit_forest(); }},
      {"fit-scorecard", "Fit block scorecards or extract tree segments", [](Session& s) { return s.fit_scorecard(); }},
      {"cp-table", "Print cross-validated CP tables", [](Session& s) { return s.fit_tree(false, false); }},
      {"importance", "Print variable importance", [](Session& s) { return s.importance(); }},
      {"predict", "Predict one record with a saved model", [](Session& s) { return s.predict(); }},
      {"compare", "Rank every configured model by fit", [](Session& s) { return s.compare(); }},
      {"export-dot", "Write a saved tree as a DOT digraph", [](Session& s) { return s.export_dot(); }},
  };
  std::map<CLI::App*, const Handler*> handlers;
  for (const auto& [name, help, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(*sub, opts);
    handlers[sub] = &handler;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "valtree: " << e.what() << " (run with --help for usage)\n";
    return kExitUsage;
  }

  try {
    Session session(opts, out);
    return (*handlers.at(app.get_subcommands().front()))(session);
  } catch (const Error& e) {
    err << "valtree: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "valtree: invalid JSON content: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "valtree: " << e.what() << "\n";
  }
  return kExitError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace valtree::cli
