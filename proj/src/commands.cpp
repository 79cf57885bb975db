#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "hif/cli.hpp"
#include "hif/error.hpp"
#include "hif/eval.hpp"
#include "hif/hifsim.hpp"
#include "hif/random.hpp"
#include "hif/serialization.hpp"
#include "json_util.hpp"

namespace hif::cli {
namespace fs = std::filesystem;

namespace {

// Sub-seeds derived from the run seed.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kCvStream = 2;

using Defaults = std::map<std::string, std::string>;

const Defaults kSimulateDefaults{
    {"seed", "1"},
    {"rows_per_class", "100"},
    {"load_scales", "0.8,0.9,1.0,1.1,1.2"},
    {"capacitor_switching", "true"},
    {"broken_conductor_c", "true"},
    {"settle_cycles", "18"},
    {"sample_rate", "12000"},
    {"system_frequency", "60"},
    {"arc_v_p", "1000"},
    {"arc_v_n", "500"},
    {"arc_variation", "0.1"},
    {"arc_r_lo", "1000"},
    {"arc_r_hi", "1500"},
    {"arc_update_interval", "0.00011"},
    {"arc_build_up_tau", "0.05"},
    {"noise_fraction", "0.001"},
    {"load_jitter", "0.05"},
    {"waveforms", "per_class"},
    {"waveform_cycles", "10"},
};

const Defaults kTrainDefaults{
    {"seed", "1"},
    {"data", ""},
    {"detector", "msvm"},
    {"train_per_class", "60"},
    {"test_per_class", "40"},
    {"alpha", "0.001"},
    {"variance_target", "0.98"},
    {"threshold_dof", "retained"},
    {"kernel", "rbf"},
    {"sigma", "0.5"},
    {"degree", "3"},
    {"coef", "1"},
    {"c", "10"},
    {"tol", "0.001"},
    {"ridge", "0"},
    {"max_iterations", "100000"},
    {"strategy", "ovo"},
    {"cv", "false"},
    {"cv_folds", "3"},
    {"cv_points", "1000"},
    {"cv_c_min", "0.1"},
    {"cv_c_max", "100"},
};

const Defaults kDetectDefaults{
    {"seed", "1"},
    {"model", ""},
    {"data", ""},
};

const Defaults kEvaluateDefaults{
    {"seed", "1"},
    {"report", ""},
    {"compare_published", "true"},
};

std::string required_path(const RunConfig& c, const std::string& key) {
  const std::string v = c.text(key);
  if (v.empty()) throw ConfigError("config key '" + key + "' is required");
  return v;
}

void require_directory(const fs::path& out) {
  std::error_code ec;
  if (!fs::is_directory(out, ec)) throw IoError("output directory " + out.string() + " does not exist");
}

/// Records files written by a command so a failed run leaves nothing behind.
class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
  }

  fs::path claim(const fs::path& relative) {
    written_.push_back(root_ / relative);
    return written_.back();
  }
  void text(const fs::path& relative, const std::string& body) { detail::write_text_file(claim(relative), body); }
  void directory(const fs::path& relative) {
    const fs::path p = root_ / relative;
    std::error_code ec;
    if (fs::is_directory(p, ec)) return;
    if (!fs::create_directory(p, ec) || ec) throw IoError("cannot create directory " + p.string());
    written_.push_back(p);
  }
  void commit() { committed_ = true; }

 private:
  fs::path root_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::string waveform_csv(const sim::WaveformSet& w, std::size_t samples) {
  std::string out = "time";
  for (const auto& n : w.channel_names) out += "," + n;
  out += ",arc_current\n";
  samples = std::min(samples, w.samples());
  for (std::size_t t = 0; t < samples; ++t) {
    out += format_real(w.time[t]);
    for (const auto& ch : w.channels) out += "," + format_real(ch[t]);
    out += "," + format_real(w.arc_current[t]) + "\n";
  }
  return out;
}

std::string scale_tag(double v) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(2);
  ss << v;
  return ss.str();
}

// One decimal, right-aligned in `width` characters.
std::string fixed1(double v, int width = 0) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(1);
  ss.width(width);
  ss << v;
  return ss.str();
}

std::map<ClassCode, std::size_t> class_counts(const DataMatrix& x) {
  std::map<ClassCode, std::size_t> out;
  if (x.labels) {
    for (auto c : *x.labels) out[c] += 1;
  }
  return out;
}

svm::TrainOptions train_options(const RunConfig& c) {
  svm::TrainOptions o;
  const std::string kernel = c.text("kernel");
  if (kernel == "rbf") {
    o.kernel = svm::KernelSpec::rbf(c.real("sigma"));
  } else if (kernel == "linear") {
    o.kernel = svm::KernelSpec::linear();
  } else if (kernel == "polynomial") {
    o.kernel = svm::KernelSpec::polynomial(static_cast<int>(c.integer("degree")), c.real("coef"));
  } else {
    throw ConfigError("config key 'kernel': expected rbf, linear or polynomial, got '" + kernel + "'");
  }
  o.c = c.real("c");
  o.tol = c.real("tol");
  o.ridge = c.real("ridge");
  o.max_iterations = c.count("max_iterations");
  try {
    o.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return o;
}

pca::ThresholdDof threshold_dof(const RunConfig& c) {
  const std::string v = c.text("threshold_dof");
  if (v == "retained") return pca::ThresholdDof::Retained;
  if (v == "full") return pca::ThresholdDof::Full;
  throw ConfigError("config key 'threshold_dof': expected retained or full, got '" + v + "'");
}

std::vector<int> fault_vs_normal(const DataMatrix& x) {
  std::vector<int> y;
  for (auto c : *x.labels) y.push_back(c == ClassCode::Normal ? -1 : 1);
  return y;
}

void print_vector(std::ostream& log, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) log << (i ? " " : "") << format_real(v[i]);
  log << "\n";
}

}  // namespace

const std::map<std::string, std::string>& command_defaults(const std::string& command) {
  if (command == "simulate") return kSimulateDefaults;
  if (command == "train") return kTrainDefaults;
  if (command == "detect") return kDetectDefaults;
  if (command == "evaluate") return kEvaluateDefaults;
  throw ConfigError("unknown command '" + command + "'");
}

RunConfig effective_config(const Invocation& inv) {
  RunConfig file = inv.config ? RunConfig::load(*inv.config) : RunConfig{};
  RunConfig merged = file.with_defaults(command_defaults(inv.command));
  if (inv.seed) merged.set("seed", std::to_string(*inv.seed));
  merged.u64("seed");  // validates the value
  return merged;
}

void cmd_simulate(const RunConfig& c, const fs::path& out, std::ostream& log) {
  require_directory(out);
  sim::DatasetOptions opt;
  sim::FeederModel feeder = sim::FeederModel::standard();
  try {
    opt.rows_per_class = c.count("rows_per_class");
    opt.load_scales = c.real_list("load_scales");
    opt.capacitor_switching = c.boolean("capacitor_switching");
    opt.broken_conductor_c = c.boolean("broken_conductor_c");
    opt.settle_cycles = c.count("settle_cycles");
    opt.sample_rate = c.real("sample_rate");
    opt.arc.system_frequency = c.real("system_frequency");
    opt.arc.v_p = c.real("arc_v_p");
    opt.arc.v_n = c.real("arc_v_n");
    opt.arc.variation_fraction = c.real("arc_variation");
    opt.arc.r_lo = c.real("arc_r_lo");
    opt.arc.r_hi = c.real("arc_r_hi");
    opt.arc.update_interval = c.real("arc_update_interval");
    opt.arc.build_up_time_constant = c.real("arc_build_up_tau");
    opt.arc.validate();
    feeder.noise_fraction = c.real("noise_fraction");
    feeder.load_jitter = c.real("load_jitter");
    if (!(feeder.noise_fraction >= 0.0) || !(feeder.load_jitter >= 0.0 && feeder.load_jitter < 1.0)) {
      throw InvalidInput("noise_fraction must be >= 0 and load_jitter in [0, 1)");
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  const std::string waveforms = c.text("waveforms");
  if (waveforms != "none" && waveforms != "per_class" && waveforms != "all") {
    throw ConfigError("config key 'waveforms': expected none, per_class or all, got '" + waveforms + "'");
  }
  const std::size_t waveform_cycles = c.count("waveform_cycles");
  const std::uint64_t seed = c.u64("seed");

  const auto batches = sim::default_dataset_config(opt);
  const DataMatrix data = sim::generate_dataset(batches, seed, feeder);

  OutputSet files(out);
  write_csv(data, files.claim("dataset.csv"));
  std::size_t written_waveforms = 0;
  if (waveforms != "none") {
    files.directory("waveforms");
    std::set<sim::FaultLocation> seen;
    for (std::size_t j = 0; j < batches.size(); ++j) {
      const auto& b = batches[j];
      if (waveforms == "per_class" && !seen.insert(b.scenario.fault_location).second) continue;
      sim::ArcScenario s = b.scenario;
      s.duration = static_cast<double>(b.settle_cycles + b.rows) / s.arc.system_frequency;
      s.seed = numerics::derive_seed(seed, j);  // same stream as generate_dataset
      const auto w = sim::simulate_feeder(s, feeder);
      const auto per_cycle = static_cast<std::size_t>(std::llround(s.sample_rate / s.arc.system_frequency));
      const std::string name = "scenario_" + std::to_string(j) + "_" + sim::location_name(b.scenario.fault_location) +
                               "_load" + scale_tag(b.scenario.load_scale) + ".csv";
      files.text(fs::path("waveforms") / name, waveform_csv(w, waveform_cycles * per_cycle));
      ++written_waveforms;
    }
  }
  files.commit();

  log << "rows: " << data.rows() << "\n";
  log << "channels: " << data.cols() << "\n";
  for (const auto& [code, n] : class_counts(data)) log << "class " << class_name(code) << ": " << n << "\n";
  log << "scenarios: " << batches.size() << "\n";
  log << "waveform files: " << written_waveforms << "\n";
  log << "seed: " << seed << "\n";
}

void cmd_train(const RunConfig& c, const fs::path& out, std::ostream& log) {
  require_directory(out);
  const std::string detector = c.text("detector");
  if (detector != "pca" && detector != "fda" && detector != "svm" && detector != "msvm") {
    throw ConfigError("config key 'detector': expected pca, fda, svm or msvm, got '" + detector + "'");
  }
  const std::uint64_t seed = c.u64("seed");
  const DataMatrix data = read_csv(required_path(c, "data"));
  if (!data.labels) throw InvalidInput("training data has no label column");

  SplitSpec spec;
  for (const auto& [code, n] : class_counts(data)) {
    (void)n;
    spec[code] = {c.count("train_per_class"), c.count("test_per_class")};
  }
  const auto [train, test] = split(data, spec, numerics::derive_seed(seed, kSplitStream));

  model::ModelFile file{model::PcaDetector{}, data.channel_names, c.values(), seed};
  std::ostringstream summary;
  if (detector == "pca") {
    const DataMatrix normal = train.select_class(ClassCode::Normal);
    if (normal.rows() == 0) throw InvalidInput("pca needs normal-condition rows; the training split has none");
    model::PcaDetector d;
    d.model = pca::fit_pca(normal, c.real("variance_target"));
    d.alpha = c.real("alpha");
    d.dof = threshold_dof(c);
    summary << "retained components: " << d.model.retained << "\n";
    summary << "variance captured: " << format_real(d.model.variance_captured) << "\n";
    summary << "T2 threshold: " << format_real(pca::t2_threshold(d.model, d.alpha, d.dof)) << "\n";
    if (d.model.underdetermined()) summary << "warning: fewer training rows than channels\n";
    file.detector = std::move(d);
  } else if (detector == "fda") {
    model::FdaDetector d;
    d.normalizer = normalize_fit(train);
    d.model = fda::fit_fda(normalize_apply(d.normalizer, train));
    summary << "classes: " << d.model.classes() << "\n";
    summary << "eigenvalues: ";
    print_vector(summary, d.model.eigenvalues);
    file.detector = std::move(d);
  } else if (detector == "svm") {
    model::SvmDetector d;
    d.normalizer = normalize_fit(train);
    const Matrix x = normalize_matrix(d.normalizer, train.observations);
    const auto y = fault_vs_normal(train);
    auto options = train_options(c);
    if (c.boolean("cv")) {
      const auto grid = svm::default_c_grid(c.count("cv_points"), c.real("cv_c_min"), c.real("cv_c_max"));
      const auto cv = svm::cross_validate_c(x, y, grid, c.count("cv_folds"), numerics::derive_seed(seed, kCvStream),
                                            options);
      options.c = cv.best_c;
      file.config["cv_best_c"] = format_real(cv.best_c);
      summary << "cross-validation: " << grid.size() << " C values, " << c.count("cv_folds") << " folds\n";
      summary << "best C: " << format_real(cv.best_c) << " (mean AUC "
              << format_real(*std::max_element(cv.mean_auc.begin(), cv.mean_auc.end())) << ")\n";
    }
    d.classifier = svm::train_binary(x, y, options);
    summary << "C: " << format_real(options.c) << "\n";
    summary << "kernel: " << options.kernel.describe() << "\n";
    summary << "support vectors: " << d.classifier.support_indices.size() << "\n";
    file.detector = std::move(d);
  } else {
    model::MsvmDetector d;
    d.normalizer = normalize_fit(train);
    const Matrix x = normalize_matrix(d.normalizer, train.observations);
    const std::string strategy = c.text("strategy");
    if (strategy != "ovo" && strategy != "ova") {
      throw ConfigError("config key 'strategy': expected ovo or ova, got '" + strategy + "'");
    }
    svm::MulticlassConfig mc{strategy == "ovo" ? svm::Strategy::OneVsOne : svm::Strategy::OneVsAll, train_options(c)};
    d.model = svm::train_multiclass(x, *train.labels, mc);
    summary << "strategy: " << strategy << "\n";
    summary << "classifiers: " << d.model.classifiers.size() << "\n";
    summary << "C: " << format_real(mc.options.c) << "\n";
    summary << "kernel: " << mc.options.kernel.describe() << "\n";
    for (const auto& m : d.model.classifiers) {
      summary << "  " << class_name(m.positive);
      if (mc.strategy == svm::Strategy::OneVsOne) summary << " vs " << class_name(m.negative);
      summary << ": " << m.classifier.support_indices.size() << " support vectors\n";
    }
    file.detector = std::move(d);
  }

  OutputSet files(out);
  files.text("model.json", model::model_to_json(file));
  write_csv(train, files.claim("train.csv"));
  write_csv(test, files.claim("test.csv"));
  files.commit();

  log << "detector: " << detector << "\n";
  log << "training rows: " << train.rows() << ", test rows: " << test.rows() << "\n";
  log << summary.str();
  log << "seed: " << seed << "\n";
}

void cmd_detect(const RunConfig& c, const fs::path& out, std::ostream& log) {
  require_directory(out);
  const auto file = model::load_model(required_path(c, "model"));
  const DataMatrix data = read_csv(required_path(c, "data"));
  if (!data.labels) throw InvalidInput("detection data needs a label column to build a report");
  if (data.channel_names != file.channel_names) {
    throw InvalidInput("channel mismatch: model has " + std::to_string(file.channel_names.size()) +
                       " channels, data has " + std::to_string(data.channel_names.size()) +
                       (data.channel_names.size() == file.channel_names.size() ? " with different names" : ""));
  }

  std::vector<eval::SampleRecord> samples;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto p = model::predict(file.detector, data.observations.row(i).transpose());
    samples.push_back({to_int((*data.labels)[static_cast<std::size_t>(i)]), p.label, p.statistic});
  }
  std::map<std::string, std::string> echo = c.values();
  for (const auto& [k, v] : file.config) echo["model." + k] = v;
  const auto report = eval::build_report(model::detector_name(file.detector), std::move(samples),
                                         model::threshold(file.detector), std::move(echo), c.u64("seed"));

  OutputSet files(out);
  eval::write_report(report, files.claim("report.json"));
  files.text("samples.csv", eval::per_sample_csv(report));
  files.text("statistic.dat", eval::statistic_plot_data(report));
  if (report.threshold) files.text("threshold.dat", eval::threshold_plot_data(report));
  files.commit();
  log << eval::summary_text(report);
}

void cmd_evaluate(const RunConfig& c, const std::optional<fs::path>& out, std::ostream& log) {
  if (out) require_directory(*out);
  const auto report = eval::read_report(required_path(c, "report"));
  std::ostringstream ss;
  ss << eval::summary_text(report);
  if (c.boolean("compare_published")) {
    ss << "\npublished comparison:\n";
    ss << "  method                    security %  dependability %\n";
    for (const auto& row : eval::published_comparison()) {
      ss << "  " << row.method << std::string(26 - std::min<std::size_t>(26, std::string(row.method).size()), ' ')
         << fixed1(row.security_percent, 10) << fixed1(row.dependability_percent, 17) << "\n";
    }
  }
  if (out) {
    OutputSet files(*out);
    files.text("summary.txt", ss.str());
    files.commit();
  }
  log << ss.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"High impedance fault detection toolkit", "hifdetect"};
  app.require_subcommand(1);
  Invocation inv;
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  const std::map<std::string, std::string> descriptions{
      {"simulate", "Generate a labelled feeder dataset and waveform files"},
      {"train", "Fit a pca, fda, svm or msvm detector"},
      {"detect", "Apply a trained detector to a dataset and write a report"},
      {"evaluate", "Summarize a detection report"},
  };
  for (const char* name : {"simulate", "train", "detect", "evaluate"}) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_path, "Run configuration (key = value)");
    sub->add_option("--seed", seed, "Overrides the seed from the configuration");
    sub->add_option("--out", out_path, "Output directory (must exist)");
  }

  std::vector<std::string> argv_store{"hifdetect"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const auto* chosen = app.get_subcommands().front();
  inv.command = chosen->get_name();
  if (!config_path.empty()) inv.config = config_path;
  if (chosen->count("--seed") > 0) inv.seed = seed;
  if (!out_path.empty()) inv.out = out_path;

  try {
    const RunConfig config = effective_config(inv);
    if (inv.command == "evaluate") {
      cmd_evaluate(config, inv.out, out);
    } else {
      if (!inv.out) throw ConfigError("--out is required for " + inv.command);
      if (inv.command == "simulate") cmd_simulate(config, *inv.out, out);
      if (inv.command == "train") cmd_train(config, *inv.out, out);
      if (inv.command == "detect") cmd_detect(config, *inv.out, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hif::cli
