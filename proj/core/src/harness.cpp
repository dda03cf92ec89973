#include "dperm/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dperm/objective.hpp"
#include "dperm/rng.hpp"
#include "dperm/sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dperm {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string sanitize_csv(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

const std::set<std::string>& known_algorithms() {
  static const std::set<std::string> algos = {"dp_gd", "dp_sgd", "out_gd", "out_sgd"};
  return algos;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.dataset_path.empty())
    throw std::invalid_argument("config: dataset_path is required");
  if (cfg.dataset_format != "libsvm" && cfg.dataset_format != "csv" &&
      cfg.dataset_format != "csv_header")
    throw std::invalid_argument("config: dataset_format must be libsvm, csv or csv_header");
  if (cfg.algorithms.empty()) throw std::invalid_argument("config: algorithms empty");
  for (const std::string& a : cfg.algorithms) {
    if (!known_algorithms().count(a))
      throw std::invalid_argument("config: unknown algorithm " + a);
  }
  if (cfg.epsilons.empty()) throw std::invalid_argument("config: epsilon grid empty");
  for (double e : cfg.epsilons) {
    if (!(e > 0.0)) throw std::invalid_argument("config: epsilon values must be > 0");
  }
  if (cfg.t_grid.empty()) throw std::invalid_argument("config: T grid empty");
  for (std::int64_t t : cfg.t_grid) {
    if (t < 1) throw std::invalid_argument("config: T values must be >= 1");
  }
  if (cfg.eta_grid.empty()) throw std::invalid_argument("config: learning-rate grid empty");
  for (double e : cfg.eta_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("config: learning rates must be > 0");
  }
  if (cfg.repeats < 1) throw std::invalid_argument("config: repeats must be >= 1");
  if (!(cfg.q > 0.0 && cfg.q <= 1.0)) throw std::invalid_argument("config: q must be in (0, 1]");
  if (!(cfg.clip > 0.0)) throw std::invalid_argument("config: clip must be > 0");
  if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("config: lambda must be >= 0");
  if (cfg.output_dir.empty()) throw std::invalid_argument("config: output_dir empty");
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dataset_path"] = cfg.dataset_path;
  j["dataset_format"] = cfg.dataset_format;
  j["dataset_id"] = cfg.dataset_id;
  j["objective"] = cfg.objective == LossKind::logistic ? "logistic" : "softmax";
  j["lambda"] = cfg.lambda;
  j["clip"] = cfg.clip;
  j["high_dimensional"] = cfg.high_dimensional;
  j["algorithms"] = cfg.algorithms;
  j["epsilons"] = cfg.epsilons;
  j["delta"] = cfg.delta;
  j["t_grid"] = cfg.t_grid;
  j["eta_grid"] = cfg.eta_grid;
  j["q"] = cfg.q;
  j["repeats"] = cfg.repeats;
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  j["force_sigma_zero"] = cfg.force_sigma_zero;
  j["write_traces"] = cfg.write_traces;
  j["row_normalize"] = cfg.row_normalize;
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const std::set<std::string> known = {
      "dataset_path", "dataset_format", "dataset_id", "objective",  "lambda",
      "clip",         "high_dimensional", "algorithms", "epsilons", "delta",
      "t_grid",       "eta_grid",       "q",          "repeats",    "master_seed",
      "output_dir",   "force_sigma_zero", "write_traces", "row_normalize"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key()))
      throw std::invalid_argument("config: unknown key " + item.key());
  }

  ExperimentConfig cfg;
  cfg.dataset_path = j.at("dataset_path").get<std::string>();
  if (j.contains("dataset_format")) cfg.dataset_format = j["dataset_format"].get<std::string>();
  if (j.contains("dataset_id")) cfg.dataset_id = j["dataset_id"].get<std::string>();
  if (j.contains("objective")) {
    const std::string o = j["objective"].get<std::string>();
    if (o == "logistic")
      cfg.objective = LossKind::logistic;
    else if (o == "softmax")
      cfg.objective = LossKind::softmax;
    else
      throw std::invalid_argument("config: objective must be logistic or softmax");
  }
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("high_dimensional")) cfg.high_dimensional = j["high_dimensional"].get<bool>();
  if (j.contains("clip"))
    cfg.clip = j["clip"].get<double>();
  else if (cfg.high_dimensional)
    cfg.clip = 0.5;
  if (j.contains("algorithms")) cfg.algorithms = j["algorithms"].get<std::vector<std::string>>();
  if (j.contains("epsilons")) cfg.epsilons = j["epsilons"].get<std::vector<double>>();
  if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
  if (j.contains("t_grid")) cfg.t_grid = j["t_grid"].get<std::vector<std::int64_t>>();
  if (j.contains("eta_grid"))
    cfg.eta_grid = j["eta_grid"].get<std::vector<double>>();
  else if (cfg.high_dimensional)
    cfg.eta_grid = {0.2, 2.0, 10.0};
  if (j.contains("q")) cfg.q = j["q"].get<double>();
  if (j.contains("repeats")) cfg.repeats = j["repeats"].get<std::int64_t>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("force_sigma_zero")) cfg.force_sigma_zero = j["force_sigma_zero"].get<bool>();
  if (j.contains("write_traces")) cfg.write_traces = j["write_traces"].get<bool>();
  if (j.contains("row_normalize")) cfg.row_normalize = j["row_normalize"].get<bool>();

  if (cfg.dataset_id.empty()) cfg.dataset_id = fs::path(cfg.dataset_path).stem().string();
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

double excess_risk(const Dataset& ds_train, const LossSpec& spec,
                   const std::vector<double>& params, const std::vector<double>& x_star) {
  return full_objective(spec, ds_train, params) - full_objective(spec, ds_train, x_star);
}

double excess_risk(const Dataset& ds_train, const LossSpec& spec,
                   const std::vector<double>& params) {
  return excess_risk(ds_train, spec, params, nonprivate_optimum(ds_train, spec, 1e-10));
}

double recheck_epsilon(const std::string& algorithm, double z, double q, std::int64_t steps,
                       double delta) {
  if (algorithm == "dp_gd") return epsilon_for(z, 1.0, static_cast<int>(steps), delta);
  if (algorithm == "dp_sgd") return epsilon_for(z, q, static_cast<int>(steps), delta);
  if (algorithm == "out_gd" || algorithm == "out_sgd") return single_shot_epsilon(z, delta);
  throw std::invalid_argument("recheck_epsilon: unknown algorithm " + algorithm);
}

std::string trace_to_jsonl(const RunTrace& trace, double final_objective,
                           double accuracy_pct) {
  std::string out;
  for (const StepRecord& s : trace.steps) {
    json rec;
    rec["step"] = s.step;
    rec["eta"] = s.eta;
    rec["objective"] = s.objective;
    rec["grad_norm"] = s.grad_norm;
    out += rec.dump();
    out += '\n';
  }
  json summary;
  summary["summary"]["seed"] = trace.seed;
  summary["summary"]["final_objective"] = final_objective;
  summary["summary"]["accuracy"] = accuracy_pct;
  summary["summary"]["final_params"] = trace.final_params;
  if (!trace.averaged_params.empty())
    summary["summary"]["averaged_params"] = trace.averaged_params;
  out += summary.dump();
  out += '\n';
  return out;
}

void emit_table(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_table: no rows");
  std::string out =
      "dataset,algorithm,epsilon,delta,T,eta,mean_accuracy,std_accuracy,"
      "mean_excess_risk,repeats,noise_multiplier,feasible,note\n";
  for (const ResultRow& r : rows) {
    out += sanitize_csv(r.dataset) + ',' + sanitize_csv(r.algorithm) + ',' +
           fmt6(r.epsilon) + ',' + fmt6(r.delta) + ',' + std::to_string(r.chosen_t) + ',' +
           fmt6(r.chosen_eta) + ',' + fmt6(r.mean_accuracy) + ',' + fmt6(r.std_accuracy) +
           ',' + fmt6(r.mean_excess_risk) + ',' + std::to_string(r.repeats) + ',' +
           fmt6(r.noise_multiplier) + ',' + (r.feasible ? "1" : "0") + ',' +
           sanitize_csv(r.note) + '\n';
  }
  write_file(path, out);
}

void emit_grid(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_grid: no rows");
  std::string out =
      "dataset,algorithm,epsilon,T,eta,mean_accuracy,std_accuracy,mean_excess_risk,"
      "repeats,noise_multiplier,selected\n";
  for (const ResultRow& r : rows) {
    out += sanitize_csv(r.dataset) + ',' + sanitize_csv(r.algorithm) + ',' +
           fmt6(r.epsilon) + ',' + std::to_string(r.chosen_t) + ',' + fmt6(r.chosen_eta) +
           ',' + fmt6(r.mean_accuracy) + ',' + fmt6(r.std_accuracy) + ',' +
           fmt6(r.mean_excess_risk) + ',' + std::to_string(r.repeats) + ',' +
           fmt6(r.noise_multiplier) + ',' + (r.selected ? "1" : "0") + '\n';
  }
  write_file(path, out);
}

void emit_plot_data(const std::vector<CurvatureTrace>& traces, const std::string& path) {
  if (traces.empty()) throw std::invalid_argument("emit_plot_data: no traces");
  std::string out = "step,lambda,avg_curvature,min_curvature,nu_hat,nu_se\n";
  bool any = false;
  for (const CurvatureTrace& tr : traces) {
    for (const CurvatureSample& s : tr.samples) {
      any = true;
      out += std::to_string(s.step) + ',' + fmt6(tr.lambda) + ',' + fmt6(s.avg_curvature) +
             ',' + fmt6(s.min_curvature) + ',';
      if (s.nu_hat) out += fmt6(*s.nu_hat);
      out += ',';
      if (s.nu_se) out += fmt6(*s.nu_se);
      out += '\n';
    }
  }
  if (!any) throw std::invalid_argument("emit_plot_data: traces have no samples");
  write_file(path, out);
}

void write_manifest(const std::string& dir, const std::string& config_canonical,
                    const std::vector<std::pair<std::string, std::string>>& file_hashes) {
  json m;
  m["config"] = json::parse(config_canonical);
  m["config_hash"] = sha256_hex(config_canonical);
  json files = json::object();
  for (const auto& [name, hash] : file_hashes) files[name] = hash;
  m["files"] = files;
  m["notes"]["delta_rule"] = "1/n_train^2 unless delta is set explicitly";
  m["notes"]["selection"] =
      "best mean validation accuracy; ties broken by smaller T, then smaller eta; "
      "selection itself is not charged to the privacy budget";
  m["notes"]["baseline_noise"] =
      "output-perturbation baselines calibrate z with the single-release Gaussian "
      "conversion";
  write_file(dir + "/manifest.json", m.dump(2) + "\n");
}

namespace {

struct GridCell {
  std::int64_t steps = 0;
  double eta = 0.0;
  double z = 0.0;
  Schedule schedule;
};

struct CellStats {
  double mean_acc = 0.0;
  double std_acc = 0.0;
  double mean_risk = 0.0;
};

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset_format == "libsvm") return parse_libsvm_file(cfg.dataset_path);
  return parse_csv_file(cfg.dataset_path, cfg.dataset_format == "csv_header");
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env = std::getenv("DPERM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (cfg.dataset_id.empty()) cfg.dataset_id = fs::path(cfg.dataset_path).stem().string();
  validate_config(cfg);

  Dataset full = load_dataset(cfg);
  if (cfg.row_normalize) full = row_l2_normalize(full);
  SplitSpec split{0.8, mix_seed({cfg.master_seed, hash_bytes("split")})};
  auto [train, test] = train_test_split(full, split);

  LossSpec spec;
  spec.kind = cfg.objective;
  spec.lambda = cfg.lambda;
  spec.clip = cfg.clip;

  const double n_train = static_cast<double>(train.n);
  const double delta = cfg.delta > 0.0 ? cfg.delta : 1.0 / (n_train * n_train);
  double beta_hat = smoothness_bound(train, spec);
  if (spec.kind == LossKind::softmax)
    beta_hat = 2.0 * (beta_hat - spec.lambda) + spec.lambda;  // softmax curvature cap is 1/2

  const std::vector<double> x_star = nonprivate_optimum(train, spec, 1e-10);
  const double f_star = full_objective(spec, train, x_star);

  fs::create_directories(cfg.output_dir);
  if (cfg.write_traces) fs::create_directories(cfg.output_dir + "/traces");

  std::vector<ResultRow> selected_rows;
  std::vector<ResultRow> grid_rows;
  std::vector<std::pair<std::string, std::string>> file_hashes;

  for (const std::string& algo : cfg.algorithms) {
    for (double eps : cfg.epsilons) {
      std::vector<GridCell> cells;
      std::string note;
      const double q_for_algo = algo == "dp_sgd" ? cfg.q : 1.0;

      if (algo == "dp_gd" || algo == "dp_sgd") {
        for (std::int64_t steps : cfg.t_grid) {
          double z;
          try {
            z = calibrate_noise({eps, delta}, q_for_algo, static_cast<int>(steps));
          } catch (const std::exception& e) {
            note = e.what();
            continue;
          }
          for (double eta : cfg.eta_grid) {
            GridCell c;
            c.steps = steps;
            c.eta = eta;
            c.z = z;
            if (algo == "dp_gd") {
              c.schedule = {ScheduleKind::constant, eta, 1.0, 1.0, 1.0, 0};
            } else {
              // SGD runs at twice the GD rate and halves after floor(T/2)
              c.schedule = {ScheduleKind::halve_at_midpoint, 2.0 * eta, 1.0, 1.0, 1.0, steps};
            }
            cells.push_back(c);
          }
        }
      } else {
        const double z = single_shot_noise_multiplier({eps, delta});
        const double eta_cap = 1.0 / beta_hat * (1.0 + 1e-12);
        for (double eta : cfg.eta_grid) {
          if (eta > eta_cap) continue;
          if (algo == "out_gd") {
            for (std::int64_t steps : cfg.t_grid) {
              cells.push_back({steps, eta, z, {ScheduleKind::constant, eta, 1.0, 1.0, 1.0, 0}});
            }
          } else {
            cells.push_back({train.n, eta, z, {ScheduleKind::constant, eta, 1.0, 1.0, 1.0, 0}});
          }
        }
        if (cells.empty()) note = "no learning rate in grid satisfies eta <= 1/beta_hat";
      }

      if (cells.empty()) {
        ResultRow row;
        row.dataset = cfg.dataset_id;
        row.algorithm = algo;
        row.epsilon = eps;
        row.delta = delta;
        row.feasible = false;
        row.repeats = 0;
        row.note = note.empty() ? "no feasible grid cell" : note;
        selected_rows.push_back(row);
        continue;
      }

      std::vector<CellStats> stats(cells.size());
      std::size_t best = 0;
      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const GridCell& cell = cells[ci];
        std::vector<double> accs, risks;
        accs.reserve(static_cast<std::size_t>(cfg.repeats));
        risks.reserve(static_cast<std::size_t>(cfg.repeats));

        for (std::int64_t r = 0; r < cfg.repeats; ++r) {
          const std::uint64_t seed =
              mix_seed({cfg.master_seed, hash_bytes(algo), std::bit_cast<std::uint64_t>(eps),
                        static_cast<std::uint64_t>(cell.steps),
                        std::bit_cast<std::uint64_t>(cell.eta), static_cast<std::uint64_t>(r)});
          std::vector<double> params;
          RunTrace trace;
          if (algo == "dp_gd") {
            GdConfig gc;
            gc.steps = cell.steps;
            gc.schedule = cell.schedule;
            gc.clip = cfg.clip;
            gc.sigma = cfg.force_sigma_zero ? 0.0 : sigma_for_gd(cfg.clip, train.n, cell.z);
            gc.seed = seed;
            auto out = dp_gd(train, spec, gc);
            params = std::move(out.first);
            trace = std::move(out.second);
          } else if (algo == "dp_sgd") {
            SgdConfig sc;
            sc.steps = cell.steps;
            sc.schedule = cell.schedule;
            sc.clip = cfg.clip;
            sc.noise_multiplier = cfg.force_sigma_zero ? 0.0 : cell.z;
            sc.sampling = SamplingMode::poisson;
            sc.q = cfg.q;
            sc.seed = seed;
            auto out = dp_sgd(train, spec, sc);
            params = std::move(out.first);
            trace = std::move(out.second);
          } else if (algo == "out_gd") {
            if (cfg.force_sigma_zero) {
              GdConfig gc;
              gc.steps = cell.steps;
              gc.schedule = cell.schedule;
              gc.clip = cfg.clip;
              gc.sigma = 0.0;
              gc.seed = seed;
              auto out = dp_gd(train, spec, gc);
              params = std::move(out.first);
              trace = std::move(out.second);
            } else {
              params = output_perturbation_gd(train, spec, {eps, delta}, cell.steps, cell.eta,
                                              seed);
              trace.seed = seed;
              trace.final_params = params;
            }
          } else {
            if (cfg.force_sigma_zero) {
              params = train_onepass_sgd(train, spec, cell.eta, seed);
            } else {
              params = output_perturbation_sgd(train, spec, {eps, delta}, cell.eta, seed);
            }
            trace.seed = seed;
            trace.final_params = params;
          }

          const double acc = accuracy_percent(spec, test, params);
          const double fval = full_objective(spec, train, params);
          accs.push_back(acc);
          risks.push_back(fval - f_star);

          if (cfg.write_traces) {
            const std::string fname = cfg.dataset_id + "_" + algo + "_eps" + fmt6(eps) +
                                      "_T" + std::to_string(cell.steps) + "_eta" +
                                      fmt6(cell.eta) + "_r" + std::to_string(r) + ".jsonl";
            const std::string content = trace_to_jsonl(trace, fval, acc);
            write_file(cfg.output_dir + "/traces/" + fname, content);
            file_hashes.emplace_back("traces/" + fname, sha256_hex(content));
          }
        }

        double mean_acc = 0.0, mean_risk = 0.0;
        for (double a : accs) mean_acc += a;
        for (double v : risks) mean_risk += v;
        mean_acc /= static_cast<double>(accs.size());
        mean_risk /= static_cast<double>(risks.size());
        double var = 0.0;
        for (double a : accs) var += (a - mean_acc) * (a - mean_acc);
        const double std_acc =
            accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
        stats[ci] = {mean_acc, std_acc, mean_risk};

        const CellStats& b = stats[best];
        const CellStats& s = stats[ci];
        if (ci != 0 && (s.mean_acc > b.mean_acc ||
                        (s.mean_acc == b.mean_acc &&
                         (cell.steps < cells[best].steps ||
                          (cell.steps == cells[best].steps && cell.eta < cells[best].eta)))))
          best = ci;
      }

      if (!cfg.force_sigma_zero) {
        const double eps_again =
            recheck_epsilon(algo, cells[best].z, q_for_algo, cells[best].steps, delta);
        if (eps_again > eps + 1e-9)
          throw std::logic_error("privacy ledger violation for " + algo + ": recomputed " +
                                 fmt6(eps_again) + " > declared " + fmt6(eps));
      }

      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        ResultRow row;
        row.dataset = cfg.dataset_id;
        row.algorithm = algo;
        row.epsilon = eps;
        row.delta = delta;
        row.chosen_t = cells[ci].steps;
        row.chosen_eta = cells[ci].eta;
        row.mean_accuracy = stats[ci].mean_acc;
        row.std_accuracy = stats[ci].std_acc;
        row.mean_excess_risk = stats[ci].mean_risk;
        row.repeats = cfg.repeats;
        row.noise_multiplier = cfg.force_sigma_zero ? 0.0 : cells[ci].z;
        row.selected = ci == best;
        if (cfg.force_sigma_zero) row.note = "ablation: noise disabled";
        grid_rows.push_back(row);
        if (ci == best) selected_rows.push_back(row);
      }
    }
  }

  emit_table(selected_rows, cfg.output_dir + "/results.csv");
  if (!grid_rows.empty()) emit_grid(grid_rows, cfg.output_dir + "/results_grid.csv");

  file_hashes.emplace_back("results.csv", sha256_file_hex(cfg.output_dir + "/results.csv"));
  if (!grid_rows.empty())
    file_hashes.emplace_back("results_grid.csv",
                             sha256_file_hex(cfg.output_dir + "/results_grid.csv"));
  std::sort(file_hashes.begin(), file_hashes.end());
  write_manifest(cfg.output_dir, config_to_json(cfg).dump(), file_hashes);

  return selected_rows;
}

Dataset synthetic_logistic(std::int64_t n, std::int32_t p, double margin, std::uint64_t seed) {
  if (n < 2 || p < 1) throw std::invalid_argument("synthetic_logistic: need n >= 2, p >= 1");
  Rng rng(seed);
  Dataset ds;
  ds.n = static_cast<std::int32_t>(n);
  ds.p = p;
  ds.num_classes = 2;
  ds.raw_label_values = {0.0, 1.0};
  ds.rows.reserve(static_cast<std::size_t>(n));
  ds.labels.reserve(static_cast<std::size_t>(n));
  const double wstar = 1.0 / std::sqrt(static_cast<double>(p));  // planted direction (1,..,1)/sqrt(p)
  std::vector<double> v(static_cast<std::size_t>(p));
  for (std::int64_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& x : v) {
        x = rng.gaussian();
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    FeatureRow row;
    row.dim = p;
    double logit = 0.0;
    for (std::int32_t j = 0; j < p; ++j) {
      const double x = v[static_cast<std::size_t>(j)] * inv;
      if (x != 0.0) row.entries.emplace_back(j, x);
      logit += wstar * x;
    }
    const std::int32_t y = rng.bernoulli(sigmoid(margin * logit)) ? 1 : 0;
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(y);
  }
  validate(ds);
  return ds;
}

SlopeEstimate scaling_study(const std::string& family, const std::vector<double>& points,
                            const ScalingConfig& base) {
  if (family != "epsilon" && family != "n")
    throw std::invalid_argument("scaling_study: family must be epsilon or n");
  if (points.size() < 4) throw std::invalid_argument("scaling_study: need >= 4 points");
  if (base.repeats < 50) throw std::invalid_argument("scaling_study: need repeats >= 50");
  for (double v : points) {
    if (!(v > 0.0)) throw std::invalid_argument("scaling_study: points must be > 0");
  }

  LossSpec spec;
  spec.kind = LossKind::logistic;
  spec.lambda = base.lambda;
  spec.clip = base.clip;

  SlopeEstimate est;
  est.points = points;
  std::vector<double> xs, ys;

  for (double point : points) {
    const std::int64_t n = family == "n" ? std::llround(point) : base.n;
    const std::uint64_t ds_seed =
        family == "n" ? mix_seed({base.seed, static_cast<std::uint64_t>(n)}) : base.seed;
    Dataset ds = synthetic_logistic(n, base.p, base.margin, ds_seed);

    const double beta = smoothness_bound(ds, spec);
    const double eta = 1.0 / beta;
    std::vector<double> zero(static_cast<std::size_t>(base.p), 0.0);
    const HessianMatrix h0 = hessian(spec, ds, zero);
    const double nu_hat = average_curvature(h0);
    const std::int64_t steps = static_cast<std::int64_t>(
        std::ceil(2.0 * std::log(static_cast<double>(n)) / (eta * nu_hat)));

    const double eps = family == "epsilon" ? point : base.epsilon;
    const double delta = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    const double z = calibrate_noise({eps, delta}, 1.0, static_cast<int>(steps));
    const double sigma = base.force_sigma_zero ? 0.0 : sigma_for_gd(base.clip, n, z);

    const std::vector<double> x_star = nonprivate_optimum(ds, spec, 1e-10);
    const double f_star = full_objective(spec, ds, x_star);

    double mean_risk = 0.0;
    for (std::int64_t r = 0; r < base.repeats; ++r) {
      GdConfig gc;
      gc.steps = steps;
      gc.schedule = {ScheduleKind::constant, eta, 1.0, 1.0, 1.0, 0};
      gc.clip = base.clip;
      gc.sigma = sigma;
      gc.seed = mix_seed({base.seed, hash_bytes("scale"), std::bit_cast<std::uint64_t>(point),
                          static_cast<std::uint64_t>(r)});
      auto [params, trace] = dp_gd(ds, spec, gc);
      mean_risk += full_objective(spec, ds, params) - f_star;
    }
    mean_risk /= static_cast<double>(base.repeats);
    if (!(mean_risk > 0.0))
      throw std::runtime_error("scaling_study: non-positive mean risk at point " + fmt6(point));
    est.mean_risks.push_back(mean_risk);
    xs.push_back(std::log(point));
    ys.push_back(std::log(mean_risk));
  }

  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("scaling_study: degenerate points");
  est.slope = sxy / sxx;
  const double intercept = my - est.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + est.slope * xs[i]);
    rss += e * e;
  }
  est.se = std::sqrt(rss / (k - 2.0) / sxx);
  return est;
}

}  // namespace dperm
