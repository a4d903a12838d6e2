// Command-line surface over the subsample shared library: bound evaluation,
// sampling-stage planning, parameter sweeps, Monte Carlo simulation, and
// verification checks, with machine-readable JSON/CSV output.
//
// Exit codes: 0 success, 1 usage, 2 validity/precondition violation,
// 3 infeasible plan, 4 numeric failure, 5 verification check failed.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subsample/subsample.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 4;
constexpr int kExitCheckFailed = 5;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal insertion-ordered JSON emitter so floats carry 17 significant
// digits and output bytes are stable across runs.
class JsonObject {
 public:
  void field(const std::string& key, double v) { raw(key, fmt17(v)); }
  void field(const std::string& key, int v) { raw(key, std::to_string(v)); }
  void field(const std::string& key, long long v) {
    raw(key, std::to_string(v));
  }
  void field(const std::string& key, unsigned long long v) {
    raw(key, std::to_string(v));
  }
  void field(const std::string& key, bool v) { raw(key, v ? "true" : "false"); }
  void field(const std::string& key, const std::string& v) {
    raw(key, quote(v));
  }
  void field_null(const std::string& key) { raw(key, "null"); }
  void raw(const std::string& key, const std::string& value) {
    if (!body_.empty()) body_ += ", ";
    body_ += quote(key) + ": " + value;
  }
  std::string str() const { return "{" + body_ + "}"; }

  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    out += "\"";
    return out;
  }

 private:
  std::string body_;
};

std::string json_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  out += "]";
  return out;
}

int report_error(ss_status status) {
  std::cerr << "error: " << ss_last_error() << "\n";
  return static_cast<int>(status);
}

int emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitNumeric;
  }
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    double v = std::stod(item, &pos);
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
      ++pos;
    if (pos != item.size())
      throw CLI::ValidationError("list", "not a number: " + item);
    values.push_back(v);
  }
  return values;
}

// Fills flag variables that were not passed on the command line from a JSON
// config file whose keys are the snake_case flag names. Flags win over the
// config; the SUBSAMPLE_SEED environment variable is the weakest seed source.
class Defaults {
 public:
  Defaults(CLI::App* cmd, const std::string& config_path) : cmd_(cmd) {
    if (config_path.empty()) return;
    std::ifstream is(config_path);
    if (!is) throw CLI::ValidationError("--config", "cannot open " + config_path);
    try {
      cfg_ = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ValidationError("--config", e.what());
    }
    if (!cfg_.is_object())
      throw CLI::ValidationError("--config", "config must be a JSON object");
  }

  template <typename T>
  void apply(const std::string& flag, T& value) const {
    const nlohmann::json* entry = lookup(flag);
    if (entry == nullptr) return;
    try {
      value = entry->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw CLI::ValidationError("--config", "bad type for key " + key_of(flag));
    }
  }

  // Comma-separated list flags also accept JSON arrays in the config.
  void apply_list(const std::string& flag, std::string& value) const {
    const nlohmann::json* entry = lookup(flag);
    if (entry == nullptr) return;
    if (entry->is_string()) {
      value = entry->get<std::string>();
      return;
    }
    if (!entry->is_array())
      throw CLI::ValidationError("--config", key_of(flag) + " must be an array or string");
    std::string joined;
    for (const auto& item : *entry) {
      if (!joined.empty()) joined += ",";
      joined += item.dump();
    }
    value = joined;
  }

  void apply_seed(const std::string& flag, uint64_t& value) const {
    if (cmd_->count(flag) > 0) return;
    const std::string key = key_of(flag);
    if (cfg_.contains(key)) {
      value = cfg_.at(key).get<uint64_t>();
      return;
    }
    const char* env = std::getenv("SUBSAMPLE_SEED");
    if (env != nullptr && *env != '\0') {
      char* end = nullptr;
      unsigned long long parsed = std::strtoull(env, &end, 10);
      if (end == nullptr || *end != '\0')
        throw CLI::ValidationError("SUBSAMPLE_SEED", "not a decimal unsigned integer");
      value = parsed;
    }
  }

  bool has(const std::string& flag) const { return lookup(flag) != nullptr; }

 private:
  static std::string key_of(const std::string& flag) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    for (char& c : key)
      if (c == '-') c = '_';
    return key;
  }

  const nlohmann::json* lookup(const std::string& flag) const {
    if (cmd_->count(flag) > 0) return nullptr;  // flag wins
    const std::string key = key_of(flag);
    auto it = cfg_.find(key);
    return it == cfg_.end() ? nullptr : &*it;
  }

  CLI::App* cmd_;
  nlohmann::json cfg_ = nlohmann::json::object();
};

struct ModelHandle {
  ss_model* ptr = nullptr;
  ~ModelHandle() { ss_model_free(ptr); }
};

struct FamilyHandle {
  ss_family* ptr = nullptr;
  ~FamilyHandle() { ss_family_free(ptr); }
};

// Shared model flags: --model {matern, normalized-tail, tabulated} plus the
// per-model parameters.
struct ModelFlags {
  std::string model = "matern";
  double alpha_scale = 1.0;
  std::string density_csv;
  std::string density_meta;

  void add(CLI::App* cmd) {
    cmd->add_option("--model", model,
                    "spectral model: matern, normalized-tail, tabulated")
        ->default_val("matern");
    cmd->add_option("--alpha-scale", alpha_scale,
                    "scale of the matern model (covariance decay rate)")
        ->default_val(1.0);
    cmd->add_option("--density-csv", density_csv,
                    "tabulated model: CSV file with header lambda,density");
    cmd->add_option("--density-meta", density_meta,
                    "tabulated model: JSON metadata file with tail_exponent");
  }

  void apply(const Defaults& defaults) {
    defaults.apply("--model", model);
    defaults.apply("--alpha-scale", alpha_scale);
    defaults.apply("--density-csv", density_csv);
    defaults.apply("--density-meta", density_meta);
  }

  int create(ModelHandle& handle) const {
    ss_status status;
    if (model == "matern") {
      status = ss_model_matern_create(alpha_scale, &handle.ptr);
    } else if (model == "normalized-tail") {
      status = ss_model_normalized_tail_create(&handle.ptr);
    } else if (model == "tabulated") {
      if (density_csv.empty() || density_meta.empty()) {
        std::cerr << "error: --model tabulated requires --density-csv and --density-meta\n";
        return kExitUsage;
      }
      status = ss_model_tabulated_load(density_csv.c_str(),
                                       density_meta.c_str(), &handle.ptr);
    } else {
      std::cerr << "error: unknown model " << model << "\n";
      return kExitUsage;
    }
    if (status != SS_OK) return report_error(status);
    return 0;
  }
};

// Shared scheme flags: either an explicit (--omega, --n, --lambda) triple or
// a schedule stage --stage N giving omega = 2^N, n = N^2 2^N,
// lambda = band_ratio * omega. --lambda defaults to 0.75 * omega.
struct SchemeFlags {
  int stage = 0;
  double omega = 0.0;
  long long n = 0;
  double lambda = 0.0;
  double band_ratio = 0.75;

  void add(CLI::App* cmd) {
    cmd->add_option("--stage", stage,
                    "schedule stage N: omega = 2^N, n = N^2 2^N, "
                    "lambda = band-ratio * omega");
    cmd->add_option("--omega", omega, "sampling rate parameter (> lambda)");
    cmd->add_option("--n", n, "truncation index; 2n+1 samples");
    cmd->add_option("--lambda", lambda,
                    "assumed band edge (default 0.75 * omega)");
    cmd->add_option("--band-ratio", band_ratio,
                    "lambda / omega used by --stage")
        ->default_val(0.75);
  }

  void apply(const Defaults& defaults, CLI::App* cmd) {
    defaults.apply("--stage", stage);
    defaults.apply("--omega", omega);
    defaults.apply("--n", n);
    defaults.apply("--lambda", lambda);
    defaults.apply("--band-ratio", band_ratio);
    stage_given_ = cmd->count("--stage") > 0 || defaults.has("--stage");
    lambda_given_ = cmd->count("--lambda") > 0 || defaults.has("--lambda");
  }

  bool any_given() const { return stage_given_ || omega > 0.0 || n > 0; }

  int resolve(ss_scheme& out) const {
    ss_scheme scheme{};
    if (stage_given_) {
      if (stage < 1 || stage > 62) {
        std::cerr << "error: --stage must be in [1, 62]\n";
        return kExitUsage;
      }
      scheme.omega = std::ldexp(1.0, stage);
      scheme.n = static_cast<long long>(stage) * stage *
                 (static_cast<long long>(1) << stage);
      scheme.lambda_band =
          lambda_given_ ? lambda : band_ratio * scheme.omega;
    } else {
      if (omega <= 0.0 || n <= 0) {
        std::cerr << "error: need --stage or both --omega and --n\n";
        return kExitUsage;
      }
      scheme.omega = omega;
      scheme.n = n;
      scheme.lambda_band = lambda_given_ ? lambda : 0.75 * omega;
    }
    out = scheme;
    return 0;
  }

 private:
  bool stage_given_ = false;
  bool lambda_given_ = false;
};

std::string breakdown_csv(const std::vector<std::string>& header,
                          const std::vector<std::string>& row) {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i)
    out += (i > 0 ? "," : "") + header[i];
  out += "\n";
  for (size_t i = 0; i < row.size(); ++i) out += (i > 0 ? "," : "") + row[i];
  out += "\n";
  return out;
}

// ------------------------------------------------------------------ bound

struct BoundArgs {
  ModelFlags model;
  SchemeFlags scheme;
  double t = 0.0;
  double T = 0.0;
  bool pointwise = false;
  bool uniform = false;
  double z = 0.0;
  std::string out_format = "json";
  std::string config;
  CLI::App* cmd = nullptr;

  void add(CLI::App* parent) {
    cmd = parent->add_subcommand(
        "bound", "evaluate the reconstruction error bound");
    model.add(cmd);
    scheme.add(cmd);
    cmd->add_option("--t", t, "time for the pointwise bound");
    cmd->add_option("--T", T, "horizon for the uniform bound over [0, T]");
    cmd->add_flag("--pointwise", pointwise, "pointwise bound at --t");
    cmd->add_flag("--uniform", uniform, "uniform bound over [0, --T]");
    cmd->add_option("--z", z, "explicit interpolation parameter in (0, 1); "
                              "default picks the minimizer");
    cmd->add_option("--out", out_format, "output format: json or csv")
        ->default_val("json");
    cmd->add_option("--config", config, "JSON file with default flag values");
  }

  int run() {
    Defaults defaults(cmd, config);
    model.apply(defaults);
    scheme.apply(defaults, cmd);
    defaults.apply("--t", t);
    defaults.apply("--T", T);
    defaults.apply("--pointwise", pointwise);
    defaults.apply("--uniform", uniform);
    defaults.apply("--z", z);
    defaults.apply("--out", out_format);
    const bool t_given = cmd->count("--t") > 0 || defaults.has("--t");
    const bool T_given = cmd->count("--T") > 0 || defaults.has("--T");
    const bool z_given = cmd->count("--z") > 0 || defaults.has("--z");

    bool use_uniform;
    if (pointwise && uniform) {
      std::cerr << "error: --pointwise and --uniform are mutually exclusive\n";
      return kExitUsage;
    } else if (pointwise || uniform) {
      use_uniform = uniform;
    } else if (t_given != T_given) {
      use_uniform = T_given;
    } else {
      std::cerr << "error: pick --pointwise with --t or --uniform with --T\n";
      return kExitUsage;
    }
    if (use_uniform && !T_given) {
      std::cerr << "error: --uniform requires --T\n";
      return kExitUsage;
    }
    if (!use_uniform && !t_given) {
      std::cerr << "error: --pointwise requires --t\n";
      return kExitUsage;
    }
    if (out_format != "json" && out_format != "csv") {
      std::cerr << "error: --out must be json or csv\n";
      return kExitUsage;
    }

    ModelHandle handle;
    if (int rc = model.create(handle); rc != 0) return rc;
    ss_scheme sch{};
    if (int rc = scheme.resolve(sch); rc != 0) return rc;

    ss_bound_breakdown b{};
    ss_status status;
    if (use_uniform) {
      status = ss_bound_uniform(T, sch, handle.ptr, &b);
    } else if (z_given) {
      status = ss_bound_pointwise(t, sch, handle.ptr, z, &b);
    } else {
      status = ss_bound_pointwise_auto(t, sch, handle.ptr, &b);
    }
    if (status != SS_OK) return report_error(status);

    if (use_uniform) {
      if (out_format == "csv")
        return emit(breakdown_csv({"z_star", "c_tilde", "d_tilde", "tail", "total"},
                                  {fmt17(b.z_used), fmt17(b.c_value),
                                   fmt17(b.d_value), fmt17(b.tail),
                                   fmt17(b.total)}),
                    "");
      JsonObject obj;
      obj.field("z_star", b.z_used);
      obj.field("c_tilde", b.c_value);
      obj.field("d_tilde", b.d_value);
      obj.field("tail", b.tail);
      obj.field("total", b.total);
      return emit(obj.str() + "\n", "");
    }
    if (out_format == "csv")
      return emit(breakdown_csv(
                      {"z_used", "c_value", "d_value", "tail", "total", "valid"},
                      {fmt17(b.z_used), fmt17(b.c_value), fmt17(b.d_value),
                       fmt17(b.tail), fmt17(b.total), b.valid ? "1" : "0"}),
                  "");
    JsonObject obj;
    obj.field("z_used", b.z_used);
    obj.field("c_value", b.c_value);
    obj.field("d_value", b.d_value);
    obj.field("tail", b.tail);
    obj.field("total", b.total);
    obj.field("valid", b.valid != 0);
    return emit(obj.str() + "\n", "");
  }
};

// ------------------------------------------------------------------ plan

struct PlanFamilyFlags {
  double alpha = 2.0;
  double c_x = 1.0;
  double band_ratio = 0.75;
  int max_stage = 40;
  bool use_quadrature_s = false;
  bool force_general_route = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "power family exponent in (1, 2]; 2 is Gaussian")
        ->default_val(2.0);
    cmd->add_option("--c-x", c_x, "determinative constant")->default_val(1.0);
    cmd->add_option("--band-ratio", band_ratio, "lambda / omega of the schedule")
        ->default_val(0.75);
    cmd->add_option("--max-stage", max_stage, "largest stage N to try")
        ->default_val(40);
    cmd->add_flag("--use-quadrature-s", use_quadrature_s,
                  "certify reliability with the quadrature integral instead "
                  "of the closed-form envelope");
    cmd->add_flag("--force-general-route", force_general_route,
                  "use the two-inequality reliability route even for the "
                  "Gaussian family");
  }

  void apply(const Defaults& defaults) {
    defaults.apply("--alpha", alpha);
    defaults.apply("--c-x", c_x);
    defaults.apply("--band-ratio", band_ratio);
    defaults.apply("--max-stage", max_stage);
    defaults.apply("--use-quadrature-s", use_quadrature_s);
    defaults.apply("--force-general-route", force_general_route);
  }
};

std::string plan_result_json(const ss_plan_result& r, double epsilon,
                             double delta, double p, double T) {
  JsonObject obj;
  obj.field("epsilon", epsilon);
  obj.field("delta", delta);
  obj.field("p", p);
  obj.field("T", T);
  obj.field("feasible", r.feasible != 0);
  obj.field("N", r.N);
  obj.field("omega", r.omega);
  obj.field("n", r.n);
  obj.field("lambda_band", r.lambda_band);
  obj.field("a_tilde_value", r.a_tilde_value);
  obj.field("rhs_value", r.rhs_value);
  obj.field("s_upper", r.s_upper);
  obj.field("gaussian_reliability_ok", r.gaussian_reliability_ok != 0);
  obj.field("threshold_ok", r.threshold_ok != 0);
  if (r.has_prev != 0)
    obj.field("prev_a_tilde", r.prev_a_tilde);
  else
    obj.field_null("prev_a_tilde");
  obj.field("prev_satisfies", r.prev_satisfies != 0);
  return obj.str();
}

struct PlanArgs {
  ModelFlags model;
  PlanFamilyFlags family;
  double epsilon = 0.0;
  double delta = 0.0;
  double p = 2.0;
  double T = 1.0;
  std::string config;
  CLI::App* cmd = nullptr;

  void add(CLI::App* parent) {
    cmd = parent->add_subcommand(
        "plan", "find the smallest schedule stage meeting accuracy and "
                "reliability targets");
    model.add(cmd);
    family.add(cmd);
    cmd->add_option("--epsilon", epsilon, "accuracy target (integral scale)");
    cmd->add_option("--delta", delta, "1 - reliability, in (0, 1)");
    cmd->add_option("--p", p, "integral exponent, >= 1")->default_val(2.0);
    cmd->add_option("--T", T, "horizon")->default_val(1.0);
    cmd->add_option("--config", config, "JSON file with default flag values");
  }

  int run() {
    Defaults defaults(cmd, config);
    model.apply(defaults);
    family.apply(defaults);
    defaults.apply("--epsilon", epsilon);
    defaults.apply("--delta", delta);
    defaults.apply("--p", p);
    defaults.apply("--T", T);

    ModelHandle handle;
    if (int rc = model.create(handle); rc != 0) return rc;
    FamilyHandle fam;
    if (ss_status s = ss_family_power_create(family.alpha, &fam.ptr); s != SS_OK)
      return report_error(s);

    ss_plan_result result{};
    ss_status status = ss_plan(
        epsilon, delta, p, T, handle.ptr, fam.ptr, family.c_x,
        family.band_ratio, family.max_stage, family.use_quadrature_s ? 1 : 0,
        family.force_general_route ? 1 : 0, &result);
    if (status != SS_OK) return report_error(status);
    return emit(plan_result_json(result, epsilon, delta, p, T) + "\n", "");
  }
};

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  ModelFlags model;
  PlanFamilyFlags family;
  std::string epsilons;
  std::string deltas;
  std::string ps = "2";
  double T = 1.0;
  bool match_alpha_to_p = false;
  std::string config;
  CLI::App* cmd = nullptr;

  void add(CLI::App* parent) {
    cmd = parent->add_subcommand(
        "sweep", "plan over a grid of epsilon, delta, p and emit a CSV surface");
    model.add(cmd);
    family.add(cmd);
    cmd->add_option("--epsilons", epsilons, "comma-separated accuracy grid");
    cmd->add_option("--deltas", deltas, "comma-separated 1-reliability grid");
    cmd->add_option("--ps", ps, "comma-separated exponent grid")
        ->default_val("2");
    cmd->add_option("--T", T, "horizon")->default_val(1.0);
    cmd->add_flag("--match-alpha-to-p", match_alpha_to_p,
                  "give each cell the power family with alpha equal to its p");
    cmd->add_option("--config", config, "JSON file with default flag values");
  }

  int run() {
    Defaults defaults(cmd, config);
    model.apply(defaults);
    family.apply(defaults);
    defaults.apply_list("--epsilons", epsilons);
    defaults.apply_list("--deltas", deltas);
    defaults.apply_list("--ps", ps);
    defaults.apply("--T", T);
    defaults.apply("--match-alpha-to-p", match_alpha_to_p);

    std::vector<double> eps = parse_list(epsilons);
    std::vector<double> del = parse_list(deltas);
    std::vector<double> pss = parse_list(ps);
    if (eps.empty() || del.empty() || pss.empty()) {
      std::cerr << "error: --epsilons, --deltas, and --ps must be nonempty\n";
      return kExitUsage;
    }

    ModelHandle handle;
    if (int rc = model.create(handle); rc != 0) return rc;
    FamilyHandle fam;
    if (ss_status s = ss_family_power_create(family.alpha, &fam.ptr); s != SS_OK)
      return report_error(s);

    std::vector<ss_plan_result> cells(eps.size() * del.size() * pss.size());
    ss_status status = ss_plan_sweep(
        eps.data(), eps.size(), del.data(), del.size(), pss.data(), pss.size(),
        handle.ptr, fam.ptr, T, family.c_x, family.band_ratio,
        family.max_stage, family.use_quadrature_s ? 1 : 0,
        family.force_general_route ? 1 : 0, match_alpha_to_p ? 1 : 0,
        cells.data());
    if (status != SS_OK) return report_error(status);

    std::string out = "epsilon,delta,p,N,omega,n,lambda,a_tilde,rhs,feasible\n";
    size_t index = 0;
    for (double e : eps)
      for (double d : del)
        for (double pp : pss) {
          const ss_plan_result& r = cells[index++];
          out += fmt17(e) + "," + fmt17(d) + "," + fmt17(pp) + ",";
          if (r.feasible != 0) {
            out += std::to_string(r.N) + "," + fmt17(r.omega) + "," +
                   std::to_string(r.n) + "," + fmt17(r.lambda_band) + "," +
                   fmt17(r.a_tilde_value) + "," + fmt17(r.rhs_value) + ",1\n";
          } else {
            out += ",,,,," + fmt17(r.rhs_value) + ",0\n";
          }
        }
    return emit(out, "");
  }
};

// ------------------------------------------------------------------ simulate

struct McFlags {
  int realizations = 50;
  uint64_t seed = 0;
  int grid = 201;
  int workers = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--realizations", realizations, "Monte Carlo sample size")
        ->default_val(50);
    cmd->add_option("--seed", seed,
                    "master seed (also SUBSAMPLE_SEED environment variable)");
    cmd->add_option("--grid", grid, "uniform evaluation grid points on [0, T]")
        ->default_val(201);
    cmd->add_option("--workers", workers,
                    "worker threads; 0 = hardware concurrency; results do "
                    "not depend on this")
        ->default_val(0);
  }

  void apply(const Defaults& defaults) {
    defaults.apply("--realizations", realizations);
    defaults.apply_seed("--seed", seed);
    defaults.apply("--grid", grid);
    defaults.apply("--workers", workers);
  }
};

std::vector<double> uniform_grid(double T, int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = T * i / (points - 1);
  return grid;
}

struct SimulateArgs {
  ModelFlags model;
  SchemeFlags scheme;
  McFlags mc;
  double T = 1.0;
  std::string mse_out;
  std::string path_out;
  int path_index = 0;
  std::string config;
  CLI::App* cmd = nullptr;

  void add(CLI::App* parent) {
    cmd = parent->add_subcommand(
        "simulate", "Monte Carlo reconstruction error versus the exact "
                    "mean-square error and the bound");
    model.add(cmd);
    scheme.add(cmd);
    mc.add(cmd);
    cmd->add_option("--T", T, "horizon")->default_val(1.0);
    cmd->add_option("--mse-out", mse_out,
                    "write the per-t CSV here instead of standard output");
    cmd->add_option("--path-out", path_out,
                    "also write one realization and its reconstruction "
                    "(CSV t,x,x_n,abs_err)");
    cmd->add_option("--path-index", path_index,
                    "realization index for --path-out")
        ->default_val(0);
    cmd->add_option("--config", config, "JSON file with default flag values");
  }

  int run() {
    Defaults defaults(cmd, config);
    model.apply(defaults);
    scheme.apply(defaults, cmd);
    mc.apply(defaults);
    defaults.apply("--T", T);
    defaults.apply("--mse-out", mse_out);
    defaults.apply("--path-out", path_out);
    defaults.apply("--path-index", path_index);
    if (mc.grid < 2) {
      std::cerr << "error: --grid must be at least 2\n";
      return kExitUsage;
    }

    ModelHandle handle;
    if (int rc = model.create(handle); rc != 0) return rc;
    ss_scheme sch{};
    if (int rc = scheme.resolve(sch); rc != 0) return rc;

    std::vector<double> grid = uniform_grid(T, mc.grid);
    std::vector<double> empirical(grid.size()), per_t_stderr(grid.size());
    double sup = 0.0, sup_se = 0.0;
    ss_status status = ss_mc_sup_rms(
        sch, handle.ptr, T, mc.realizations, mc.seed, mc.grid, mc.workers,
        &sup, &sup_se, empirical.data(), per_t_stderr.data());
    if (status != SS_OK) return report_error(status);

    std::vector<double> exact(grid.size());
    status = ss_exact_mse_grid(sch, handle.ptr, grid.data(), grid.size(),
                               exact.data());
    if (status != SS_OK) return report_error(status);

    std::string csv = "t,empirical_mse,exact_mse,bound_sq\n";
    for (size_t i = 0; i < grid.size(); ++i) {
      ss_bound_breakdown b{};
      status = ss_bound_pointwise_auto(grid[i], sch, handle.ptr, &b);
      if (status != SS_OK) return report_error(status);
      csv += fmt17(grid[i]) + "," + fmt17(empirical[i]) + "," +
             fmt17(exact[i]) + "," + fmt17(b.total * b.total) + "\n";
    }
    if (int rc = emit(csv, mse_out); rc != 0) return rc;

    if (!path_out.empty()) {
      std::vector<double> x(grid.size()), x_n(grid.size());
      status = ss_simulate_reconstruction(sch, handle.ptr, T, mc.seed,
                                          path_index, mc.grid, x.data(),
                                          x_n.data());
      if (status != SS_OK) return report_error(status);
      std::string path_csv = "t,x,x_n,abs_err\n";
      for (size_t i = 0; i < grid.size(); ++i)
        path_csv += fmt17(grid[i]) + "," + fmt17(x[i]) + "," + fmt17(x_n[i]) +
                    "," + fmt17(std::fabs(x[i] - x_n[i])) + "\n";
      if (int rc = emit(path_csv, path_out); rc != 0) return rc;
    }
    return 0;
  }
};

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  ModelFlags model;
  SchemeFlags scheme;
  McFlags mc;
  std::string mode;
  double T = 1.0;
  double p = 2.0;
  double alpha = 2.0;
  double epsilon = 0.0;
  double epsilon_factor = 1.5;
  std::string stages = "3,4,5";
  std::string config;
  CLI::App* cmd = nullptr;

  void add(CLI::App* parent) {
    cmd = parent->add_subcommand(
        "verify", "check the bounds against the exact oracle and Monte Carlo "
                  "simulation; exit 0 only if every check passes");
    model.add(cmd);
    scheme.add(cmd);
    mc.add(cmd);
    cmd->add_option("--mode", mode,
                    "mse-dominance, lp-exceedance, or figure5")
        ->required();
    cmd->add_option("--T", T, "horizon")->default_val(1.0);
    cmd->add_option("--p", p, "integral exponent (lp-exceedance)")
        ->default_val(2.0);
    cmd->add_option("--alpha", alpha, "power family exponent (lp-exceedance)")
        ->default_val(2.0);
    cmd->add_option("--epsilon", epsilon,
                    "exceedance level; default is --epsilon-factor times the "
                    "validity threshold");
    cmd->add_option("--epsilon-factor", epsilon_factor,
                    "multiple of the validity threshold when --epsilon is "
                    "not given")
        ->default_val(1.5);
    cmd->add_option("--stages", stages, "schedule stages for figure5")
        ->default_val("3,4,5");
    cmd->add_option("--config", config, "JSON file with default flag values");
  }

  int run() {
    Defaults defaults(cmd, config);
    model.apply(defaults);
    scheme.apply(defaults, cmd);
    mc.apply(defaults);
    defaults.apply("--mode", mode);
    defaults.apply("--T", T);
    defaults.apply("--p", p);
    defaults.apply("--alpha", alpha);
    defaults.apply("--epsilon", epsilon);
    defaults.apply("--epsilon-factor", epsilon_factor);
    defaults.apply_list("--stages", stages);
    epsilon_given_ = cmd->count("--epsilon") > 0 || defaults.has("--epsilon");

    ModelHandle handle;
    if (int rc = model.create(handle); rc != 0) return rc;

    if (mode == "mse-dominance") return run_mse_dominance(handle);
    if (mode == "lp-exceedance") return run_lp_exceedance(handle);
    if (mode == "figure5") return run_figure5(handle);
    std::cerr << "error: unknown mode " << mode << "\n";
    return kExitUsage;
  }

 private:
  bool epsilon_given_ = false;

  int resolve_default_scheme(ss_scheme& sch, int default_stage) {
    if (scheme.any_given()) return scheme.resolve(sch);
    sch.omega = std::ldexp(1.0, default_stage);
    sch.n = static_cast<long long>(default_stage) * default_stage *
            (static_cast<long long>(1) << default_stage);
    sch.lambda_band = 0.75 * sch.omega;
    return 0;
  }

  int run_mse_dominance(ModelHandle& handle) {
    ss_scheme sch{};
    if (int rc = resolve_default_scheme(sch, 4); rc != 0) return rc;
    const int points = mc.grid;
    if (points < 2) {
      std::cerr << "error: --grid must be at least 2\n";
      return kExitUsage;
    }
    std::vector<double> grid = uniform_grid(T, points);
    std::vector<double> exact(grid.size());
    ss_status status = ss_exact_mse_grid(sch, handle.ptr, grid.data(),
                                         grid.size(), exact.data());
    if (status != SS_OK) return report_error(status);

    int violations = 0;
    double max_ratio = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
      ss_bound_breakdown b{};
      status = ss_bound_pointwise_auto(grid[i], sch, handle.ptr, &b);
      if (status != SS_OK) return report_error(status);
      const double bound_sq = b.total * b.total;
      if (exact[i] > bound_sq) ++violations;
      if (bound_sq > 0.0) max_ratio = std::max(max_ratio, exact[i] / bound_sq);
    }
    const bool pass = violations == 0;
    JsonObject obj;
    obj.field("mode", std::string("mse-dominance"));
    obj.field("omega", sch.omega);
    obj.field("n", sch.n);
    obj.field("lambda", sch.lambda_band);
    obj.field("T", T);
    obj.field("points", points);
    obj.field("violations", violations);
    obj.field("max_ratio", max_ratio);
    obj.field("pass", pass);
    emit(obj.str() + "\n", "");
    return pass ? 0 : kExitCheckFailed;
  }

  int run_lp_exceedance(ModelHandle& handle) {
    ss_scheme sch{};
    if (int rc = resolve_default_scheme(sch, 4); rc != 0) return rc;
    FamilyHandle fam;
    if (ss_status s = ss_family_power_create(alpha, &fam.ptr); s != SS_OK)
      return report_error(s);

    double s_value = 0.0, quad_err = 0.0;
    ss_status status =
        ss_lp_bound(sch, handle.ptr, T, p, 1.0, &s_value, &quad_err);
    if (status != SS_OK) return report_error(status);
    double threshold = 0.0;
    status = ss_validity_threshold(s_value, p, fam.ptr, &threshold);
    if (status != SS_OK) return report_error(status);
    const double eps = epsilon_given_ ? epsilon : epsilon_factor * threshold;

    double frequency = 0.0, s_used = 0.0, bound_raw = 0.0, bound = 0.0;
    int has_bound = 0, margin_ok = 0, grid_warning = 0;
    status = ss_mc_lp_exceedance(
        sch, handle.ptr, fam.ptr, T, p, eps, mc.realizations, mc.seed, mc.grid,
        mc.workers, &frequency, &s_used, &has_bound, &bound_raw, &bound,
        &margin_ok, &grid_warning);
    if (status != SS_OK) return report_error(status);

    const bool pass = has_bound != 0 && margin_ok != 0;
    JsonObject obj;
    obj.field("mode", std::string("lp-exceedance"));
    obj.field("omega", sch.omega);
    obj.field("n", sch.n);
    obj.field("lambda", sch.lambda_band);
    obj.field("T", T);
    obj.field("p", p);
    obj.field("alpha", alpha);
    obj.field("epsilon", eps);
    obj.field("s_value", s_used);
    obj.field("threshold", threshold);
    obj.field("realizations", mc.realizations);
    obj.field("frequency", frequency);
    if (has_bound != 0) {
      obj.field("bound_raw", bound_raw);
      obj.field("bound", bound);
    } else {
      obj.field_null("bound_raw");
      obj.field_null("bound");
    }
    obj.field("margin_ok", margin_ok != 0);
    obj.field("grid_warning", grid_warning != 0);
    obj.field("master_seed", static_cast<unsigned long long>(mc.seed));
    obj.field("pass", pass);
    emit(obj.str() + "\n", "");
    return pass ? 0 : kExitCheckFailed;
  }

  int run_figure5(ModelHandle& handle) {
    std::vector<double> stage_list = parse_list(stages);
    if (stage_list.empty()) {
      std::cerr << "error: --stages must be nonempty\n";
      return kExitUsage;
    }
    std::vector<std::string> rows;
    std::vector<double> diffs;
    for (double stage_real : stage_list) {
      const int N = static_cast<int>(stage_real);
      ss_scheme sch{};
      sch.omega = std::ldexp(1.0, N);
      sch.n = static_cast<long long>(N) * N * (static_cast<long long>(1) << N);
      sch.lambda_band = scheme.band_ratio * sch.omega;
      ss_bound_breakdown b{};
      ss_status status = ss_bound_uniform(T, sch, handle.ptr, &b);
      if (status != SS_OK) return report_error(status);
      double sup = 0.0, sup_se = 0.0;
      status = ss_mc_sup_rms(sch, handle.ptr, T, mc.realizations, mc.seed,
                             mc.grid, mc.workers, &sup, &sup_se, nullptr,
                             nullptr);
      if (status != SS_OK) return report_error(status);
      JsonObject row;
      row.field("N", N);
      row.field("a_tilde", b.total);
      row.field("mc_sup", sup);
      row.field("mc_sup_stderr", sup_se);
      row.field("diff", b.total - sup);
      rows.push_back(row.str());
      diffs.push_back(b.total - sup);
    }
    bool pass = true;
    for (size_t i = 0; i < diffs.size(); ++i) {
      if (diffs[i] <= 0.0) pass = false;
      if (i > 0 && diffs[i] >= diffs[i - 1]) pass = false;
    }
    JsonObject obj;
    obj.field("mode", std::string("figure5"));
    obj.field("T", T);
    obj.field("realizations", mc.realizations);
    obj.field("master_seed", static_cast<unsigned long long>(mc.seed));
    obj.raw("rows", json_array(rows));
    obj.field("pass", pass);
    emit(obj.str() + "\n", "");
    return pass ? 0 : kExitCheckFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "error bounds, sampling design, and Monte Carlo verification for "
      "truncated cardinal-series reconstruction of stationary signals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ss_version()));

  BoundArgs bound;
  PlanArgs plan;
  SweepArgs sweep;
  SimulateArgs simulate;
  VerifyArgs verify;
  bound.add(&app);
  plan.add(&app);
  sweep.add(&app);
  simulate.add(&app);
  verify.add(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (bound.cmd->parsed()) return bound.run();
    if (plan.cmd->parsed()) return plan.run();
    if (sweep.cmd->parsed()) return sweep.run();
    if (simulate.cmd->parsed()) return simulate.run();
    if (verify.cmd->parsed()) return verify.run();
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
