#include "symmwig/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symmwig/chebyshev.hpp"
#include "symmwig/covariance.hpp"
#include "symmwig/ensemble.hpp"
#include "symmwig/errors.hpp"
#include "symmwig/montecarlo.hpp"
#include "symmwig/patterns.hpp"

#ifndef SYMMWIG_VERSION
#define SYMMWIG_VERSION "0.0.0"
#endif

namespace symmwig::cli {

namespace {

using json = nlohmann::ordered_json;

struct Params {
  std::string cls = "DIII";
  int n = 2;
  std::vector<int> m;
  int M = 4;
  double sigma = 1.0;
  std::string family = "gaussian";
  std::uint64_t samples = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string mode = "exact";
  std::string method = "moment";
  std::string condition = "forward";
  std::string filter = "none";
  std::string delta;
  std::string reading = "exact";
  std::uint64_t budget = 2'000'000'000ULL;
  std::string format = "csv";
  std::string out;
  std::string config;
};

/// Result of one subcommand: a CSV table plus a JSON document with the same content.
struct Output {
  std::string csv;
  json doc;
};

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) { row(header); }
  template <typename Range>
  void row(const Range& fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) text_ += ',';
      text_ += f;
      first = false;
    }
    text_ += '\n';
  }
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::optional<double> v) { return v ? format_number(*v) : std::string(); }
std::string flag_name(TheoryFlag f) { return f == TheoryFlag::Theorem ? "theorem" : "derived"; }

json header(std::string_view command) {
  json doc;
  doc["schema"] = "symmwig/1";
  doc["command"] = command;
  return doc;
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

EntryModel model_of(const Params& p, bool sigma_given) {
  return EntryModel::parse(p.family, sigma_given ? std::optional<double>(p.sigma * p.sigma) : std::nullopt);
}

// ---------------------------------------------------------------------------
// Subcommands

Output run_classes(const Params& p) {
  const auto cls = parse_symmetry_class(p.cls);
  const EquivalenceStructure structure(cls, p.n);
  const auto stats = symmetry_stats(cls, p.n);
  Csv csv{"class", "n", "id", "kind", "a", "b", "rep_p", "rep_q", "size", "members"};
  json doc = header("classes");
  doc["class"] = to_string(cls);
  doc["n"] = p.n;
  doc["alpha2"] = stats.alpha2;
  doc["alpha0_hat"] = stats.alpha0_hat;
  doc["classes"] = json::array();
  int id = 0;
  for (const auto& c : structure.classes()) {
    const std::string kind = c.key.kind == ClassKind::C1 ? "C1" : "C2";
    std::string members;
    json jm = json::array();
    for (const auto& mem : c.members) {
      if (!members.empty()) members += ' ';
      members += std::to_string(mem.pair.p) + ':' + std::to_string(mem.pair.q) + ':' + (mem.sign > 0 ? '+' : '-');
      jm.push_back({mem.pair.p, mem.pair.q, mem.sign});
    }
    csv.row({std::string(to_string(cls)), std::to_string(p.n), std::to_string(id), kind, std::to_string(c.key.a),
             std::to_string(c.key.b), std::to_string(c.representative.p), std::to_string(c.representative.q),
             std::to_string(c.members.size()), members});
    doc["classes"].push_back({{"id", id},
                              {"kind", kind},
                              {"a", c.key.a},
                              {"b", c.key.b},
                              {"representative", {c.representative.p, c.representative.q}},
                              {"members", jm}});
    ++id;
  }
  return {csv.str(), doc};
}

DeltaFilter filter_of(const Params& p) {
  DeltaFilter f;
  if (p.filter == "none") {
  } else if (p.filter == "identical-rows") {
    f.identical_rows = true;
  } else if (p.filter == "identical-rows-alpha1") {
    f.identical_rows = true;
    f.first_alpha = 1;
  } else if (p.filter == "first-delta") {
    if (p.delta.empty()) throw ValidationError("filter first-delta needs --delta");
    f.first_delta = DeltaMatrix::parse(p.delta);
  } else if (p.filter == "tau-realizable") {
    if (p.delta.empty()) throw ValidationError("filter tau-realizable needs --delta");
    f.first_delta = DeltaMatrix::parse(p.delta);
    f.tau_realizable = true;
  } else {
    throw ValidationError("unknown filter '" + p.filter + "'");
  }
  return f;
}

Output run_patterns(const Params& p) {
  DominoMode mode;
  if (p.condition == "forward") mode = DominoMode::Forward;
  else if (p.condition == "reverse") mode = DominoMode::Reverse;
  else throw ValidationError("condition must be forward or reverse");
  const auto filter = filter_of(p);
  std::string filter_label = p.filter;
  if (filter.first_delta) filter_label += ":" + filter.first_delta->to_string();

  Csv csv{"m", "condition", "filter", "count", "closed_form", "match"};
  json doc = header("patterns");
  doc["rows"] = json::array();
  const auto ms = p.m.empty() ? std::vector<int>{4} : p.m;
  for (int m : ms) {
    const auto e = enumerate_delta_sequences(m, mode, filter);
    const auto closed = delta_count_closed_form(m, mode, filter);
    const std::string match = closed ? (*closed == e.count ? "true" : "false") : "n/a";
    csv.row({std::to_string(m), p.condition, filter_label, std::to_string(e.count),
             closed ? std::to_string(*closed) : std::string(), match});
    doc["rows"].push_back({{"m", m},
                           {"condition", p.condition},
                           {"filter", filter_label},
                           {"count", e.count},
                           {"closed_form", closed ? json(*closed) : json(nullptr)},
                           {"match", match}});
  }
  return {csv.str(), doc};
}

GoodSetReading reading_of(const Params& p) {
  if (p.reading == "exact") return GoodSetReading::Exact;
  if (p.reading == "coarsening") return GoodSetReading::Coarsening;
  throw ValidationError("reading must be exact or coarsening");
}

Output run_variance(const Params& p, const EntryModel& model) {
  const auto cls = parse_symmetry_class(p.cls);
  const auto ms = p.m.empty() ? std::vector<int>{1, 2, 3, 4} : p.m;
  for (int m : ms)
    if (m < 1) throw ValidationError("degree m must be at least 1");
  if (p.mode != "exact" && p.mode != "asymptotic" && p.mode != "oracle")
    throw ValidationError("mode must be exact, asymptotic or oracle");

  std::optional<Eigen::MatrixXd> oracle;
  if (p.mode == "oracle")
    oracle = cheb_covariance_moment_oracle(cls, p.n, *std::max_element(ms.begin(), ms.end()), model.sigma(), model,
                                           p.budget);
  const VarianceOptions options{reading_of(p), p.threads, p.budget};

  Csv csv{"class", "n", "m", "value", "mode", "flag"};
  json doc = header("variance");
  doc["rows"] = json::array();
  for (int m : ms) {
    double value = 0.0;
    std::string flag = p.mode;
    if (p.mode == "exact") {
      value = finite_variance(cls, p.n, m, model, options);
    } else if (p.mode == "asymptotic") {
      const auto a = asymptotic_variance(cls, m, model.sigma(), model);
      value = a.value;
      flag = flag_name(a.flag);
    } else {
      value = (*oracle)(m - 1, m - 1);
    }
    csv.row({std::string(to_string(cls)), std::to_string(p.n), std::to_string(m), num(value), p.mode, flag});
    doc["rows"].push_back({{"class", to_string(cls)}, {"n", p.n}, {"m", m}, {"value", value}, {"mode", p.mode},
                           {"flag", flag}});
  }
  return {csv.str(), doc};
}

Output run_oracle(const Params& p, const EntryModel& model) {
  const auto cls = parse_symmetry_class(p.cls);
  if (p.M < 1) throw ValidationError("M must be at least 1");
  Eigen::MatrixXd cov(p.M, p.M);
  if (p.method == "moment") {
    cov = cheb_covariance_moment_oracle(cls, p.n, p.M, model.sigma(), model, p.budget);
  } else if (p.method == "config") {
    for (int m = 1; m <= p.M; ++m)
      for (int mu = m; mu <= p.M; ++mu)
        cov(m - 1, mu - 1) = cov(mu - 1, m - 1) =
            cov_traces_config_oracle(cls, p.n, m, mu, model.sigma(), model, p.budget);
  } else {
    throw ValidationError("method must be moment or config");
  }
  Csv csv{"class", "n", "m", "mu", "cov", "method"};
  json doc = header("oracle");
  doc["class"] = to_string(cls);
  doc["n"] = p.n;
  doc["method"] = p.method;
  doc["cov"] = json::array();
  for (int m = 1; m <= p.M; ++m) {
    json row = json::array();
    for (int mu = 1; mu <= p.M; ++mu) {
      csv.row({std::string(to_string(cls)), std::to_string(p.n), std::to_string(m), std::to_string(mu),
               num(cov(m - 1, mu - 1)), p.method});
      row.push_back(cov(m - 1, mu - 1));
    }
    doc["cov"].push_back(row);
  }
  return {csv.str(), doc};
}

Output run_report(const Params& p, const EntryModel& model) {
  const auto cls = parse_symmetry_class(p.cls);
  const auto report = covariance_report(cls, p.n, p.M, model, VarianceOptions{reading_of(p), p.threads, p.budget});
  Csv csv{"m", "finite", "asymptotic", "flag", "gap", "g", "per_g", "per_g_fixed_scalar", "per_g_normalized_limit"};
  json doc = header("report");
  doc["class"] = to_string(cls);
  doc["n"] = p.n;
  doc["rows"] = json::array();
  for (const auto& r : report.rows) {
    const std::vector<std::string> head{std::to_string(r.m), num(r.finite), num(r.asymptotic.value),
                                        flag_name(r.asymptotic.flag), num(r.gap)};
    if (r.group_labels.empty()) {
      auto fields = head;
      fields.insert(fields.end(), {"", "", "", ""});
      csv.row(fields);
    }
    json per_g = json::array();
    for (std::size_t i = 0; i < r.group_labels.size(); ++i) {
      auto fields = head;
      fields.insert(fields.end(), {r.group_labels[i], num(r.per_g[i]), num(r.per_g_fixed_scalar[i]),
                                   num(r.per_g_normalized_limit)});
      csv.row(fields);
      per_g.push_back({{"g", r.group_labels[i]}, {"value", r.per_g[i]}, {"fixed_scalar", r.per_g_fixed_scalar[i]}});
    }
    doc["rows"].push_back({{"m", r.m},
                           {"finite", r.finite},
                           {"asymptotic", r.asymptotic.value},
                           {"flag", flag_name(r.asymptotic.flag)},
                           {"gap", r.gap},
                           {"per_g_normalized_limit", r.per_g_normalized_limit},
                           {"per_g", per_g}});
  }
  return {csv.str(), doc};
}

Output run_traces(const Params& p, const EntryModel& model) {
  const auto cls = parse_symmetry_class(p.cls);
  const EquivalenceStructure structure(cls, p.n);
  Csv csv{"sample", "degree", "trace"};
  json doc = header("traces");
  doc["samples"] = json::array();
  for (std::uint64_t i = 0; i < p.samples; ++i) {
    const auto sample = sample_matrix(structure, model, derive_seed(p.seed, i));
    const auto t = trace_cheb_vector(sample, p.M, model.sigma());
    for (int k = 0; k < p.M; ++k) csv.row({std::to_string(i), std::to_string(k + 1), num(t[k])});
    doc["samples"].push_back(t);
  }
  return {csv.str(), doc};
}

Output run_simulate(const Params& p, const EntryModel& model) {
  SimulationConfig config;
  config.cls = parse_symmetry_class(p.cls);
  config.n = p.n;
  config.model = model;
  config.max_degree = p.M;
  config.samples = p.samples;
  config.seed = p.seed;
  config.threads = p.threads;
  const auto result = run_simulation(config);
  const auto report = clt_report(result);

  Csv csv{"degree", "var_est", "var_se", "theory", "flag", "z", "k3", "k4"};
  json doc = header("simulate");
  doc["class"] = to_string(config.cls);
  doc["n"] = config.n;
  doc["samples"] = config.samples;
  doc["seed"] = config.seed;
  doc["blocks"] = result.blocks;
  doc["wall_seconds"] = result.wall_seconds;
  doc["degrees"] = json::array();
  for (const auto& r : report.degrees) {
    const auto& e = result.estimate;
    csv.row({std::to_string(r.m), num(r.var), num(r.var_se), num(r.theory.value), flag_name(r.theory.flag), num(r.z),
             num(r.k3), num(r.k4)});
    doc["degrees"].push_back({{"m", r.m},
                              {"mean", e.mean[r.m - 1]},
                              {"var", r.var},
                              {"var_se", r.var_se},
                              {"theory", r.theory.value},
                              {"flag", flag_name(r.theory.flag)},
                              {"reference", r.reference},
                              {"z", r.z},
                              {"k3", number_or_null(r.k3)},
                              {"k3_se", number_or_null(e.k3_se[r.m - 1])},
                              {"k4", number_or_null(r.k4)},
                              {"k4_se", number_or_null(e.k4_se[r.m - 1])},
                              {"pass", r.pass}});
  }
  doc["off_diagonal"] = json::array();
  for (const auto& o : report.off_diagonal)
    doc["off_diagonal"].push_back(
        {{"m", o.m}, {"mu", o.mu}, {"cov", o.cov}, {"se", o.se}, {"z", number_or_null(o.z)}, {"pass", o.pass}});
  doc["pass"] = report.pass;
  return {csv.str(), doc};
}

// ---------------------------------------------------------------------------
// Plumbing

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ValidationError("failed writing '" + path + "'");
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::vector<std::string> keys;  // recorded in the manifest, in this order
};

std::string param_string(const Params& p, const std::string& key) {
  if (key == "class") return p.cls;
  if (key == "n") return std::to_string(p.n);
  if (key == "m") {
    std::string s;
    for (int m : p.m) s += (s.empty() ? "" : " ") + std::to_string(m);
    return s;
  }
  if (key == "M") return std::to_string(p.M);
  if (key == "sigma") return num(p.sigma);
  if (key == "family") return p.family;
  if (key == "samples") return std::to_string(p.samples);
  if (key == "seed") return std::to_string(p.seed);
  if (key == "threads") return std::to_string(p.threads);
  if (key == "mode") return p.mode;
  if (key == "method") return p.method;
  if (key == "condition") return p.condition;
  if (key == "filter") return p.filter;
  if (key == "delta") return p.delta;
  if (key == "reading") return p.reading;
  if (key == "budget") return std::to_string(p.budget);
  throw std::logic_error("no parameter '" + key + "'");
}

// Inserts config-file settings as flags ahead of the user's own, skipping keys the user set.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const Subcommand& sub,
                                      const std::vector<ConfigEntry>& entries) {
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.starts_with("--")) given.insert(a.substr(2, a.find('=') == std::string::npos ? a.npos : a.find('=') - 2));
  std::vector<std::string> injected;
  for (const auto& e : entries) {
    if (e.key == "@subcommand") {
      if (e.value != sub.app->get_name())
        throw ValidationError("manifest is for '" + e.value + "', not '" + sub.app->get_name() + "'");
      continue;
    }
    const auto type = [&] {
      try {
        return value_type_of(e.key);
      } catch (const ValidationError&) {
        throw ValidationError((e.line > 0 ? "line " + std::to_string(e.line) + ": " : std::string("manifest: ")) +
                              "unknown key '" + e.key + "'");
      }
    }();
    if (std::find(sub.keys.begin(), sub.keys.end(), e.key) == sub.keys.end())
      throw ValidationError((e.line > 0 ? "line " + std::to_string(e.line) + ": " : std::string("manifest: ")) +
                            "key '" + e.key + "' does not apply to '" + sub.app->get_name() + "'");
    check_value(e, type);
    if (given.contains(e.key)) continue;
    injected.push_back("--" + e.key);
    if (type == ValueType::IntList) {
      std::istringstream items(e.value);
      for (std::string item; items >> item;) injected.push_back(item);
    } else {
      injected.push_back(e.value);
    }
  }
  return injected;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Params p;
  CLI::App app{"Fluctuation statistics for DIII and CI Wigner-type matrices", "symmwig"};
  app.set_version_flag("--version", std::string(SYMMWIG_VERSION));
  app.require_subcommand(1);
  app.fallthrough(false);

  std::map<std::string, Subcommand> subs;
  auto add_sub = [&](const std::string& name, const std::string& description, std::vector<std::string> keys) {
    auto* s = app.add_subcommand(name, description);
    subs[name] = {s, keys};
    for (const auto& k : keys) {
      if (k == "class") s->add_option("--class", p.cls, "symmetry class: DIII or CI")->capture_default_str();
      else if (k == "n") s->add_option("--n", p.n, "half dimension; matrices are 2n x 2n")->capture_default_str();
      else if (k == "m") s->add_option("--m", p.m, "degree(s)");
      else if (k == "M") s->add_option("--M", p.M, "largest Chebyshev degree")->capture_default_str();
      else if (k == "sigma") s->add_option("--sigma", p.sigma, "entry scale; sigma^2 is the entry variance")->capture_default_str();
      else if (k == "family")
        s->add_option("--family", p.family, "gaussian, rademacher or atoms:(v,p),(v,p),...")->capture_default_str();
      else if (k == "samples") s->add_option("--samples", p.samples, "number of sampled matrices")->capture_default_str();
      else if (k == "seed") s->add_option("--seed", p.seed, "base seed")->capture_default_str();
      else if (k == "threads")
        s->add_option("--threads", p.threads, "worker threads (fallback: SYMMWIG_THREADS, then 1)")->capture_default_str();
      else if (k == "mode") s->add_option("--mode", p.mode, "exact, asymptotic or oracle")->capture_default_str();
      else if (k == "method") s->add_option("--method", p.method, "moment or config")->capture_default_str();
      else if (k == "condition") s->add_option("--condition", p.condition, "forward or reverse")->capture_default_str();
      else if (k == "filter")
        s->add_option("--filter", p.filter,
                      "none, identical-rows, identical-rows-alpha1, first-delta, tau-realizable")
            ->capture_default_str();
      else if (k == "delta") s->add_option("--delta", p.delta, "first Delta matrix as four bits, e.g. 0110");
      else if (k == "reading") s->add_option("--reading", p.reading, "good-set reading: exact or coarsening")->capture_default_str();
      else if (k == "budget") s->add_option("--budget", p.budget, "enumeration budget")->capture_default_str();
    }
    s->add_option("--out", p.out, "output path (CSV); JSON at <out>.json, manifest at <out>.manifest.json");
    s->add_option("--format", p.format, "stdout format when --out is absent: csv or json")->capture_default_str();
    s->add_option("--config", p.config, "key=value file or run manifest; flags override it");
    return s;
  };
  add_sub("classes", "list the entry equivalence classes", {"class", "n"});
  add_sub("patterns", "count cyclic Delta sequences", {"m", "condition", "filter", "delta"});
  add_sub("variance", "finite-n and asymptotic variances", {"class", "n", "m", "sigma", "family", "mode", "reading", "threads", "budget"});
  {
    // simulate has its own defaults; set them while registering so --help shows them
    const Params saved = p;
    p.n = 64;
    p.M = 6;
    p.samples = 10'000;
    add_sub("simulate", "Monte Carlo check of the fluctuation limit",
            {"class", "n", "sigma", "M", "samples", "seed", "family", "threads"});
    p = saved;
  }
  add_sub("oracle", "exact covariances of Chebyshev traces", {"class", "n", "M", "sigma", "family", "method", "budget"});
  add_sub("report", "finite-n versus limiting covariance, per dihedral element", {"class", "n", "M", "sigma", "family", "reading", "threads", "budget"});
  add_sub("traces", "Chebyshev traces of sampled matrices", {"class", "n", "M", "sigma", "family", "seed", "samples"});

  try {
    // Locate the subcommand and any --config before the real parse.
    std::vector<std::string> argv = args;
    const Subcommand* sub = nullptr;
    std::size_t sub_pos = 0;
    for (std::size_t i = 0; i < argv.size() && !sub; ++i)
      if (auto it = subs.find(argv[i]); it != subs.end()) {
        sub = &it->second;
        sub_pos = i;
      }
    if (sub) {
      std::vector<std::string> rest(argv.begin() + sub_pos + 1, argv.end());
      std::optional<std::string> config_path;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == "--config" && i + 1 < rest.size()) config_path = rest[i + 1];
        else if (rest[i].starts_with("--config=")) config_path = rest[i].substr(9);
      }
      if (config_path) {
        const auto injected = merge_config(rest, *sub, load_config(*config_path));
        argv.insert(argv.begin() + sub_pos + 1, injected.begin(), injected.end());
      }
    }
    if (sub && sub->app->get_name() == "simulate") {
      p.n = 64;
      p.M = 6;
      p.samples = 10'000;
    }

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << (sub ? sub->app->help() : app.help());
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << SYMMWIG_VERSION << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << (sub ? sub->app->help() : app.help());
      return 1;
    }
    if (!sub) throw ValidationError("missing subcommand");

    const auto* threads_opt = sub->app->get_option_no_throw("--threads");
    if (threads_opt && threads_opt->count() == 0) {
      if (const char* env = std::getenv("SYMMWIG_THREADS")) {
        const ConfigEntry e{"threads", env, 0};
        try {
          check_value(e, ValueType::Int);
        } catch (const ValidationError&) {
          throw ValidationError(std::string("SYMMWIG_THREADS must be an integer, got '") + env + "'");
        }
        p.threads = std::stoi(env);
      }
    }
    if (threads_opt && p.threads < 1) throw ValidationError("threads must be positive");
    if (p.format != "csv" && p.format != "json") throw ValidationError("format must be csv or json");

    const auto* sigma_opt = sub->app->get_option_no_throw("--sigma");
    const bool sigma_given = sigma_opt && sigma_opt->count() > 0;
    if (sigma_given && !(p.sigma > 0.0)) throw ValidationError("sigma must be positive");

    const std::string name = sub->app->get_name();
    Output result;
    if (name == "classes") {
      result = run_classes(p);
    } else if (name == "patterns") {
      result = run_patterns(p);
    } else {
      const auto model = model_of(p, sigma_given);
      p.sigma = model.sigma();
      if (name == "variance") result = run_variance(p, model);
      else if (name == "simulate") result = run_simulate(p, model);
      else if (name == "oracle") result = run_oracle(p, model);
      else if (name == "report") result = run_report(p, model);
      else result = run_traces(p, model);
    }

    RunManifest manifest{name, {}, 0, SYMMWIG_VERSION, utc_timestamp()};
    for (const auto& k : sub->keys) manifest.params[k] = param_string(p, k);
    if (std::find(sub->keys.begin(), sub->keys.end(), "seed") != sub->keys.end()) manifest.seed = p.seed;
    result.doc["manifest"] = json::parse(manifest.to_json());

    if (p.out.empty()) {
      out << (p.format == "csv" ? result.csv : result.doc.dump(2) + "\n");
    } else {
      write_file(p.out, result.csv);
      write_file(p.out + ".json", result.doc.dump(2) + "\n");
      write_file(p.out + ".manifest.json", manifest.to_json());
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace symmwig::cli
