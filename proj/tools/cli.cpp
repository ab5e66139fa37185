#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "dopmeter/error.hpp"

namespace dopmeter::cli {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr std::string_view kRunSchema = "dopmeter-run/1";

double nm(double v) { return v * 1e-9; }
double to_nm(double v) { return v * 1e9; }

std::vector<double> to_rad(const std::vector<double>& deg) {
  std::vector<double> r;
  r.reserve(deg.size());
  for (double d : deg) r.push_back(d * kDeg);
  return r;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt_deg(const std::optional<double>& v) { return v ? json(*v / kDeg) : json(nullptr); }

std::string csv_opt_deg(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v / kDeg) : std::string{};
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidArgument(fmt::format("unknown output format '{}' (csv | json)", s));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(fmt::format("cannot parse {} value '{}'", what, s));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(fmt::format("{} must be > 0", name));
  };
  positive(lambda1_nm, "lambda1_nm");
  positive(lambda2_nm, "lambda2_nm");
  positive(length_mm, "length_mm");
  positive(lambda2_step_nm, "lambda2_step_nm");
  if (lambda2_nm < lambda1_nm) throw InvalidArgument("lambda2_nm must be >= lambda1_nm");
  const double lo = lambda2_min_nm.value_or(lambda1_nm);
  if (lambda2_max_nm < lo) throw InvalidArgument("lambda2_max_nm must be >= lambda2_min_nm");
  if (lo < lambda1_nm) throw InvalidArgument("lambda2_min_nm must be >= lambda1_nm");
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw InvalidArgument("visibility must lie in [0, 1]");
  if (!(count_scale >= 0.0) || !(dark_rate >= 0.0))
    throw InvalidArgument("count_scale and dark_rate must be >= 0");
  if (!(integration_s >= 0.0)) throw InvalidArgument("integration_s must be >= 0");
  positive(snr_threshold, "snr_threshold");
  if (theta_deg.empty() || phi_deg.empty()) throw InvalidArgument("theta/phi grids must be non-empty");
}

std::vector<double> RunConfig::lambda2_grid_nm() const {
  std::vector<double> g;
  const double lo = lambda2_min_nm.value_or(lambda1_nm);
  const double span = lambda2_max_nm - lo;
  const auto n = static_cast<long>(std::floor(span / lambda2_step_nm + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * lambda2_step_nm);
  return g;
}

InstrumentConfig RunConfig::instrument(const Material& m) const {
  InstrumentConfig c;
  c.alpha = alpha ? *alpha : dopmeter::alpha(m, nm(lambda1_nm), nm(lambda2_nm), length_mm * 1e-3);
  c.crystal2_rot_err = crystal2_rot_err_deg * kDeg;
  c.waveplate_axis_err = waveplate_axis_err_deg * kDeg;
  c.waveplate_retardance = waveplate_retardance_deg * kDeg;
  c.polarizer_angle = polarizer_angle_deg * kDeg;
  c.visibility = visibility;
  c.count_scale = count_scale;
  c.dark_rate = dark_rate;
  c.validate();
  return c;
}

RunConfig apply_config_json(RunConfig c, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  try {
    if (doc.contains("schema") && doc["schema"].get<std::string>() != kRunSchema)
      throw InvalidArgument(
          fmt::format("unsupported config schema '{}'", doc["schema"].get<std::string>()));
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc[key].get<std::decay_t<decltype(field)>>();
    };
    if (doc.contains("material")) c.material = doc["material"].get<std::string>();
    get("lambda1_nm", c.lambda1_nm);
    get("lambda2_nm", c.lambda2_nm);
    if (doc.contains("lambda2_min_nm")) c.lambda2_min_nm = doc["lambda2_min_nm"].get<double>();
    get("lambda2_max_nm", c.lambda2_max_nm);
    get("lambda2_step_nm", c.lambda2_step_nm);
    get("length_mm", c.length_mm);
    if (doc.contains("alpha") && !doc["alpha"].is_null()) c.alpha = doc["alpha"].get<double>();
    get("crystal2_rot_err_deg", c.crystal2_rot_err_deg);
    get("waveplate_axis_err_deg", c.waveplate_axis_err_deg);
    get("waveplate_retardance_deg", c.waveplate_retardance_deg);
    get("polarizer_angle_deg", c.polarizer_angle_deg);
    get("visibility", c.visibility);
    get("count_scale", c.count_scale);
    get("dark_rate", c.dark_rate);
    get("snr_threshold", c.snr_threshold);
    get("theta_deg", c.theta_deg);
    get("phi_deg", c.phi_deg);
    get("integration_s", c.integration_s);
    get("seed", c.seed);
    get("threads", c.threads);
    if (doc.contains("input")) c.input = doc["input"].get<std::string>();
    get("model", c.model);
    if (doc.contains("format")) c.format = parse_format(doc["format"].get<std::string>());
    if (doc.contains("out")) c.out = doc["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("malformed config: {}", e.what()));
  }
  return c;
}

RunConfig load_config_file(RunConfig base, const std::filesystem::path& path) {
  return apply_config_json(std::move(base), read_file(path));
}

Material load_material_for(const RunConfig& cfg) {
  return cfg.material.empty() ? load_default_ktp() : load_material(cfg.material);
}

// ---------------------------------------------------------------------------
// Commands

void cmd_pm_curve(const RunConfig& cfg, std::ostream& out) {
  const Material m = load_material_for(cfg);
  std::vector<double> grid;
  for (double v : cfg.lambda2_grid_nm()) grid.push_back(nm(v));
  const PmCurve curve = pm_curve(m, nm(cfg.lambda1_nm), grid, cfg.length_mm * 1e-3);

  if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
    json rows = json::array();
    for (const auto& p : curve.points)
      rows.push_back({{"lambda2_nm", to_nm(p.lambda2)},
                      {"theta_A_deg", opt_deg(p.theta_a)},
                      {"theta_B_deg", opt_deg(p.theta_b)},
                      {"separation_deg", opt_deg(p.separation())},
                      {"fwhm_deg", opt_deg(p.fwhm)},
                      {"status", p.separation() ? "ok" : "no_phase_match"}});
    json doc{{"material", m.name},
             {"lambda1_nm", cfg.lambda1_nm},
             {"length_mm", cfg.length_mm},
             {"rows", rows}};
    out << doc.dump(2) << '\n';
    return;
  }
  out << "lambda2_nm,theta_A_deg,theta_B_deg,separation_deg,fwhm_deg,status\n";
  for (const auto& p : curve.points)
    fmt::print(out, "{:.3f},{},{},{},{},{}\n", to_nm(p.lambda2), csv_opt_deg(p.theta_a),
               csv_opt_deg(p.theta_b), csv_opt_deg(p.separation()), csv_opt_deg(p.fwhm),
               p.separation() ? "ok" : "no_phase_match");
}

void cmd_alpha_curve(const RunConfig& cfg, std::ostream& out) {
  const Material m = load_material_for(cfg);
  const double l1 = nm(cfg.lambda1_nm);
  const double len = cfg.length_mm * 1e-3;
  std::vector<std::pair<double, double>> rows;
  for (double v : cfg.lambda2_grid_nm()) rows.emplace_back(v, alpha(m, l1, nm(v), len));

  if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
    json arr = json::array();
    for (auto [l2, a] : rows) arr.push_back({{"lambda2_nm", l2}, {"alpha", a}, {"alpha_sq", a * a}});
    out << json{{"material", m.name},
                {"lambda1_nm", cfg.lambda1_nm},
                {"length_mm", cfg.length_mm},
                {"rows", arr}}
               .dump(2)
        << '\n';
    return;
  }
  out << "lambda2_nm,alpha,alpha_sq\n";
  for (auto [l2, a] : rows) fmt::print(out, "{:.3f},{:.9f},{:.9f}\n", l2, a, a * a);
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Material m = load_material_for(cfg);
  const InstrumentConfig inst = cfg.instrument(m);
  SourceConfig src;
  src.lambda1 = nm(cfg.lambda1_nm);
  src.lambda2 = nm(cfg.lambda2_nm);
  const auto theta = to_rad(cfg.theta_deg);
  const auto phi = to_rad(cfg.phi_deg);
  const SweepResult r =
      sweep(src, inst, theta, phi, SweepOptions{cfg.integration_s, cfg.seed, cfg.threads});

  if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
    json cells = json::array();
    for (std::size_t it = 0; it < r.n_theta(); ++it)
      for (std::size_t ip = 0; ip < r.n_phi(); ++ip) {
        const auto k = r.at(it, ip);
        cells.push_back({{"theta_deg", cfg.theta_deg[it]},
                         {"phi_deg", cfg.phi_deg[ip]},
                         {"intensity", r.intensity[k]},
                         {"expected_counts", r.expected[k]},
                         {"counts", static_cast<std::int64_t>(r.counts[k])}});
      }
    json stats = json::array();
    for (std::size_t ip = 0; ip < r.n_phi(); ++ip)
      stats.push_back({{"phi_deg", cfg.phi_deg[ip]},
                       {"mean_counts", r.count_stats.mean[ip]},
                       {"std_counts", r.count_stats.stddev[ip]},
                       {"mean_intensity", r.intensity_stats.mean[ip]},
                       {"std_intensity", r.intensity_stats.stddev[ip]}});
    json doc{{"lambda1_nm", cfg.lambda1_nm},
             {"lambda2_nm", cfg.lambda2_nm},
             {"length_mm", cfg.length_mm},
             {"alpha", inst.alpha},
             {"visibility_param", inst.visibility},
             {"integration_s", cfg.integration_s},
             {"seed", cfg.seed},
             {"cells", cells},
             {"phi_stats", stats}};
    if (r.n_phi() >= 2) {
      try {
        doc["visibility"] = visibility(r);
      } catch (const DomainError&) {
        doc["visibility"] = nullptr;
      }
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "theta_deg,phi_deg,intensity,expected_counts,counts,phi_mean_counts,phi_std_counts\n";
  for (std::size_t it = 0; it < r.n_theta(); ++it)
    for (std::size_t ip = 0; ip < r.n_phi(); ++ip) {
      const auto k = r.at(it, ip);
      fmt::print(out, "{:.4f},{:.4f},{:.12f},{:.6f},{},{:.6f},{:.6f}\n", cfg.theta_deg[it],
                 cfg.phi_deg[ip], r.intensity[k], r.expected[k],
                 static_cast<std::int64_t>(r.counts[k]), r.count_stats.mean[ip],
                 r.count_stats.stddev[ip]);
    }
}

void cmd_sensitivity(const RunConfig& cfg, std::ostream& out) {
  const Material m = load_material_for(cfg);
  InstrumentConfig base = cfg.instrument(m);
  // The study perturbs one element of an otherwise ideal chain.
  const double a = base.alpha;
  base = InstrumentConfig{};
  base.alpha = a;
  const auto theta = to_rad(cfg.theta_deg);
  const auto phi = to_rad(cfg.phi_deg);
  const std::array kinds{Perturbation::Crystal2Rotation, Perturbation::WaveplateAxis,
                         Perturbation::PolarizerAngle, Perturbation::Visibility};
  std::vector<std::vector<double>> curves;
  for (auto k : kinds) curves.push_back(theta_stddev_curve(base, k, phi, theta, a));

  if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Json) {
    json doc{{"alpha", a}, {"phi_deg", cfg.phi_deg}, {"theta_deg", cfg.theta_deg}};
    json c = json::object();
    for (std::size_t i = 0; i < kinds.size(); ++i) c[to_string(kinds[i])] = curves[i];
    doc["curves"] = c;
    out << doc.dump(2) << '\n';
    return;
  }
  out << "phi_deg";
  for (auto k : kinds) out << ',' << to_string(k);
  out << '\n';
  for (std::size_t ip = 0; ip < phi.size(); ++ip) {
    fmt::print(out, "{:.4f}", cfg.phi_deg[ip]);
    for (const auto& c : curves) fmt::print(out, ",{:.12f}", c[ip]);
    out << '\n';
  }
}

PhiSeries read_phi_series(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::map<double, std::pair<double, int>> groups;  // phi_deg -> (sum, n)
  std::vector<double> order;
  auto add = [&](double phi_deg, double y) {
    auto [it, fresh] = groups.try_emplace(phi_deg, 0.0, 0);
    if (fresh) order.push_back(phi_deg);
    it->second.first += y;
    it->second.second += 1;
  };

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
      for (const auto& s : doc.at("phi_stats"))
        add(s.at("phi_deg").get<double>(), s.at("mean_counts").get<double>());
    } catch (const json::exception& e) {
      throw InvalidArgument(fmt::format("'{}' is not a sweep JSON document: {}", path.string(),
                                        e.what()));
    }
  } else {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("fit input is empty");
    const auto header = split_csv_line(line);
    auto column = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
      for (const char* n : names)
        for (std::size_t i = 0; i < header.size(); ++i)
          if (header[i] == n) return i;
      return std::nullopt;
    };
    const auto phi_col = column({"phi_deg"});
    const auto y_col = column({"counts", "mean_counts", "y"});
    if (!phi_col || !y_col)
      throw InvalidArgument("fit CSV needs a phi_deg column and one of counts|mean_counts|y");
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto cells = split_csv_line(line);
      if (cells.size() <= std::max(*phi_col, *y_col))
        throw InvalidArgument(fmt::format("short CSV row '{}'", line));
      add(parse_double(cells[*phi_col], "phi_deg"), parse_double(cells[*y_col], "y"));
    }
  }

  PhiSeries s;
  for (double p : order) {
    const auto& [sum, n] = groups.at(p);
    s.phi.push_back(p * kDeg);
    s.y.push_back(sum / n);
  }
  return s;
}

void cmd_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input.empty()) throw InvalidArgument("fit needs --input PATH");
  const FitModel model = parse_fit_model(cfg.model);
  const PhiSeries data = read_phi_series(cfg.input);
  const FitResult f = fit(model, data.phi, data.y);

  json params{{"a", f.a}, {"b", f.b}};
  json half{{"a", num_or_null(f.half_a)}, {"b", num_or_null(f.half_b)}};
  if (model == FitModel::ShiftedSin2) {
    params["c"] = f.c;
    params["d_deg"] = f.d / kDeg;
    half["c"] = num_or_null(f.half_c);
    half["d_deg"] = num_or_null(f.half_d);
  }
  json doc{{"model", to_string(model)},
           {"n_points", f.n_points},
           {"params", params},
           {"half_widths", half},
           {"residual_rms", f.residual_rms}};
  try {
    doc["visibility"] = visibility(data.y);
  } catch (const Error&) {
    doc["visibility"] = nullptr;
  }
  out << doc.dump(2) << '\n';
}

void cmd_regimes(const RunConfig& cfg, std::ostream& out) {
  const Material m = load_material_for(cfg);
  const RegimeReport r = regimes(m, nm(cfg.lambda1_nm), cfg.length_mm * 1e-3, cfg.visibility,
                                 nm(cfg.lambda2_nm - cfg.lambda1_nm), cfg.snr_threshold);
  if (cfg.format.value_or(OutputFormat::Json) == OutputFormat::Csv) {
    out << "lambda1_nm,length_mm,visibility,lambda1_limit_nm,lambda2_limit_nm,queried_nm,regime\n";
    fmt::print(out, "{:.3f},{:.4f},{:.4f},{:.6f},{:.6f},{:.6f},{}\n", cfg.lambda1_nm, cfg.length_mm,
               cfg.visibility, to_nm(r.lambda1_limit), to_nm(r.lambda2_limit), to_nm(r.queried),
               to_string(r.regime));
    return;
  }
  json doc{{"material", m.name},
           {"lambda1_nm", cfg.lambda1_nm},
           {"length_mm", cfg.length_mm},
           {"visibility", cfg.visibility},
           {"snr_threshold", cfg.snr_threshold},
           {"lambda1_limit_nm", to_nm(r.lambda1_limit)},
           {"lambda2_limit_nm", to_nm(r.lambda2_limit)},
           {"queried_nm", cfg.lambda2_nm - cfg.lambda1_nm},
           {"regime", to_string(r.regime)}};
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Entry point

namespace {

struct Flags {
  std::string config;
  std::string material;
  double lambda1_nm = 0, lambda2_nm = 0, lambda2_min_nm = 0, lambda2_max_nm = 0,
         lambda2_step_nm = 0, length_mm = 0, visibility = 0, alpha = 0, integration_s = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out, format, input, model;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--material", f.material, "material JSON file");
  sub->add_option("--lambda1-nm", f.lambda1_nm, "first laser wavelength [nm]");
  sub->add_option("--lambda2-nm", f.lambda2_nm, "second laser wavelength [nm]");
  sub->add_option("--lambda2-min-nm", f.lambda2_min_nm, "lambda2 scan start [nm]");
  sub->add_option("--lambda2-max-nm", f.lambda2_max_nm, "lambda2 scan end [nm]");
  sub->add_option("--lambda2-step-nm", f.lambda2_step_nm, "lambda2 scan step [nm]");
  sub->add_option("--length-mm", f.length_mm, "crystal length [mm]");
  sub->add_option("--visibility", f.visibility, "interference visibility in [0, 1]");
  sub->add_option("--alpha", f.alpha, "override the perturbing-process weight");
  sub->add_option("--integration-s", f.integration_s, "integration time per cell [s]");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_option("--out", f.out, "output path (default stdout)");
  sub->add_option("--format", f.format, "csv | json");
}

RunConfig resolve(const CLI::App* sub, const Flags& f) {
  RunConfig c;
  if (sub->count("--config")) c = load_config_file(c, f.config);
  if (sub->count("--material")) c.material = f.material;
  if (sub->count("--lambda1-nm")) c.lambda1_nm = f.lambda1_nm;
  if (sub->count("--lambda2-nm")) {
    c.lambda2_nm = f.lambda2_nm;
    // A single lambda2 also collapses the scan range unless given explicitly.
    if (!sub->count("--lambda2-min-nm")) c.lambda2_min_nm = f.lambda2_nm;
    if (!sub->count("--lambda2-max-nm")) c.lambda2_max_nm = f.lambda2_nm;
  }
  if (sub->count("--lambda2-min-nm")) c.lambda2_min_nm = f.lambda2_min_nm;
  if (sub->count("--lambda2-max-nm")) c.lambda2_max_nm = f.lambda2_max_nm;
  if (sub->count("--lambda2-step-nm")) c.lambda2_step_nm = f.lambda2_step_nm;
  if (sub->count("--length-mm")) c.length_mm = f.length_mm;
  if (sub->count("--visibility")) c.visibility = f.visibility;
  if (sub->count("--alpha")) c.alpha = f.alpha;
  if (sub->count("--integration-s")) c.integration_s = f.integration_s;
  if (sub->count("--seed")) c.seed = f.seed;
  if (sub->count("--threads")) c.threads = f.threads;
  if (sub->count("--out")) c.out = f.out;
  if (sub->count("--format")) c.format = parse_format(f.format);
  if (sub->get_option_no_throw("--input") && sub->count("--input")) c.input = f.input;
  if (sub->get_option_no_throw("--model") && sub->count("--model")) c.model = f.model;
  c.validate();
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Singlet-projection DOP meter simulator", "dopmeter"};
  app.require_subcommand(1);
  Flags flags;

  using Command = void (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> table{
      {"pm-curve", "phase-matching angles of both SFG assignments vs lambda2", cmd_pm_curve},
      {"alpha-curve", "perturbing-process weight alpha^2 vs lambda2", cmd_alpha_curve},
      {"sweep", "simulated counts over the (theta, phi) grid", cmd_sweep},
      {"sensitivity", "std-over-theta curves for single misalignments", cmd_sensitivity},
      {"fit", "fit a sweep or phi/y table and report visibility", cmd_fit},
      {"regimes", "operating limits and the domain of lambda2 - lambda1", cmd_regimes},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : table) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (std::string_view(name) == "fit") {
      sub->add_option("--input", flags.input, "sweep CSV/JSON or phi_deg,y CSV")->required();
      sub->add_option("--model", flags.model, "sin2 | shifted_sin2");
    }
    subs.emplace_back(sub, fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    for (const auto& [sub, fn] : subs) {
      if (!sub->parsed()) continue;
      const RunConfig cfg = resolve(sub, flags);
      if (cfg.out.empty()) {
        fn(cfg, out);
      } else {
        std::ostringstream buf;
        fn(cfg, buf);
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) throw InvalidArgument(fmt::format("cannot write '{}'", cfg.out.string()));
        file << buf.str();
      }
    }
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
  return kOk;
}

}  // namespace dopmeter::cli
