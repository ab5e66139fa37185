#include "dopmeter/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dopmeter/error.hpp"

#ifndef DOPMETER_DEFAULT_DATA_DIR
#define DOPMETER_DEFAULT_DATA_DIR "data/materials"
#endif

namespace dopmeter {

namespace {

constexpr std::string_view kSchema = "dopmeter-material/1";

std::size_t coeff_count(SellmeierForm form) {
  switch (form) {
    case SellmeierForm::PoleIr:
    case SellmeierForm::ResonantIr:
      return 4;
    case SellmeierForm::TwoPole:
      return 5;
  }
  return 0;
}

SellmeierForm parse_form(const std::string& id) {
  if (id == "sellmeier-pole-ir") return SellmeierForm::PoleIr;
  if (id == "sellmeier-resonant-ir") return SellmeierForm::ResonantIr;
  if (id == "sellmeier-two-pole") return SellmeierForm::TwoPole;
  throw InvalidArgument(fmt::format("unknown Sellmeier form '{}'", id));
}

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

void check_window(const Material& m, double wavelength_m) {
  if (!m.in_validity(wavelength_m))
    throw OutOfRange(fmt::format("{}: wavelength {:.4f} um outside validity window [{}, {}] um",
                                 m.name, wavelength_m * 1e6, m.validity_lo_um, m.validity_hi_um));
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2))
    throw InvalidArgument(fmt::format("XZ-plane angle {} rad outside [0, pi/2]", theta));
}

}  // namespace

double SellmeierCoeffs::n_squared(Axis axis, double l) const {
  const auto& c = axes[static_cast<int>(axis)];
  const double l2 = l * l;
  switch (form) {
    case SellmeierForm::PoleIr:
      return c[0] + c[1] / (l2 - c[2]) - c[3] * l2;
    case SellmeierForm::ResonantIr:
      return c[0] + c[1] * l2 / (l2 - c[2] * c[2]) - c[3] * l2;
    case SellmeierForm::TwoPole:
      return c[0] + c[1] / (l2 - c[2]) + c[3] / (l2 - c[4]);
  }
  return 0.0;
}

bool Material::in_validity(double wavelength_m) const {
  // Edges are inclusive up to the rounding of the m -> um conversion.
  const double um = wavelength_m * 1e6;
  const double tol = 1e-12 * validity_hi_um;
  return std::isfinite(um) && um >= validity_lo_um - tol && um <= validity_hi_um + tol;
}

Material parse_material(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(fmt::format("material file is not valid JSON: {}", e.what()));
  }

  Material m;
  try {
    if (doc.contains("schema") && doc.at("schema").get<std::string>() != kSchema)
      throw InvalidArgument(
          fmt::format("unsupported material schema '{}'", doc.at("schema").get<std::string>()));
    m.name = doc.at("name").get<std::string>();
    m.coeffs.form = parse_form(doc.at("form").get<std::string>());
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      auto v = doc.at("axes").at(axis_name(a)).get<std::vector<double>>();
      if (v.size() != coeff_count(m.coeffs.form))
        throw InvalidArgument(fmt::format("{}: axis {} needs {} coefficients, got {}", m.name,
                                          axis_name(a), coeff_count(m.coeffs.form), v.size()));
      m.coeffs.axes[static_cast<int>(a)] = std::move(v);
    }
    const auto window = doc.at("validity_um").get<std::vector<double>>();
    if (window.size() != 2 || !(window[0] > 0.0) || !(window[1] > window[0]))
      throw InvalidArgument(m.name + ": validity_um must be [lo, hi] with 0 < lo < hi");
    m.validity_lo_um = window[0];
    m.validity_hi_um = window[1];
    const std::string out = doc.value("sfg_output", std::string{"ordinary"});
    if (out == "ordinary")
      m.sfg_output = OutputPolarization::Ordinary;
    else if (out == "extraordinary")
      m.sfg_output = OutputPolarization::Extraordinary;
    else
      throw InvalidArgument(m.name + ": sfg_output must be 'ordinary' or 'extraordinary'");
    m.source = doc.value("source", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("malformed material file: {}", e.what()));
  }

  // Indices must stay real and physical over the whole window.
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    const double um = m.validity_lo_um + (m.validity_hi_um - m.validity_lo_um) * i / kSamples;
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      const double n2 = m.coeffs.n_squared(a, um);
      if (!(n2 > 1.0 && n2 < 9.0))
        throw InvalidArgument(fmt::format("{}: axis {} index leaves (1, 3) at {:.3f} um", m.name,
                                          axis_name(a), um));
    }
  }
  return m;
}

Material load_material(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open material file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_material(ss.str());
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("DOPMETER_DATA_DIR"); env && *env) return env;
  return DOPMETER_DEFAULT_DATA_DIR;
}

Material load_default_ktp() { return load_material(default_data_dir() / "ktp.json"); }

MaterialRegistry MaterialRegistry::from_directory(const std::filesystem::path& dir) {
  MaterialRegistry reg;
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  if (ec) throw InvalidArgument(fmt::format("cannot read material directory '{}'", dir.string()));
  std::sort(files.begin(), files.end());
  for (const auto& f : files) reg.add(load_material(f));
  return reg;
}

void MaterialRegistry::add(Material m) {
  if (materials_.contains(m.name))
    throw InvalidArgument(fmt::format("duplicate material name '{}'", m.name));
  auto name = m.name;
  materials_.emplace(std::move(name), std::move(m));
}

const Material& MaterialRegistry::get(const std::string& name) const {
  auto it = materials_.find(name);
  if (it == materials_.end()) throw InvalidArgument(fmt::format("unknown material '{}'", name));
  return it->second;
}

std::vector<std::string> MaterialRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : materials_) out.push_back(k);
  return out;
}

double index(const Material& m, Axis axis, double wavelength_m) {
  check_window(m, wavelength_m);
  return std::sqrt(m.coeffs.n_squared(axis, wavelength_m * 1e6));
}

double index_e_xz(const Material& m, double theta, double wavelength_m) {
  check_theta(theta);
  const double nx = index(m, Axis::X, wavelength_m);
  const double nz = index(m, Axis::Z, wavelength_m);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return 1.0 / std::sqrt(c * c / (nx * nx) + s * s / (nz * nz));
}

double walkoff_xz(const Material& m, double theta, double wavelength_m) {
  const double ne = index_e_xz(m, theta, wavelength_m);
  const double nx = index(m, Axis::X, wavelength_m);
  const double nz = index(m, Axis::Z, wavelength_m);
  const double t = 0.5 * ne * ne * (1.0 / (nz * nz) - 1.0 / (nx * nx)) * std::sin(2.0 * theta);
  return std::abs(std::atan(t));
}

}  // namespace dopmeter
