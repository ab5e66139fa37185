#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dopmeter {

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Sellmeier variants understood by the loader. Wavelength in micrometers.
enum class SellmeierForm {
  PoleIr,      // n^2 = A + B/(l^2 - C) - D l^2
  ResonantIr,  // n^2 = A + B l^2/(l^2 - C^2) - D l^2
  TwoPole,     // n^2 = A + B/(l^2 - C) + D/(l^2 - E)
};

/// Polarization class of the sum-frequency wave relative to the XZ plane.
enum class OutputPolarization { Ordinary, Extraordinary };

struct SellmeierCoeffs {
  SellmeierForm form = SellmeierForm::PoleIr;
  std::array<std::vector<double>, 3> axes;  // indexed by Axis

  /// Squared index on one principal axis, wavelength in micrometers.
  double n_squared(Axis axis, double wavelength_um) const;
};

struct Material {
  std::string name;
  SellmeierCoeffs coeffs;
  double validity_lo_um = 0.0;
  double validity_hi_um = 0.0;
  OutputPolarization sfg_output = OutputPolarization::Ordinary;
  std::string source;

  bool in_validity(double wavelength_m) const;
};

/// Parses and validates a material JSON document. Throws InvalidArgument.
Material parse_material(const std::string& json_text);
Material load_material(const std::filesystem::path& path);

/// Value of $DOPMETER_DATA_DIR if set, otherwise the build-time default.
std::filesystem::path default_data_dir();

/// Loads `<default_data_dir()>/ktp.json`.
Material load_default_ktp();

/// Every `*.json` material in a directory, keyed by name.
class MaterialRegistry {
public:
  static MaterialRegistry from_directory(const std::filesystem::path& dir);

  void add(Material m);
  const Material& get(const std::string& name) const;
  bool contains(const std::string& name) const { return materials_.contains(name); }
  std::vector<std::string> names() const;

private:
  std::map<std::string, Material> materials_;
};

/// Principal refractive index. Throws OutOfRange outside the validity window.
double index(const Material& m, Axis axis, double wavelength_m);

/// Index of the XZ-polarized wave for propagation in the XZ plane at `theta`
/// from the z axis: 1/n^2 = cos^2(theta)/n_x^2 + sin^2(theta)/n_z^2.
double index_e_xz(const Material& m, double theta, double wavelength_m);

/// Poynting-vector walk-off of that same wave, radians, non-negative.
double walkoff_xz(const Material& m, double theta, double wavelength_m);

}  // namespace dopmeter
