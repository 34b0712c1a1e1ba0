#pragma once

#include <string>
#include <string_view>

namespace equidist {

/// Positive increasing φ with Σ 1/φ(n) < ∞. Constructors reject parameters
/// that would break either property.
class PhiSpec {
 public:
  enum class Form { power, loglog_adjusted };

  /// φ(n) = n^c, c > 1.
  static PhiSpec power(double c);
  /// φ(n) = n·(log(n + e))^(1+η), η > 0.
  static PhiSpec loglog_adjusted(double eta);
  /// "power:1.5" or "loglog:0.1".
  static PhiSpec parse(std::string_view text);

  Form form() const { return form_; }
  double parameter() const { return param_; }
  std::string describe() const;

  /// Requires n >= 1.
  double operator()(double n) const;

 private:
  PhiSpec(Form f, double p) : form_(f), param_(p) {}
  Form form_;
  double param_;
};

double phi_eval(const PhiSpec& phi, double n);

}  // namespace equidist
