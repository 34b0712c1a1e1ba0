#include "equidist/phi.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace equidist {

PhiSpec PhiSpec::power(double c) {
  if (!(c > 1.0) || !std::isfinite(c)) throw std::invalid_argument("phi power exponent must exceed 1");
  return PhiSpec(Form::power, c);
}

PhiSpec PhiSpec::loglog_adjusted(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("phi loglog eta must be positive");
  return PhiSpec(Form::loglog_adjusted, eta);
}

PhiSpec PhiSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("phi form must look like power:<c> or loglog:<eta>");
  const std::string kind(text.substr(0, colon));
  const std::string value(text.substr(colon + 1));
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("phi parameter is not a number: " + value);
  }
  if (used != value.size()) throw std::invalid_argument("phi parameter is not a number: " + value);
  if (kind == "power") return power(p);
  if (kind == "loglog") return loglog_adjusted(p);
  throw std::invalid_argument("unknown phi form: " + kind);
}

std::string PhiSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (form_ == Form::power ? "power:" : "loglog:") << param_;
  return os.str();
}

double PhiSpec::operator()(double n) const {
  if (!(n >= 1.0)) throw std::domain_error("phi is evaluated on n >= 1 only");
  if (form_ == Form::power) return std::pow(n, param_);
  return n * std::pow(std::log(n + std::numbers::e), 1.0 + param_);
}

double phi_eval(const PhiSpec& phi, double n) { return phi(n); }

}  // namespace equidist
