#include "agentrec/types.hpp"

#include <algorithm>
#include <cmath>

#include "agentrec/errors.hpp"

namespace agentrec {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidUtterance: return "InvalidUtterance";
    case ErrorKind::StateDesync: return "StateDesync";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidContext: return "InvalidContext";
    case ErrorKind::NumericError: return "NumericError";
    case ErrorKind::NotFound: return "NotFound";
  }
  return "Unknown";
}

const char* to_string(AgentId id) {
  switch (id) {
    case AgentId::Conv: return "Conv";
    case AgentId::Pref: return "Pref";
    case AgentId::Ctx: return "Ctx";
    case AgentId::Rank: return "Rank";
  }
  return "Unknown";
}

namespace math {

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace math
}  // namespace agentrec
