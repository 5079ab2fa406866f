#pragma once

#include <string>
#include <vector>

namespace lhdeform {

/// Thresholds shared by every identity check and chart guard.
struct Tolerances {
  double rel_identity = 1e-9;
  double abs_identity = 1e-12;
  double fd_step = 1e-6;
  double domain_margin = 1e-8;

  /// Returns the list of violated invariants (empty when valid).
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (!(rel_identity > 0)) out.emplace_back("rel_identity must be positive");
    if (!(abs_identity > 0)) out.emplace_back("abs_identity must be positive");
    if (!(fd_step > 0)) out.emplace_back("fd_step must be positive");
    if (!(domain_margin > 0)) out.emplace_back("domain_margin must be positive");
    if (!(fd_step * fd_step >= abs_identity))
      out.emplace_back("fd_step^2 must not be below abs_identity");
    return out;
  }

  bool valid() const { return problems().empty(); }
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace lhdeform
