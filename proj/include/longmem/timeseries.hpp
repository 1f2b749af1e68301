// Observed or simulated sample with optional ground truth attached.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "longmem/model.hpp"

namespace longmem {

enum class InnovationsKind { none, exact, approximate };

struct TimeSeries {
  std::vector<double> values;

  // set only for simulated data
  std::optional<ModelSpec> truth;

  // eps_t for t = 1..n; "approximate" marks standardized one-step prediction
  // errors from the exact-Gaussian sampler, which are not the model's eps_t
  std::vector<double> innovations;
  InnovationsKind innovations_kind = InnovationsKind::none;

  // x_t for t = 1-m_pre..0 when the truncated-MA sampler retained them
  std::vector<double> presample;

  std::size_t n() const { return values.size(); }
};

enum class InnovationKind { gaussian, uniform, student_t };

struct InnovationLaw {
  InnovationKind kind = InnovationKind::gaussian;
  double df = 0.0;  // student_t only; must exceed 4 for a finite 4th moment
};

}  // namespace longmem
