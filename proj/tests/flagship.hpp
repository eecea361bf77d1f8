#pragma once

#include "choquard/config.hpp"
#include "choquard/extremal.hpp"

namespace fixture {

// Default configuration and its extremal result, computed once per process.
struct Flagship {
  choquard::RunConfig cfg;
  choquard::Model model;
  choquard::ExtremalResult extremal;
};

inline const Flagship& flagship() {
  static const Flagship f = [] {
    Flagship out{choquard::RunConfig{}, choquard::RunConfig{}.make_model(), {}};
    out.extremal = choquard::minimize_lambda_n(out.model, out.cfg.extremal_options());
    return out;
  }();
  return f;
}

} // namespace fixture
