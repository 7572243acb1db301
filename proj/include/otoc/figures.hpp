#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otoc/semiclassics.hpp"
#include "otoc/series.hpp"
#include "otoc/units.hpp"

namespace otoc::io {

// Everything one temperature contributes to the summary figures.  Series
// left empty are skipped; `quantum_o1` carries Re O1 so that the OTOC is
// c = -2*o1 + o2 + o3 column-wise.
struct TemperatureCurves {
  double kbt = 0.0;
  OtocSeries classical;
  OtocSeries quantum_o1;
  OtocSeries quantum_o2;
  OtocSeries quantum_o3;
  OtocSeries quantum_c;
  semi::GrowthFit growth;  // exponential-window fit of quantum_c
  bool has_growth = false;
};

struct FigureProvenance {
  std::string config_hash;
  std::string seed;  // decimal text, preserved exactly in sidecars
};

// Write the figure datasets and one gnuplot script per figure into `dir`
// (created if needed) and return the names of the files written, in order.
//
//   components_T*.dat  per-temperature OTOC components over k_BT in units
//                      of m a^2, plus the classical curve, vs ell/a
//   growth.dat         quantum OTOC per temperature (one block each) with
//                      the exp(sqrt(3) lambda_g ell) reference line
//   scaled.dat         OTOC damped by exp(-sqrt(3) lambda_g ell), raw and
//                      divided by the fitted prefactor alpha(T), vs t/t0
//
// Every dataset gets a JSON sidecar with the provenance fields; output is
// byte-identical across reruns with the same inputs.
std::vector<std::string> emit_figure_data(
    const std::string& dir, const std::vector<TemperatureCurves>& curves,
    double lambda_g, double a, const domain::UnitSystem& u,
    const FigureProvenance& prov);

}  // namespace otoc::io
