// Detrending walkthrough: how the measurement-variance knob R trades
// residual energy against reciprocity.
//
// A small R tells the filter to trust each measurement, so the state hugs
// the series and the residuals shrink toward the (non-reciprocal) receiver
// noise; a large R freezes the state near the large-scale trend and leaves
// the full small-scale swing in the residuals.  The sweep below prints the
// residual variance and the Alice/Bob residual correlation at each R.
//
// Build:  cmake --build build --target detrend_demo
// Run:    ./build/detrend_demo

#include <cmath>
#include <cstdio>
#include <vector>

#include "skg/detrend.hpp"
#include "skg/simulate.hpp"

namespace {

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return var / static_cast<double>(v.size());
}

double correlation(const std::vector<double>& x,
                   const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

int main() {
  skg::ChannelSimConfig sim;
  sim.num_samples = 16384;
  sim.seed = 42;
  const auto [alice, bob, eve] = skg::simulate_channel(sim);

  std::printf("%zu samples per node, SNR %.0f dB\n\n", alice.samples.size(),
              sim.snr_db);
  std::printf("%-10s %-14s %-14s\n", "R", "residual var", "corr(A, B)");

  for (double r : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    skg::FilterConfig fc;
    fc.measurement_variance_r = r;  // in units of the series' mean power
    const skg::DetrendResult da = skg::detrend_unit_power(alice, fc);
    const skg::DetrendResult db = skg::detrend_unit_power(bob, fc);
    std::printf("%-10g %-14.6g %-14.4f\n", r,
                variance(da.residuals.residuals),
                correlation(da.residuals.residuals, db.residuals.residuals));
  }

  std::printf(
      "\nsmaller R -> less residual energy and less reciprocity: the\n"
      "mismatch/randomness trade-off the R sweep explores.\n");
  return 0;
}
