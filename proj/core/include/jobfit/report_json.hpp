#pragma once

#include <vector>

#include "jobfit/dataio.hpp"
#include "jobfit/merging.hpp"
#include "jobfit/simulate.hpp"
#include "jobfit/sweep.hpp"
#include "jobfit/theory.hpp"

namespace jobfit {

Json to_json(const SimEstimate& e);
Json to_json(const PhaseReport& r);
Json to_json(const MergeReport& r);
Json to_json(const CompressionReport& r);
Json to_json(const MergePlan& plan);
Json to_json(const Heatmap& h, Knob x, Knob y);

// CSV with columns param,value,p_hat,stderr,ci_lo,ci_hi,trials,seed.
std::string sweep_csv(Knob knob, const std::vector<SweepRow>& rows);

// Shortest decimal text that round-trips the double.
std::string format_number(double x);

}  // namespace jobfit
