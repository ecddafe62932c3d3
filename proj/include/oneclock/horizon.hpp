#pragma once

#include "oneclock/runlog.hpp"

namespace oneclock {

void validate(const ValCurve& curve);

/// Early-stopping scan over the curve: an evaluation improves iff its loss is
/// strictly below best - min_delta; the scan aborts once more than
/// patience_steps optimizer steps pass without improvement. Returns the step
/// of the best loss seen up to the stopping moment (the global best when
/// patience is never exhausted).
long early_stop_step(const ValCurve& curve, long patience_steps, double min_delta);

/// Rounds a positive value to one significant digit, half away from zero.
/// Integer-valued for inputs >= 1; satisfies round_sig1(10x) = 10*round_sig1(x).
double round_sig1(double x);

/// Effective learning horizon: early-stopping steps of the two lowest-loss
/// beta entries (ties toward smaller beta), averaged and rounded to one
/// significant digit. patience = patience_fraction * budget in optimizer steps.
long estimate_t_es(const ExperimentRecord& record, double patience_fraction,
                   double min_delta);

} // namespace oneclock
