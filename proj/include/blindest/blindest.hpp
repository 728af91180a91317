// Umbrella header.
#pragma once

#include "blindest/blind_estimators.hpp"
#include "blindest/channel_pipeline.hpp"
#include "blindest/core.hpp"
#include "blindest/em_mixture.hpp"
#include "blindest/rng.hpp"
#include "blindest/robust_stats.hpp"
#include "blindest/signal_model.hpp"
#include "blindest/sure_denoiser.hpp"
#include "blindest/theory_oracles.hpp"
