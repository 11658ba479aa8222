#pragma once

// Convenience umbrella: the whole reduction pipeline in one include.

#include "aemor/activation.hpp"
#include "aemor/architectures.hpp"
#include "aemor/commands.hpp"
#include "aemor/errors.hpp"
#include "aemor/fom.hpp"
#include "aemor/generators.hpp"
#include "aemor/io.hpp"
#include "aemor/matrix.hpp"
#include "aemor/metrics.hpp"
#include "aemor/network.hpp"
#include "aemor/optimizer.hpp"
#include "aemor/pod.hpp"
#include "aemor/presets.hpp"
#include "aemor/rng.hpp"
#include "aemor/snapshot.hpp"
#include "aemor/svd.hpp"
#include "aemor/training.hpp"
