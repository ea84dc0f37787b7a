#pragma once

// Umbrella header for the quantum reservoir computing library.

#include "qrc/chaotic_systems.hpp"
#include "qrc/circuit.hpp"
#include "qrc/csv.hpp"
#include "qrc/density.hpp"
#include "qrc/diagnostics.hpp"
#include "qrc/error.hpp"
#include "qrc/experiment.hpp"
#include "qrc/pipeline.hpp"
#include "qrc/random.hpp"
#include "qrc/readout.hpp"
