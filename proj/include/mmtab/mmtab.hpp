#pragma once

#include "mmtab/error.hpp"
#include "mmtab/evaluate.hpp"
#include "mmtab/extract.hpp"
#include "mmtab/format_io.hpp"
#include "mmtab/instruct.hpp"
#include "mmtab/metrics.hpp"
#include "mmtab/pipeline.hpp"
#include "mmtab/raster.hpp"
#include "mmtab/render.hpp"
#include "mmtab/rng.hpp"
#include "mmtab/sample.hpp"
#include "mmtab/table.hpp"
#include "mmtab/tasksynth.hpp"
#include "mmtab/teds.hpp"
#include "mmtab/tree_edit_distance.hpp"
#include "mmtab/version.hpp"
