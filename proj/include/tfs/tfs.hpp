// tfs/tfs.hpp - umbrella header for the library proper. The command-line
// layer lives in tfs/cli.hpp and is not pulled in here: it depends on the
// vendored CLI11 and json headers, which library clients should not need.
#pragma once

#include "tfs/bitset.hpp"
#include "tfs/diagnostics.hpp"
#include "tfs/drfs.hpp"
#include "tfs/feature_graph.hpp"
#include "tfs/resolve.hpp"
#include "tfs/signature.hpp"
#include "tfs/textio.hpp"
#include "tfs/unfill.hpp"
