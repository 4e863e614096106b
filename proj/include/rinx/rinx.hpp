#pragma once

// Everything except the network server (rinx/server.hpp, needs Boost).
#include "rinx/analytics.hpp"
#include "rinx/bench.hpp"
#include "rinx/cell_grid.hpp"
#include "rinx/centrality.hpp"
#include "rinx/community.hpp"
#include "rinx/error.hpp"
#include "rinx/graph_io.hpp"
#include "rinx/io.hpp"
#include "rinx/layout.hpp"
#include "rinx/parallel.hpp"
#include "rinx/pdb.hpp"
#include "rinx/rin.hpp"
#include "rinx/scores.hpp"
#include "rinx/session.hpp"
#include "rinx/session_registry.hpp"
#include "rinx/synthetic.hpp"
#include "rinx/traj_json.hpp"
#include "rinx/trajectory.hpp"
#include "rinx/vec3.hpp"
