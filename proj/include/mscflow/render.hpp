#pragma once

#include <string>

#include "mscflow/msc.hpp"

namespace mscflow {

/// Column-per-lifeline text chart. A message whose receive can follow its
/// send immediately is drawn as one arrow; otherwise send and receive get
/// separate rows.
std::string render_ascii(const MscTuple& m);

/// Graphviz digraph: one cluster per lifeline, dotted program-order edges,
/// solid message edges.
std::string render_dot(const MscTuple& m);

} // namespace mscflow
