#pragma once

#include <iosfwd>

#include "sigmove/nn/network.hpp"

namespace sigmove::nn {

/// Text model file, all numbers round-trip exact:
///
///   sigmove-net 1
///   kind <mlp|cnn|lstm>
///   window <p>
///   seed <init seed>
///   layers <n>
///   layer <dense|conv1d|flatten|dropout|lstm> <units> <kernel> <relu> <return_sequence> <rate>
///   ...
///   params <total count>
///   block <name> <rank> <dims...>
///   <one value per line, block by block in declaration order>
struct SavedNetwork {
  NetworkSpec spec;
  Params params;
};

void save_network(const NetworkSpec& spec, const Params& params, std::ostream& out);
SavedNetwork load_network(std::istream& in);

}  // namespace sigmove::nn
