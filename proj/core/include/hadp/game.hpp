#pragma once

#include <vector>

#include "hadp/basis.hpp"
#include "hadp/game_model.hpp"

namespace hadp {

/// A complete game instance: costs, plant, critic/actor bases and the leader
/// NN basis. value_bases[i] is phi_vi over (x, nu) for i = 0..N; the leader's
/// own value basis must not depend on nu. leader_basis is phi_nu over x only
/// (alpha() == 0).
struct Game {
  GameSpec spec;
  PlantModel model;
  std::vector<PolyBasis> value_bases;
  PolyBasis leader_basis;
  Box region;  ///< compact set the bounds and diagnostics are sampled over

  int players() const { return spec.players(); }
  int kappa(int i) const { return value_bases[static_cast<std::size_t>(i)].size(); }
  int mu() const { return leader_basis.size(); }
};

/// Runs validate_spec/validate_model and checks basis shapes. Fills
/// model.bounds from probe_bounds over `region` when they are still zero.
void validate_game(Game& game);

}  // namespace hadp
