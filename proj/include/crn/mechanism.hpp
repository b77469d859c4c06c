#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crn/types.hpp"

namespace crn {

struct Species {
  std::string name;
  int index = 0;  // position in the declaration order
};

struct Reaction {
  int id = 0;
  std::map<int, int> reactant_stoich;  // species index -> positive coefficient
  std::map<int, int> product_stoich;
  double rate_constant = 0.0;
  // A source reaction has no reactants (constant inflow). In the text format
  // an empty side is written as the placeholder `0`.
  bool source = false;
};

/// Static reaction network. Immutable after construction; safe to share
/// read-only across threads. M holds net stoichiometry (products - reactants),
/// one column per reaction in id order.
struct Mechanism {
  std::vector<Species> species;
  std::vector<Reaction> reactions;
  Mati M;  // num_species x num_reactions

  int num_species() const { return static_cast<int>(species.size()); }
  int num_reactions() const { return static_cast<int>(reactions.size()); }
};

Mati build_stoichiometric_matrix(const std::vector<Species>& species,
                                 const std::vector<Reaction>& reactions);

// Validates invariants (unique names, positive coefficients/rates, index
// consistency) and fills M.
Mechanism make_mechanism(std::vector<Species> species, std::vector<Reaction> reactions);

/// Parses the line-oriented mechanism format:
///
///   # comment
///   species: A B C
///   A -> B ; k=2.0
///   2 A + B -> C ; k=0.5
///   0 -> A ; k=1.0        (source; `0` marks an empty side)
///
/// Coefficients default to 1. Errors carry the offending line number.
Mechanism parse_mechanism(const std::string& text);

std::string serialize_mechanism(const Mechanism& mech);

int species_index(const Mechanism& mech, std::string_view name);  // -1 if absent

struct Restriction {
  Mechanism mechanism;
  std::map<int, int> old_to_new;  // original reaction id -> id in the restricted mechanism
};

// Keeps only the selected reactions (species set unchanged, reaction order
// preserved). Ids out of [0, Nr) throw.
Restriction restrict(const Mechanism& mech, const std::set<int>& support);

}  // namespace crn
