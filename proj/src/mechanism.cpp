#include "crn/mechanism.hpp"

#include <sstream>
#include <unordered_map>

#include "crn/error.hpp"
#include "crn/util.hpp"

namespace crn {

Mati build_stoichiometric_matrix(const std::vector<Species>& species,
                                 const std::vector<Reaction>& reactions) {
  const int ns = static_cast<int>(species.size());
  const int nr = static_cast<int>(reactions.size());
  Mati m = Mati::Zero(ns, nr);
  for (int i = 0; i < nr; ++i) {
    for (const auto& [s, coef] : reactions[i].product_stoich) m(s, i) += coef;
    for (const auto& [s, coef] : reactions[i].reactant_stoich) m(s, i) -= coef;
  }
  return m;
}

Mechanism make_mechanism(std::vector<Species> species, std::vector<Reaction> reactions) {
  std::unordered_map<std::string, int> seen;
  for (size_t i = 0; i < species.size(); ++i) {
    if (!is_identifier(species[i].name))
      throw Error("invalid species name '" + species[i].name + "'");
    if (!seen.emplace(species[i].name, i).second)
      throw Error("duplicate species name '" + species[i].name + "'");
    species[i].index = static_cast<int>(i);
  }
  const int ns = static_cast<int>(species.size());
  for (size_t i = 0; i < reactions.size(); ++i) {
    Reaction& r = reactions[i];
    r.id = static_cast<int>(i);
    if (r.reactant_stoich.empty() && !r.source)
      throw Error("reaction " + std::to_string(i) + " has no reactants and is not a source");
    if (!(r.rate_constant > 0.0))
      throw Error("reaction " + std::to_string(i) + " has non-positive rate constant");
    for (const auto* side : {&r.reactant_stoich, &r.product_stoich})
      for (const auto& [s, coef] : *side) {
        if (s < 0 || s >= ns)
          throw Error("reaction " + std::to_string(i) + " references unknown species index " +
                      std::to_string(s));
        if (coef <= 0)
          throw Error("reaction " + std::to_string(i) + " has non-positive coefficient");
      }
  }
  Mechanism mech{std::move(species), std::move(reactions), {}};
  mech.M = build_stoichiometric_matrix(mech.species, mech.reactions);
  return mech;
}

namespace {

// One side of a reaction: `coef name [+ coef name]*`, or `0` for an empty side.
std::map<int, int> parse_side(const std::string& side, bool& empty_side,
                              const std::unordered_map<std::string, int>& index, int line_no) {
  empty_side = false;
  std::map<int, int> stoich;
  std::string trimmed = trim(side);
  if (trimmed == "0") {
    empty_side = true;
    return stoich;
  }
  for (const std::string& term : split(trimmed, '+')) {
    std::vector<std::string> tokens = tokenize(term);
    int coef = 1;
    std::string name;
    if (tokens.size() == 1) {
      name = tokens[0];
    } else if (tokens.size() == 2) {
      auto c = parse_int(tokens[0]);
      if (!c || *c <= 0)
        throw ParseError("expected positive integer coefficient, got '" + tokens[0] + "'", line_no);
      coef = static_cast<int>(*c);
      name = tokens[1];
    } else {
      throw ParseError("malformed term '" + trim(term) + "'", line_no);
    }
    if (!is_identifier(name)) throw ParseError("invalid species name '" + name + "'", line_no);
    auto it = index.find(name);
    if (it == index.end()) throw ParseError("unknown species '" + name + "'", line_no);
    stoich[it->second] += coef;
  }
  return stoich;
}

}  // namespace

Mechanism parse_mechanism(const std::string& text) {
  std::vector<Species> species;
  std::vector<Reaction> reactions;
  std::unordered_map<std::string, int> index;
  bool have_species = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (size_t pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("species:", 0) == 0) {
      if (have_species) throw ParseError("duplicate species declaration", line_no);
      for (const std::string& name : tokenize(line.substr(8))) {
        if (!is_identifier(name)) throw ParseError("invalid species name '" + name + "'", line_no);
        if (index.count(name)) throw ParseError("duplicate species name '" + name + "'", line_no);
        int idx = static_cast<int>(species.size());
        index.emplace(name, idx);
        species.push_back({name, idx});
      }
      if (species.empty()) throw ParseError("species declaration is empty", line_no);
      have_species = true;
      continue;
    }

    if (!have_species)
      throw ParseError("expected 'species:' declaration before reactions", line_no);

    size_t arrow = line.find("->");
    if (arrow == std::string::npos) throw ParseError("missing '->'", line_no);
    size_t semi = line.find(';', arrow);
    if (semi == std::string::npos) throw ParseError("missing '; k=<rate>'", line_no);

    std::string rate_part = trim(line.substr(semi + 1));
    if (rate_part.rfind("k=", 0) != 0 && rate_part.rfind("k =", 0) != 0)
      throw ParseError("expected 'k=<rate>' after ';'", line_no);
    auto k = parse_double(rate_part.substr(rate_part.find('=') + 1));
    if (!k) throw ParseError("malformed rate constant", line_no);
    if (!(*k > 0.0)) throw ParseError("rate constant must be positive", line_no);

    Reaction r;
    r.id = static_cast<int>(reactions.size());
    r.rate_constant = *k;
    bool empty_reactants = false, empty_products = false;
    r.reactant_stoich = parse_side(line.substr(0, arrow), empty_reactants, index, line_no);
    r.product_stoich =
        parse_side(line.substr(arrow + 2, semi - arrow - 2), empty_products, index, line_no);
    r.source = empty_reactants;
    if (r.reactant_stoich.empty() && !r.source)
      throw ParseError("reaction has no reactants", line_no);
    if (r.product_stoich.empty() && !empty_products)
      throw ParseError("reaction has no products", line_no);
    reactions.push_back(std::move(r));
  }
  if (!have_species) throw ParseError("missing 'species:' declaration", 1);
  return make_mechanism(std::move(species), std::move(reactions));
}

namespace {

void append_side(std::string& out, const std::map<int, int>& stoich,
                 const std::vector<Species>& species) {
  if (stoich.empty()) {
    out += "0";
    return;
  }
  bool first = true;
  for (const auto& [s, coef] : stoich) {
    if (!first) out += " + ";
    first = false;
    if (coef != 1) {
      out += std::to_string(coef);
      out += ' ';
    }
    out += species[s].name;
  }
}

}  // namespace

std::string serialize_mechanism(const Mechanism& mech) {
  std::string out = "species:";
  for (const Species& s : mech.species) {
    out += ' ';
    out += s.name;
  }
  out += '\n';
  for (const Reaction& r : mech.reactions) {
    std::string line;
    append_side(line, r.reactant_stoich, mech.species);
    line += " -> ";
    append_side(line, r.product_stoich, mech.species);
    line += " ; k=";
    line += format_double(r.rate_constant);
    out += line;
    out += '\n';
  }
  return out;
}

int species_index(const Mechanism& mech, std::string_view name) {
  for (const Species& s : mech.species)
    if (s.name == name) return s.index;
  return -1;
}

Restriction restrict(const Mechanism& mech, const std::set<int>& support) {
  std::vector<Reaction> kept;
  std::map<int, int> old_to_new;
  for (int id : support) {
    if (id < 0 || id >= mech.num_reactions())
      throw Error("restrict: reaction id " + std::to_string(id) + " out of range");
    Reaction r = mech.reactions[id];
    old_to_new[id] = static_cast<int>(kept.size());
    r.id = static_cast<int>(kept.size());
    kept.push_back(std::move(r));
  }
  return {make_mechanism(mech.species, std::move(kept)), std::move(old_to_new)};
}

}  // namespace crn
