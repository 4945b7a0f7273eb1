#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slrd/ast.hpp"

namespace slrd {

/// Dense location handle into State::names; 0 is always null.
using Location = std::uint32_t;
inline constexpr Location kNull = 0;

/// A store (program variables to locations, nil implicitly null) and a heap
/// (allocated location to selector-indexed successors).
struct State {
    std::vector<std::string> names{"null"};
    std::map<std::string, Location> store;
    std::map<Location, std::map<int, Location>> heap;

    Location addLocation(const std::string& name);
    std::optional<Location> locationNamed(const std::string& name) const;
    const std::string& nameOf(Location l) const { return names.at(l); }

    /// store(u), with store(nil) = null; nullopt for undeclared variables.
    std::optional<Location> lookup(const std::string& programVar) const;

    std::set<Location> domain() const;
    std::set<Location> image() const;
    /// loc(S) = img(s) u dom(h) u Img(h).
    std::set<Location> locations() const;
    std::set<Location> dangling() const;

    /// Throws Error if null is allocated or an allocated cell has no selector.
    void validate() const;

    /// Structural equality up to location renaming.
    bool isomorphic(const State& other) const;
};

/// `.state.json` interchange format.
State parseState(std::string_view text);
State parseStateFile(const std::string& path);
std::string printState(const State& state);

/// Graphviz rendering: selector numbers label edges, program variables annotate nodes.
std::string printDot(const State& state);

}  // namespace slrd
