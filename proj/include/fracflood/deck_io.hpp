#pragma once

#include "fracflood/reservoir_model.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace fracflood {

/// Parses the sectioned deck format documented in docs/deck_format.md.
/// Throws DeckError carrying the 1-based line of the problem.
Deck parse_deck(std::string_view text);

/// Canonical text form. parse_deck(write_deck(d)) == d for every valid deck,
/// and write_deck is a fixed point of that round trip.
std::string write_deck(const Deck& deck);

/// Reads and parses a deck file; a missing file raises DeckError naming the path.
Deck load_deck(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

} // namespace fracflood
