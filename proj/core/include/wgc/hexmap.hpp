#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wgc {

// Axial hex coordinate, pointy-top layout.
struct HexCoord {
  int q = 0;
  int r = 0;

  friend auto operator<=>(const HexCoord&, const HexCoord&) = default;
  friend constexpr HexCoord operator+(HexCoord a, HexCoord b) { return {a.q + b.q, a.r + b.r}; }
  friend constexpr HexCoord operator-(HexCoord a, HexCoord b) { return {a.q - b.q, a.r - b.r}; }
};

// Row-major position on the rectangular storage grid ("odd-r" offset layout:
// odd rows are shifted half a hex to the east).
struct OffsetCoord {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const OffsetCoord&, const OffsetCoord&) = default;
};

inline constexpr int kDirectionCount = 6;

// Direction index order is part of the action encoding: E, NE, NW, W, SW, SE.
inline constexpr std::array<HexCoord, kDirectionCount> kDirectionOffsets{{
    {+1, 0}, {+1, -1}, {0, -1}, {-1, 0}, {-1, +1}, {0, +1}}};

inline constexpr std::array<std::string_view, kDirectionCount> kDirectionNames{
    "E", "NE", "NW", "W", "SW", "SE"};

constexpr HexCoord neighbor(HexCoord a, int direction) {
  return a + kDirectionOffsets[static_cast<std::size_t>(direction)];
}

constexpr int hex_distance(HexCoord a, HexCoord b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  const int ds = dq + dr;
  return ((dq < 0 ? -dq : dq) + (dr < 0 ? -dr : dr) + (ds < 0 ? -ds : ds)) / 2;
}

constexpr HexCoord from_offset(OffsetCoord o) {
  return {o.col - (o.row - (o.row & 1)) / 2, o.row};
}

constexpr OffsetCoord to_offset(HexCoord h) {
  return {h.q + (h.r - (h.r & 1)) / 2, h.r};
}

enum class Terrain : std::uint8_t { open, hidden };

enum class SizeClass : std::uint8_t { small, medium, large };

std::string_view to_string(SizeClass s);

// Hidden terrain halves (floor) the observed distance of the operator standing on it.
constexpr int effective_observed_distance(int observed_distance, Terrain terrain) {
  return terrain == Terrain::hidden ? observed_distance / 2 : observed_distance;
}

class GameMap {
 public:
  // A width x height rectangle of open cells.
  GameMap(std::string name, int width, int height);

  // A hexagon of the given radius, centred in a (2r+1) x (2r+1) storage grid.
  static GameMap hexagon(std::string name, int radius);

  const std::string& name() const { return name_; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Derived from the number of in-bounds cells: <=100 small, <=196 medium.
  SizeClass size_class() const;

  bool contains(HexCoord h) const;
  Terrain terrain(HexCoord h) const;  // throws std::out_of_range
  void set_terrain(HexCoord h, Terrain t);
  void remove_cell(HexCoord h);

  // In-bounds neighbors in direction order.
  std::vector<HexCoord> neighbors(HexCoord a) const;

  // Cells in row-major storage order.
  std::vector<HexCoord> cells() const;
  int cell_count() const;
  int hidden_count() const;

  // Distance from a cell to the geometric centre of the storage rectangle,
  // measured in (fractional) hex steps. Invariant under the map's point
  // reflection when the height is even.
  double center_distance(HexCoord h) const;

  // Point reflection through the rectangle centre (exact hex isometry for even heights).
  HexCoord reflect(HexCoord h) const;

  friend bool operator==(const GameMap&, const GameMap&) = default;

 private:
  enum class Cell : std::uint8_t { none, open, hidden };

  std::size_t index(OffsetCoord o) const {
    return static_cast<std::size_t>(o.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(o.col);
  }
  bool in_grid(OffsetCoord o) const {
    return o.col >= 0 && o.row >= 0 && o.col < width_ && o.row < height_;
  }

  std::string name_;
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;

  friend std::string save_map(const GameMap& map);
  friend GameMap load_map(std::string_view text);
};

class MapParseError : public std::runtime_error {
 public:
  enum class Kind { empty_input, malformed_header, out_of_bounds, unknown_terrain };

  MapParseError(Kind kind, int line, int column, const std::string& what);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

// Text map format:
//   wgcmap v1 <width> <height>
//   # comment lines anywhere; "# name: <id>" sets the map name
//   one row per line: '.' open, 'H' hidden, '-' no cell
GameMap load_map(std::string_view text);
std::string save_map(const GameMap& map);

// The three bundled maps, parsed once.
std::shared_ptr<const GameMap> builtin_map(SizeClass size);
std::shared_ptr<const GameMap> builtin_map(std::string_view name);

}  // namespace wgc
