#include "wgc/hexmap.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>

namespace wgc {

namespace detail {
extern const std::string_view kSmallMapText;
extern const std::string_view kMediumMapText;
extern const std::string_view kLargeMapText;
}  // namespace detail

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
  }
  return "?";
}

GameMap::GameMap(std::string name, int width, int height)
    : name_(std::move(name)), width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("map dimensions must be positive");
  }
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Cell::open);
}

GameMap GameMap::hexagon(std::string name, int radius) {
  if (radius < 0) throw std::invalid_argument("negative hexagon radius");
  const int side = 2 * radius + 1;
  GameMap map(std::move(name), side, side);
  const HexCoord centre = from_offset({radius, radius});
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const OffsetCoord o{col, row};
      if (hex_distance(from_offset(o), centre) > radius) {
        map.cells_[map.index(o)] = Cell::none;
      }
    }
  }
  return map;
}

SizeClass GameMap::size_class() const {
  const int n = cell_count();
  if (n <= 100) return SizeClass::small;
  if (n <= 196) return SizeClass::medium;
  return SizeClass::large;
}

bool GameMap::contains(HexCoord h) const {
  const OffsetCoord o = to_offset(h);
  return in_grid(o) && cells_[index(o)] != Cell::none;
}

Terrain GameMap::terrain(HexCoord h) const {
  if (!contains(h)) {
    throw std::out_of_range("hex (" + std::to_string(h.q) + "," + std::to_string(h.r) +
                            ") is outside map " + name_);
  }
  return cells_[index(to_offset(h))] == Cell::hidden ? Terrain::hidden : Terrain::open;
}

void GameMap::set_terrain(HexCoord h, Terrain t) {
  const OffsetCoord o = to_offset(h);
  if (!in_grid(o)) throw std::out_of_range("hex outside map storage grid");
  cells_[index(o)] = t == Terrain::hidden ? Cell::hidden : Cell::open;
}

void GameMap::remove_cell(HexCoord h) {
  const OffsetCoord o = to_offset(h);
  if (!in_grid(o)) throw std::out_of_range("hex outside map storage grid");
  cells_[index(o)] = Cell::none;
}

std::vector<HexCoord> GameMap::neighbors(HexCoord a) const {
  std::vector<HexCoord> out;
  out.reserve(kDirectionCount);
  for (int d = 0; d < kDirectionCount; ++d) {
    const HexCoord n = neighbor(a, d);
    if (contains(n)) out.push_back(n);
  }
  return out;
}

std::vector<HexCoord> GameMap::cells() const {
  std::vector<HexCoord> out;
  out.reserve(cells_.size());
  for (int row = 0; row < height_; ++row) {
    for (int col = 0; col < width_; ++col) {
      if (cells_[index({col, row})] != Cell::none) out.push_back(from_offset({col, row}));
    }
  }
  return out;
}

int GameMap::cell_count() const {
  int n = 0;
  for (Cell c : cells_) n += c != Cell::none;
  return n;
}

int GameMap::hidden_count() const {
  int n = 0;
  for (Cell c : cells_) n += c == Cell::hidden;
  return n;
}

double GameMap::center_distance(HexCoord h) const {
  const HexCoord a = from_offset({0, 0});
  const HexCoord b = from_offset({width_ - 1, height_ - 1});
  const double cq = (a.q + b.q) / 2.0;
  const double cr = (a.r + b.r) / 2.0;
  const double dq = h.q - cq;
  const double dr = h.r - cr;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2.0;
}

HexCoord GameMap::reflect(HexCoord h) const {
  const OffsetCoord o = to_offset(h);
  return from_offset({width_ - 1 - o.col, height_ - 1 - o.row});
}

MapParseError::MapParseError(Kind kind, int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool parse_positive(std::string_view token, int& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end && out > 0;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

GameMap load_map(std::string_view text) {
  using Kind = MapParseError::Kind;
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t nl = text.find('\n', start);
      if (nl == std::string_view::npos) {
        if (start < text.size()) lines.push_back(trim_cr(text.substr(start)));
        break;
      }
      lines.push_back(trim_cr(text.substr(start, nl - start)));
      start = nl + 1;
    }
  }

  std::string name = "custom";
  std::size_t i = 0;
  auto skip_comments = [&] {
    while (i < lines.size() && (lines[i].empty() || lines[i].front() == '#')) {
      std::string_view c = lines[i];
      if (c.rfind("# name:", 0) == 0) {
        auto parts = split_ws(c.substr(7));
        if (!parts.empty()) name = std::string(parts.front());
      }
      ++i;
    }
  };

  skip_comments();
  if (i >= lines.size()) {
    throw MapParseError(Kind::empty_input, 1, 1, "empty map document");
  }
  const int header_line = static_cast<int>(i) + 1;
  const auto header = split_ws(lines[i]);
  int width = 0;
  int height = 0;
  if (header.size() != 4 || header[0] != "wgcmap") {
    throw MapParseError(Kind::malformed_header, header_line, 1,
                        "expected header 'wgcmap v1 <width> <height>'");
  }
  if (header[1] != "v1") {
    throw MapParseError(Kind::malformed_header, header_line, 8,
                        "unsupported map format version '" + std::string(header[1]) + "'");
  }
  if (!parse_positive(header[2], width) || !parse_positive(header[3], height)) {
    throw MapParseError(Kind::malformed_header, header_line, 11,
                        "width and height must be positive integers");
  }
  ++i;

  GameMap map(name, width, height);
  int row = 0;
  for (; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty() || line.front() == '#') {
      if (line.rfind("# name:", 0) == 0) {
        auto parts = split_ws(line.substr(7));
        if (!parts.empty()) map.name_ = std::string(parts.front());
      }
      continue;
    }
    const int line_no = static_cast<int>(i) + 1;
    if (row >= height) {
      throw MapParseError(Kind::out_of_bounds, line_no, 1,
                          "row " + std::to_string(row) + " exceeds declared height " +
                              std::to_string(height));
    }
    if (static_cast<int>(line.size()) > width) {
      throw MapParseError(Kind::out_of_bounds, line_no, width + 1,
                          "row longer than declared width " + std::to_string(width));
    }
    if (static_cast<int>(line.size()) < width) {
      throw MapParseError(Kind::out_of_bounds, line_no, static_cast<int>(line.size()) + 1,
                          "row shorter than declared width " + std::to_string(width));
    }
    for (int col = 0; col < width; ++col) {
      GameMap::Cell cell;
      switch (line[static_cast<std::size_t>(col)]) {
        case '.': cell = GameMap::Cell::open; break;
        case 'H': cell = GameMap::Cell::hidden; break;
        case '-': cell = GameMap::Cell::none; break;
        default:
          throw MapParseError(Kind::unknown_terrain, line_no, col + 1,
                              std::string("unknown terrain code '") +
                                  line[static_cast<std::size_t>(col)] + "'");
      }
      map.cells_[map.index({col, row})] = cell;
    }
    ++row;
  }
  if (row < height) {
    throw MapParseError(Kind::out_of_bounds, static_cast<int>(lines.size()) + 1, 1,
                        "expected " + std::to_string(height) + " rows, found " +
                            std::to_string(row));
  }
  return map;
}

std::string save_map(const GameMap& map) {
  std::ostringstream out;
  out << "wgcmap v1 " << map.width_ << ' ' << map.height_ << '\n';
  out << "# name: " << map.name_ << '\n';
  for (int row = 0; row < map.height_; ++row) {
    for (int col = 0; col < map.width_; ++col) {
      switch (map.cells_[map.index({col, row})]) {
        case GameMap::Cell::open: out << '.'; break;
        case GameMap::Cell::hidden: out << 'H'; break;
        case GameMap::Cell::none: out << '-'; break;
      }
    }
    out << '\n';
  }
  return out.str();
}

std::shared_ptr<const GameMap> builtin_map(SizeClass size) {
  static std::once_flag once;
  static std::array<std::shared_ptr<const GameMap>, 3> maps;
  std::call_once(once, [] {
    maps[0] = std::make_shared<const GameMap>(load_map(detail::kSmallMapText));
    maps[1] = std::make_shared<const GameMap>(load_map(detail::kMediumMapText));
    maps[2] = std::make_shared<const GameMap>(load_map(detail::kLargeMapText));
  });
  return maps[static_cast<std::size_t>(size)];
}

std::shared_ptr<const GameMap> builtin_map(std::string_view name) {
  if (name == "small") return builtin_map(SizeClass::small);
  if (name == "medium") return builtin_map(SizeClass::medium);
  if (name == "large") return builtin_map(SizeClass::large);
  return nullptr;
}

}  // namespace wgc
