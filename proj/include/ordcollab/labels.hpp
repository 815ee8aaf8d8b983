#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ordcollab {

inline constexpr std::size_t kNumClasses = 5;

/// Ordered Level A label space. Index 0 is the best collaboration quality,
/// index 4 the worst; adjacent indices are ordinal neighbours.
class OrdinalLabelScheme {
 public:
  OrdinalLabelScheme();

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const;
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws ParseError

  /// Classes mixed against `primary` by controlled Mixup.
  std::span<const std::size_t> adjacent(std::size_t primary) const;

  static const OrdinalLabelScheme& standard();

 private:
  std::vector<std::string> names_;
  std::array<std::array<std::size_t, 2>, kNumClasses> adjacency_;
};

enum class Level { B2, C };

std::string_view to_string(Level level);
Level parse_level(std::string_view text);

/// Closed code set for one annotation level. Codes are matched by their full
/// rubric name or, where one exists, the bracketed abbreviation (B2 only).
class CodeScheme {
 public:
  explicit CodeScheme(Level level);

  Level level() const { return level_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  /// Short form written to CSV files (abbreviation for B2, full name for C).
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::optional<std::size_t> find(std::string_view name) const;

  static const CodeScheme& b2();
  static const CodeScheme& c();
  static const CodeScheme& for_level(Level level);

 private:
  Level level_;
  std::vector<std::string> names_;
  std::vector<std::string> tokens_;
};

inline constexpr std::size_t kB2Codes = 7;
inline constexpr std::size_t kCCodes = 23;

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);
std::size_t argmax(std::span<const float> values);

}  // namespace ordcollab
