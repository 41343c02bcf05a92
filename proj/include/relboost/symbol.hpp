#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>

namespace relboost {

/// Interned string. Constants, variable names and predicate names are all
/// symbols; equality is an integer compare. Ordering follows interning order,
/// not lexicographic order.
class Symbol {
 public:
  Symbol() = default;

  static Symbol intern(std::string_view text);

  const std::string& str() const;
  std::uint32_t id() const { return id_; }
  bool valid() const { return id_ != kInvalid; }

  friend bool operator==(Symbol, Symbol) = default;
  friend auto operator<=>(Symbol, Symbol) = default;

 private:
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
  explicit Symbol(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = kInvalid;
};

}  // namespace relboost

template <>
struct std::hash<relboost::Symbol> {
  std::size_t operator()(relboost::Symbol s) const noexcept { return std::hash<std::uint32_t>{}(s.id()); }
};
