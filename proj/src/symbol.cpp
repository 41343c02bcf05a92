#include "relboost/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "relboost/error.hpp"

namespace relboost {
namespace {

class Interner {
 public:
  std::uint32_t intern(std::string_view text) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = ids_.find(text); it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = ids_.find(text); it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(strings_.size());
    const std::string& stored = strings_.emplace_back(text);
    ids_.emplace(std::string_view(stored), id);
    return id;
  }

  const std::string& str(std::uint32_t id) {
    std::shared_lock lock(mutex_);
    return strings_.at(id);
  }

 private:
  std::shared_mutex mutex_;
  std::deque<std::string> strings_;  // stable addresses
  std::unordered_map<std::string_view, std::uint32_t> ids_;
};

Interner& interner() {
  static Interner instance;
  return instance;
}

}  // namespace

Symbol Symbol::intern(std::string_view text) { return Symbol(interner().intern(text)); }

const std::string& Symbol::str() const {
  static const std::string kEmpty;
  return valid() ? interner().str(id_) : kEmpty;
}

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Schema: return "schema";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Data: return "data";
    case ErrorCategory::Training: return "training";
    case ErrorCategory::Metric: return "metric";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCategory::Parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace relboost
