#include "ordcollab/labels.hpp"

#include <stdexcept>

#include "ordcollab/error.hpp"

namespace ordcollab {

OrdinalLabelScheme::OrdinalLabelScheme()
    : names_{"Effective", "Satisfactory", "Progressing", "Needs Improvement",
             "Working Independently"},
      adjacency_{{{1, 2}, {0, 2}, {1, 3}, {2, 4}, {2, 3}}} {}

const std::string& OrdinalLabelScheme::name(std::size_t index) const {
  if (index >= names_.size()) throw std::out_of_range("label index out of range");
  return names_[index];
}

std::optional<std::size_t> OrdinalLabelScheme::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t OrdinalLabelScheme::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ParseError("unknown Level A code '" + std::string(name) + "'");
}

std::span<const std::size_t> OrdinalLabelScheme::adjacent(std::size_t primary) const {
  if (primary >= kNumClasses) throw std::out_of_range("label index out of range");
  return adjacency_[primary];
}

const OrdinalLabelScheme& OrdinalLabelScheme::standard() {
  static const OrdinalLabelScheme scheme;
  return scheme;
}

std::string_view to_string(Level level) { return level == Level::B2 ? "B2" : "C"; }

Level parse_level(std::string_view text) {
  if (text == "B2") return Level::B2;
  if (text == "C") return Level::C;
  throw ParseError("unknown level '" + std::string(text) + "' (expected B2 or C)");
}

CodeScheme::CodeScheme(Level level) : level_(level) {
  if (level == Level::B2) {
    names_ = {"Group guide/Coordinator",
              "Contributor (Active)",
              "Follower",
              "Conflict Resolver",
              "Conflict Instigator/Disagreeable",
              "Off-task/Disinterested",
              "Lone Solver"};
    tokens_ = {"GG", "C", "F", "CR", "CI", "OT", "LS"};
  } else {
    // Rubric table read column by column.
    names_ = {"Talking",
              "Reading",
              "Writing",
              "Using/Working with materials",
              "Setting up the physical space",
              "Actively listening/Paying attention",
              "Explaining/Sharing ideas",
              "Problem solving/Negotiation",
              "Recognizing/Inviting others contributions",
              "Setting group roles and responsibilities",
              "Comforting, encouraging others/Coralling",
              "Agreeing",
              "Off-task/Disinterested",
              "Disagreeing",
              "Arguing",
              "Seeking recognition/Boasting",
              "Joking/Laughing",
              "Playing/Horsing around/Rough housing",
              "Excessive difference to authority/leader",
              "Blocking information from being shared",
              "Doing nothing/Withdrawing",
              "Engaging with outside environment",
              "Waiting"};
    tokens_ = names_;
  }
}

std::optional<std::size_t> CodeScheme::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name || tokens_[i] == name) return i;
  return std::nullopt;
}

const CodeScheme& CodeScheme::b2() {
  static const CodeScheme scheme(Level::B2);
  return scheme;
}

const CodeScheme& CodeScheme::c() {
  static const CodeScheme scheme(Level::C);
  return scheme;
}

const CodeScheme& CodeScheme::for_level(Level level) {
  return level == Level::B2 ? b2() : c();
}

namespace {
template <typename T>
std::size_t argmax_impl(std::span<const T> values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}
}  // namespace

std::size_t argmax(std::span<const double> values) { return argmax_impl(values); }
std::size_t argmax(std::span<const float> values) { return argmax_impl(values); }

}  // namespace ordcollab
