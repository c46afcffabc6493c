#ifndef GRAPHSI_INTERACTION_VALUES_HPP
#define GRAPHSI_INTERACTION_VALUES_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphsi/coalition.hpp"
#include "graphsi/errors.hpp"

namespace graphsi {

enum class IndexKind { MI, SV, SII, kSII, STII };

inline std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::MI: return "mi";
    case IndexKind::SV: return "sv";
    case IndexKind::SII: return "sii";
    case IndexKind::kSII: return "ksii";
    case IndexKind::STII: return "stii";
  }
  return "?";
}

inline IndexKind parse_index_kind(std::string_view name) {
  if (name == "mi") return IndexKind::MI;
  if (name == "sv") return IndexKind::SV;
  if (name == "sii") return IndexKind::SII;
  if (name == "ksii") return IndexKind::kSII;
  if (name == "stii") return IndexKind::STII;
  throw InputError("unknown index kind '" + std::string(name) + "'");
}

using CoalitionMap = std::unordered_map<Coalition, double, CoalitionHash>;

/// Interaction scores per coalition, tagged with the index kind and order.
///
/// MI maps are keyed by every coalition of the support (including the empty
/// set, whose MI is v(empty)); the other kinds only carry sets of size
/// 1..order. Absent keys are zero.
struct InteractionValues {
  IndexKind kind = IndexKind::MI;
  std::size_t order = 0;
  std::size_t n_players = 0;
  CoalitionMap values;

  // provenance
  std::size_t ell = 0;
  std::optional<std::size_t> lambda;
  std::size_t call_count = 0;

  double at(Coalition s) const {
    auto it = values.find(s);
    return it == values.end() ? 0.0 : it->second;
  }

  /// Entries in canonical order (size, then mask).
  std::vector<std::pair<Coalition, double>> sorted() const {
    std::vector<std::pair<Coalition, double>> out(values.begin(), values.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return CanonicalLess{}(a.first, b.first); });
    return out;
  }

  /// Sum over all non-empty keys.
  double sum_nonempty() const {
    double total = 0.0;
    for (const auto& [s, v] : sorted()) {
      if (!s.empty()) total += v;
    }
    return total;
  }
};

}  // namespace graphsi

#endif  // GRAPHSI_INTERACTION_VALUES_HPP
