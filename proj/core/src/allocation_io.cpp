#include "json.hpp"

#include "qsched/scheduler.hpp"

namespace qsched {

std::string allocation_to_json(const SlotInstance& in, const Allocation& alloc) {
  using nlohmann::ordered_json;
  const std::size_t n = in.satellite_count();
  const std::size_t m = in.pair_count();
  ordered_json doc;
  doc["t"] = alloc.time;
  doc["policy"] = to_string(alloc.policy);

  ordered_json x = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < m; ++j) row.push_back(alloc.x(i, j));
    x.push_back(std::move(row));
  }
  doc["x"] = std::move(x);

  std::vector<int> dense(n * n * m, 0);
  for (const auto& c : alloc.y) dense[(c.source * n + c.relay) * m + c.pair] = c.count;
  ordered_json y = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    ordered_json plane = ordered_json::array();
    for (std::size_t k = 0; k < n; ++k) {
      ordered_json row = ordered_json::array();
      for (std::size_t j = 0; j < m; ++j) row.push_back(dense[(i * n + k) * m + j]);
      plane.push_back(std::move(row));
    }
    y.push_back(std::move(plane));
  }
  doc["y"] = std::move(y);
  doc["objective"] = alloc.objective;

  ordered_json edr = ordered_json::object();
  const auto rates = per_pair_edr(in, alloc);
  for (std::size_t j = 0; j < m; ++j) edr[in.pair_ids[j]] = rates[j];
  doc["per_pair_edr"] = std::move(edr);
  return doc.dump();
}

}  // namespace qsched
