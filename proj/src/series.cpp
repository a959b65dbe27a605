#include "jetstress/series.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace jetstress {

SeriesLayout::SeriesLayout(int variables, int order)
    : variables_(variables), order_(order), basis_(enumerate_up_to(variables, order)) {
  degrees_.reserve(basis_.size());
  for (const auto& index : basis_) degrees_.push_back(degree(index));

  const int size = static_cast<int>(basis_.size());
  for (int a = 0; a < size; ++a) {
    for (int b = 0; b < size; ++b) {
      if (degrees_[static_cast<std::size_t>(a)] + degrees_[static_cast<std::size_t>(b)] > order) {
        // Basis is graded, so every later b has at least this degree.
        break;
      }
      std::vector<int> sum = basis_[static_cast<std::size_t>(a)].counts();
      const auto& other = basis_[static_cast<std::size_t>(b)].counts();
      for (std::size_t r = 0; r < sum.size(); ++r) sum[r] += other[r];
      products_.push_back({a, b, graded_rank(MultiIndex(std::move(sum)))});
    }
  }

  shifts_.resize(static_cast<std::size_t>(variables));
  const int lower = graded_dimension(variables, order - 1);
  for (int j = 0; j < variables; ++j) {
    auto& shift = shifts_[static_cast<std::size_t>(j)];
    shift.reserve(static_cast<std::size_t>(lower));
    for (int i = 0; i < lower; ++i) {
      const auto& index = basis_[static_cast<std::size_t>(i)];
      shift.push_back({graded_rank(append(index, j)), static_cast<double>(index[j] + 1)});
    }
  }
}

std::shared_ptr<const SeriesLayout> SeriesLayout::get(int variables, int order) {
  if (variables < 1) throw std::invalid_argument("SeriesLayout: need at least one variable");
  if (order < 0) throw std::invalid_argument("SeriesLayout: negative order");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SeriesLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{variables, order}];
  if (!slot) slot = std::shared_ptr<const SeriesLayout>(new SeriesLayout(variables, order));
  return slot;
}

}  // namespace jetstress
