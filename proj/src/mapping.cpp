#include "diar/mapping.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "diar/timeline.hpp"

namespace diar {

namespace {

// Kuhn-Munkres with potentials on a square cost matrix, minimizing.
// Returns row_to_col. O(n^3), deterministic.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0);    // p[j]: row matched to column j (1-based)
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) {
      row_to_col[p[j] - 1] = j - 1;
    }
  }
  return row_to_col;
}

// Turns a raw ref->hyp index assignment into a SpeakerMapping, demoting
// zero-overlap pairs.
SpeakerMapping finalize(const OverlapMatrix& m, const std::vector<int>& ref_to_hyp) {
  SpeakerMapping mapping;
  std::vector<char> hyp_taken(m.num_hyp(), 0);
  for (std::size_t i = 0; i < m.num_ref(); ++i) {
    const int j = ref_to_hyp[i];
    if (j >= 0 && m.at(i, j) > 0.0) {
      mapping.matched.emplace_back(m.ref_speakers[i], m.hyp_speakers[j]);
      mapping.total_overlap += m.at(i, j);
      hyp_taken[j] = 1;
    } else {
      mapping.ref_unmatched.push_back(m.ref_speakers[i]);
    }
  }
  for (std::size_t j = 0; j < m.num_hyp(); ++j) {
    if (!hyp_taken[j]) {
      mapping.hyp_false_alarm.push_back(m.hyp_speakers[j]);
    }
  }
  return mapping;
}

}  // namespace

const std::string* SpeakerMapping::hyp_for(const std::string& ref_speaker) const {
  for (const auto& [ref, hyp] : matched) {
    if (ref == ref_speaker) {
      return &hyp;
    }
  }
  return nullptr;
}

OverlapMatrix build_overlap_matrix(const Annotation& ref, const Annotation& hyp) {
  OverlapMatrix m;
  m.ref_speakers = ref.speakers();
  m.hyp_speakers = hyp.speakers();
  m.cells.assign(m.num_ref() * m.num_hyp(), 0.0);

  std::vector<Timeline> hyp_timelines;
  hyp_timelines.reserve(m.num_hyp());
  for (const auto& speaker : m.hyp_speakers) {
    hyp_timelines.push_back(speaker_timeline(hyp, speaker));
  }
  for (std::size_t i = 0; i < m.num_ref(); ++i) {
    const Timeline ref_tl = speaker_timeline(ref, m.ref_speakers[i]);
    for (std::size_t j = 0; j < m.num_hyp(); ++j) {
      m.cells[i * m.num_hyp() + j] = overlap_duration(ref_tl, hyp_timelines[j]);
    }
  }
  return m;
}

SpeakerMapping assign(const OverlapMatrix& matrix) {
  const std::size_t n = std::max(matrix.num_ref(), matrix.num_hyp());
  if (n == 0) {
    return SpeakerMapping();
  }
  // Maximize overlap = minimize negated overlap; padding rows/columns carry
  // zero cost and absorb the unmatched side.
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < matrix.num_ref(); ++i) {
    for (std::size_t j = 0; j < matrix.num_hyp(); ++j) {
      cost[i][j] = -matrix.at(i, j);
    }
  }
  const std::vector<int> row_to_col = hungarian_min(cost);
  std::vector<int> ref_to_hyp(matrix.num_ref(), -1);
  for (std::size_t i = 0; i < matrix.num_ref(); ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && static_cast<std::size_t>(j) < matrix.num_hyp()) {
      ref_to_hyp[i] = j;
    }
  }
  return finalize(matrix, ref_to_hyp);
}

SpeakerMapping assign_bruteforce(const OverlapMatrix& matrix) {
  const std::size_t num_ref = matrix.num_ref();
  const std::size_t num_hyp = matrix.num_hyp();
  if (num_ref == 0 || num_hyp == 0) {
    std::vector<int> none(num_ref, -1);
    return finalize(matrix, none);
  }

  const std::size_t small = std::min(num_ref, num_hyp);
  const std::size_t large = std::max(num_ref, num_hyp);
  if (small > 8) {
    throw std::invalid_argument("assign_bruteforce: more than 8 speakers on both sides");
  }
  double combinations = 1.0;
  for (std::size_t k = 0; k < small; ++k) {
    combinations *= static_cast<double>(large - k);
  }
  if (combinations > 1e8) {
    throw std::invalid_argument("assign_bruteforce: search space too large");
  }

  // Enumerate injections from the smaller side into the larger one, in
  // lexicographic order; the first assignment achieving the maximum wins.
  const bool ref_small = num_ref <= num_hyp;
  const std::size_t rows = ref_small ? num_ref : num_hyp;
  const std::size_t cols = ref_small ? num_hyp : num_ref;
  auto cell = [&](std::size_t r, std::size_t c) {
    return ref_small ? matrix.at(r, c) : matrix.at(c, r);
  };

  std::vector<int> current(rows, -1);
  std::vector<int> best(rows, -1);
  std::vector<char> used(cols, 0);
  double best_total = -1.0;

  auto recurse = [&](auto&& self, std::size_t row, double total) -> void {
    if (row == rows) {
      if (total > best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      current[row] = static_cast<int>(c);
      self(self, row + 1, total + cell(row, c));
      used[c] = 0;
    }
  };
  recurse(recurse, 0, 0.0);

  std::vector<int> ref_to_hyp(num_ref, -1);
  if (ref_small) {
    for (std::size_t i = 0; i < rows; ++i) {
      ref_to_hyp[i] = best[i];
    }
  } else {
    for (std::size_t j = 0; j < rows; ++j) {
      if (best[j] >= 0) {
        ref_to_hyp[best[j]] = static_cast<int>(j);
      }
    }
  }
  return finalize(matrix, ref_to_hyp);
}

}  // namespace diar
