//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/structure.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "sscreen/smiles.h"

namespace sscreen {
namespace {
bool is_carbon(const Atom &atom) {
  return atom.element == "C";
}

class ChainSearch {
public:
  explicit ChainSearch(const Molecule &mol)
      : mol_(mol), carbon_adj_(mol.size()), on_path_(mol.size(), 0) {
    for (int i = 0; i < mol.size(); ++i) {
      if (!is_carbon(mol.atom(i))) {
        continue;
      }
      carbons_.push_back(i);
      for (const Neighbor &nei: mol.neighbors(i)) {
        if (is_carbon(mol.atom(nei.atom))) {
          carbon_adj_[i].push_back(nei.atom);
        }
      }
      std::sort(carbon_adj_[i].begin(), carbon_adj_[i].end());
    }
  }

  // Every maximum-length path, oriented so that front <= back.
  std::vector<std::vector<int>> run() {
    if (static_cast<int>(carbons_.size()) > kMaxChainCarbons) {
      throw std::domain_error(
          "longest carbon chain search is limited to "
          + std::to_string(kMaxChainCarbons) + " carbons, molecule has "
          + std::to_string(carbons_.size()));
    }
    for (const int c: carbons_) {
      path_.push_back(c);
      on_path_[c] = 1;
      extend();
      on_path_[c] = 0;
      path_.pop_back();
    }
    return std::move(best_);
  }

private:
  int reachable_bound(int from) const {
    std::vector<char> seen(on_path_);
    std::vector<int> stack = { from };
    int count = 0;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      for (const int nxt: carbon_adj_[cur]) {
        if (seen[nxt] == 0) {
          seen[nxt] = 1;
          ++count;
          stack.push_back(nxt);
        }
      }
    }
    return count;
  }

  void record() {
    const int len = static_cast<int>(path_.size());
    if (len < best_len_ || path_.front() > path_.back()) {
      return;
    }
    if (len > best_len_) {
      best_len_ = len;
      best_.clear();
    }
    best_.push_back(path_);
  }

  void extend() {
    record();
    const int end = path_.back();
    if (static_cast<int>(path_.size()) + reachable_bound(end) < best_len_) {
      return;
    }
    for (const int nxt: carbon_adj_[end]) {
      if (on_path_[nxt] != 0) {
        continue;
      }
      on_path_[nxt] = 1;
      path_.push_back(nxt);
      extend();
      path_.pop_back();
      on_path_[nxt] = 0;
    }
  }

  const Molecule &mol_;
  std::vector<int> carbons_;
  std::vector<std::vector<int>> carbon_adj_;
  std::vector<char> on_path_;
  std::vector<int> path_;
  int best_len_ = 0;
  std::vector<std::vector<int>> best_;
};
}  // namespace

std::vector<int> distances_to_set(const Molecule &mol,
                                  std::span<const int> sources) {
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(mol.size(), kInf);
  std::queue<int> queue;
  for (const int s: sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push(s);
    }
  }
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop();
    for (const Neighbor &nei: mol.neighbors(cur)) {
      if (dist[nei.atom] == kInf) {
        dist[nei.atom] = dist[cur] + 1;
        queue.push(nei.atom);
      }
    }
  }
  return dist;
}

ChainResult analyze_chain(const Molecule &mol) {
  std::vector<std::vector<int>> candidates = ChainSearch(mol).run();
  ChainResult best;
  if (candidates.empty()) {
    return best;
  }

  int best_diameter = std::numeric_limits<int>::max();
  for (auto &path: candidates) {
    // Atoms in other components (counter-ions) are ignored.
    int d = 0;
    for (const int x: distances_to_set(mol, path)) {
      if (x != std::numeric_limits<int>::max()) {
        d = std::max(d, x);
      }
    }
    if (d < best_diameter || (d == best_diameter && path < best.chain)) {
      best_diameter = d;
      best.chain = std::move(path);
    }
  }
  best.length = static_cast<int>(best.chain.size());
  best.diameter = best_diameter;
  return best;
}

std::vector<int> longest_carbon_chain(const Molecule &mol) {
  return analyze_chain(mol).chain;
}

int diameter(const Molecule &mol) {
  const ChainResult result = analyze_chain(mol);
  if (result.chain.empty()) {
    throw std::domain_error("diameter is undefined for a molecule without carbon");
  }
  return result.diameter;
}

DiameterSummary diameter_report(std::span<const std::string> smiles) {
  DiameterSummary summary;
  long long total = 0;
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    const std::string &line = smiles[i];
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
      continue;
    }
    auto parsed = parse_smiles(line);
    if (!parsed) {
      summary.failures.push_back({ i + 1, line, parsed.error().format() });
      continue;
    }
    try {
      const ChainResult r = analyze_chain(parsed.value());
      if (r.chain.empty()) {
        throw std::domain_error("molecule has no carbon");
      }
      summary.rows.push_back({ line, r.length, r.diameter });
      ++summary.histogram[r.diameter];
      total += r.diameter;
    } catch (const std::domain_error &e) {
      summary.failures.push_back({ i + 1, line, e.what() });
    }
  }

  if (!summary.rows.empty()) {
    auto [lo, hi] = std::minmax_element(
        summary.rows.begin(), summary.rows.end(),
        [](const DiameterRow &a, const DiameterRow &b) {
          return a.diameter < b.diameter;
        });
    summary.min = lo->diameter;
    summary.max = hi->diameter;
    summary.mean = static_cast<double>(total)
                   / static_cast<double>(summary.rows.size());
  }
  return summary;
}

std::string diameter_csv(const DiameterSummary &summary) {
  std::ostringstream os;
  os << "smiles,chain_len,diameter\n";
  for (const DiameterRow &row: summary.rows) {
    os << row.smiles << ',' << row.chain_length << ',' << row.diameter << '\n';
  }
  return os.str();
}

std::string diameter_summary_text(const DiameterSummary &summary) {
  std::ostringstream os;
  os << "# molecules: " << summary.rows.size() << '\n';
  os << "# failures: " << summary.failures.size() << '\n';
  if (summary.rows.empty()) {
    return os.str();
  }

  char mean[32];
  std::snprintf(mean, sizeof(mean), "%.3f", summary.mean);
  os << "# diameter min=" << summary.min << " max=" << summary.max
     << " mean=" << mean << '\n';

  int peak = 0;
  for (const auto &[d, n]: summary.histogram) {
    peak = std::max(peak, n);
  }
  constexpr int kWidth = 40;
  for (const auto &[d, n]: summary.histogram) {
    const int bar = std::max(1, n * kWidth / peak);
    os << "# " << d << " | " << std::string(bar, '#') << ' ' << n << '\n';
  }
  return os.str();
}

}  // namespace sscreen
