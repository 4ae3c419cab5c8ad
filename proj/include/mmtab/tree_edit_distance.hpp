#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace mmtab {

/// Rooted ordered tree stored as an adjacency list; node 0 is the root.
template <typename Label>
struct OrderedTree {
  struct Node {
    Label label;
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes;

  std::size_t size() const { return nodes.size(); }

  std::size_t add(Label label) {
    nodes.push_back(Node{std::move(label), {}});
    return nodes.size() - 1;
  }
  std::size_t add_child(std::size_t parent, Label label) {
    const std::size_t id = add(std::move(label));
    nodes[parent].children.push_back(id);
    return id;
  }
};

namespace detail {

/// Postorder numbering with leftmost-leaf indices and keyroots.
struct PostorderIndex {
  std::vector<std::size_t> node;  // postorder position -> node id
  std::vector<std::size_t> lml;   // postorder position -> leftmost leaf position
  std::vector<std::size_t> keyroots;

  template <typename Tree>
  explicit PostorderIndex(const Tree& t) {
    if (t.size() == 0) return;
    // iterative postorder; frames are (node id, next child)
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::vector<std::size_t> first_leaf_of_frame{0};
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& kids = t.nodes[id].children;
      if (next < kids.size()) {
        const std::size_t child = kids[next++];
        stack.emplace_back(child, 0);
        first_leaf_of_frame.push_back(node.size());
        continue;
      }
      lml.push_back(kids.empty() ? node.size() : first_leaf_of_frame.back());
      node.push_back(id);
      stack.pop_back();
      first_leaf_of_frame.pop_back();
    }
    std::vector<bool> seen(node.size(), false);
    for (std::size_t k = node.size(); k-- > 0;) {
      if (!seen[lml[k]]) {
        seen[lml[k]] = true;
        keyroots.push_back(k);
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }
};

}  // namespace detail

/// Ordered tree edit distance (Zhang-Shasha). `del(a_node)`, `ins(b_node)`
/// and `sub(a_node, b_node)` receive node references.
template <typename TreeA, typename TreeB, typename Del, typename Ins, typename Sub>
double tree_edit_distance(const TreeA& a, const TreeB& b, Del del, Ins ins, Sub sub) {
  const detail::PostorderIndex pa(a), pb(b);
  const std::size_t na = pa.node.size(), nb = pb.node.size();
  if (na == 0 || nb == 0) {
    double d = 0;
    for (auto id : pa.node) d += del(a.nodes[id]);
    for (auto id : pb.node) d += ins(b.nodes[id]);
    return d;
  }
  std::vector<double> td(na * nb, 0.0);
  std::vector<double> fd;
  for (std::size_t i : pa.keyroots) {
    for (std::size_t j : pb.keyroots) {
      const std::size_t li = pa.lml[i], lj = pb.lml[j];
      const std::size_t rows = i - li + 2, cols = j - lj + 2;
      fd.assign(rows * cols, 0.0);
      auto at = [&](std::size_t x, std::size_t y) -> double& { return fd[x * cols + y]; };
      for (std::size_t x = 1; x < rows; ++x) at(x, 0) = at(x - 1, 0) + del(a.nodes[pa.node[li + x - 1]]);
      for (std::size_t y = 1; y < cols; ++y) at(0, y) = at(0, y - 1) + ins(b.nodes[pb.node[lj + y - 1]]);
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t ia = li + x - 1;
        const auto& node_a = a.nodes[pa.node[ia]];
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t jb = lj + y - 1;
          const auto& node_b = b.nodes[pb.node[jb]];
          const double drop = at(x - 1, y) + del(node_a);
          const double add = at(x, y - 1) + ins(node_b);
          if (pa.lml[ia] == li && pb.lml[jb] == lj) {
            const double keep = at(x - 1, y - 1) + sub(node_a, node_b);
            at(x, y) = std::min({drop, add, keep});
            td[ia * nb + jb] = at(x, y);
          } else {
            const std::size_t px = pa.lml[ia] - li, py = pb.lml[jb] - lj;
            at(x, y) = std::min({drop, add, at(px, py) + td[ia * nb + jb]});
          }
        }
      }
    }
  }
  return td[(na - 1) * nb + (nb - 1)];
}

}  // namespace mmtab
