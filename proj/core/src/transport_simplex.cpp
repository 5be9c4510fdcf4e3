// Exact solvers behind solve_ot: a transportation simplex on the bipartite
// supply/demand network and an O(n^3) Hungarian method for assignments.

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "wreach/errors.hpp"
#include "wreach/transport.hpp"

namespace wreach::detail {

namespace {

struct Cell {
  int i;
  int j;
};

// Node ids: rows are 0..n-1, columns are n..n+m-1.
class BasisTree {
 public:
  BasisTree(int n, int m) : n_(n), m_(m), adj_(n + m) {}

  void rebuild(const std::vector<Cell>& basis) {
    for (auto& a : adj_) a.clear();
    for (const Cell& c : basis) {
      adj_[c.i].push_back(n_ + c.j);
      adj_[n_ + c.j].push_back(c.i);
    }
  }

  // u_i + v_j = c_ij on every basic cell, u_0 = 0.
  void potentials(const Matrix& c, std::vector<double>& u, std::vector<double>& v) {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<int> stack{0};
    u.assign(n_, 0.0);
    v.assign(m_, 0.0);
    seen[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int next : adj_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        if (node < n_) {
          const int j = next - n_;
          v[j] = c(node, j) - u[node];
        } else {
          const int j = node - n_;
          u[next] = c(next, j) - v[j];
        }
        stack.push_back(next);
      }
    }
  }

  // Tree path from row `i` to column `j`, as the list of cells walked from
  // column j back to row i.
  std::vector<Cell> path(int i, int j) {
    std::vector<int> parent(adj_.size(), -1);
    std::vector<int> queue{i};
    parent[i] = i;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int node = queue[head];
      if (node == n_ + j) break;
      for (int next : adj_[node]) {
        if (parent[next] != -1) continue;
        parent[next] = node;
        queue.push_back(next);
      }
    }
    std::vector<Cell> cells;
    int node = n_ + j;
    while (node != i) {
      const int par = parent[node];
      if (par < 0) throw Error("transportation simplex: basis is not a spanning tree");
      cells.push_back(node < n_ ? Cell{node, par - n_} : Cell{par, node - n_});
      node = par;
    }
    return cells;
  }

 private:
  int n_;
  int m_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace

Matrix transportation_simplex(const Vector& a, const Vector& b, const Matrix& c) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (n == 0 || m == 0 || c.rows() != n || c.cols() != m) {
    throw DimensionError("transportation simplex: inconsistent sizes");
  }

  Matrix x = Matrix::Zero(n, m);
  std::vector<Cell> basis;
  basis.reserve(n + m - 1);

  // Northwest corner start; always yields n+m-1 cells forming a staircase tree.
  {
    Vector ra = a;
    Vector rb = b;
    int i = 0;
    int j = 0;
    for (;;) {
      const double f = std::max(0.0, std::min(ra(i), rb(j)));
      x(i, j) = f;
      ra(i) -= f;
      rb(j) -= f;
      basis.push_back({i, j});
      if (i == n - 1 && j == m - 1) break;
      if (i == n - 1) {
        ++j;
      } else if (j == m - 1) {
        ++i;
      } else if (ra(i) <= rb(j)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::vector<char> is_basic(n * m, 0);
  for (const Cell& cell : basis) is_basic[cell.i * m + cell.j] = 1;

  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  const double eps = 1e-11 * scale;
  const long max_pivots = 200L * (n + m) * (n + m) + 1000L;
  // After this many consecutive degenerate pivots switch to Bland's rule,
  // which cannot cycle.
  const int bland_after = 4 * (n + m);

  BasisTree tree(n, m);
  std::vector<double> u;
  std::vector<double> v;
  int degenerate_run = 0;

  for (long pivot = 0; pivot < max_pivots; ++pivot) {
    tree.rebuild(basis);
    tree.potentials(c, u, v);

    const bool bland = degenerate_run >= bland_after;
    int ie = -1;
    int je = -1;
    double best = -eps;
    for (int i = 0; i < n && !(bland && ie >= 0); ++i) {
      for (int j = 0; j < m; ++j) {
        if (is_basic[i * m + j]) continue;
        const double r = c(i, j) - u[i] - v[j];
        if (r < best) {
          best = r;
          ie = i;
          je = j;
          if (bland) break;
        }
      }
    }
    if (ie < 0) return x;

    // Cycle: entering cell (+), then path cells alternating -, +, -, ...
    const std::vector<Cell> path = tree.path(ie, je);
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path.size();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& cell = path[k];
      const double f = x(cell.i, cell.j);
      bool take = f < theta;
      if (bland && f == theta && leave < path.size()) {
        const Cell& cur = path[leave];
        take = cell.i * m + cell.j < cur.i * m + cur.j;
      }
      if (take) {
        theta = f;
        leave = k;
      }
    }

    x(ie, je) = theta;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const Cell& cell = path[k];
      if (k % 2 == 0) {
        x(cell.i, cell.j) -= theta;
      } else {
        x(cell.i, cell.j) += theta;
      }
    }
    const Cell out = path[leave];
    x(out.i, out.j) = 0.0;
    is_basic[out.i * m + out.j] = 0;
    is_basic[ie * m + je] = 1;
    for (Cell& cell : basis) {
      if (cell.i == out.i && cell.j == out.j) {
        cell = {ie, je};
        break;
      }
    }
    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
  }
  throw Error("transportation simplex: pivot limit reached");
}

std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionError("hungarian: cost matrix must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0);
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
          u[p[static_cast<std::size_t>(j)]] += delta;
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

  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) {
      assignment[p[static_cast<std::size_t>(j)] - 1] = j - 1;
    }
  }
  return assignment;
}

}  // namespace wreach::detail
