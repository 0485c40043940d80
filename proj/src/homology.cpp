#include "hdk/homology.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <deque>
#include <map>
#include <queue>
#include <set>

namespace hdk {

namespace {

int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(Errc::Internal, "integer overflow in exact linear algebra");
  return r;
}

int64_t checked_sub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw Error(Errc::Internal, "integer overflow in exact linear algebra");
  return r;
}

}  // namespace

std::vector<int64_t> smith_normal_form(DenseMat m) {
  std::vector<int64_t> diag;
  int64_t t = 0;
  const int64_t R = m.rows, C = m.cols;
  while (t < R && t < C) {
    // pivot: minimal |nonzero| in the trailing submatrix
    int64_t pr = -1, pc = -1, best = 0;
    for (int64_t i = t; i < R; ++i)
      for (int64_t j = t; j < C; ++j) {
        int64_t v = m.at(i, j);
        if (v == 0) continue;
        int64_t av = v < 0 ? -v : v;
        if (pr < 0 || av < best) {
          pr = i;
          pc = j;
          best = av;
        }
      }
    if (pr < 0) break;
    if (pr != t)
      for (int64_t j = t; j < C; ++j) std::swap(m.at(t, j), m.at(pr, j));
    if (pc != t)
      for (int64_t i = t; i < R; ++i) std::swap(m.at(i, t), m.at(i, pc));

    bool again = true;
    while (again) {
      again = false;
      int64_t p = m.at(t, t);
      for (int64_t i = t + 1; i < R; ++i) {
        int64_t v = m.at(i, t);
        if (v == 0) continue;
        int64_t q = v / p;
        if (q != 0)
          for (int64_t j = t; j < C; ++j)
            m.at(i, j) = checked_sub(m.at(i, j), checked_mul(q, m.at(t, j)));
        if (m.at(i, t) != 0) {  // remainder becomes the smaller pivot
          for (int64_t j = t; j < C; ++j) std::swap(m.at(t, j), m.at(i, j));
          again = true;
          break;
        }
      }
      if (again) continue;
      for (int64_t j = t + 1; j < C; ++j) {
        int64_t v = m.at(t, j);
        if (v == 0) continue;
        int64_t q = v / p;
        if (q != 0)
          for (int64_t i = t; i < R; ++i)
            m.at(i, j) = checked_sub(m.at(i, j), checked_mul(q, m.at(i, t)));
        if (m.at(t, j) != 0) {
          for (int64_t i = t; i < R; ++i) std::swap(m.at(i, t), m.at(i, j));
          again = true;
          break;
        }
      }
      if (again) continue;
      // enforce the divisibility chain
      for (int64_t i = t + 1; i < R && !again; ++i)
        for (int64_t j = t + 1; j < C && !again; ++j)
          if (m.at(i, j) % p != 0) {
            for (int64_t jj = t; jj < C; ++jj)
              m.at(t, jj) = checked_sub(m.at(t, jj), checked_mul(-1, m.at(i, jj)));
            again = true;
          }
    }
    int64_t p = m.at(t, t);
    diag.push_back(p < 0 ? -p : p);
    ++t;
  }
  return diag;
}

int64_t rank_mod_p(const DenseMat& m, int64_t p) {
  std::vector<int32_t> a(m.a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t v = m.a[i] % p;
    a[i] = int32_t(v < 0 ? v + p : v);
  }
  int64_t rank = 0;
  int64_t R = m.rows, C = m.cols;
  std::vector<int64_t> pivot_rows;
  int64_t row = 0;
  for (int64_t col = 0; col < C && row < R; ++col) {
    int64_t pr = -1;
    for (int64_t i = row; i < R; ++i)
      if (a[size_t(i * C + col)] != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    if (pr != row)
      for (int64_t j = col; j < C; ++j) std::swap(a[size_t(row * C + j)], a[size_t(pr * C + j)]);
    int32_t inv = 1;  // inverse of the pivot mod p
    for (int32_t x = 1; x < p; ++x)
      if ((a[size_t(row * C + col)] * x) % p == 1) inv = x;
    for (int64_t i = row + 1; i < R; ++i) {
      int32_t f = int32_t((a[size_t(i * C + col)] * int64_t(inv)) % p);
      if (f == 0) continue;
      for (int64_t j = col; j < C; ++j) {
        int64_t v = a[size_t(i * C + j)] - int64_t(f) * a[size_t(row * C + j)];
        v %= p;
        a[size_t(i * C + j)] = int32_t(v < 0 ? v + p : v);
      }
    }
    ++row;
    ++rank;
  }
  return rank;
}

HomologyResult homology_rank(const std::vector<int64_t>& cell_counts,
                             const std::vector<DenseMat>& boundaries) {
  size_t dims = cell_counts.size();
  if (boundaries.size() + 1 != dims)
    throw Error(Errc::NotAChainComplex, "need one boundary matrix per positive dimension");
  for (size_t d = 0; d < boundaries.size(); ++d) {
    if (boundaries[d].rows != cell_counts[d] || boundaries[d].cols != cell_counts[d + 1])
      throw Error(Errc::NotAChainComplex, "boundary matrix shape mismatch");
  }
  for (size_t d = 0; d + 1 < boundaries.size(); ++d) {
    const DenseMat& A = boundaries[d];
    const DenseMat& B = boundaries[d + 1];
    for (int64_t i = 0; i < A.rows; ++i)
      for (int64_t j = 0; j < B.cols; ++j) {
        int64_t s = 0;
        for (int64_t k = 0; k < A.cols; ++k) s += checked_mul(A.at(i, k), B.at(k, j));
        if (s != 0) throw Error(Errc::NotAChainComplex, "boundary of boundary is nonzero");
      }
  }
  std::vector<int64_t> rank(dims + 1, 0);
  std::vector<std::vector<int64_t>> snf(dims);
  for (size_t d = 0; d < boundaries.size(); ++d) {
    snf[d + 1] = smith_normal_form(boundaries[d]);
    rank[d + 1] = int64_t(snf[d + 1].size());
  }
  HomologyResult res;
  res.betti.resize(dims);
  res.torsion.assign(dims, false);
  for (size_t d = 0; d < dims; ++d) {
    int64_t bd = d == 0 ? 0 : rank[d];
    int64_t bd1 = d + 1 < dims ? rank[d + 1] : 0;
    res.betti[d] = cell_counts[d] - bd - bd1;
    if (d + 1 < dims)
      for (int64_t e : snf[d + 1])
        if (e > 1) res.torsion[d] = true;
  }
  return res;
}

CollapseResult collapse(const ChainComplex& cx) {
  CollapseResult res;
  // coface counts per cell, built from the boundary lists one dim up
  std::array<std::vector<int32_t>, 4> cof_count;
  std::array<std::vector<int64_t>, 4> cof_off;
  std::array<std::vector<int32_t>, 4> cof_cell;
  for (int d = 0; d <= cx.top_dim; ++d) {
    res.alive[size_t(d)].assign(size_t(cx.counts[size_t(d)]), 1);
    res.alive_counts[size_t(d)] = cx.counts[size_t(d)];
  }
  for (int d = 0; d + 1 <= cx.top_dim; ++d) {
    int64_t n = cx.counts[size_t(d)];
    cof_count[size_t(d)].assign(size_t(n), 0);
    const auto& b = cx.bnd[size_t(d + 1)];
    for (int32_t c : b.cell) ++cof_count[size_t(d)][size_t(c)];
    cof_off[size_t(d)].assign(size_t(n + 1), 0);
    for (int64_t i = 0; i < n; ++i)
      cof_off[size_t(d)][size_t(i + 1)] = cof_off[size_t(d)][size_t(i)] + cof_count[size_t(d)][size_t(i)];
    cof_cell[size_t(d)].assign(size_t(cof_off[size_t(d)][size_t(n)]), 0);
    std::vector<int64_t> fill(cof_off[size_t(d)].begin(), cof_off[size_t(d)].end() - 1);
    for (int64_t up = 0; up < cx.counts[size_t(d + 1)]; ++up)
      for (int64_t k = b.off[size_t(up)]; k < b.off[size_t(up + 1)]; ++k) {
        int32_t c = b.cell[size_t(k)];
        cof_cell[size_t(d)][size_t(fill[size_t(c)]++)] = int32_t(up);
      }
  }

  // FIFO worklists peel the complex evenly, which reaches a spine far more
  // often than depth-first chewing
  std::array<std::deque<int32_t>, 4> queue;
  for (int d = 0; d < cx.top_dim; ++d)
    for (int64_t c = 0; c < cx.counts[size_t(d)]; ++c)
      if (cof_count[size_t(d)][size_t(c)] == 1) queue[size_t(d)].push_back(int32_t(c));

  while (true) {
    int d = -1;
    for (int dd = cx.top_dim - 1; dd >= 0; --dd)
      if (!queue[size_t(dd)].empty()) {
        d = dd;
        break;
      }
    if (d < 0) break;
    int32_t c = queue[size_t(d)].front();
    queue[size_t(d)].pop_front();
    if (!res.alive[size_t(d)][size_t(c)] || cof_count[size_t(d)][size_t(c)] != 1) continue;
    int32_t tau = -1;
    for (int64_t k = cof_off[size_t(d)][size_t(c)]; k < cof_off[size_t(d)][size_t(c + 1)]; ++k) {
      int32_t up = cof_cell[size_t(d)][size_t(k)];
      if (res.alive[size_t(d + 1)][size_t(up)]) {
        tau = up;
        break;
      }
    }
    if (tau < 0) throw Error(Errc::Internal, "collapse bookkeeping: free face without coface");
    res.alive[size_t(d)][size_t(c)] = 0;
    res.alive[size_t(d + 1)][size_t(tau)] = 0;
    --res.alive_counts[size_t(d)];
    --res.alive_counts[size_t(d + 1)];
    const auto& bt = cx.bnd[size_t(d + 1)];
    for (int64_t k = bt.off[size_t(tau)]; k < bt.off[size_t(tau + 1)]; ++k) {
      int32_t f = bt.cell[size_t(k)];
      if (f == c || !res.alive[size_t(d)][size_t(f)]) continue;
      if (--cof_count[size_t(d)][size_t(f)] == 1) queue[size_t(d)].push_back(f);
    }
    if (d >= 1) {
      const auto& bc = cx.bnd[size_t(d)];
      for (int64_t k = bc.off[size_t(c)]; k < bc.off[size_t(c + 1)]; ++k) {
        int32_t g = bc.cell[size_t(k)];
        if (!res.alive[size_t(d - 1)][size_t(g)]) continue;
        if (--cof_count[size_t(d - 1)][size_t(g)] == 1) queue[size_t(d - 1)].push_back(g);
      }
    }
  }
  return res;
}

namespace {

// Coreduction pass (dual to collapse): repeatedly removes pairs (a, b) with
// dim a = dim b + 1 where b is the only alive boundary cell of a and carries
// a unit coefficient. Pair removals preserve homology; the seeding removal of
// one 0-cell per component accounts for one Z in H0 each, so Betti numbers in
// positive dimensions are read off the surviving core and betti[0] is the
// component count.
int64_t coreduce(const ChainComplex& cx, CollapseResult& col) {
  // coface lists for cascading
  std::array<std::vector<int64_t>, 4> cof_off;
  std::array<std::vector<int32_t>, 4> cof_cell;
  for (int d = 0; d + 1 <= cx.top_dim; ++d) {
    int64_t n = cx.counts[size_t(d)];
    std::vector<int32_t> count(size_t(n), 0);
    const auto& b = cx.bnd[size_t(d + 1)];
    for (int32_t c : b.cell) ++count[size_t(c)];
    cof_off[size_t(d)].assign(size_t(n + 1), 0);
    for (int64_t i = 0; i < n; ++i) cof_off[size_t(d)][size_t(i + 1)] = cof_off[size_t(d)][size_t(i)] + count[size_t(i)];
    cof_cell[size_t(d)].assign(size_t(cof_off[size_t(d)][size_t(n)]), 0);
    std::vector<int64_t> fill(cof_off[size_t(d)].begin(), cof_off[size_t(d)].end() - 1);
    for (int64_t up = 0; up < cx.counts[size_t(d + 1)]; ++up)
      for (int64_t k = b.off[size_t(up)]; k < b.off[size_t(up + 1)]; ++k)
        cof_cell[size_t(d)][size_t(fill[size_t(b.cell[size_t(k)])]++)] = int32_t(up);
  }

  // alive boundary entry counts per cell (dims >= 1)
  std::array<std::vector<int32_t>, 4> bcount;
  for (int d = 1; d <= cx.top_dim; ++d) {
    const auto& b = cx.bnd[size_t(d)];
    bcount[size_t(d)].assign(size_t(cx.counts[size_t(d)]), 0);
    for (int64_t c = 0; c < cx.counts[size_t(d)]; ++c) {
      int32_t n = 0;
      for (int64_t k = b.off[size_t(c)]; k < b.off[size_t(c + 1)]; ++k)
        n += col.alive[size_t(d - 1)][size_t(b.cell[size_t(k)])];
      bcount[size_t(d)][size_t(c)] = n;
    }
  }

  std::array<std::vector<int32_t>, 4> queue;
  auto kill_cell = [&](int d, int32_t c) {
    col.alive[size_t(d)][size_t(c)] = 0;
    --col.alive_counts[size_t(d)];
    if (d + 1 <= cx.top_dim) {
      for (int64_t k = cof_off[size_t(d)][size_t(c)]; k < cof_off[size_t(d)][size_t(c + 1)]; ++k) {
        int32_t up = cof_cell[size_t(d)][size_t(k)];
        if (!col.alive[size_t(d + 1)][size_t(up)]) continue;
        if (--bcount[size_t(d + 1)][size_t(up)] == 1) queue[size_t(d + 1)].push_back(up);
      }
    }
  };

  // seed: one alive 0-cell per component of the surviving 1-skeleton
  int64_t components = 0;
  {
    const size_t n0 = size_t(cx.counts[0]);
    std::vector<int32_t> parent(n0);
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = int32_t(i);
    std::function<int32_t(int32_t)> find = [&](int32_t x) {
      while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
      return x;
    };
    if (cx.top_dim >= 1) {
      const auto& b = cx.bnd[1];
      for (int64_t e = 0; e < cx.counts[1]; ++e) {
        if (!col.alive[1][size_t(e)]) continue;
        int32_t u = -1;
        for (int64_t k = b.off[size_t(e)]; k < b.off[size_t(e + 1)]; ++k) {
          int32_t v = b.cell[size_t(k)];
          if (!col.alive[0][size_t(v)]) continue;
          if (u < 0) u = v;
          else {
            int32_t ru = find(u), rv = find(v);
            if (ru != rv) parent[size_t(std::max(ru, rv))] = std::min(ru, rv);
          }
        }
      }
    }
    std::vector<char> seeded(size_t(n0), 0);
    for (int64_t v = 0; v < int64_t(n0); ++v) {
      if (!col.alive[0][size_t(v)]) continue;
      int32_t r = find(int32_t(v));
      if (seeded[size_t(r)]) continue;
      seeded[size_t(r)] = 1;
      ++components;
      kill_cell(0, int32_t(v));
    }
  }

  while (true) {
    int d = -1;
    for (int dd = 1; dd <= cx.top_dim; ++dd)
      if (!queue[size_t(dd)].empty()) {
        d = dd;
        break;
      }
    if (d < 0) break;
    int32_t a = queue[size_t(d)].back();
    queue[size_t(d)].pop_back();
    if (!col.alive[size_t(d)][size_t(a)] || bcount[size_t(d)][size_t(a)] != 1) continue;
    const auto& b = cx.bnd[size_t(d)];
    int32_t partner = -1;
    int8_t coef = 0;
    for (int64_t k = b.off[size_t(a)]; k < b.off[size_t(a + 1)]; ++k) {
      int32_t f = b.cell[size_t(k)];
      if (col.alive[size_t(d - 1)][size_t(f)]) {
        partner = f;
        coef = b.sign[size_t(k)];
        break;
      }
    }
    if (partner < 0) throw Error(Errc::Internal, "coreduction bookkeeping failure");
    if (coef != 1 && coef != -1) continue;  // non-unit pairing, leave for SNF
    col.alive[size_t(d)][size_t(a)] = 0;
    --col.alive_counts[size_t(d)];
    kill_cell(d - 1, partner);
  }
  return components;
}

// Sparse integer matrix supporting unit-pivot elimination. Pivoting on a
// +-1 entry clears its column with row operations; the pivot row and column
// can then be dropped, which preserves the Smith normal form class.
struct SparseMat {
  int64_t rows = 0, cols = 0;
  std::vector<std::map<int32_t, int64_t>> row_data;
  std::vector<std::set<int32_t>> col_rows;
  std::vector<char> row_alive, col_alive;

  void init(int64_t r, int64_t c) {
    rows = r;
    cols = c;
    row_data.assign(size_t(r), {});
    col_rows.assign(size_t(c), {});
    row_alive.assign(size_t(r), 1);
    col_alive.assign(size_t(c), 1);
  }

  void add(int32_t r, int32_t c, int64_t v) {
    if (v == 0) return;
    auto& m = row_data[size_t(r)];
    auto it = m.find(c);
    if (it == m.end()) {
      m.emplace(c, v);
      col_rows[size_t(c)].insert(r);
    } else {
      it->second += v;
      if (it->second == 0) {
        m.erase(it);
        col_rows[size_t(c)].erase(r);
      }
    }
  }

  int64_t eliminate_units() {
    // lazy min-heap on Markowitz cost (row fill * column fill) keeps the
    // fill-in and coefficient growth tame
    using Entry = std::tuple<int64_t, int32_t, int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    auto cost = [&](int32_t r, int32_t c) {
      return int64_t(row_data[size_t(r)].size() - 1) * int64_t(col_rows[size_t(c)].size() - 1);
    };
    auto push_if_unit = [&](int32_t r, int32_t c, int64_t v) {
      if (v == 1 || v == -1) heap.push({cost(r, c), r, c});
    };
    for (int32_t r = 0; r < rows; ++r)
      for (auto& [c, v] : row_data[size_t(r)]) push_if_unit(r, c, v);
    const int64_t kGrowthCap = int64_t(1) << 40;
    int64_t units = 0;
    while (!heap.empty()) {
      auto [k, r, c] = heap.top();
      heap.pop();
      if (!row_alive[size_t(r)] || !col_alive[size_t(c)]) continue;
      auto it = row_data[size_t(r)].find(c);
      if (it == row_data[size_t(r)].end() || (it->second != 1 && it->second != -1)) continue;
      int64_t now = cost(r, c);
      if (now > k) {  // stale priority, reconsider later
        heap.push({now, r, c});
        continue;
      }
      int64_t p = it->second;
      std::vector<std::pair<int32_t, int64_t>> pivot_row(row_data[size_t(r)].begin(),
                                                         row_data[size_t(r)].end());
      std::vector<int32_t> other_rows;
      for (int32_t r2 : col_rows[size_t(c)])
        if (r2 != r) other_rows.push_back(r2);
      // growth guard: leave explosive pivots for the dense stage
      bool safe = true;
      for (int32_t r2 : other_rows) {
        int64_t a = row_data[size_t(r2)].at(c);
        for (auto& [c2, v] : pivot_row) {
          int64_t delta;
          if (__builtin_mul_overflow(a, v, &delta) || delta > kGrowthCap || delta < -kGrowthCap)
            safe = false;
        }
      }
      if (!safe) continue;
      for (int32_t r2 : other_rows) {
        int64_t a = row_data[size_t(r2)].at(c);
        int64_t f = a * p;  // a / p since p is a unit
        for (auto& [c2, v] : pivot_row) {
          add(r2, int32_t(c2), -f * v);
          auto jt = row_data[size_t(r2)].find(c2);
          if (jt != row_data[size_t(r2)].end()) push_if_unit(r2, c2, jt->second);
        }
      }
      // drop the pivot row and column
      for (auto& [c2, v] : row_data[size_t(r)]) col_rows[size_t(c2)].erase(r);
      row_data[size_t(r)].clear();
      row_alive[size_t(r)] = 0;
      col_alive[size_t(c)] = 0;
      ++units;
    }
    return units;
  }

  DenseMat residual_dense() const {
    std::vector<int32_t> rmap(size_t(rows), -1), cmap(size_t(cols), -1);
    int32_t nr = 0, nc = 0;
    for (int32_t r = 0; r < rows; ++r)
      if (row_alive[size_t(r)] && !row_data[size_t(r)].empty()) rmap[size_t(r)] = nr++;
    std::vector<char> col_used(size_t(cols), 0);
    for (int32_t r = 0; r < rows; ++r)
      if (row_alive[size_t(r)])
        for (auto& [c, v] : row_data[size_t(r)]) col_used[size_t(c)] = 1;
    for (int32_t c = 0; c < cols; ++c)
      if (col_alive[size_t(c)] && col_used[size_t(c)]) cmap[size_t(c)] = nc++;
    DenseMat m = DenseMat::zero(nr, nc);
    for (int32_t r = 0; r < rows; ++r) {
      if (!row_alive[size_t(r)] || rmap[size_t(r)] < 0) continue;
      for (auto& [c, v] : row_data[size_t(r)]) m.at(rmap[size_t(r)], cmap[size_t(c)]) = v;
    }
    return m;
  }
};

}  // namespace

HomologyResult homology_of_complex(const ChainComplex& cx) {
  CollapseResult col = collapse(cx);
  int64_t components = coreduce(cx, col);
  // compact surviving cells
  std::array<std::vector<int32_t>, 4> newid;
  for (int d = 0; d <= cx.top_dim; ++d) {
    newid[size_t(d)].assign(size_t(cx.counts[size_t(d)]), -1);
    int32_t next = 0;
    for (int64_t c = 0; c < cx.counts[size_t(d)]; ++c)
      if (col.alive[size_t(d)][size_t(c)]) newid[size_t(d)][size_t(c)] = next++;
  }
  std::vector<int64_t> counts;
  for (int d = 0; d <= cx.top_dim; ++d) counts.push_back(col.alive_counts[size_t(d)]);
  // sparse unit-pivot elimination per boundary matrix, then dense SNF on the
  // small residual; row/column operations preserve the Smith class
  std::vector<int64_t> zrank(size_t(cx.top_dim), 0);
  std::vector<std::vector<int64_t>> snfs(size_t(cx.top_dim));
  for (int d = 1; d <= cx.top_dim; ++d) {
    SparseMat sm;
    sm.init(col.alive_counts[size_t(d - 1)], col.alive_counts[size_t(d)]);
    const auto& b = cx.bnd[size_t(d)];
    for (int64_t cell = 0; cell < cx.counts[size_t(d)]; ++cell) {
      if (!col.alive[size_t(d)][size_t(cell)]) continue;
      int32_t cc = newid[size_t(d)][size_t(cell)];
      for (int64_t k = b.off[size_t(cell)]; k < b.off[size_t(cell + 1)]; ++k) {
        int32_t f = b.cell[size_t(k)];
        // entries into coreduced cells are dropped with the pair
        if (!col.alive[size_t(d - 1)][size_t(f)]) continue;
        sm.add(newid[size_t(d - 1)][size_t(f)], cc, b.sign[size_t(k)]);
      }
    }
    int64_t units = sm.eliminate_units();
    DenseMat residual = sm.residual_dense();
    if (residual.rows * residual.cols > 1'000'000)
      throw Error(Errc::Internal, "reduced chain complex too large for dense SNF");
    snfs[size_t(d - 1)] = smith_normal_form(residual);
    zrank[size_t(d - 1)] = units + int64_t(snfs[size_t(d - 1)].size());
    // GF(2)/GF(3) rank pre-pass against the SNF ranks (unit pivots are units
    // in every characteristic)
    for (int64_t p : {int64_t(2), int64_t(3)}) {
      int64_t rp = units + rank_mod_p(residual, p);
      if (rp > zrank[size_t(d - 1)])
        throw Error(Errc::Internal, "GF(p) rank exceeds rational rank");
      bool p_torsion = false;
      for (int64_t e : snfs[size_t(d - 1)])
        if (e % p == 0) p_torsion = true;
      if (!p_torsion && rp != zrank[size_t(d - 1)])
        throw Error(Errc::Internal, "GF(p) rank cross-check failed");
    }
  }
  HomologyResult res;
  res.betti.resize(size_t(cx.top_dim + 1));
  res.torsion.assign(size_t(cx.top_dim + 1), false);
  for (int d = 0; d <= cx.top_dim; ++d) {
    int64_t bd = d >= 1 ? zrank[size_t(d - 1)] : 0;
    int64_t bd1 = d < cx.top_dim ? zrank[size_t(d)] : 0;
    res.betti[size_t(d)] = counts[size_t(d)] - bd - bd1;
    if (d < cx.top_dim)
      for (int64_t e : snfs[size_t(d)])
        if (e > 1) res.torsion[size_t(d)] = true;
  }
  // the core computes reduced homology: its 0th Betti number must vanish and
  // the seeded component count is the true one
  if (res.betti[0] != 0)
    throw Error(Errc::Internal, "coreduction core has nonzero reduced b0");
  res.betti[0] = components;
  return res;
}

ChainComplex torus_complex(const GridDims& dims) {
  // standalone field with a throwaway labeling, used only for cell geometry
  LabelField f = LabelField::create(dims, std::vector<Label>(size_t(dims.voxels()), 0), 1);
  int64_t n = dims.voxels();
  ChainComplex cx;
  cx.top_dim = 3;
  cx.counts = {n, 3 * n, 3 * n, n};
  // d1: edge -> vertices
  {
    auto& b = cx.bnd[1];
    b.off.resize(size_t(3 * n + 1));
    b.cell.resize(size_t(6 * n));
    b.sign.resize(size_t(6 * n));
    for (int64_t e = 0; e < 3 * n; ++e) {
      auto vs = f.edge_vertices(e);
      b.off[size_t(e)] = 2 * e;
      b.cell[size_t(2 * e)] = int32_t(vs[1]);
      b.sign[size_t(2 * e)] = 1;
      b.cell[size_t(2 * e + 1)] = int32_t(vs[0]);
      b.sign[size_t(2 * e + 1)] = -1;
    }
    b.off[size_t(3 * n)] = 6 * n;
  }
  // d2: face -> edges, axes (b < c): +[edge_c at +e_b] -[edge_c] -[edge_b at +e_c] +[edge_b]
  {
    auto& b = cx.bnd[2];
    b.off.resize(size_t(3 * n + 1));
    b.cell.resize(size_t(12 * n));
    b.sign.resize(size_t(12 * n));
    for (int64_t fid = 0; fid < 3 * n; ++fid) {
      int axis = int(fid % 3);
      int64_t base = fid / 3;
      int bb = (axis + 1) % 3, cc = (axis + 2) % 3;
      int lo = std::min(bb, cc), hi = std::max(bb, cc);
      int64_t vlo = f.neighbor(base, lo, +1);
      int64_t vhi = f.neighbor(base, hi, +1);
      int64_t k = 4 * fid;
      b.off[size_t(fid)] = k;
      b.cell[size_t(k)] = int32_t(3 * vlo + hi);
      b.sign[size_t(k)] = 1;
      b.cell[size_t(k + 1)] = int32_t(3 * base + hi);
      b.sign[size_t(k + 1)] = -1;
      b.cell[size_t(k + 2)] = int32_t(3 * vhi + lo);
      b.sign[size_t(k + 2)] = -1;
      b.cell[size_t(k + 3)] = int32_t(3 * base + lo);
      b.sign[size_t(k + 3)] = 1;
    }
    b.off[size_t(3 * n)] = 12 * n;
  }
  // d3: voxel -> faces, axes (0,1,2): sign (-1)^a per axis
  {
    auto& b = cx.bnd[3];
    b.off.resize(size_t(n + 1));
    b.cell.resize(size_t(6 * n));
    b.sign.resize(size_t(6 * n));
    for (int64_t v = 0; v < n; ++v) {
      int64_t k = 6 * v;
      b.off[size_t(v)] = k;
      for (int a = 0; a < 3; ++a) {
        int8_t s = a % 2 == 0 ? int8_t(1) : int8_t(-1);
        int64_t upper = 3 * f.neighbor(v, a, +1) + a;
        int64_t lower = 3 * v + a;
        b.cell[size_t(k)] = int32_t(upper);
        b.sign[size_t(k)] = s;
        b.cell[size_t(k + 1)] = int32_t(lower);
        b.sign[size_t(k + 1)] = int8_t(-s);
        k += 2;
      }
    }
    b.off[size_t(n)] = 6 * n;
  }
  return cx;
}

int edge_runs(const std::array<Label, 4>& quads, Label label, std::array<int8_t, 4>& run_of,
              std::array<int8_t, 4>& run_start, std::array<int8_t, 4>& run_len) {
  run_of = {-1, -1, -1, -1};
  int count = 0;
  bool any = false, all = true;
  for (int i = 0; i < 4; ++i) {
    any |= quads[size_t(i)] == label;
    all &= quads[size_t(i)] == label;
  }
  if (!any) return 0;
  if (all) {
    run_start[0] = 0;
    run_len[0] = 4;
    for (int i = 0; i < 4; ++i) run_of[size_t(i)] = 0;
    return 1;
  }
  for (int s = 0; s < 4; ++s) {
    if (quads[size_t(s)] != label || quads[size_t((s + 3) & 3)] == label) continue;
    int len = 0;
    while (len < 4 && quads[size_t((s + len) & 3)] == label) ++len;
    run_start[size_t(count)] = int8_t(s);
    run_len[size_t(count)] = int8_t(len);
    for (int i = 0; i < len; ++i) run_of[size_t((s + i) & 3)] = int8_t(count);
    ++count;
  }
  return count;
}

int octant_components(const std::array<Label, 8>& oct, Label label, std::array<int8_t, 8>& comp_of,
                      std::array<uint8_t, 8>& comp_mask) {
  comp_of = {-1, -1, -1, -1, -1, -1, -1, -1};
  int count = 0;
  for (int s = 0; s < 8; ++s) {
    if (oct[size_t(s)] != label || comp_of[size_t(s)] >= 0) continue;
    uint8_t mask = 0;
    int stack[8], top = 0;
    stack[top++] = s;
    comp_of[size_t(s)] = int8_t(count);
    while (top) {
      int u = stack[--top];
      mask |= uint8_t(1u << u);
      for (int a = 0; a < 3; ++a) {
        int v = u ^ (1 << a);
        if (oct[size_t(v)] == label && comp_of[size_t(v)] < 0) {
          comp_of[size_t(v)] = int8_t(count);
          stack[top++] = v;
        }
      }
    }
    comp_mask[size_t(count)] = mask;
    ++count;
  }
  return count;
}

bool octant_component_is_disk(uint8_t mask) {
  if (mask == 0xFF) return true;  // interior vertex, link is the whole sphere
  if (mask == 0) return false;
  auto in = [&](int s) { return (mask >> s) & 1; };
  // fan contiguity around each of the 6 directions
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    for (int sign = 0; sign < 2; ++sign) {
      int cyc[4];
      int order[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      for (int i = 0; i < 4; ++i)
        cyc[i] = (sign << a) | (order[i][0] << b) | (order[i][1] << c);
      int transitions = 0;
      for (int i = 0; i < 4; ++i) transitions += in(cyc[i]) != in(cyc[(i + 1) & 3]);
      if (transitions > 2) return false;
    }
  }
  // Euler characteristic of the closed octant region on the sphere
  int F = __builtin_popcount(mask);
  int V = 0;
  for (int a = 0; a < 3; ++a)
    for (int sign = 0; sign < 2; ++sign) {
      bool touch = false;
      for (int s = 0; s < 8; ++s)
        if (((s >> a) & 1) == sign && in(s)) touch = true;
      V += touch;
    }
  int E = 0;
  for (int s = 0; s < 8; ++s)
    for (int a = 0; a < 3; ++a) {
      int u = s ^ (1 << a);
      if (u < s) continue;
      if (in(s) || in(u)) ++E;
    }
  return V - E + F == 1;
}

int32_t RegionComplex::edge_cell_for(const LabelField& f, int64_t edge, int64_t quadrant_voxel) const {
  auto quads = f.edge_quadrants(edge);
  std::array<Label, 4> ql{};
  int qi = -1;
  for (int i = 0; i < 4; ++i) {
    ql[size_t(i)] = f.label_at(quads[size_t(i)]);
    if (quads[size_t(i)] == quadrant_voxel) qi = i;
  }
  if (qi < 0) throw Error(Errc::Internal, "voxel is not a quadrant of the edge");
  std::array<int8_t, 4> run_of{}, rs{}, rl{};
  edge_runs(ql, label, run_of, rs, rl);
  if (run_of[size_t(qi)] < 0) throw Error(Errc::Internal, "quadrant not in the region");
  return edge_first_cell[size_t(edge)] + run_of[size_t(qi)];
}

int32_t RegionComplex::vertex_cell_for(const LabelField& f, int64_t vertex, int64_t octant_voxel) const {
  auto oct = f.vertex_octants(vertex);
  std::array<Label, 8> ol{};
  int si = -1;
  for (int s = 0; s < 8; ++s) {
    ol[size_t(s)] = f.label_at(oct[size_t(s)]);
    if (oct[size_t(s)] == octant_voxel) si = s;
  }
  if (si < 0) throw Error(Errc::Internal, "voxel is not an octant of the vertex");
  std::array<int8_t, 8> comp_of{};
  std::array<uint8_t, 8> comp_mask{};
  octant_components(ol, label, comp_of, comp_mask);
  if (comp_of[size_t(si)] < 0) throw Error(Errc::Internal, "octant not in the region");
  return vertex_first_cell[size_t(vertex)] + comp_of[size_t(si)];
}

RegionComplex build_region_complex(const LabelField& field, Label label) {
  int64_t n = field.dims().voxels();
  RegionComplex rc;
  rc.label = label;
  rc.face_lower_cell.assign(size_t(3 * n), -1);
  rc.face_upper_cell.assign(size_t(3 * n), -1);
  rc.edge_first_cell.assign(size_t(3 * n), -1);
  rc.vertex_first_cell.assign(size_t(n), -1);

  for (int64_t v = 0; v < n; ++v)
    if (field.label_at(v) == label) rc.cell3_voxel.push_back(v);
  std::vector<int32_t> vox_cell(size_t(n), -1);
  for (size_t i = 0; i < rc.cell3_voxel.size(); ++i)
    vox_cell[size_t(rc.cell3_voxel[i])] = int32_t(i);

  for (int64_t fid = 0; fid < 3 * n; ++fid) {
    auto sides = field.face_sides(fid);
    bool lo = field.label_at(sides[0]) == label;
    bool hi = field.label_at(sides[1]) == label;
    if (!lo && !hi) continue;
    int32_t id = int32_t(rc.cell2_face.size());
    rc.cell2_face.push_back(fid);
    if (lo && hi) {
      rc.cell2_side.push_back(-1);
      rc.face_lower_cell[size_t(fid)] = id;
      rc.face_upper_cell[size_t(fid)] = id;
    } else if (lo) {
      rc.cell2_side.push_back(sides[0]);
      rc.face_lower_cell[size_t(fid)] = id;
    } else {
      rc.cell2_side.push_back(sides[1]);
      rc.face_upper_cell[size_t(fid)] = id;
    }
  }

  for (int64_t e = 0; e < 3 * n; ++e) {
    auto quads = field.edge_quadrants(e);
    std::array<Label, 4> ql{};
    for (int i = 0; i < 4; ++i) ql[size_t(i)] = field.label_at(quads[size_t(i)]);
    std::array<int8_t, 4> run_of{}, rs{}, rl{};
    int rn = edge_runs(ql, label, run_of, rs, rl);
    if (rn == 0) continue;
    rc.edge_first_cell[size_t(e)] = int32_t(rc.cell1_edge.size());
    for (int r = 0; r < rn; ++r) {
      rc.cell1_edge.push_back(e);
      rc.cell1_start.push_back(rs[size_t(r)]);
      rc.cell1_len.push_back(rl[size_t(r)]);
    }
  }

  for (int64_t v = 0; v < n; ++v) {
    auto oct = field.vertex_octants(v);
    std::array<Label, 8> ol{};
    for (int s = 0; s < 8; ++s) ol[size_t(s)] = field.label_at(oct[size_t(s)]);
    std::array<int8_t, 8> comp_of{};
    std::array<uint8_t, 8> comp_mask{};
    int cn = octant_components(ol, label, comp_of, comp_mask);
    if (cn == 0) continue;
    rc.vertex_first_cell[size_t(v)] = int32_t(rc.cell0_vertex.size());
    for (int c = 0; c < cn; ++c) {
      rc.cell0_vertex.push_back(v);
      rc.cell0_mask.push_back(comp_mask[size_t(c)]);
    }
  }

  ChainComplex& cx = rc.cx;
  cx.top_dim = 3;
  cx.counts = {int64_t(rc.cell0_vertex.size()), int64_t(rc.cell1_edge.size()),
               int64_t(rc.cell2_face.size()), int64_t(rc.cell3_voxel.size())};

  // voxel boundaries
  {
    auto& b = cx.bnd[3];
    int64_t m = cx.counts[3];
    b.off.resize(size_t(m + 1));
    b.cell.resize(size_t(6 * m));
    b.sign.resize(size_t(6 * m));
    for (int64_t i = 0; i < m; ++i) {
      int64_t v = rc.cell3_voxel[size_t(i)];
      int64_t k = 6 * i;
      b.off[size_t(i)] = k;
      for (int a = 0; a < 3; ++a) {
        int8_t s = a % 2 == 0 ? int8_t(1) : int8_t(-1);
        int64_t f_lo = 3 * v + a;                             // v is the upper side
        int64_t f_up = 3 * field.neighbor(v, a, +1) + a;      // v is the lower side
        int32_t up_cell = rc.face_lower_cell[size_t(f_up)];
        int32_t lo_cell = rc.face_upper_cell[size_t(f_lo)];
        if (up_cell < 0 || lo_cell < 0) throw Error(Errc::Internal, "missing face cell");
        b.cell[size_t(k)] = up_cell;
        b.sign[size_t(k)] = s;
        b.cell[size_t(k + 1)] = lo_cell;
        b.sign[size_t(k + 1)] = int8_t(-s);
        k += 2;
      }
    }
    b.off[size_t(m)] = 6 * m;
  }
  // face boundaries
  {
    auto& b = cx.bnd[2];
    int64_t m = cx.counts[2];
    b.off.resize(size_t(m + 1));
    b.cell.resize(size_t(4 * m));
    b.sign.resize(size_t(4 * m));
    for (int64_t i = 0; i < m; ++i) {
      int64_t fid = rc.cell2_face[size_t(i)];
      int axis = int(fid % 3);
      int64_t base = fid / 3;
      int64_t side = rc.cell2_side[size_t(i)] >= 0 ? rc.cell2_side[size_t(i)] : base;
      int bb = (axis + 1) % 3, cc = (axis + 2) % 3;
      int lo = std::min(bb, cc), hi = std::max(bb, cc);
      int64_t vlo = field.neighbor(base, lo, +1);
      int64_t vhi = field.neighbor(base, hi, +1);
      struct Ref {
        int64_t edge;
        int8_t sign;
      } refs[4] = {
          {3 * vlo + hi, 1}, {3 * base + hi, -1}, {3 * vhi + lo, -1}, {3 * base + lo, 1}};
      int64_t k = 4 * i;
      b.off[size_t(i)] = k;
      for (auto& r : refs) {
        // the side voxel is a quadrant of every boundary edge of its face
        b.cell[size_t(k)] = rc.edge_cell_for(field, r.edge, side);
        b.sign[size_t(k)] = r.sign;
        ++k;
      }
    }
    b.off[size_t(m)] = 4 * m;
  }
  // edge boundaries
  {
    auto& b = cx.bnd[1];
    int64_t m = cx.counts[1];
    b.off.resize(size_t(m + 1));
    b.cell.resize(size_t(2 * m));
    b.sign.resize(size_t(2 * m));
    for (int64_t i = 0; i < m; ++i) {
      int64_t e = rc.cell1_edge[size_t(i)];
      auto quads = field.edge_quadrants(e);
      int64_t run_voxel = quads[size_t(rc.cell1_start[size_t(i)])];
      auto vs = field.edge_vertices(e);
      b.off[size_t(i)] = 2 * i;
      b.cell[size_t(2 * i)] = rc.vertex_cell_for(field, vs[1], run_voxel);
      b.sign[size_t(2 * i)] = 1;
      b.cell[size_t(2 * i + 1)] = rc.vertex_cell_for(field, vs[0], run_voxel);
      b.sign[size_t(2 * i + 1)] = -1;
    }
    b.off[size_t(m)] = 2 * m;
  }
  return rc;
}

SectorComplex build_sector_complex(const StructureCache& cache, const SectorComponent& comp) {
  const LabelField& f = cache.field();
  SectorComplex sc;
  const auto& faces = comp.faces;  // sorted

  // 1-cells from (edge, face) germs
  struct Germ {
    int64_t edge;
    int64_t face;
    int32_t cell;
  };
  std::vector<Germ> germs;
  germs.reserve(faces.size() * 4);
  for (int64_t fid : faces)
    for (int64_t e : f.face_edges(fid)) germs.push_back({e, fid, -1});
  std::sort(germs.begin(), germs.end(), [](const Germ& a, const Germ& b) {
    return std::tie(a.edge, a.face) < std::tie(b.edge, b.face);
  });
  for (size_t i = 0; i < germs.size();) {
    size_t j = i;
    while (j < germs.size() && germs[j].edge == germs[i].edge) ++j;
    bool glue = cache.edges()[size_t(germs[i].edge)] == EdgeClass::Surface;
    if (glue && j - i != 2)
      throw Error(Errc::Internal, "Surface edge without exactly two member germs");
    if (glue) {
      int32_t id = int32_t(sc.cell1_edge.size());
      sc.cell1_edge.push_back(germs[i].edge);
      sc.cell1_face.push_back(germs[i].face);
      sc.cell1_boundary.push_back(0);
      germs[i].cell = id;
      germs[i + 1].cell = id;
    } else {
      for (size_t k = i; k < j; ++k) {
        int32_t id = int32_t(sc.cell1_edge.size());
        sc.cell1_edge.push_back(germs[k].edge);
        sc.cell1_face.push_back(germs[k].face);
        sc.cell1_boundary.push_back(1);
        germs[k].cell = id;
      }
    }
    i = j;
  }
  auto germ_cell = [&](int64_t edge, int64_t fid) {
    auto it = std::lower_bound(germs.begin(), germs.end(), std::make_pair(edge, fid),
                               [](const Germ& g, const std::pair<int64_t, int64_t>& key) {
                                 return std::tie(g.edge, g.face) < std::tie(key.first, key.second);
                               });
    if (it == germs.end() || it->edge != edge || it->face != fid)
      throw Error(Errc::Internal, "missing edge germ");
    return it->cell;
  };

  // 0-cells: corner germs glued through shared 1-cells around each vertex
  struct Corner {
    int64_t vertex;
    int64_t face;
    int32_t cell;
  };
  std::vector<Corner> corners;
  corners.reserve(faces.size() * 4);
  for (int64_t fid : faces)
    for (int64_t v : f.face_vertices(fid)) corners.push_back({v, fid, -1});
  std::sort(corners.begin(), corners.end(), [](const Corner& a, const Corner& b) {
    return std::tie(a.vertex, a.face) < std::tie(b.vertex, b.face);
  });
  auto corner_slot = [&](size_t lo, size_t hi, int64_t fid) {
    for (size_t k = lo; k < hi; ++k)
      if (corners[k].face == fid) return k;
    throw Error(Errc::Internal, "missing corner germ");
  };
  for (size_t i = 0; i < corners.size();) {
    size_t j = i;
    while (j < corners.size() && corners[j].vertex == corners[i].vertex) ++j;
    // union-find over the group's faces through shared glued edges at this vertex
    std::vector<int32_t> parent(j - i);
    for (size_t k = 0; k < parent.size(); ++k) parent[k] = int32_t(k);
    std::function<int32_t(int32_t)> find = [&](int32_t x) {
      while (parent[size_t(x)] != x) {
        parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
        x = parent[size_t(x)];
      }
      return x;
    };
    for (size_t k = i; k < j; ++k) {
      int64_t fid = corners[k].face;
      for (int64_t e : f.face_edges(fid)) {
        auto vs = f.edge_vertices(e);
        if (vs[0] != corners[i].vertex && vs[1] != corners[i].vertex) continue;
        if (cache.edges()[size_t(e)] != EdgeClass::Surface) continue;
        // the partner face across this glued edge
        size_t g0 = size_t(std::lower_bound(germs.begin(), germs.end(), e,
                                            [](const Germ& g, int64_t key) { return g.edge < key; }) -
                           germs.begin());
        for (size_t g = g0; g < germs.size() && germs[g].edge == e; ++g) {
          if (germs[g].face == fid) continue;
          size_t other = corner_slot(i, j, germs[g].face);
          int32_t ra = find(int32_t(k - i)), rb = find(int32_t(other - i));
          if (ra != rb) parent[size_t(std::max(ra, rb))] = std::min(ra, rb);
        }
      }
    }
    std::vector<int32_t> cell_of_root(j - i, -1);
    for (size_t k = i; k < j; ++k) {
      int32_t r = find(int32_t(k - i));
      if (cell_of_root[size_t(r)] < 0) {
        cell_of_root[size_t(r)] = int32_t(sc.cell0_vertex.size());
        sc.cell0_vertex.push_back(corners[i].vertex);
      }
      corners[k].cell = cell_of_root[size_t(r)];
    }
    i = j;
  }
  auto corner_cell = [&](int64_t vertex, int64_t fid) {
    auto it = std::lower_bound(corners.begin(), corners.end(), std::make_pair(vertex, fid),
                               [](const Corner& c, const std::pair<int64_t, int64_t>& key) {
                                 return std::tie(c.vertex, c.face) < std::tie(key.first, key.second);
                               });
    if (it == corners.end() || it->vertex != vertex || it->face != fid)
      throw Error(Errc::Internal, "missing corner cell");
    return it->cell;
  };

  ChainComplex& cx = sc.cx;
  cx.top_dim = 2;
  cx.counts = {int64_t(sc.cell0_vertex.size()), int64_t(sc.cell1_edge.size()),
               int64_t(faces.size()), 0};
  {
    auto& b = cx.bnd[2];
    int64_t m = int64_t(faces.size());
    b.off.resize(size_t(m + 1));
    b.cell.resize(size_t(4 * m));
    b.sign.resize(size_t(4 * m));
    for (int64_t i = 0; i < m; ++i) {
      int64_t fid = faces[size_t(i)];
      int axis = int(fid % 3);
      int64_t base = fid / 3;
      int bb = (axis + 1) % 3, cc = (axis + 2) % 3;
      int lo = std::min(bb, cc), hi = std::max(bb, cc);
      int64_t vlo = f.neighbor(base, lo, +1);
      int64_t vhi = f.neighbor(base, hi, +1);
      struct Ref {
        int64_t edge;
        int8_t sign;
      } refs[4] = {
          {3 * vlo + hi, 1}, {3 * base + hi, -1}, {3 * vhi + lo, -1}, {3 * base + lo, 1}};
      int64_t k = 4 * i;
      b.off[size_t(i)] = k;
      for (auto& r : refs) {
        b.cell[size_t(k)] = germ_cell(r.edge, fid);
        b.sign[size_t(k)] = r.sign;
        ++k;
      }
    }
    b.off[size_t(m)] = 4 * m;
  }
  {
    auto& b = cx.bnd[1];
    int64_t m = cx.counts[1];
    b.off.resize(size_t(m + 1));
    b.cell.resize(size_t(2 * m));
    b.sign.resize(size_t(2 * m));
    for (int64_t i = 0; i < m; ++i) {
      int64_t e = sc.cell1_edge[size_t(i)];
      int64_t fid = sc.cell1_face[size_t(i)];
      auto vs = f.edge_vertices(e);
      b.off[size_t(i)] = 2 * i;
      b.cell[size_t(2 * i)] = corner_cell(vs[1], fid);
      b.sign[size_t(2 * i)] = 1;
      b.cell[size_t(2 * i + 1)] = corner_cell(vs[0], fid);
      b.sign[size_t(2 * i + 1)] = -1;
    }
    b.off[size_t(m)] = 2 * m;
  }
  return sc;
}

}  // namespace hdk
