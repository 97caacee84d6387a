#include "drcover/linalg.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace drcover {

namespace {

using BigInt = boost::multiprecision::cpp_int;

struct IntegerArith {
  using Value = std::int64_t;
  static bool pivotable(Value v) { return v == 1 || v == -1; }
  static Value inverse(Value v) { return v; }
  static Value mul(Value a, Value b) {
    Value out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw ArithmeticOverflow("integer elimination overflow");
    return out;
  }
  /// a - f*b
  static Value sub_mul(Value a, Value f, Value b) {
    Value out = 0;
    if (__builtin_sub_overflow(a, mul(f, b), &out))
      throw ArithmeticOverflow("integer elimination overflow");
    return out;
  }
  static Value negate(Value v) { return -v; }
};

struct ModArith {
  using Value = std::int64_t;
  std::int64_t p;
  bool pivotable(Value v) const { return v != 0; }
  Value inverse(Value v) const {
    Value result = 1, base = v % p, e = p - 2;
    while (e > 0) {
      if (e & 1) result = result * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return result;
  }
  Value mul(Value a, Value b) const { return a * b % p; }
  Value sub_mul(Value a, Value f, Value b) const { return ((a - f * b % p) % p + p) % p; }
  Value negate(Value v) const { return v == 0 ? 0 : p - v; }
};

/// Markowitz-style sparse Gaussian elimination. Only entries the arithmetic
/// calls pivotable are used as pivots (units of the ring), so every step is
/// invertible over the ring and preserves the cokernel.
template <class Arith>
class SparseEliminator {
 public:
  struct Pivot {
    std::uint32_t col;
    SparseRow row;  // frozen at pivot time
  };

  SparseEliminator(SparseMatrix m, Arith arith)
      : cols_(m.cols), rows_(std::move(m.rows)), arith_(arith) {
    active_.assign(rows_.size(), 1);
    eliminated_.assign(cols_, 0);
    col_rows_.resize(cols_);
    for (std::uint32_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].empty()) {
        active_[r] = 0;
        continue;
      }
      for (const auto& e : rows_[r]) col_rows_[e.col].push_back(r);
      update_candidate(r, true);
    }
  }

  void run() {
    while (!candidates_.empty()) {
      auto [weight, r] = *candidates_.begin();
      (void)weight;
      pivot_row(r);
    }
  }

  const std::vector<Pivot>& pivots() const { return pivots_; }
  bool eliminated(std::uint32_t c) const { return eliminated_[c] != 0; }
  std::vector<SparseRow> remaining_rows() const {
    std::vector<SparseRow> out;
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (active_[r]) out.push_back(rows_[r]);
    return out;
  }

 private:
  bool has_pivot(const SparseRow& row) const {
    return std::any_of(row.begin(), row.end(), [&](const SparseEntry& e) {
      return arith_.pivotable(e.value);
    });
  }

  void update_candidate(std::uint32_t r, bool insert) {
    if (insert && active_[r] && has_pivot(rows_[r]))
      candidates_.insert({static_cast<std::uint32_t>(rows_[r].size()), r});
  }

  void erase_candidate(std::uint32_t r) {
    candidates_.erase({static_cast<std::uint32_t>(rows_[r].size()), r});
  }

  static void remove_from(std::vector<std::uint32_t>& list, std::uint32_t r) {
    auto it = std::find(list.begin(), list.end(), r);
    if (it != list.end()) {
      *it = list.back();
      list.pop_back();
    }
  }

  void pivot_row(std::uint32_t i) {
    const SparseRow& prow = rows_[i];
    // Pivot column: fewest occupied rows, ties to the smaller column.
    std::uint32_t col = 0;
    std::size_t best = static_cast<std::size_t>(-1);
    std::int64_t a = 0;
    for (const auto& e : prow) {
      if (!arith_.pivotable(e.value)) continue;
      if (col_rows_[e.col].size() < best) {
        best = col_rows_[e.col].size();
        col = e.col;
        a = e.value;
      }
    }
    const std::int64_t inv = arith_.inverse(a);

    erase_candidate(i);
    active_[i] = 0;
    for (const auto& e : prow) remove_from(col_rows_[e.col], i);

    std::vector<std::uint32_t> targets = col_rows_[col];
    std::sort(targets.begin(), targets.end());
    for (std::uint32_t k : targets) eliminate(k, prow, col, inv);

    eliminated_[col] = 1;
    pivots_.push_back({col, prow});
  }

  void eliminate(std::uint32_t k, const SparseRow& prow, std::uint32_t col, std::int64_t inv) {
    SparseRow& row = rows_[k];
    auto at = std::lower_bound(row.begin(), row.end(), col,
                               [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
    const std::int64_t f = arith_.mul(at->value, inv);
    erase_candidate(k);

    SparseRow merged;
    merged.reserve(row.size() + prow.size());
    std::size_t x = 0, y = 0;
    while (x < row.size() || y < prow.size()) {
      if (y == prow.size() || (x < row.size() && row[x].col < prow[y].col)) {
        merged.push_back(row[x++]);
      } else if (x == row.size() || prow[y].col < row[x].col) {
        std::int64_t v = arith_.sub_mul(0, f, prow[y].value);
        if (v != 0) {
          merged.push_back({prow[y].col, v});
          col_rows_[prow[y].col].push_back(k);
        }
        ++y;
      } else {
        std::int64_t v = arith_.sub_mul(row[x].value, f, prow[y].value);
        if (v != 0) merged.push_back({row[x].col, v});
        else remove_from(col_rows_[row[x].col], k);
        ++x;
        ++y;
      }
    }
    row = std::move(merged);
    if (row.empty()) active_[k] = 0;
    else update_candidate(k, true);
  }

  std::size_t cols_;
  std::vector<SparseRow> rows_;
  Arith arith_;
  std::vector<char> active_;
  std::vector<char> eliminated_;
  std::vector<std::vector<std::uint32_t>> col_rows_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> candidates_;
  std::vector<Pivot> pivots_;
};

/// Diagonalises a dense integer matrix by unimodular row and column
/// operations; returns the nonzero diagonal entries (absolute values).
std::vector<BigInt> diagonalise(std::vector<std::vector<BigInt>> a) {
  std::vector<BigInt> diag;
  const std::size_t m = a.size();
  const std::size_t n = m ? a[0].size() : 0;
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pr = m, pc = n;
      BigInt best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a[i][j] != 0 && (pr == m || abs(a[i][j]) < best)) {
            best = abs(a[i][j]);
            pr = i;
            pc = j;
          }
      if (pr == m) return diag;
      std::swap(a[t], a[pr]);
      for (auto& row : a) std::swap(row[t], row[pc]);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a[i][t] == 0) continue;
        BigInt q = a[i][t] / a[t][t];
        for (std::size_t j = t; j < n; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a[t][j] == 0) continue;
        BigInt q = a[t][j] / a[t][t];
        for (std::size_t i = t; i < m; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    diag.push_back(abs(a[t][t]));
  }
  return diag;
}

void append_prime_powers(std::uint64_t d, std::vector<std::uint64_t>& out) {
  for (std::uint64_t p = 2; p * p <= d; ++p) {
    if (d % p != 0) continue;
    std::uint64_t q = 1;
    while (d % p == 0) {
      d /= p;
      q *= p;
    }
    out.push_back(q);
  }
  if (d > 1) out.push_back(d);
}

bool is_prime_power_of(std::uint64_t q, std::uint64_t p) {
  if (q < p) return false;
  while (q % p == 0) q /= p;
  return q == 1;
}

SparseMatrix reduce_mod(const SparseMatrix& m, std::int64_t p) {
  SparseMatrix out;
  out.cols = m.cols;
  for (const auto& row : m.rows) {
    SparseRow r;
    for (const auto& e : row) {
      std::int64_t v = ((e.value % p) + p) % p;
      if (v != 0) r.push_back({e.col, v});
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::size_t InvariantFactors::p_rank(std::uint64_t p) const {
  return static_cast<std::size_t>(
      std::count_if(torsion.begin(), torsion.end(), [p](auto q) { return is_prime_power_of(q, p); }));
}

std::map<std::uint64_t, std::size_t> InvariantFactors::torsion_order() const {
  std::map<std::uint64_t, std::size_t> out;
  for (auto q : torsion) {
    for (std::uint64_t p = 2; p <= q; ++p) {
      if (q % p != 0) continue;
      while (q % p == 0) {
        q /= p;
        ++out[p];
      }
      break;
    }
  }
  return out;
}

std::string InvariantFactors::to_string() const {
  std::ostringstream os;
  os << "Z^" << free_rank;
  std::map<std::uint64_t, std::size_t> counts;
  for (auto q : torsion) ++counts[q];
  for (const auto& [q, e] : counts) os << " x C" << q << "^" << e;
  return os.str();
}

InvariantFactors cokernel_invariants(const SparseMatrix& m) {
  SparseEliminator<IntegerArith> elim(m, IntegerArith{});
  elim.run();

  std::vector<std::uint32_t> live_cols;
  for (std::uint32_t c = 0; c < m.cols; ++c)
    if (!elim.eliminated(c)) live_cols.push_back(c);

  auto rest = elim.remaining_rows();
  std::vector<std::uint32_t> used;
  for (const auto& row : rest)
    for (const auto& e : row) used.push_back(e.col);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  std::vector<std::vector<BigInt>> dense(rest.size(), std::vector<BigInt>(used.size()));
  for (std::size_t i = 0; i < rest.size(); ++i)
    for (const auto& e : rest[i]) {
      auto j = std::lower_bound(used.begin(), used.end(), e.col) - used.begin();
      dense[i][static_cast<std::size_t>(j)] = e.value;
    }
  auto diag = diagonalise(std::move(dense));

  InvariantFactors out;
  out.free_rank = live_cols.size() - diag.size();
  for (const auto& d : diag) {
    if (d == 1) continue;
    if (d > BigInt(std::numeric_limits<std::uint64_t>::max()))
      throw ArithmeticOverflow("elementary divisor too large to factor");
    append_prime_powers(static_cast<std::uint64_t>(d), out.torsion);
  }
  std::sort(out.torsion.begin(), out.torsion.end());
  return out;
}

std::size_t rank_mod_p(const SparseMatrix& m, std::uint32_t p) {
  SparseEliminator<ModArith> elim(reduce_mod(m, p), ModArith{p});
  elim.run();
  return elim.pivots().size();
}

std::vector<std::vector<std::uint32_t>> nullspace_mod_p(const SparseMatrix& m, std::uint32_t p) {
  ModArith arith{p};
  SparseEliminator<ModArith> elim(reduce_mod(m, p), arith);
  elim.run();
  std::vector<std::vector<std::uint32_t>> basis;
  for (std::uint32_t free_col = 0; free_col < m.cols; ++free_col) {
    if (elim.eliminated(free_col)) continue;
    std::vector<std::int64_t> x(m.cols, 0);
    x[free_col] = 1;
    const auto& pivots = elim.pivots();
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
      std::int64_t sum = 0, a = 0;
      for (const auto& e : it->row) {
        if (e.col == it->col) a = e.value;
        else sum = (sum + e.value * x[e.col]) % p;
      }
      x[it->col] = arith.mul(arith.negate(sum), arith.inverse(a));
    }
    basis.emplace_back(x.begin(), x.end());
  }
  return basis;
}

}  // namespace drcover
