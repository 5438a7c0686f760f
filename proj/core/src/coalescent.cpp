#include "asmc/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace asmc {

CoalescenceIndicator CoalescenceIndicator::none(int n) {
  return CoalescenceIndicator{std::vector<std::uint8_t>(static_cast<std::size_t>(n + 1), 0)};
}

CoalescenceIndicator CoalescenceIndicator::single(int n, int level) {
  auto b = none(n);
  b.bits.at(static_cast<std::size_t>(level)) = 1;
  return b;
}

CoalescenceIndicator CoalescenceIndicator::from_mask(int n, std::uint64_t mask) {
  auto b = none(n);
  for (int p = 0; p <= n; ++p) b.bits[static_cast<std::size_t>(p)] = (mask >> p) & 1U;
  return b;
}

LambdaTable lambda_table_level0(std::size_t n_particles) {
  LambdaTable t;
  t.level = 0;
  t.n_particles = n_particles;
  t.values.assign(n_particles * n_particles, 1.0);
  for (std::size_t i = 0; i < n_particles; ++i) t.values[i * n_particles + i] = 0.0;
  return t;
}

void lambda_step(const LambdaTable& current, std::span<const Index> parents,
                 bool coalesce, LambdaTable& next) {
  const std::size_t n = current.n_particles;
  next.level = current.level + 1;
  next.n_particles = n;
  next.values.resize(n * n);
  const double* cur = current.values.data();
  double* out = next.values.data();

  if (!coalesce) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = cur + static_cast<std::size_t>(parents[i]) * n;
      const Index ai = parents[i];
      for (std::size_t j = 0; j < n; ++j) {
        const Index aj = parents[j];
        out[i * n + j] = (ai != aj) ? row[aj] : 0.0;
      }
    }
    return;
  }

  // row sums over k != a; the diagonal is zero so a full sum suffices
  std::vector<double> row_sum(n);
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += cur[a * n + k];
    if (s > kExactCountCeiling) {
      throw Error(ErrorCode::PrecisionLoss,
                  "lambda_dp: compatible-sequence count exceeds 2^53 at level " +
                      std::to_string(next.level));
    }
    row_sum[a] = s;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Index ai = parents[i];
    const double s = row_sum[ai];
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = (i != j && parents[j] == ai) ? s : 0.0;
    }
  }
}

void check_indicator(const Genealogy& genealogy, const CoalescenceIndicator& b) {
  if (b.n_levels() != genealogy.n_levels) {
    throw Error(ErrorCode::InvalidArgument,
                "coalescence indicator has " + std::to_string(b.bits.size()) +
                    " bits, genealogy needs " + std::to_string(genealogy.n_levels + 1));
  }
}

LambdaTable lambda_dp(const Genealogy& genealogy, const CoalescenceIndicator& b) {
  check_indicator(genealogy, b);
  LambdaTable current = lambda_table_level0(genealogy.n_particles);
  LambdaTable next;
  for (int p = 0; p < genealogy.n_levels; ++p) {
    const auto& parents = genealogy.ancestors[static_cast<std::size_t>(p)];
    if (parents.size() != genealogy.n_particles) {
      throw Error(ErrorCode::InvalidArgument, "lambda_dp: ancestor row has wrong length");
    }
    lambda_step(current, parents, b[static_cast<std::size_t>(p)], next);
    std::swap(current, next);
  }
  return current;
}

double coalescent_prefactor(std::size_t n_particles, int h) noexcept {
  const double n = static_cast<double>(n_particles);
  return std::exp(static_cast<double>(h - 1) * std::log(n) -
                  static_cast<double>(h + 1) * std::log(n - 1.0));
}

double lambda_contract(const LambdaTable& table, bool coalesce_last,
                       std::span<const double> pair_values) {
  const std::size_t n = table.n_particles;
  if (pair_values.size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "lambda_contract: pair matrix has wrong size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = table.values.data() + i * n;
    if (coalesce_last) {
      double row_total = 0.0;
      for (std::size_t j = 0; j < n; ++j) row_total += row[j];
      sum += row_total * pair_values[i * n + i];
    } else {
      for (std::size_t j = 0; j < n; ++j) sum += row[j] * pair_values[i * n + j];
    }
  }
  return sum;
}

double lambda_contract_product(const LambdaTable& table, bool coalesce_last,
                               std::span<const double> u, std::span<const double> v) {
  const std::size_t n = table.n_particles;
  if (u.size() != n || v.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "lambda_contract: value arrays have wrong size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = table.values.data() + i * n;
    double inner = 0.0;
    if (coalesce_last) {
      for (std::size_t j = 0; j < n; ++j) inner += row[j];
      sum += u[i] * v[i] * inner;
    } else {
      for (std::size_t j = 0; j < n; ++j) inner += row[j] * v[j];
      sum += u[i] * inner;
    }
  }
  return sum;
}

double term_by_term_sigma2_values(const Genealogy& genealogy,
                                  std::span<const double> values, Sigma2Target target) {
  const std::size_t n_particles = genealogy.n_particles;
  const int n = genealogy.n_levels;
  if (values.size() != n_particles) {
    throw Error(ErrorCode::InvalidArgument, "term_by_term_sigma2: value count != N");
  }
  std::vector<double> v(values.begin(), values.end());
  if (target == Sigma2Target::EtaCentered) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n_particles);
    for (double& x : v) x -= mean;
  }
  const double prefactor = coalescent_prefactor(n_particles, n);
  const auto bar = [&](const CoalescenceIndicator& b) {
    const LambdaTable t = lambda_dp(genealogy, b);
    return prefactor * lambda_contract_product(t, b[static_cast<std::size_t>(n)], v, v);
  };

  const double baseline = bar(CoalescenceIndicator::none(n));
  double sum = 0.0;
  for (int p = 0; p <= n; ++p) sum += bar(CoalescenceIndicator::single(n, p)) - baseline;
  if (target == Sigma2Target::Gamma) {
    const double mass = genealogy.normalizers.back();
    sum *= mass * mass;
  }
  return sum;
}

namespace {

struct DecompositionWalk {
  const Genealogy& genealogy;
  std::span<const double> pairs;
  std::vector<LambdaTable> tables;  // tables[p] = Lambda_p for the current prefix
  double log_n;
  double log_n1;
  double log_prefactor;
  double rhs = 0.0;

  void visit(int p, int zeros) {
    const int n = genealogy.n_levels;
    if (p == n) {
      for (int last = 0; last <= 1; ++last) {
        const int z = zeros + (last == 0 ? 1 : 0);
        const double weight =
            std::exp(log_prefactor + z * log_n1 - static_cast<double>(n + 1) * log_n);
        rhs += weight * lambda_contract(tables[static_cast<std::size_t>(n)], last == 1, pairs);
      }
      return;
    }
    const auto& parents = genealogy.ancestors[static_cast<std::size_t>(p)];
    for (int bit = 0; bit <= 1; ++bit) {
      lambda_step(tables[static_cast<std::size_t>(p)], parents, bit == 1,
                  tables[static_cast<std::size_t>(p + 1)]);
      visit(p + 1, zeros + (bit == 0 ? 1 : 0));
    }
  }
};

}  // namespace

DecompositionResult decomposition_check_pairs(const Genealogy& genealogy,
                                              std::span<const double> pair_values) {
  const int n = genealogy.n_levels;
  if (n > kMaxDecompositionLevels) {
    throw Error(ErrorCode::TooManyIndicators,
                "decomposition_check: 2^" + std::to_string(n + 1) +
                    " indicators exceed the enumeration cap (n <= 20)");
  }
  const std::size_t n_particles = genealogy.n_particles;
  if (pair_values.size() != n_particles * n_particles) {
    throw Error(ErrorCode::InvalidArgument, "decomposition_check: pair matrix has wrong size");
  }
  DecompositionResult result;
  double lhs = 0.0;
  for (double v : pair_values) lhs += v;
  result.lhs = lhs / static_cast<double>(n_particles * n_particles);

  const double nd = static_cast<double>(n_particles);
  DecompositionWalk walk{genealogy, pair_values,
                         std::vector<LambdaTable>(static_cast<std::size_t>(n + 1)),
                         std::log(nd), std::log(nd - 1.0),
                         static_cast<double>(n - 1) * std::log(nd) -
                             static_cast<double>(n + 1) * std::log(nd - 1.0)};
  walk.tables[0] = lambda_table_level0(n_particles);
  walk.visit(0, 0);
  result.rhs = walk.rhs;
  result.abs_gap = std::abs(result.lhs - result.rhs);
  return result;
}

}  // namespace asmc
